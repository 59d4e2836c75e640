//! Iterated cut / solve / reweight driver and solution lifting.
//!
//! Each iteration picks a vertex cut `K` of the current instance, tabulates
//! the best `V2` value for every fixing of `K`, fits that table onto `K`, and
//! drops `V2`. Vertex labels in the trace always refer to the original
//! instance; the working instance is relabeled compactly after each step.

use serde::{Deserialize, Serialize};

use crate::cutset::{choose_cut, CutPartition, CutStrategy};
use crate::error::{invalid, Error, Result};
use crate::graph::WeightedGraph;
use crate::instance::Instance;
use crate::qubo::Bitstring;
use crate::reweight::{apply_reweight, reweight, ReweightMode, ReweightResult};
use crate::rng;
use crate::subsolver::{build_table, s_index, BackendChoice, SubproblemTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompConfig {
    /// Cuts of this size or larger are not used.
    pub m_cut: usize,
    /// Stop once the instance has at most this many variables.
    pub min_vertices: usize,
    pub backend: BackendChoice,
    pub cut_strategy: CutStrategy,
    /// Defaults to cut form for graphs and product form for QUBOs.
    #[serde(default)]
    pub mode: Option<ReweightMode>,
    pub seed: u64,
    #[serde(default)]
    pub max_iterations: Option<usize>,
}

impl Default for DecompConfig {
    fn default() -> Self {
        DecompConfig {
            m_cut: 8,
            min_vertices: 2,
            backend: BackendChoice::exact(),
            cut_strategy: CutStrategy::GlobalMin,
            mode: None,
            seed: 0,
            max_iterations: None,
        }
    }
}

impl DecompConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m_cut < 2 {
            return invalid(format!("m_cut must be at least 2, got {}", self.m_cut));
        }
        if self.min_vertices < 1 {
            return invalid("min_vertices must be at least 1");
        }
        self.backend.validate()
    }

    pub fn resolved_mode(&self, inst: &Instance) -> Result<ReweightMode> {
        match (self.mode, inst) {
            (Some(ReweightMode::CutForm), Instance::Qubo(_)) => {
                invalid("cut-form reweighting needs a graph instance")
            }
            (Some(m), _) => Ok(m),
            (None, Instance::MaxCut(_)) => Ok(ReweightMode::CutForm),
            (None, Instance::Qubo(_)) => Ok(ReweightMode::Product),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    MinVertices,
    /// No component has a vertex cut at all.
    NoCut,
    /// The best available cut has at least `m_cut` vertices.
    CutTooLarge,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub index: usize,
    pub cut: Vec<usize>,
    pub v2: Vec<usize>,
    pub table: SubproblemTable,
    pub table_digest: String,
    pub reweight: ReweightResult,
    pub error_sum: f64,
    pub vertices_before: usize,
    pub vertices_after: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTrace {
    pub config: DecompConfig,
    pub mode: ReweightMode,
    pub original_n: usize,
    pub iterations: Vec<IterationRecord>,
    pub c_total: f64,
    pub stop: StopReason,
    /// Original label of each variable of the final instance.
    pub final_labels: Vec<usize>,
    pub final_instance: Instance,
}

impl DecompositionTrace {
    pub fn all_exact(&self) -> bool {
        self.iterations.iter().all(|it| it.reweight.exact)
    }

    pub fn error_budget(&self) -> f64 {
        // adding 0.0 turns the empty sum's −0.0 into 0.0
        self.iterations.iter().map(|it| it.error_sum).sum::<f64>() + 0.0
    }

    pub fn final_n(&self) -> usize {
        self.final_labels.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Step-by-step decomposition, for callers that inspect intermediate
/// instances.
#[derive(Debug, Clone)]
pub struct Decomposer {
    cfg: DecompConfig,
    mode: ReweightMode,
    current: Instance,
    labels: Vec<usize>,
    c_total: f64,
    original_n: usize,
    iterations: Vec<IterationRecord>,
    stop: Option<StopReason>,
}

impl Decomposer {
    pub fn new(inst: Instance, cfg: DecompConfig) -> Result<Self> {
        cfg.validate()?;
        let mode = cfg.resolved_mode(&inst)?;
        let current = match (&inst, mode) {
            (Instance::MaxCut(g), ReweightMode::Product) => Instance::Qubo(crate::qubo::maxcut_to_qubo(g)),
            _ => inst,
        };
        let n = current.n();
        Ok(Decomposer {
            cfg,
            mode,
            current,
            labels: (0..n).collect(),
            c_total: 0.0,
            original_n: n,
            iterations: Vec::new(),
            stop: None,
        })
    }

    pub fn current(&self) -> &Instance {
        &self.current
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn c_total(&self) -> f64 {
        self.c_total
    }

    pub fn iterations(&self) -> &[IterationRecord] {
        &self.iterations
    }

    pub fn stop_reason(&self) -> Option<StopReason> {
        self.stop
    }

    /// Best cut over the components of the current structure graph: the
    /// smallest `K`, ties going to the component with the smallest label.
    fn pick_cut(&self) -> Result<Option<CutPartition>> {
        let g = self.current.structure_graph();
        let mut best: Option<CutPartition> = None;
        for comp in g.components() {
            if comp.len() < 3 {
                continue;
            }
            let (sub, map) = g.induced_subgraph(&comp)?;
            let local = match choose_cut(&sub, self.cfg.cut_strategy) {
                Ok(p) => p,
                Err(Error::NoCut) => continue,
                Err(e) => return Err(e),
            };
            if best.as_ref().is_some_and(|b| b.k() <= local.k()) {
                continue;
            }
            let cut: Vec<usize> = local.cut.iter().map(|&v| map[v]).collect();
            let v2: Vec<usize> = local.v2.iter().map(|&v| map[v]).collect();
            let mut taken = vec![false; g.n()];
            for &v in cut.iter().chain(&v2) {
                taken[v] = true;
            }
            let v1 = (0..g.n()).filter(|&v| !taken[v]).collect();
            best = Some(CutPartition { cut, v1, v2 });
        }
        Ok(best)
    }

    /// Runs one iteration. Returns `false` once the decomposition has stopped.
    pub fn step(&mut self) -> Result<bool> {
        if self.stop.is_some() {
            return Ok(false);
        }
        if self
            .cfg
            .max_iterations
            .is_some_and(|m| self.iterations.len() >= m)
        {
            self.stop = Some(StopReason::MaxIterations);
            return Ok(false);
        }
        let n = self.current.n();
        if n <= self.cfg.min_vertices {
            self.stop = Some(StopReason::MinVertices);
            return Ok(false);
        }
        let Some(part) = self.pick_cut()? else {
            self.stop = Some(StopReason::NoCut);
            return Ok(false);
        };
        if part.k() >= self.cfg.m_cut {
            self.stop = Some(StopReason::CutTooLarge);
            return Ok(false);
        }

        let index = self.iterations.len();
        let h = self.current.side_terms(&part)?;
        let seed = rng::stream_seed(self.cfg.seed, "iteration", index as u64);
        let mut table = build_table(&h, &part, &self.cfg.backend, seed)?;
        let rw = reweight(&table, self.mode)?;
        let (reduced, keep) = apply_reweight(&self.current, &part, &rw)?;

        let orig = |v: &usize| self.labels[*v];
        table.k_order = table.k_order.iter().map(orig).collect();
        table.v2 = table.v2.iter().map(orig).collect();
        let record = IterationRecord {
            index,
            cut: part.cut.iter().map(orig).collect(),
            v2: part.v2.iter().map(orig).collect(),
            table_digest: table.digest(),
            table,
            error_sum: rw.error_sum(),
            reweight: rw.relabeled(&self.labels),
            vertices_before: n,
            vertices_after: keep.len(),
        };
        log::debug!(
            "iteration {index}: |K| = {}, |V2| = {}, {} -> {} vertices, exact = {}",
            record.cut.len(),
            record.v2.len(),
            n,
            keep.len(),
            record.reweight.exact
        );
        self.c_total += rw.c_hat;
        self.labels = keep.iter().map(orig).collect();
        self.current = reduced;
        self.iterations.push(record);
        Ok(true)
    }

    pub fn run(mut self) -> Result<DecompositionTrace> {
        while self.step()? {}
        Ok(self.finish())
    }

    pub fn finish(self) -> DecompositionTrace {
        DecompositionTrace {
            config: self.cfg,
            mode: self.mode,
            original_n: self.original_n,
            iterations: self.iterations,
            c_total: self.c_total,
            stop: self.stop.unwrap_or(StopReason::MaxIterations),
            final_labels: self.labels,
            final_instance: self.current,
        }
    }
}

/// Decomposes `inst` until no usable cut remains.
pub fn decompose(inst: &Instance, cfg: &DecompConfig) -> Result<DecompositionTrace> {
    Decomposer::new(inst.clone(), cfg.clone())?.run()
}

/// Extends an assignment of the final instance to all original variables by
/// replaying the stored subproblem witnesses in reverse.
pub fn lift_solution(trace: &DecompositionTrace, reduced: &Bitstring) -> Result<Bitstring> {
    if reduced.len() != trace.final_labels.len() {
        return Err(Error::LengthMismatch {
            expected: trace.final_labels.len(),
            got: reduced.len(),
        });
    }
    let mut z: Vec<Option<bool>> = vec![None; trace.original_n];
    for (i, &v) in trace.final_labels.iter().enumerate() {
        z[v] = Some(reduced.get(i));
    }
    for it in trace.iterations.iter().rev() {
        let bits: Vec<bool> = it
            .cut
            .iter()
            .map(|&v| z[v].ok_or_else(|| Error::InvalidInput(format!("cut vertex {v} unassigned"))))
            .collect::<Result<_>>()?;
        let row = &it.table.rows[s_index(&bits)];
        let w = row.witness.as_ref().ok_or(Error::UnsupportedLift)?;
        if w.len() != it.v2.len() {
            return invalid("witness length does not match V2");
        }
        for (&v, &b) in it.v2.iter().zip(w.bits()) {
            z[v] = Some(b);
        }
    }
    z.into_iter()
        .enumerate()
        .map(|(v, b)| b.ok_or_else(|| Error::InvalidInput(format!("vertex {v} never assigned"))))
        .collect::<Result<Vec<_>>>()
        .map(Bitstring::new)
}

/// Whether a neighborhood-strategy run on the `k`-regular graph `g` left at
/// most `⌈k n / (k + 1)⌉` vertices.
pub fn reduction_bound_check(g: &WeightedGraph, trace: &DecompositionTrace, k: usize) -> Result<bool> {
    let n = g.n();
    if !g.is_regular(k) {
        return invalid(format!("graph is not {k}-regular"));
    }
    if k + 1 >= n {
        return invalid("complete graphs have no vertex cut");
    }
    if trace.config.cut_strategy != CutStrategy::MinDegreeNeighborhood {
        return invalid("the bound assumes the min-degree-neighborhood strategy");
    }
    if trace.config.m_cut <= k {
        return invalid(format!("the bound needs m_cut > {k}"));
    }
    if trace.original_n != n {
        return invalid("trace does not belong to this graph");
    }
    Ok(trace.final_n() <= (k * n).div_ceil(k + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::subsolver::exact_optimum;

    fn example_cfg() -> DecompConfig {
        DecompConfig {
            m_cut: 4,
            cut_strategy: CutStrategy::MinDegreeNeighborhood,
            max_iterations: Some(1),
            ..DecompConfig::default()
        }
    }

    #[test]
    fn example_single_iteration() {
        let inst = Instance::MaxCut(fixtures::six_vertex_example());
        let t = decompose(&inst, &example_cfg()).unwrap();
        assert_eq!(t.iterations.len(), 1);
        assert_eq!(t.iterations[0].cut, vec![1, 2, 3]);
        assert_eq!(t.iterations[0].v2, vec![0]);
        assert_eq!(t.final_labels, vec![1, 2, 3, 4, 5]);
        assert!((t.c_total - 3.0).abs() < 1e-9);
        let opt = exact_optimum(&t.final_instance.to_qubo()).unwrap();
        assert!((opt.value - 6.0).abs() < 1e-9);

        // z_5 = z_6 = 1, z_2 = z_3 = z_4 = 0 in one-based labels
        let reduced: Bitstring = "00011".parse().unwrap();
        assert!((t.final_instance.evaluate_bits(reduced.bits()).unwrap() - 6.0).abs() < 1e-9);
        let full = lift_solution(&t, &reduced).unwrap();
        assert_eq!(inst.evaluate_bits(full.bits()).unwrap(), 9.0);
    }

    #[test]
    fn example_with_global_min_cut() {
        let inst = Instance::MaxCut(fixtures::six_vertex_example());
        let cfg = DecompConfig {
            m_cut: 4,
            ..DecompConfig::default()
        };
        let t = decompose(&inst, &cfg).unwrap();
        assert_eq!(t.iterations[0].cut, vec![0, 4, 5]);
        assert_eq!(t.iterations[0].v2, vec![1]);
        assert!(t.all_exact());
        let opt = exact_optimum(&t.final_instance.to_qubo()).unwrap();
        assert!((opt.value + t.c_total - 9.0).abs() < 1e-9);
        let full = lift_solution(&t, &opt.witness).unwrap();
        assert_eq!(inst.evaluate_bits(full.bits()).unwrap(), 9.0);
    }

    #[test]
    fn complete_graph_is_unchanged() {
        let inst = Instance::MaxCut(fixtures::complete(3));
        let t = decompose(&inst, &DecompConfig::default()).unwrap();
        assert!(t.iterations.is_empty());
        assert_eq!(t.stop, StopReason::NoCut);
        assert_eq!(t.final_instance, inst);
        let z: Bitstring = "011".parse().unwrap();
        assert_eq!(lift_solution(&t, &z).unwrap(), z);
    }

    #[test]
    fn path_collapses_with_conserved_optimum() {
        let inst = Instance::MaxCut(fixtures::path(6));
        let t = decompose(&inst, &DecompConfig::default()).unwrap();
        assert_eq!(t.stop, StopReason::MinVertices);
        assert!(t.final_n() <= 2);
        let before = exact_optimum(&inst.to_qubo()).unwrap().value;
        let after = exact_optimum(&t.final_instance.to_qubo()).unwrap().value + t.c_total;
        assert!((before - after).abs() < 1e-9);
        for it in &t.iterations {
            assert!(it.vertices_after < it.vertices_before);
        }
    }

    #[test]
    fn qubo_input_uses_product_form() {
        let inst = Instance::Qubo(crate::qubo::maxcut_to_qubo(&fixtures::five_vertex_example()));
        let t = decompose(&inst, &DecompConfig::default()).unwrap();
        assert_eq!(t.mode, ReweightMode::Product);
        assert!(t.all_exact());
        let before = exact_optimum(&inst.to_qubo()).unwrap();
        let fin = exact_optimum(&t.final_instance.to_qubo()).unwrap();
        assert!((before.value - fin.value - t.c_total).abs() < 1e-9);
        let z = lift_solution(&t, &fin.witness).unwrap();
        assert!((inst.evaluate_bits(z.bits()).unwrap() - before.value).abs() < 1e-9);

        let bad = DecompConfig {
            mode: Some(ReweightMode::CutForm),
            ..DecompConfig::default()
        };
        assert!(decompose(&inst, &bad).is_err());
    }

    #[test]
    fn trace_round_trips_and_is_deterministic() {
        let inst = Instance::MaxCut(fixtures::cube());
        let cfg = DecompConfig {
            cut_strategy: CutStrategy::MinDegreeNeighborhood,
            ..DecompConfig::default()
        };
        let a = decompose(&inst, &cfg).unwrap();
        let b = decompose(&inst, &cfg).unwrap();
        let text = a.to_json().unwrap();
        assert_eq!(text, b.to_json().unwrap());
        assert_eq!(DecompositionTrace::from_json(&text).unwrap(), a);
    }

    #[test]
    fn bound_check_on_cube_and_errors() {
        let g = fixtures::cube();
        let cfg = DecompConfig {
            cut_strategy: CutStrategy::MinDegreeNeighborhood,
            ..DecompConfig::default()
        };
        let t = decompose(&Instance::MaxCut(g.clone()), &cfg).unwrap();
        assert!(reduction_bound_check(&g, &t, 3).unwrap());
        assert!(reduction_bound_check(&g, &t, 4).is_err());

        let k4 = fixtures::complete(4);
        let t = decompose(&Instance::MaxCut(k4.clone()), &cfg).unwrap();
        assert!(reduction_bound_check(&k4, &t, 3).is_err());
    }

    #[test]
    fn qaoa_backend_cannot_lift() {
        let inst = Instance::MaxCut(fixtures::five_vertex_example());
        let cfg = DecompConfig {
            backend: BackendChoice::qaoa(3),
            max_iterations: Some(1),
            ..DecompConfig::default()
        };
        let t = decompose(&inst, &cfg).unwrap();
        let z = Bitstring::zeros(t.final_n());
        assert!(matches!(lift_solution(&t, &z), Err(Error::UnsupportedLift)));
    }

    #[test]
    fn invalid_config_rejected() {
        let inst = Instance::MaxCut(fixtures::path(3));
        let cfg = DecompConfig {
            m_cut: 1,
            ..DecompConfig::default()
        };
        assert!(decompose(&inst, &cfg).is_err());
    }
}
