//! Seeded experiment runs over instance families, with CSV output.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decompose::{decompose, DecompConfig, Decomposer, DecompositionTrace};
use crate::error::{invalid, Result};
use crate::generate::generate_regular;
use crate::graph::WeightedGraph;
use crate::instance::Instance;
use crate::ising::qubo_to_ising;
use crate::qaoa::{optimize_params, report, QaoaParams};
use crate::qubo::QuboInstance;
use crate::rng;
use crate::subsolver::{exact_optimum_with_limit, BackendChoice, BackendKind};

/// Variable cap for the brute-force reference optimum.
pub const ORACLE_LIMIT: usize = 26;
/// Variable cap for the probability study.
pub const PROBABILITY_LIMIT: usize = 16;
pub const DEFAULT_SHOTS: usize = 500;
pub const DEFAULT_AR_RESTARTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum Family {
    Regular { n: usize, k: usize },
    Files { paths: Vec<PathBuf> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub family: Family,
    /// Number of generated instances; ignored for file lists.
    pub count: usize,
    pub seed: u64,
    pub decomp: DecompConfig,
    /// Backends compared in the A.R. study.
    pub backends: Vec<BackendChoice>,
    /// Restarts for the angle search when scoring instances.
    pub restarts: usize,
    pub shots: usize,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn regular(n: usize, k: usize, count: usize, seed: u64) -> Self {
        ExperimentSpec {
            family: Family::Regular { n, k },
            count,
            seed,
            decomp: DecompConfig {
                seed,
                ..DecompConfig::default()
            },
            backends: vec![BackendChoice::exact()],
            restarts: DEFAULT_AR_RESTARTS,
            shots: DEFAULT_SHOTS,
            out_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Family::Regular { n, k } = self.family {
            if (n * k) % 2 == 1 {
                return invalid(format!("n·k = {} is odd", n * k));
            }
            if self.count == 0 {
                return invalid("count must be at least 1");
            }
        }
        if self.restarts == 0 {
            return invalid("restarts must be at least 1");
        }
        if self.backends.is_empty() {
            return invalid("at least one backend is required");
        }
        self.decomp.validate()
    }
}

/// Reads a graph (text edge list) or, for `.json` files, a tagged instance
/// or a bare QUBO.
pub fn load_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        if let Ok(inst) = serde_json::from_str::<Instance>(&text) {
            return Ok(inst);
        }
        return Ok(Instance::Qubo(QuboInstance::from_json(&text)?));
    }
    Ok(Instance::MaxCut(WeightedGraph::parse_text(&text)?))
}

/// Named instances of the family, in id order.
pub fn instances(spec: &ExperimentSpec) -> Result<Vec<(String, Instance)>> {
    match &spec.family {
        Family::Regular { n, k } => (0..spec.count)
            .map(|i| {
                let seed = rng::stream_seed(spec.seed, "instance", i as u64);
                let g = generate_regular(*n, *k, seed)?;
                Ok((format!("reg-n{n}-k{k}-{i:04}"), Instance::MaxCut(g)))
            })
            .collect(),
        Family::Files { paths } => paths
            .iter()
            .map(|p| {
                let id = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| p.display().to_string());
                Ok((id, load_instance(p)?))
            })
            .collect(),
    }
}

fn backend_name(b: &BackendChoice) -> &'static str {
    match b.kind {
        BackendKind::Exact => "exact",
        BackendKind::QaoaP1 => "qaoa",
    }
}

/// Best p = 1 expectation of `q`, offset included.
pub fn best_expectation(q: &QuboInstance, restarts: usize, seed: u64) -> Result<(f64, QaoaParams)> {
    if q.n() == 0 {
        return Ok((q.offset(), QaoaParams::p1(0.0, 0.0)));
    }
    let out = optimize_params(&qubo_to_ising(q), restarts, seed)?;
    Ok((out.value, out.params))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub instance: String,
    pub backend: String,
    pub n: usize,
    pub final_n: usize,
    pub iterations: usize,
    pub c_total: f64,
    pub exact: bool,
    pub c_max: f64,
    pub ar_original: f64,
    pub ar_decomposed: f64,
    pub status: String,
}

struct Scored {
    row: SummaryRow,
    trace: Option<DecompositionTrace>,
}

fn failed_row(id: &str, backend: &str, n: usize, msg: String) -> Scored {
    Scored {
        row: SummaryRow {
            instance: id.to_string(),
            backend: backend.to_string(),
            n,
            final_n: 0,
            iterations: 0,
            c_total: f64::NAN,
            exact: false,
            c_max: f64::NAN,
            ar_original: f64::NAN,
            ar_decomposed: f64::NAN,
            status: format!("error: {msg}"),
        },
        trace: None,
    }
}

fn score_instance(spec: &ExperimentSpec, index: usize, id: &str, inst: &Instance) -> Vec<Scored> {
    let q = inst.to_qubo();
    let base = (|| -> Result<(f64, f64)> {
        let c_max = exact_optimum_with_limit(&q, ORACLE_LIMIT)?.value;
        let seed = rng::stream_seed(spec.seed, "ar-original", index as u64);
        let (e, _) = best_expectation(&q, spec.restarts, seed)?;
        Ok((c_max, e))
    })();
    let (c_max, e_orig) = match base {
        Ok(v) => v,
        Err(e) => {
            return spec
                .backends
                .iter()
                .map(|b| failed_row(id, backend_name(b), inst.n(), e.to_string()))
                .collect()
        }
    };
    spec.backends
        .iter()
        .map(|b| {
            let name = backend_name(b);
            let run = (|| -> Result<Scored> {
                let cfg = DecompConfig {
                    backend: *b,
                    seed: rng::stream_seed(spec.decomp.seed, "decompose", index as u64),
                    ..spec.decomp.clone()
                };
                let trace = decompose(inst, &cfg)?;
                let seed = rng::stream_seed(spec.seed, "ar-reduced", index as u64);
                let (e_red, _) = best_expectation(&trace.final_instance.to_qubo(), spec.restarts, seed)?;
                Ok(Scored {
                    row: SummaryRow {
                        instance: id.to_string(),
                        backend: name.to_string(),
                        n: inst.n(),
                        final_n: trace.final_n(),
                        iterations: trace.iterations.len(),
                        c_total: trace.c_total,
                        exact: trace.all_exact(),
                        c_max,
                        ar_original: e_orig / c_max,
                        ar_decomposed: (e_red + trace.c_total) / c_max,
                        status: "ok".into(),
                    },
                    trace: Some(trace),
                })
            })();
            run.unwrap_or_else(|e| failed_row(id, name, inst.n(), e.to_string()))
        })
        .collect()
}

/// Original versus decomposed approximation ratios for every instance and
/// backend. Writes `summary.csv` and one trace per run when `out_dir` is set.
pub fn run_decompose(spec: &ExperimentSpec) -> Result<Vec<SummaryRow>> {
    spec.validate()?;
    let insts = instances(spec)?;
    let scored: Vec<Vec<Scored>> = insts
        .par_iter()
        .enumerate()
        .map(|(i, (id, inst))| score_instance(spec, i, id, inst))
        .collect();
    let scored: Vec<Scored> = scored.into_iter().flatten().collect();
    if let Some(dir) = &spec.out_dir {
        let traces = dir.join("traces");
        fs::create_dir_all(&traces)?;
        for s in &scored {
            if let Some(t) = &s.trace {
                let name = format!("{}-{}.json", s.row.instance, s.row.backend);
                fs::write(traces.join(name), t.to_json()?)?;
            }
        }
        write_csv(&dir.join("summary.csv"), scored.iter().map(|s| &s.row))?;
    }
    Ok(scored.into_iter().map(|s| s.row).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub instance: String,
    pub iteration: usize,
    pub n: usize,
    pub c_total: f64,
    pub expectation: f64,
    pub ar: f64,
}

/// A.R. of the instance after every iteration (row 0 is the original).
pub fn run_per_iteration(
    id: &str,
    inst: &Instance,
    cfg: &DecompConfig,
    restarts: usize,
    seed: u64,
) -> Result<Vec<IterationRow>> {
    let c_max = exact_optimum_with_limit(&inst.to_qubo(), ORACLE_LIMIT)?.value;
    let mut dec = Decomposer::new(inst.clone(), cfg.clone())?;
    let mut rows = Vec::new();
    loop {
        let i = dec.iterations().len();
        let q = dec.current().to_qubo();
        let (e, _) = best_expectation(&q, restarts, rng::stream_seed(seed, "ar-iteration", i as u64))?;
        let total = e + dec.c_total();
        rows.push(IterationRow {
            instance: id.to_string(),
            iteration: i,
            n: q.n(),
            c_total: dec.c_total(),
            expectation: total,
            ar: total / c_max,
        });
        if !dec.step()? {
            break;
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityRow {
    pub instance: String,
    pub n: usize,
    pub n_opt: usize,
    pub gamma: f64,
    pub beta: f64,
    pub p_qaoa: f64,
    pub p_qaoa_empirical: f64,
    pub p_uniform: f64,
    pub p_uniform_enhanced: f64,
    pub observed: bool,
    pub status: String,
}

fn probability_row(spec: &ExperimentSpec, index: usize, id: &str, inst: &Instance) -> Result<ProbabilityRow> {
    let cfg = DecompConfig {
        seed: rng::stream_seed(spec.decomp.seed, "decompose", index as u64),
        ..spec.decomp.clone()
    };
    let trace = decompose(inst, &cfg)?;
    let q = trace.final_instance.to_qubo();
    if q.n() > PROBABILITY_LIMIT {
        log::warn!("{id}: reduced instance has {} variables, skipped", q.n());
        return Ok(ProbabilityRow {
            instance: id.to_string(),
            n: q.n(),
            n_opt: 0,
            gamma: f64::NAN,
            beta: f64::NAN,
            p_qaoa: f64::NAN,
            p_qaoa_empirical: f64::NAN,
            p_uniform: f64::NAN,
            p_uniform_enhanced: f64::NAN,
            observed: false,
            status: format!("skipped: n > {PROBABILITY_LIMIT}"),
        });
    }
    let opt = exact_optimum_with_limit(&q, PROBABILITY_LIMIT)?;
    let (_, params) = best_expectation(&q, spec.restarts, rng::stream_seed(spec.seed, "prob-angles", index as u64))?;
    let rep = report(
        &q,
        &params,
        spec.shots,
        rng::stream_seed(spec.seed, "prob-shots", index as u64),
        opt.value,
        opt.count,
    )?;
    Ok(ProbabilityRow {
        instance: id.to_string(),
        n: q.n(),
        n_opt: opt.count,
        gamma: params.gamma(),
        beta: params.beta(),
        p_qaoa: rep.p_opt_qaoa,
        p_qaoa_empirical: rep.p_opt_empirical,
        p_uniform: rep.p_opt_uniform,
        p_uniform_enhanced: rep.p_uniform_enhanced,
        observed: rep.observed_optimum,
        status: "ok".into(),
    })
}

/// Optimal-solution probabilities of p = 1 QAOA on decomposed instances.
/// Writes `probabilities.csv` when `out_dir` is set.
pub fn run_probability_study(spec: &ExperimentSpec) -> Result<Vec<ProbabilityRow>> {
    spec.validate()?;
    let insts = instances(spec)?;
    let rows: Vec<ProbabilityRow> = insts
        .par_iter()
        .enumerate()
        .map(|(i, (id, inst))| {
            probability_row(spec, i, id, inst).unwrap_or_else(|e| ProbabilityRow {
                instance: id.clone(),
                n: inst.n(),
                n_opt: 0,
                gamma: f64::NAN,
                beta: f64::NAN,
                p_qaoa: f64::NAN,
                p_qaoa_empirical: f64::NAN,
                p_uniform: f64::NAN,
                p_uniform_enhanced: f64::NAN,
                observed: false,
                status: format!("error: {e}"),
            })
        })
        .collect();
    if let Some(dir) = &spec.out_dir {
        fs::create_dir_all(dir)?;
        write_csv(&dir.join("probabilities.csv"), rows.iter())?;
    }
    Ok(rows)
}

pub fn write_csv<'a, T: Serialize + 'a>(path: &Path, rows: impl IntoIterator<Item = &'a T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r.deserialize().collect::<std::result::Result<Vec<T>, _>>()?;
    Ok(rows)
}
