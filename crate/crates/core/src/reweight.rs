//! Fitting new coefficients on the cut so that the reduced instance carries
//! the subproblem table.
//!
//! For every fixing `s` of the cut, the table value `b_s` must be reproduced
//! by a quadratic form in the cut variables plus a constant `ĉ`. Two forms
//! are supported:
//!
//! * cut form (graphs): `Σ_{u<v} Ĵ_uv [s_u ≠ s_v] + ĉ`, where `Ĵ_uv` becomes a
//!   new edge weight. Rows for `s` and its complement coincide, so one row per
//!   complement class is kept. The system is square and invertible for
//!   `|K| ≤ 3`.
//! * product form (QUBOs): `Σ_{u<v} Ĵ_uv s_u s_v + Σ_u Ĵ_uu s_u + ĉ`.
//!
//! When no exact fit exists, the error-minimizing program
//! `min Σ e_s  s.t.  A x + e = b, e ≥ 0` is solved instead.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cutset::CutPartition;
use crate::error::{invalid, Error, Result};
use crate::graph::WeightedGraph;
use crate::instance::Instance;
use crate::qubo::QuboInstance;
use crate::simplex::{solve_standard_form, LpOutcome};
use crate::subsolver::{s_bits, s_label, SubproblemTable};

/// Residual below which a row counts as exactly fitted.
pub const EXACT_TOL: f64 = 1e-9;
/// Fitted pair coefficients at or below this magnitude are dropped.
pub const PRUNE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReweightMode {
    CutForm,
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Unknown {
    Pair(usize, usize),
    Single(usize),
    Constant,
}

/// Rows `A x = b` with one unknown per column.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub mode: ReweightMode,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub unknowns: Vec<Unknown>,
    /// Fixing `s` behind each row.
    pub row_s: Vec<usize>,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowError {
    pub s: String,
    pub e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReweightResult {
    pub mode: ReweightMode,
    /// `(u, v, Ĵ_uv)` with `u < v`, both in the cut.
    pub quad_hat: Vec<(usize, usize, f64)>,
    /// `(u, Ĵ_uu)`; empty in cut form.
    pub lin_hat: Vec<(usize, f64)>,
    pub c_hat: f64,
    /// One entry per system row.
    pub errors: Vec<RowError>,
    pub exact: bool,
}

impl ReweightResult {
    pub fn error_sum(&self) -> f64 {
        self.errors.iter().map(|r| r.e).sum::<f64>() + 0.0
    }

    pub fn max_error(&self) -> f64 {
        self.errors.iter().map(|r| r.e).fold(0.0, f64::max)
    }

    /// Same result with every cut label `v` replaced by `map[v]`.
    pub fn relabeled(&self, map: &[usize]) -> Self {
        let mut out = self.clone();
        for t in &mut out.quad_hat {
            let (a, b) = (map[t.0], map[t.1]);
            *t = (a.min(b), a.max(b), t.2);
        }
        out.quad_hat.sort_by_key(|t| (t.0, t.1));
        for t in &mut out.lin_hat {
            t.0 = map[t.0];
        }
        out.lin_hat.sort_by_key(|t| t.0);
        out
    }
}

/// Builds the fitting system for `table` under `mode`.
pub fn build_rows(table: &SubproblemTable, mode: ReweightMode) -> Result<LinearSystem> {
    let k = table.k();
    if k == 0 {
        return invalid("cannot reweight an empty cut");
    }
    if table.rows.len() != 1 << k {
        return invalid(format!(
            "table has {} rows, expected {}",
            table.rows.len(),
            1usize << k
        ));
    }
    let mut unknowns = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            unknowns.push(Unknown::Pair(table.k_order[a], table.k_order[b]));
        }
    }
    if mode == ReweightMode::Product {
        unknowns.extend(table.k_order.iter().map(|&v| Unknown::Single(v)));
    }
    unknowns.push(Unknown::Constant);

    // cut form keeps the representative with the first cut vertex at zero
    let row_s: Vec<usize> = match mode {
        ReweightMode::CutForm => (0..1usize << (k - 1)).collect(),
        ReweightMode::Product => (0..1usize << k).collect(),
    };
    let totals = table.totals();
    let mut a = Vec::with_capacity(row_s.len());
    let mut b = Vec::with_capacity(row_s.len());
    for &s in &row_s {
        let bits = s_bits(s, k);
        let mut row = Vec::with_capacity(unknowns.len());
        for x in 0..k {
            for y in x + 1..k {
                let hit = match mode {
                    ReweightMode::CutForm => bits[x] != bits[y],
                    ReweightMode::Product => bits[x] && bits[y],
                };
                row.push(if hit { 1.0 } else { 0.0 });
            }
        }
        if mode == ReweightMode::Product {
            row.extend(bits.iter().map(|&on| if on { 1.0 } else { 0.0 }));
        }
        row.push(1.0);
        a.push(row);
        b.push(totals[s]);
    }
    Ok(LinearSystem {
        mode,
        a,
        b,
        unknowns,
        row_s,
        k,
    })
}

impl LinearSystem {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.a
            .iter()
            .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
            .collect()
    }

    fn result(&self, x: &[f64], errors: Vec<f64>) -> ReweightResult {
        let mut quad_hat = Vec::new();
        let mut lin_hat = Vec::new();
        let mut c_hat = 0.0;
        for (u, &v) in self.unknowns.iter().zip(x) {
            match *u {
                Unknown::Pair(a, b) => quad_hat.push((a, b, v)),
                Unknown::Single(a) => lin_hat.push((a, v)),
                Unknown::Constant => c_hat = v,
            }
        }
        let exact = errors.iter().all(|&e| e <= EXACT_TOL);
        ReweightResult {
            mode: self.mode,
            quad_hat,
            lin_hat,
            c_hat,
            errors: self
                .row_s
                .iter()
                .zip(errors)
                .map(|(&s, e)| RowError {
                    s: s_label(s, self.k),
                    e,
                })
                .collect(),
            exact,
        }
    }
}

/// Minimum-norm least-squares fit; `None` when some row misses by more
/// than the exactness tolerance.
pub fn solve_exact(sys: &LinearSystem) -> Result<Option<ReweightResult>> {
    let m = sys.a.len();
    let n = sys.unknowns.len();
    let a = DMatrix::from_fn(m, n, |i, j| sys.a[i][j]);
    let b = DVector::from_column_slice(&sys.b);
    let svd = a.svd(true, true);
    let x = svd
        .solve(&b, 1e-10)
        .map_err(|e| Error::Numeric(format!("SVD solve failed: {e}")))?;
    let x: Vec<f64> = x.iter().copied().collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("least-squares solution is not finite".into()));
    }
    let fitted = sys.apply(&x);
    if fitted
        .iter()
        .zip(&sys.b)
        .any(|(f, b)| (f - b).abs() > EXACT_TOL)
    {
        return Ok(None);
    }
    Ok(Some(sys.result(&x, vec![0.0; m])))
}

/// Error-minimizing fit `min Σ e_s  s.t.  A x + e = b, e ≥ 0` with `x` free.
/// The fitted form never exceeds a table value.
pub fn solve_lp(sys: &LinearSystem) -> Result<ReweightResult> {
    let m = sys.a.len();
    let n = sys.unknowns.len();
    // columns: x⁺ (n), x⁻ (n), e (m)
    let a: Vec<Vec<f64>> = sys
        .a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = Vec::with_capacity(2 * n + m);
            r.extend_from_slice(row);
            r.extend(row.iter().map(|v| -v));
            r.extend((0..m).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    let mut c = vec![0.0; 2 * n + m];
    c[2 * n..].fill(1.0);
    let (status, sol) = solve_standard_form(&a, &sys.b, &c)?;
    let sol = match (status, sol) {
        (LpOutcome::Optimal, Some(sol)) => sol,
        (other, _) => {
            return Err(Error::Numeric(format!("reweighting LP ended as {other:?}")));
        }
    };
    let x: Vec<f64> = (0..n).map(|j| sol.x[j] - sol.x[n + j]).collect();
    let fitted = sys.apply(&x);
    let errors: Vec<f64> = fitted
        .iter()
        .zip(&sys.b)
        .map(|(f, b)| {
            let e = b - f;
            if e.abs() <= EXACT_TOL {
                0.0
            } else {
                e.max(0.0)
            }
        })
        .collect();
    Ok(sys.result(&x, errors))
}

/// Exact fit when one exists, otherwise the error-minimizing program.
pub fn reweight(table: &SubproblemTable, mode: ReweightMode) -> Result<ReweightResult> {
    let sys = build_rows(table, mode)?;
    match solve_exact(&sys)? {
        Some(r) => Ok(r),
        None => solve_lp(&sys),
    }
}

/// Reduced instance over `V1 ∪ K` (relabeled in increasing order; the map
/// is returned alongside). Coefficients inside `V1` and between `V1` and `K`
/// are kept, `V2` is dropped, and the cut's own coefficients are replaced by
/// the fitted ones. `ĉ` is not added; callers carry it separately.
///
/// A graph with a product-form fit becomes a QUBO.
pub fn apply_reweight(
    inst: &Instance,
    part: &CutPartition,
    rw: &ReweightResult,
) -> Result<(Instance, Vec<usize>)> {
    let n = inst.n();
    let mut keep: Vec<usize> = part.v1.iter().chain(&part.cut).copied().collect();
    keep.sort_unstable();
    let mut local = vec![usize::MAX; n];
    for (i, &v) in keep.iter().enumerate() {
        local[v] = i;
    }
    let mut in_cut = vec![false; n];
    for &v in &part.cut {
        in_cut[v] = true;
    }
    let kept = |i: usize, j: usize| {
        local[i] != usize::MAX && local[j] != usize::MAX && !(in_cut[i] && in_cut[j])
    };

    let reduced = match (inst, rw.mode) {
        (Instance::MaxCut(g), ReweightMode::CutForm) => {
            let mut out = WeightedGraph::new(keep.len());
            for (i, j, w) in g.edges() {
                if kept(i, j) {
                    out.add_edge(local[i], local[j], w)?;
                }
            }
            for &(u, v, w) in &rw.quad_hat {
                if w.abs() > PRUNE_TOL {
                    out.add_edge(local[u], local[v], w)?;
                }
            }
            Instance::MaxCut(out)
        }
        (Instance::Qubo(_), ReweightMode::CutForm) => {
            return invalid("cut-form reweighting applies to graph instances only");
        }
        (_, ReweightMode::Product) => {
            let q = inst.to_qubo();
            let mut out = QuboInstance::new(keep.len());
            out.set_offset(q.offset())?;
            for (i, j, v) in q.quad_terms() {
                if kept(i, j) {
                    out.add_quad(local[i], local[j], v)?;
                }
            }
            for &v in &part.v1 {
                out.add_lin(local[v], q.lin(v))?;
            }
            for &(u, v, w) in &rw.quad_hat {
                if w.abs() > PRUNE_TOL {
                    out.add_quad(local[u], local[v], w)?;
                }
            }
            for &(u, w) in &rw.lin_hat {
                out.add_lin(local[u], w)?;
            }
            Instance::Qubo(out)
        }
    };
    Ok((reduced, keep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutset::split_components;
    use crate::fixtures;
    use crate::subsolver::{build_table, TableRow};
    use crate::subsolver::{exact_optimum, BackendChoice, BackendKind};

    fn table_from(k_order: Vec<usize>, totals: &[f64]) -> SubproblemTable {
        let k = k_order.len();
        SubproblemTable {
            k_order,
            v2: vec![],
            backend: BackendKind::Exact,
            rows: totals
                .iter()
                .enumerate()
                .map(|(s, &t)| TableRow {
                    s: s_label(s, k),
                    value: t,
                    constant: 0.0,
                    witness: None,
                })
                .collect(),
        }
    }

    fn example_table() -> SubproblemTable {
        table_from(vec![1, 2, 3], &[3.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 3.0])
    }

    #[test]
    fn example_cutform_rows() {
        let sys = build_rows(&example_table(), ReweightMode::CutForm).unwrap();
        assert_eq!(
            sys.unknowns,
            vec![
                Unknown::Pair(1, 2),
                Unknown::Pair(1, 3),
                Unknown::Pair(2, 3),
                Unknown::Constant
            ]
        );
        assert_eq!(sys.row_s, vec![0, 1, 2, 3]);
        assert_eq!(
            sys.a,
            vec![
                vec![0.0, 0.0, 0.0, 1.0],
                vec![0.0, 1.0, 1.0, 1.0],
                vec![1.0, 0.0, 1.0, 1.0],
                vec![1.0, 1.0, 0.0, 1.0],
            ]
        );
        assert_eq!(sys.b, vec![3.0, 2.0, 2.0, 2.0]);
    }

    #[test]
    fn example_system_solution() {
        let rw = reweight(&example_table(), ReweightMode::CutForm).unwrap();
        assert!(rw.exact);
        for &(_, _, w) in &rw.quad_hat {
            assert!((w + 0.5).abs() < 1e-9);
        }
        assert!((rw.c_hat - 3.0).abs() < 1e-9);
        assert_eq!(rw.error_sum(), 0.0);
    }

    #[test]
    fn constant_table_gives_constant_only() {
        let rw = reweight(&table_from(vec![0, 4, 7], &[1.5; 8]), ReweightMode::CutForm).unwrap();
        assert!(rw.exact);
        assert!(rw.quad_hat.iter().all(|t| t.2.abs() < 1e-9));
        assert!((rw.c_hat - 1.5).abs() < 1e-9);
    }

    #[test]
    fn row_counts() {
        let sys = build_rows(&table_from(vec![3], &[1.0, 4.0]), ReweightMode::Product).unwrap();
        assert_eq!(sys.a, vec![vec![0.0, 1.0], vec![1.0, 1.0]]);
        let rw = solve_exact(&sys).unwrap().unwrap();
        assert!((rw.c_hat - 1.0).abs() < 1e-9 && (rw.lin_hat[0].1 - 3.0).abs() < 1e-9);

        let sys = build_rows(&table_from(vec![0, 1], &[0.0, 1.0, 1.0, 0.0]), ReweightMode::CutForm).unwrap();
        assert_eq!(sys.a.len(), 2);
        assert_eq!(sys.unknowns.len(), 2);
    }

    #[test]
    fn complement_rows_are_identical_in_cut_form() {
        let k = 4;
        let table = table_from((0..k).collect(), &vec![0.0; 1 << k]);
        let sys = build_rows(&table, ReweightMode::Product).unwrap();
        assert_eq!(sys.a.len(), 16);
        // rebuild every cut-form row, including complements, and compare
        for s in 0..1usize << k {
            let bits = s_bits(s, k);
            let comp: Vec<bool> = bits.iter().map(|b| !b).collect();
            let row = |b: &[bool]| {
                let mut r = vec![];
                for x in 0..k {
                    for y in x + 1..k {
                        r.push(b[x] != b[y]);
                    }
                }
                r
            };
            assert_eq!(row(&bits), row(&comp));
        }
    }

    #[test]
    fn lp_matches_exact_when_consistent() {
        let sys = build_rows(&example_table(), ReweightMode::CutForm).unwrap();
        let lp = solve_lp(&sys).unwrap();
        assert!(lp.exact);
        assert_eq!(lp.error_sum(), 0.0);
        let fitted = sys.apply(&[lp.quad_hat[0].2, lp.quad_hat[1].2, lp.quad_hat[2].2, lp.c_hat]);
        for (f, b) in fitted.iter().zip(&sys.b) {
            assert!((f - b).abs() < 1e-9);
        }
    }

    #[test]
    fn lp_perturbation_costs_at_most_one() {
        let base = build_table(
            &crate::qubo::maxcut_to_qubo(&fixtures::cube()),
            &split_components(&fixtures::cube(), &[1, 2, 4]).unwrap(),
            &BackendChoice::exact(),
            0,
        )
        .unwrap();
        let mut t = base.clone();
        t.rows[2].value += 1.0;
        let rw = reweight(&t, ReweightMode::CutForm).unwrap();
        assert!(rw.error_sum() <= 1.0 + 1e-9);
    }

    #[test]
    fn inconsistent_system_uses_lp() {
        // four cut vertices: eight classes, seven unknowns
        let totals: Vec<f64> = (0..16).map(|s: usize| (s.count_ones() % 3) as f64).collect();
        let sys = build_rows(&table_from(vec![0, 1, 2, 3], &totals), ReweightMode::CutForm).unwrap();
        let rw = reweight(&table_from(vec![0, 1, 2, 3], &totals), ReweightMode::CutForm).unwrap();
        let mut x: Vec<f64> = rw.quad_hat.iter().map(|t| t.2).collect();
        x.push(rw.c_hat);
        for ((f, b), e) in sys.apply(&x).iter().zip(&sys.b).zip(&rw.errors) {
            assert!(e.e >= -1e-12);
            assert!((f + e.e - b).abs() <= 1e-7);
        }
        assert_eq!(rw.exact, solve_exact(&sys).unwrap().is_some());
    }

    #[test]
    fn example_reduces_to_reference_graph() {
        let g = fixtures::six_vertex_example();
        let part = split_components(&g, &[1, 2, 3]).unwrap();
        let inst = Instance::MaxCut(g.clone());
        let h = inst.side_terms(&part).unwrap();
        let table = build_table(&h, &part, &BackendChoice::exact(), 0).unwrap();
        let rw = reweight(&table, ReweightMode::CutForm).unwrap();
        let (reduced, keep) = apply_reweight(&inst, &part, &rw).unwrap();
        assert_eq!(keep, vec![1, 2, 3, 4, 5]);
        let Instance::MaxCut(r) = &reduced else { panic!() };
        assert_eq!(r.num_edges(), 9);
        assert!((r.weight(0, 1).unwrap() + 0.5).abs() < 1e-9);
        assert_eq!(r.weight(3, 4), None);
        let opt = exact_optimum(&reduced.to_qubo()).unwrap();
        assert!((opt.value - 6.0).abs() < 1e-9);
        assert!((opt.value + rw.c_hat - 9.0).abs() < 1e-9);
    }

    #[test]
    fn qubo_with_cut_form_is_rejected() {
        let g = fixtures::path(3);
        let part = split_components(&g, &[1]).unwrap();
        let rw = ReweightResult {
            mode: ReweightMode::CutForm,
            quad_hat: vec![],
            lin_hat: vec![],
            c_hat: 0.0,
            errors: vec![],
            exact: true,
        };
        let q = Instance::Qubo(crate::qubo::maxcut_to_qubo(&g));
        assert!(apply_reweight(&q, &part, &rw).is_err());
    }

    #[test]
    fn product_form_preserves_qubo_optimum() {
        let g = fixtures::five_vertex_example();
        let inst = Instance::Qubo(crate::qubo::maxcut_to_qubo(&g));
        let part = split_components(&g, &[0]).unwrap();
        let table = build_table(&inst.side_terms(&part).unwrap(), &part, &BackendChoice::exact(), 0).unwrap();
        let rw = reweight(&table, ReweightMode::Product).unwrap();
        assert!(rw.exact);
        let (reduced, _) = apply_reweight(&inst, &part, &rw).unwrap();
        let a = exact_optimum(&inst.to_qubo()).unwrap().value;
        let b = exact_optimum(&reduced.to_qubo()).unwrap().value + rw.c_hat;
        assert!((a - b).abs() < 1e-9);
    }
}
