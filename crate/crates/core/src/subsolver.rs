//! Subproblem tables: for every fixing `s` of the cut vertices, the best
//! value of the remaining `V2` variables.
//!
//! Row `s` is an integer whose binary string, read left to right, lists the
//! values of the cut vertices in increasing label order (so `"001"` fixes the
//! last cut vertex to one).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cutset::CutPartition;
use crate::error::{Error, Result};
use crate::ising::qubo_to_ising;
use crate::qaoa::optimize_params;
use crate::qubo::{Bitstring, QuboInstance, Restriction};
use crate::rng;

pub const DEFAULT_EXACT_LIMIT: usize = 22;
pub const DEFAULT_QAOA_RESTARTS: usize = 100;
/// Largest cut for which a full table is built.
pub const MAX_TABLE_CUT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    /// Exhaustive search.
    Exact,
    /// Best single-layer QAOA expectation value.
    QaoaP1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackendChoice {
    pub kind: BackendKind,
    pub qaoa_restarts: usize,
    /// Largest `|V2|` the exact backend accepts.
    pub exact_limit: usize,
}

impl BackendChoice {
    pub fn exact() -> Self {
        BackendChoice {
            kind: BackendKind::Exact,
            qaoa_restarts: DEFAULT_QAOA_RESTARTS,
            exact_limit: DEFAULT_EXACT_LIMIT,
        }
    }

    pub fn qaoa(restarts: usize) -> Self {
        BackendChoice {
            kind: BackendKind::QaoaP1,
            qaoa_restarts: restarts,
            exact_limit: DEFAULT_EXACT_LIMIT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.qaoa_restarts == 0 {
            return Err(Error::InvalidInput("qaoa_restarts must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for BackendChoice {
    fn default() -> Self {
        Self::exact()
    }
}

/// Maximum of an instance with a witness and the number of maximizers.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactOptimum {
    pub value: f64,
    /// Lexicographically smallest maximizer (comparing `z_0` first).
    pub witness: Bitstring,
    pub count: usize,
}

fn tie_tolerance(q: &QuboInstance) -> f64 {
    let scale = q.offset().abs()
        + q.linear_terms().iter().map(|v| v.abs()).sum::<f64>()
        + q.quad_terms().map(|t| t.2.abs()).sum::<f64>();
    1e-9 * scale.max(1.0)
}

pub fn exact_optimum(q: &QuboInstance) -> Result<ExactOptimum> {
    exact_optimum_with_limit(q, DEFAULT_EXACT_LIMIT)
}

/// Exhaustive maximization in Gray-code order, one variable flip per step.
pub fn exact_optimum_with_limit(q: &QuboInstance, limit: usize) -> Result<ExactOptimum> {
    let n = q.n();
    if n > limit || n > 40 {
        return Err(Error::ResourceLimit {
            what: "exact solver variables",
            got: n,
            limit: limit.min(40),
        });
    }
    if n == 0 {
        return Ok(ExactOptimum {
            value: q.offset(),
            witness: Bitstring::zeros(0),
            count: 1,
        });
    }
    let mut nbrs: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, j, v) in q.quad_terms() {
        nbrs[i].push((j, v));
        nbrs[j].push((i, v));
    }
    let lin = q.linear_terms();
    let tol = tie_tolerance(q);
    // comparing bit-reversed indices orders bitstrings lexicographically
    let lex_key = |x: u64| x.reverse_bits() >> (64 - n);

    let mut state = 0u64;
    let mut value = q.offset();
    let mut best = value;
    let mut best_state = 0u64;
    let mut count = 1usize;
    for step in 1u64..(1u64 << n) {
        let i = step.trailing_zeros() as usize;
        let field: f64 = lin[i]
            + nbrs[i]
                .iter()
                .filter(|&&(j, _)| state >> j & 1 == 1)
                .map(|&(_, v)| v)
                .sum::<f64>();
        state ^= 1 << i;
        if state >> i & 1 == 1 {
            value += field;
        } else {
            value -= field;
        }
        if step & 0xffff == 0 {
            value = q.value_at_index(state);
        }
        if value > best + tol {
            best = value;
            best_state = state;
            count = 1;
        } else if value >= best - tol {
            count += 1;
            if lex_key(state) < lex_key(best_state) {
                best_state = state;
            }
            if value > best {
                best = value;
            }
        }
    }
    Ok(ExactOptimum {
        value: q.value_at_index(best_state),
        witness: Bitstring::from_index(best_state, n),
        count,
    })
}

/// Best single-layer QAOA expectation over `restarts` optimized starts,
/// offset included.
pub fn qaoa_heuristic_value(q: &QuboInstance, restarts: usize, seed: u64) -> Result<f64> {
    if q.n() == 0 {
        return Ok(q.offset());
    }
    let out = optimize_params(&qubo_to_ising(q), restarts, seed)?;
    if !out.value.is_finite() {
        return Err(Error::Numeric("QAOA objective is not finite".into()));
    }
    Ok(out.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    /// Fixing of the cut vertices, left to right in `k_order`.
    pub s: String,
    /// Optimum over the free `V2` variables.
    pub value: f64,
    /// Constant collected from fixed variables.
    pub constant: f64,
    /// Maximizing assignment of `V2` (exact backend only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Bitstring>,
}

impl TableRow {
    pub fn total(&self) -> f64 {
        self.value + self.constant
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubproblemTable {
    pub k_order: Vec<usize>,
    pub v2: Vec<usize>,
    pub backend: BackendKind,
    /// Indexed by `s`.
    pub rows: Vec<TableRow>,
}

/// Bits of fixing `s` for a cut of size `k`, in cut order.
pub fn s_bits(s: usize, k: usize) -> Vec<bool> {
    (0..k).map(|l| (s >> (k - 1 - l)) & 1 == 1).collect()
}

/// Index of the fixing given as bits in cut order.
pub fn s_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

pub fn s_label(s: usize, k: usize) -> String {
    Bitstring::new(s_bits(s, k)).to_string()
}

impl SubproblemTable {
    pub fn k(&self) -> usize {
        self.k_order.len()
    }

    /// `value + constant` per row, in row order.
    pub fn totals(&self) -> Vec<f64> {
        self.rows.iter().map(TableRow::total).collect()
    }

    pub fn has_witnesses(&self) -> bool {
        self.rows.iter().all(|r| r.witness.is_some())
    }

    /// SHA-256 over the rows' `s`, value and constant bit patterns.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for r in &self.rows {
            h.update(r.s.as_bytes());
            h.update(r.value.to_bits().to_le_bytes());
            h.update(r.constant.to_bits().to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Solves the subproblem on `V2 ∪ K` for all `2^|K|` fixings of `K`.
///
/// `inst` must hold only the terms that belong to the `V2` side: pairs that
/// touch `V2`, pairs inside `K`, and linear terms of `V2 ∪ K`. Its restriction
/// to `V2 ∪ K` is taken here; terms elsewhere are ignored.
pub fn build_table(
    inst: &QuboInstance,
    part: &CutPartition,
    backend: &BackendChoice,
    seed: u64,
) -> Result<SubproblemTable> {
    backend.validate()?;
    let k = part.k();
    if k > MAX_TABLE_CUT {
        return Err(Error::ResourceLimit {
            what: "cut size",
            got: k,
            limit: MAX_TABLE_CUT,
        });
    }
    if backend.kind == BackendKind::Exact && part.v2.len() > backend.exact_limit {
        return Err(Error::ResourceLimit {
            what: "|V2| for the exact backend",
            got: part.v2.len(),
            limit: backend.exact_limit,
        });
    }
    let mut support: Vec<usize> = part.cut.iter().chain(&part.v2).copied().collect();
    support.sort_unstable();
    let (sub, map) = inst.induced(&support)?;
    let local = |v: usize| map.binary_search(&v).expect("vertex in support");
    let k_local: Vec<usize> = part.cut.iter().map(|&v| local(v)).collect();

    let rows: Vec<Result<TableRow>> = (0..1usize << k)
        .into_par_iter()
        .map(|s| {
            let bits = s_bits(s, k);
            let r = Restriction::from_assignment(&k_local, &bits)?;
            let res = sub.restrict(&r)?;
            let (value, witness) = match backend.kind {
                BackendKind::Exact => {
                    let opt = exact_optimum_with_limit(&res.sub, backend.exact_limit)?;
                    (opt.value, Some(opt.witness))
                }
                BackendKind::QaoaP1 => {
                    let seed = rng::stream_seed(seed, "table-row", s as u64);
                    (qaoa_heuristic_value(&res.sub, backend.qaoa_restarts, seed)?, None)
                }
            };
            Ok(TableRow {
                s: s_label(s, k),
                value,
                constant: res.constant,
                witness,
            })
        })
        .collect();
    Ok(SubproblemTable {
        k_order: part.cut.clone(),
        v2: part.v2.clone(),
        backend: backend.kind,
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}
