use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::qubo::{Bitstring, QuboInstance};

use super::statevector::{cost_vector, evolve, expectation_from_state, probabilities, sample};
use super::QaoaParams;

/// Solution-quality summary of a QAOA state against a known optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub n: usize,
    pub params: QaoaParams,
    pub expectation: f64,
    pub c_max: f64,
    /// `expectation / c_max`; absent when `c_max ≤ 0`.
    pub approx_ratio: Option<f64>,
    /// Exact probability mass on optimal bitstrings.
    pub p_opt_qaoa: f64,
    /// Fraction of shots that hit an optimal bitstring.
    pub p_opt_empirical: f64,
    /// `n_opt / 2^n`.
    pub p_opt_uniform: f64,
    /// `p_opt_uniform · 2^{n/2}`, reference column only.
    pub p_uniform_enhanced: f64,
    pub n_opt: usize,
    pub shots: usize,
    pub observed_optimum: bool,
    #[serde(skip)]
    pub probabilities: Vec<f64>,
    #[serde(skip)]
    pub counts: Vec<usize>,
}

fn is_optimal(cost: f64, c_max: f64) -> bool {
    cost >= c_max - 1e-9 * c_max.abs().max(1.0)
}

/// Simulates `params` on `q`, samples `shots` outcomes and compares with the
/// oracle optimum `oracle_value` attained by `n_opt` bitstrings.
pub fn report(
    q: &QuboInstance,
    params: &QaoaParams,
    shots: usize,
    seed: u64,
    oracle_value: f64,
    n_opt: usize,
) -> Result<SolveReport> {
    let costs = cost_vector(q)?;
    let psi = evolve(&costs, params)?;
    let probs = probabilities(&psi);
    let expectation = expectation_from_state(&psi, &costs);
    let p_opt_qaoa: f64 = probs
        .iter()
        .zip(&costs)
        .filter(|(_, &c)| is_optimal(c, oracle_value))
        .map(|(p, _)| p)
        .sum();
    let mut counts = vec![0usize; probs.len()];
    for x in sample(&probs, shots, seed) {
        counts[x as usize] += 1;
    }
    let hits: usize = counts
        .iter()
        .zip(&costs)
        .filter(|(_, &c)| is_optimal(c, oracle_value))
        .map(|(k, _)| k)
        .sum();
    let n = q.n();
    let dim = (1u64 << n) as f64;
    let p_opt_uniform = n_opt as f64 / dim;
    Ok(SolveReport {
        n,
        params: params.clone(),
        expectation,
        c_max: oracle_value,
        approx_ratio: (oracle_value > 0.0).then(|| expectation / oracle_value),
        p_opt_qaoa,
        p_opt_empirical: if shots > 0 { hits as f64 / shots as f64 } else { 0.0 },
        p_opt_uniform,
        p_uniform_enhanced: p_opt_uniform * 2f64.powf(n as f64 / 2.0),
        n_opt,
        shots,
        observed_optimum: hits > 0,
        probabilities: probs,
        counts,
    })
}

/// Writes `bitstring,probability,count` rows for every outcome with nonzero
/// probability or at least one shot.
pub fn write_histogram_csv<W: Write>(rep: &SolveReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bitstring", "probability", "count"])?;
    for (x, (&p, &c)) in rep.probabilities.iter().zip(&rep.counts).enumerate() {
        if p > 1e-15 || c > 0 {
            let z = Bitstring::from_index(x as u64, rep.n);
            w.write_record([z.to_string(), format!("{p:.12e}"), c.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
