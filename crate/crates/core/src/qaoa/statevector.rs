//! Dense statevector simulation of QAOA circuits.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::ising::IsingInstance;
use crate::qubo::QuboInstance;
use crate::rng;

use super::QaoaParams;

pub const MAX_STATEVECTOR_QUBITS: usize = 24;

fn check_size(n: usize) -> Result<()> {
    if n > MAX_STATEVECTOR_QUBITS {
        return Err(Error::ResourceLimit {
            what: "qubit count",
            got: n,
            limit: MAX_STATEVECTOR_QUBITS,
        });
    }
    Ok(())
}

/// `C(x)` for every basis index, built incrementally from the highest set bit.
pub fn cost_vector(q: &QuboInstance) -> Result<Vec<f64>> {
    let n = q.n();
    check_size(n)?;
    let mut lower: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, j, v) in q.quad_terms() {
        lower[j].push((i, v));
    }
    let mut costs = vec![0.0; 1usize << n];
    costs[0] = q.offset();
    for x in 1..costs.len() {
        let top = (usize::BITS - 1 - x.leading_zeros()) as usize;
        let rest = x ^ (1 << top);
        let delta: f64 = q.lin(top)
            + lower[top]
                .iter()
                .filter(|&&(i, _)| rest >> i & 1 == 1)
                .map(|&(_, v)| v)
                .sum::<f64>();
        costs[x] = costs[rest] + delta;
    }
    Ok(costs)
}

/// Ising energies for every basis index, evaluated term by term.
pub fn ising_cost_vector(s: &IsingInstance) -> Result<Vec<f64>> {
    check_size(s.n())?;
    Ok((0..1u64 << s.n()).map(|x| s.energy_at_index(x)).collect())
}

/// Runs the layers in `params` on `|+⟩^n` for the diagonal cost `costs`.
pub fn evolve(costs: &[f64], params: &QaoaParams) -> Result<Vec<Complex64>> {
    let dim = costs.len();
    if !dim.is_power_of_two() {
        return Err(Error::InvalidInput("cost vector length must be 2^n".into()));
    }
    let n = dim.trailing_zeros() as usize;
    check_size(n)?;
    if params.gammas.len() != params.betas.len() {
        return Err(Error::InvalidInput("need one β per γ".into()));
    }
    let amp = (dim as f64).sqrt().recip();
    let mut psi = vec![Complex64::new(amp, 0.0); dim];
    for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
        for (a, &c) in psi.iter_mut().zip(costs) {
            *a *= Complex64::from_polar(1.0, -gamma * c);
        }
        // e^{-iβX} = cos β I − i sin β X on every qubit
        let (cb, sb) = (beta.cos(), beta.sin());
        let mix_off = Complex64::new(0.0, -sb);
        for q in 0..n {
            let mask = 1usize << q;
            for x in 0..dim {
                if x & mask == 0 {
                    let a = psi[x];
                    let b = psi[x | mask];
                    psi[x] = a * cb + b * mix_off;
                    psi[x | mask] = a * mix_off + b * cb;
                }
            }
        }
    }
    Ok(psi)
}

/// Final-state amplitudes of QAOA on a QUBO.
pub fn statevector(q: &QuboInstance, params: &QaoaParams) -> Result<Vec<Complex64>> {
    evolve(&cost_vector(q)?, params)
}

pub fn probabilities(psi: &[Complex64]) -> Vec<f64> {
    psi.iter().map(|a| a.norm_sqr()).collect()
}

pub fn expectation_from_state(psi: &[Complex64], costs: &[f64]) -> f64 {
    psi.iter().zip(costs).map(|(a, c)| a.norm_sqr() * c).sum()
}

/// Born-rule samples by inverse CDF; returns basis indices.
pub fn sample(probs: &[f64], shots: usize, seed: u64) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = rng::stream(seed, "shots", 0);
    (0..shots)
        .map(|_| {
            let u = rng.gen::<f64>() * total;
            let idx = cdf.partition_point(|&c| c <= u);
            idx.min(probs.len() - 1) as u64
        })
        .collect()
}
