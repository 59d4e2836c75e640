//! QAOA evaluation: closed-form single-layer expectations, multi-start
//! angle optimization, exact statevector simulation and sampling, and
//! optimal-solution reporting.
//!
//! Conventions: the cost operator is the diagonal `H_C = C(z)` of the
//! instance being maximized, the mixer is `B = Σ_i X_i`, the initial state is
//! `|+⟩^n`, and a layer applies `e^{-iγ H_C}` then `e^{-iβ B}`. Basis index
//! bit `i` holds `z_i`.

mod analytic;
mod optimize;
mod report;
mod statevector;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

pub use analytic::{expectation_p1, ExpectationBreakdown, P1Evaluator};
pub use optimize::{maximize_bfgs, optimize_params, LocalMax, OptimizeOutcome, GRADIENT_STEP};
pub use report::{report, write_histogram_csv, SolveReport};
pub use statevector::{
    cost_vector, evolve, expectation_from_state, ising_cost_vector, probabilities, sample,
    statevector, MAX_STATEVECTOR_QUBITS,
};

/// Angles for `p` layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn p1(gamma: f64, beta: f64) -> Self {
        QaoaParams {
            gammas: vec![gamma],
            betas: vec![beta],
        }
    }

    /// Zero layers: the uniform superposition.
    pub fn empty() -> Self {
        QaoaParams {
            gammas: Vec::new(),
            betas: Vec::new(),
        }
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gammas[0]
    }

    pub fn beta(&self) -> f64 {
        self.betas[0]
    }

    /// Every angle wrapped into `[0, 2π)`.
    pub fn canonical(&self) -> Self {
        let wrap = |a: &f64| a.rem_euclid(TAU);
        QaoaParams {
            gammas: self.gammas.iter().map(wrap).collect(),
            betas: self.betas.iter().map(wrap).collect(),
        }
    }
}
