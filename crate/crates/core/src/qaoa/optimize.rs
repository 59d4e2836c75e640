//! Multi-start quasi-Newton ascent over `(γ, β)`.

use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::IsingInstance;
use crate::rng;

use super::{P1Evaluator, QaoaParams};

/// Central-difference step for numerical gradients.
pub const GRADIENT_STEP: f64 = 1e-6;

const MAX_ITER: usize = 200;
const GRAD_TOL: f64 = 1e-8;

/// Result of one local ascent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMax {
    pub x: [f64; 2],
    pub value: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOutcome {
    pub params: QaoaParams,
    pub value: f64,
    /// False when no restart reached a stationary point; `params` is then
    /// the best point evaluated.
    pub converged: bool,
}

fn gradient<F: Fn([f64; 2]) -> f64>(f: &F, x: [f64; 2]) -> [f64; 2] {
    let h = GRADIENT_STEP;
    let d0 = (f([x[0] + h, x[1]]) - f([x[0] - h, x[1]])) / (2.0 * h);
    let d1 = (f([x[0], x[1] + h]) - f([x[0], x[1] - h])) / (2.0 * h);
    [d0, d1]
}

/// BFGS maximization of a smooth function of two variables with
/// finite-difference gradients and Armijo backtracking.
pub fn maximize_bfgs<F: Fn([f64; 2]) -> f64>(f: F, x0: [f64; 2]) -> Result<LocalMax> {
    // minimize g = −f
    let g = |x: [f64; 2]| -f(x);
    let mut x = x0;
    let mut gx = g(x);
    if !gx.is_finite() {
        return Err(Error::Numeric("objective is not finite at start".into()));
    }
    let mut grad = gradient(&g, x);
    let mut h = [[1.0, 0.0], [0.0, 1.0]];
    let mut converged = false;

    for _ in 0..MAX_ITER {
        if grad[0].abs().max(grad[1].abs()) < GRAD_TOL {
            converged = true;
            break;
        }
        let mut d = [
            -(h[0][0] * grad[0] + h[0][1] * grad[1]),
            -(h[1][0] * grad[0] + h[1][1] * grad[1]),
        ];
        let mut slope = d[0] * grad[0] + d[1] * grad[1];
        if slope >= 0.0 {
            h = [[1.0, 0.0], [0.0, 1.0]];
            d = [-grad[0], -grad[1]];
            slope = d[0] * grad[0] + d[1] * grad[1];
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = [x[0] + step * d[0], x[1] + step * d[1]];
            let gt = g(trial);
            if !gt.is_finite() {
                return Err(Error::Numeric("objective became non-finite".into()));
            }
            if gt <= gx + 1e-4 * step * slope {
                accepted = Some((trial, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, gn)) = accepted else {
            // no decrease along the direction: stationary to working precision
            converged = grad[0].abs().max(grad[1].abs()) < 1e-5;
            break;
        };
        let grad_n = gradient(&g, xn);
        let s = [xn[0] - x[0], xn[1] - x[1]];
        let y = [grad_n[0] - grad[0], grad_n[1] - grad[1]];
        let sy = s[0] * y[0] + s[1] * y[1];
        if sy > 1e-14 {
            // H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ
            let rho = 1.0 / sy;
            let hy = [h[0][0] * y[0] + h[0][1] * y[1], h[1][0] * y[0] + h[1][1] * y[1]];
            let yhy = y[0] * hy[0] + y[1] * hy[1];
            for r in 0..2 {
                for c in 0..2 {
                    h[r][c] += -rho * (s[r] * hy[c] + hy[r] * s[c]) + (rho * rho * yhy + rho) * s[r] * s[c];
                }
            }
        }
        let improvement = gx - gn;
        x = xn;
        gx = gn;
        grad = grad_n;
        if improvement.abs() <= 1e-15 * gx.abs().max(1.0) && grad[0].abs().max(grad[1].abs()) < 1e-6 {
            converged = true;
            break;
        }
    }
    Ok(LocalMax {
        x,
        value: -gx,
        converged,
    })
}

/// Best single-layer angles over `restarts` uniform random starts in
/// `[0, 2π)²`. Deterministic for a given seed; ties go to the earliest start.
pub fn optimize_params(ising: &IsingInstance, restarts: usize, seed: u64) -> Result<OptimizeOutcome> {
    if restarts == 0 {
        return Err(Error::InvalidInput("restarts must be at least 1".into()));
    }
    let eval = P1Evaluator::new(ising);
    if eval.is_trivial() {
        return Ok(OptimizeOutcome {
            params: QaoaParams::p1(0.0, 0.0),
            value: eval.offset(),
            converged: true,
        });
    }
    let mut rng = rng::stream(seed, "qaoa-restarts", 0);
    let starts: Vec<[f64; 2]> = (0..restarts)
        .map(|_| [rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)])
        .collect();
    let results: Vec<Result<LocalMax>> = starts
        .par_iter()
        .map(|&x0| maximize_bfgs(|x| eval.value(x[0], x[1]), x0))
        .collect();

    let mut best: Option<LocalMax> = None;
    let mut any_converged = false;
    for r in results {
        let r = r?;
        any_converged |= r.converged;
        if best.is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    let best = best.expect("restarts >= 1");
    if !any_converged {
        log::warn!("no QAOA restart converged; returning best evaluated point");
    }
    Ok(OptimizeOutcome {
        params: QaoaParams::p1(best.x[0], best.x[1]).canonical(),
        value: best.value,
        converged: any_converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::ising::qubo_to_ising;
    use crate::qubo::{maxcut_to_qubo, QuboInstance};

    #[test]
    fn finds_quadratic_maximum() {
        let r = maximize_bfgs(|x| -(x[0] - 1.0).powi(2) - 3.0 * (x[1] + 2.0).powi(2) + 5.0, [4.0, 4.0]).unwrap();
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] + 2.0).abs() < 1e-6);
        assert!((r.value - 5.0).abs() < 1e-10);
    }

    #[test]
    fn single_edge_reaches_one() {
        let s = qubo_to_ising(&maxcut_to_qubo(&fixtures::path(2)));
        let out = optimize_params(&s, 20, 1).unwrap();
        assert!((out.value - 1.0).abs() < 1e-6, "{}", out.value);
        assert!(out.converged);
    }

    #[test]
    fn constant_instance_returns_offset() {
        let mut q = QuboInstance::new(3);
        q.set_offset(4.5).unwrap();
        let out = optimize_params(&qubo_to_ising(&q), 5, 0).unwrap();
        assert_eq!(out.value, 4.5);
    }

    #[test]
    fn deterministic_per_seed() {
        let s = qubo_to_ising(&maxcut_to_qubo(&fixtures::five_vertex_example()));
        let a = optimize_params(&s, 10, 9).unwrap();
        let b = optimize_params(&s, 10, 9).unwrap();
        assert_eq!(a, b);
        assert!(optimize_params(&s, 0, 9).is_err());
    }
}
