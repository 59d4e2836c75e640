//! Dense two-phase simplex for small standard-form linear programs
//! `min cᵀx  s.t.  A x = b, x ≥ 0`, with Bland's rule against cycling.

use crate::error::{Error, Result};

const EPS: f64 = 1e-10;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal,
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// `m` constraint rows of width `cols + 1`; the last entry is the rhs.
    rows: Vec<Vec<f64>>,
    /// Reduced costs with the negated objective value in the last entry.
    obj: Vec<f64>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                    row[c] = 0.0;
                }
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (v, &pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Resets the objective row to `cost` priced out against the basis.
    fn price(&mut self, cost: &[f64]) {
        self.obj = vec![0.0; self.cols + 1];
        self.obj[..cost.len()].copy_from_slice(cost);
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = if b < cost.len() { cost[b] } else { 0.0 };
            if cb != 0.0 {
                for (v, &rv) in self.obj.iter_mut().zip(row) {
                    *v -= cb * rv;
                }
            }
        }
    }

    /// Runs Bland's rule over the columns `< allowed`.
    fn optimize(&mut self, allowed: usize) -> Result<LpOutcome> {
        for _ in 0..MAX_PIVOTS {
            let Some(c) = (0..allowed).find(|&j| self.obj[j] < -EPS) else {
                return Ok(LpOutcome::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c] > EPS {
                    let ratio = row[self.cols] / row[c];
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - EPS
                                || (ratio <= lr + EPS && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Ok(LpOutcome::Unbounded);
            };
            self.pivot(r, c);
        }
        Err(Error::Numeric("simplex pivot limit reached".into()))
    }
}

/// Solves `min cᵀx  s.t.  A x = b, x ≥ 0`. Returns the outcome and, when
/// optimal, the solution.
pub fn solve_standard_form(
    a: &[Vec<f64>],
    b: &[f64],
    c: &[f64],
) -> Result<(LpOutcome, Option<LpSolution>)> {
    let m = a.len();
    let n = c.len();
    if b.len() != m {
        return Err(Error::InvalidInput(format!(
            "LP has {m} rows but {} right-hand sides",
            b.len()
        )));
    }
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("LP rows must all have one entry per variable".into()));
    }
    if a.iter().flatten().chain(b).chain(c).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("LP data must be finite".into()));
    }

    // phase one: one artificial per row, rows flipped so that b ≥ 0
    let cols = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (ar, &bi)) in a.iter().zip(b).enumerate() {
        let sign = if bi < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; cols + 1];
        for (v, &x) in row.iter_mut().zip(ar) {
            *v = sign * x;
        }
        row[n + i] = 1.0;
        row[cols] = sign * bi;
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        obj: Vec::new(),
        basis: (n..n + m).collect(),
        cols,
    };
    let mut phase1 = vec![0.0; cols];
    phase1[n..].fill(1.0);
    t.price(&phase1);
    t.optimize(cols)?;
    let infeas = -t.obj[cols];
    let scale = 1.0 + b.iter().map(|v| v.abs()).sum::<f64>();
    if infeas > 1e-9 * scale {
        return Ok((LpOutcome::Infeasible, None));
    }

    // drive artificials out of the basis, dropping redundant rows
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            match (0..n).find(|&j| t.rows[r][j].abs() > 1e-9) {
                Some(j) => t.pivot(r, j),
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }
    for row in t.rows.iter_mut() {
        for v in &mut row[n..cols] {
            *v = 0.0;
        }
    }

    t.price(c);
    match t.optimize(n)? {
        LpOutcome::Optimal => {}
        other => return Ok((other, None)),
    }
    let mut x = vec![0.0; n];
    for (row, &bv) in t.rows.iter().zip(&t.basis) {
        x[bv] = row[cols].max(0.0);
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok((LpOutcome::Optimal, Some(LpSolution { x, objective })))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &[Vec<f64>], b: &[f64], x: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(r, bi)| (r.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() - bi).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn small_textbook_problem() {
        // max 3x + 5y s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18; optimum 36 at (2, 6)
        let a = vec![
            vec![1.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0, 1.0, 0.0],
            vec![3.0, 2.0, 0.0, 0.0, 1.0],
        ];
        let b = vec![4.0, 12.0, 18.0];
        let c = vec![-3.0, -5.0, 0.0, 0.0, 0.0];
        let (st, sol) = solve_standard_form(&a, &b, &c).unwrap();
        assert_eq!(st, LpOutcome::Optimal);
        let sol = sol.unwrap();
        assert!((sol.objective + 36.0).abs() < 1e-9);
        assert!((sol.x[0] - 2.0).abs() < 1e-9 && (sol.x[1] - 6.0).abs() < 1e-9);
        assert!(residual(&a, &b, &sol.x) < 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let (st, _) = solve_standard_form(&a, &[1.0, 2.0], &[0.0, 0.0]).unwrap();
        assert_eq!(st, LpOutcome::Infeasible);

        let a = vec![vec![1.0, -1.0]];
        let (st, _) = solve_standard_form(&a, &[1.0], &[-1.0, 0.0]).unwrap();
        assert_eq!(st, LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_and_negative_rhs() {
        let a = vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![-1.0, 0.0, -1.0]];
        let b = vec![2.0, 4.0, -3.0];
        let (st, sol) = solve_standard_form(&a, &b, &[1.0, 2.0, 1.0]).unwrap();
        assert_eq!(st, LpOutcome::Optimal);
        let sol = sol.unwrap();
        assert!(residual(&a, &b, &sol.x) < 1e-9);
        // x0 = 2, x1 = 0, x2 = 1
        assert!((sol.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // classic cycling example under the largest-coefficient rule
        let a = vec![
            vec![0.5, -5.5, -2.5, 9.0, 1.0, 0.0, 0.0],
            vec![0.5, -1.5, -0.5, 1.0, 0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        ];
        let b = vec![0.0, 0.0, 1.0];
        let c = vec![-10.0, 57.0, 9.0, 24.0, 0.0, 0.0, 0.0];
        let (st, sol) = solve_standard_form(&a, &b, &c).unwrap();
        assert_eq!(st, LpOutcome::Optimal);
        assert!((sol.unwrap().objective + 1.0).abs() < 1e-9);
    }
}
