//! Closed-form `p = 1` expectations for Ising costs with local fields.
//!
//! For `H = Σ h_i Z_i + Σ J_ij Z_i Z_j + offset`:
//!
//! ```text
//! ⟨Z_i⟩     = sin2β · sin(2γ h_i) · Π_{k≠i} cos(2γ J_ik)
//! ⟨Z_i Z_j⟩ = ½ sin4β · sin(2γ J_ij) · [cos(2γ h_i) Π_{k≠i,j} cos(2γ J_ik)
//!                                      + cos(2γ h_j) Π_{k≠i,j} cos(2γ J_jk)]
//!           + ½ sin²2β · Π_{k∈N(i)⊕N(j)} cos(2γ J_•k)
//!             · [cos(2γ(h_i − h_j)) Π_{k∈N(i)∩N(j)} cos(2γ(J_ik − J_jk))
//!              − cos(2γ(h_i + h_j)) Π_{k∈N(i)∩N(j)} cos(2γ(J_ik + J_jk))]
//! ```
//!
//! Products range over neighbors only, since absent couplings contribute
//! `cos 0 = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::IsingInstance;

use super::QaoaParams;

/// Per-term split of a single-layer expectation value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationBreakdown {
    /// `h_i ⟨Z_i⟩` for each vertex.
    pub vertex_terms: Vec<f64>,
    /// `(i, j, J_ij ⟨Z_i Z_j⟩)` for each coupling.
    pub edge_terms: Vec<(usize, usize, f64)>,
    pub offset: f64,
    pub total: f64,
}

/// Precomputed neighborhoods for repeated evaluation at different angles.
#[derive(Debug, Clone)]
pub struct P1Evaluator {
    fields: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
    nbrs: Vec<Vec<(usize, f64)>>,
    offset: f64,
}

impl P1Evaluator {
    pub fn new(ising: &IsingInstance) -> Self {
        let n = ising.n();
        let mut nbrs = vec![Vec::new(); n];
        let edges: Vec<_> = ising.couplings().collect();
        for &(i, j, v) in &edges {
            nbrs[i].push((j, v));
            nbrs[j].push((i, v));
        }
        for list in &mut nbrs {
            list.sort_by_key(|&(k, _)| k);
        }
        P1Evaluator {
            fields: ising.fields().to_vec(),
            edges,
            nbrs,
            offset: ising.offset(),
        }
    }

    pub fn n(&self) -> usize {
        self.fields.len()
    }

    /// True when the cost is constant (no fields, no couplings).
    pub fn is_trivial(&self) -> bool {
        self.edges.is_empty() && self.fields.iter().all(|&h| h == 0.0)
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    fn vertex_term(&self, i: usize, gamma: f64, sin2b: f64) -> f64 {
        let h = self.fields[i];
        if h == 0.0 {
            return 0.0;
        }
        let prod: f64 = self.nbrs[i]
            .iter()
            .map(|&(_, j)| (2.0 * gamma * j).cos())
            .product();
        h * sin2b * (2.0 * gamma * h).sin() * prod
    }

    fn edge_term(&self, u: usize, v: usize, j_uv: f64, gamma: f64, sin4b: f64, sin2b_sq: f64) -> f64 {
        let g2 = 2.0 * gamma;
        let (hu, hv) = (self.fields[u], self.fields[v]);
        let (nu, nv) = (&self.nbrs[u], &self.nbrs[v]);

        let mut prod_u = 1.0;
        let mut prod_v = 1.0;
        let mut exclusive = 1.0;
        let mut common_minus = 1.0;
        let mut common_plus = 1.0;
        let (mut a, mut b) = (0, 0);
        // merge the two sorted neighbor lists, skipping u and v themselves
        loop {
            let ka = nu.get(a).map(|x| x.0);
            let kb = nv.get(b).map(|x| x.0);
            match (ka, kb) {
                (None, None) => break,
                (Some(k), _) if k == v => a += 1,
                (_, Some(k)) if k == u => b += 1,
                (Some(x), Some(y)) if x == y => {
                    let (ja, jb) = (nu[a].1, nv[b].1);
                    prod_u *= (g2 * ja).cos();
                    prod_v *= (g2 * jb).cos();
                    common_minus *= (g2 * (ja - jb)).cos();
                    common_plus *= (g2 * (ja + jb)).cos();
                    a += 1;
                    b += 1;
                }
                (Some(x), y) if y.is_none_or(|y| x < y) => {
                    let c = (g2 * nu[a].1).cos();
                    prod_u *= c;
                    exclusive *= c;
                    a += 1;
                }
                _ => {
                    let c = (g2 * nv[b].1).cos();
                    prod_v *= c;
                    exclusive *= c;
                    b += 1;
                }
            }
        }
        let first = 0.5 * sin4b * (g2 * j_uv).sin() * ((g2 * hu).cos() * prod_u + (g2 * hv).cos() * prod_v);
        let second = 0.5
            * sin2b_sq
            * exclusive
            * ((g2 * (hu - hv)).cos() * common_minus - (g2 * (hu + hv)).cos() * common_plus);
        j_uv * (first + second)
    }

    /// `⟨H_C⟩` at `(γ, β)`, offset included.
    pub fn value(&self, gamma: f64, beta: f64) -> f64 {
        let sin2b = (2.0 * beta).sin();
        let sin4b = (4.0 * beta).sin();
        let sin2b_sq = sin2b * sin2b;
        let vertices: f64 = (0..self.n()).map(|i| self.vertex_term(i, gamma, sin2b)).sum();
        let edges: f64 = self
            .edges
            .iter()
            .map(|&(u, v, j)| self.edge_term(u, v, j, gamma, sin4b, sin2b_sq))
            .sum();
        vertices + edges + self.offset
    }

    pub fn breakdown(&self, gamma: f64, beta: f64) -> ExpectationBreakdown {
        let sin2b = (2.0 * beta).sin();
        let sin4b = (4.0 * beta).sin();
        let sin2b_sq = sin2b * sin2b;
        let vertex_terms: Vec<f64> = (0..self.n()).map(|i| self.vertex_term(i, gamma, sin2b)).collect();
        let edge_terms: Vec<(usize, usize, f64)> = self
            .edges
            .iter()
            .map(|&(u, v, j)| (u, v, self.edge_term(u, v, j, gamma, sin4b, sin2b_sq)))
            .collect();
        let total = vertex_terms.iter().sum::<f64>()
            + edge_terms.iter().map(|e| e.2).sum::<f64>()
            + self.offset;
        ExpectationBreakdown {
            vertex_terms,
            edge_terms,
            offset: self.offset,
            total,
        }
    }
}

/// Single-layer expectation split into vertex and edge contributions.
pub fn expectation_p1(ising: &IsingInstance, params: &QaoaParams) -> Result<ExpectationBreakdown> {
    if params.p() != 1 {
        return Err(Error::UnsupportedDepth(params.p()));
    }
    let (g, b) = (params.gamma(), params.beta());
    if !g.is_finite() || !b.is_finite() {
        return Err(Error::Numeric("non-finite QAOA angle".into()));
    }
    Ok(P1Evaluator::new(ising).breakdown(g, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::ising::qubo_to_ising;
    use crate::qubo::maxcut_to_qubo;
    use std::f64::consts::PI;

    fn edge_ising() -> IsingInstance {
        qubo_to_ising(&maxcut_to_qubo(&fixtures::path(2)))
    }

    #[test]
    fn zero_angles_give_zero_terms() {
        let s = qubo_to_ising(&maxcut_to_qubo(&fixtures::six_vertex_example()));
        let b = expectation_p1(&s, &QaoaParams::p1(0.0, 0.0)).unwrap();
        assert!(b.vertex_terms.iter().all(|&t| t == 0.0));
        assert!(b.edge_terms.iter().all(|t| t.2 == 0.0));
        assert_eq!(b.total, s.offset());
    }

    #[test]
    fn single_edge_closed_form() {
        // cut(z) = ½ − ½ Z₀Z₁, so ⟨C⟩ = ½ + ½ sin4β sinγ in this convention
        let s = edge_ising();
        let ev = P1Evaluator::new(&s);
        for &(g, b) in &[(0.3, 0.2), (1.1, -0.4), (PI / 2.0, PI / 8.0)] {
            let want = 0.5 + 0.5 * (4.0 * b).sin() * g.sin();
            assert!((ev.value(g, b) - want).abs() < 1e-14);
        }
        assert!((ev.value(PI / 2.0, PI / 8.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unit_coupling_closed_form() {
        let mut s = IsingInstance::new(2);
        s.add_coupling(0, 1, 1.0).unwrap();
        let ev = P1Evaluator::new(&s);
        for &(g, b) in &[(0.3, 0.2), (1.1, -0.4), (PI / 4.0, PI / 8.0)] {
            let want = (4.0 * b).sin() * (2.0 * g).sin();
            assert!((ev.value(g, b) - want).abs() < 1e-14);
        }
        assert!((ev.value(PI / 4.0, PI / 8.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn breakdown_sums_to_total() {
        let s = qubo_to_ising(&maxcut_to_qubo(&fixtures::five_vertex_example()));
        let b = expectation_p1(&s, &QaoaParams::p1(0.7, 0.3)).unwrap();
        let sum = b.vertex_terms.iter().sum::<f64>() + b.edge_terms.iter().map(|e| e.2).sum::<f64>() + b.offset;
        assert!((sum - b.total).abs() <= 1e-12);
    }

    #[test]
    fn rejects_deeper_circuits() {
        let p2 = QaoaParams {
            gammas: vec![0.1, 0.2],
            betas: vec![0.1, 0.2],
        };
        assert!(matches!(expectation_p1(&edge_ising(), &p2), Err(Error::UnsupportedDepth(2))));
    }
}
