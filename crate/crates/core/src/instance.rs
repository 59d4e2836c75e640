//! A decomposable instance: either a weighted MaxCut graph or a QUBO.

use serde::{Deserialize, Serialize};

use crate::cutset::CutPartition;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::qubo::{cut_value, maxcut_to_qubo, QuboInstance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "kebab-case")]
pub enum Instance {
    MaxCut(WeightedGraph),
    Qubo(QuboInstance),
}

impl Instance {
    pub fn n(&self) -> usize {
        match self {
            Instance::MaxCut(g) => g.n(),
            Instance::Qubo(q) => q.n(),
        }
    }

    pub fn is_maxcut(&self) -> bool {
        matches!(self, Instance::MaxCut(_))
    }

    /// Graph whose vertex cuts are searched: the MaxCut graph itself, or the
    /// interaction graph of the QUBO.
    pub fn structure_graph(&self) -> WeightedGraph {
        match self {
            Instance::MaxCut(g) => g.clone(),
            Instance::Qubo(q) => q.interaction_graph(),
        }
    }

    pub fn to_qubo(&self) -> QuboInstance {
        match self {
            Instance::MaxCut(g) => maxcut_to_qubo(g),
            Instance::Qubo(q) => q.clone(),
        }
    }

    pub fn evaluate_bits(&self, z: &[bool]) -> Result<f64> {
        if z.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: z.len(),
            });
        }
        Ok(match self {
            Instance::MaxCut(g) => cut_value(g, z),
            Instance::Qubo(q) => q.evaluate_bits(z),
        })
    }

    /// Terms assigned to the `V2` side of `part`, in the full index space.
    ///
    /// For a graph this is the induced subgraph on `V2 ∪ K` (edges inside
    /// `K` included). For a QUBO it is every pair touching `V2`, every pair
    /// inside `K`, and the linear terms of `V2 ∪ K`. Everything else, offset
    /// included, stays with the remainder.
    pub fn side_terms(&self, part: &CutPartition) -> Result<QuboInstance> {
        let n = self.n();
        let mut tag = vec![1u8; n];
        for &v in &part.v2 {
            tag[v] = 2;
        }
        for &v in &part.cut {
            tag[v] = 3;
        }
        let mut h = QuboInstance::new(n);
        match self {
            Instance::MaxCut(g) => {
                for (i, j, w) in g.edges() {
                    if tag[i] != 1 && tag[j] != 1 {
                        h.add_lin(i, w)?;
                        h.add_lin(j, w)?;
                        h.add_quad(i, j, -2.0 * w)?;
                    }
                }
            }
            Instance::Qubo(q) => {
                for (i, j, v) in q.quad_terms() {
                    let owned = tag[i] == 2 || tag[j] == 2 || (tag[i] == 3 && tag[j] == 3);
                    if owned {
                        h.add_quad(i, j, v)?;
                    }
                }
                for (i, &v) in q.linear_terms().iter().enumerate() {
                    if tag[i] != 1 && v != 0.0 {
                        h.add_lin(i, v)?;
                    }
                }
            }
        }
        Ok(h)
    }
}
