//! Vertex-cut decomposition of MaxCut and QUBO instances.
//!
//! A minimum vertex cut `K` splits an instance into a small side `V2` and the
//! rest. The best `V2` value is tabulated for every fixing of `K`, the table
//! is fitted onto new coefficients inside `K`, and `V2` is dropped. Repeating
//! this shrinks the instance while keeping its optimum (exactly for cuts of up
//! to three vertices, up to a reported error otherwise). Single-layer QAOA is
//! provided in closed form and by statevector simulation to score instances
//! before and after reduction.
//!
//! ```
//! use qubo_decomp::{decompose, lift_solution, DecompConfig, Instance, WeightedGraph};
//! use qubo_decomp::subsolver::exact_optimum;
//!
//! # fn main() -> qubo_decomp::Result<()> {
//! let g = WeightedGraph::unweighted(5, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4)])?;
//! let inst = Instance::MaxCut(g);
//! let trace = decompose(&inst, &DecompConfig::default())?;
//! let best = exact_optimum(&trace.final_instance.to_qubo())?;
//! let z = lift_solution(&trace, &best.witness)?;
//! assert!((inst.evaluate_bits(z.bits())? - (best.value + trace.c_total)).abs() < 1e-9);
//! # Ok(())
//! # }
//! ```

pub mod cutset;
pub mod decompose;
pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod generate;
pub mod graph;
pub mod instance;
pub mod ising;
pub mod qaoa;
pub mod qubo;
pub mod reweight;
pub mod rng;
pub mod simplex;
pub mod subsolver;

pub use cutset::{choose_cut, min_vertex_cut, CutPartition, CutStrategy};
pub use decompose::{decompose, lift_solution, DecompConfig, DecompositionTrace, Decomposer};
pub use error::{Error, Result};
pub use graph::WeightedGraph;
pub use instance::Instance;
pub use ising::IsingInstance;
pub use qaoa::QaoaParams;
pub use qubo::{Bitstring, QuboInstance};
pub use reweight::{ReweightMode, ReweightResult};
pub use subsolver::{BackendChoice, BackendKind, SubproblemTable};
