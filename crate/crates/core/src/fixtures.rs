//! Small named graphs used by tests, docs and the CLI.
//!
//! The two worked-example graphs use 1-based labels in their usual drawings;
//! here label `L` is vertex id `L - 1`.

use crate::graph::WeightedGraph;

/// Six vertices, nine unit edges: vertex 1 joined to 2, 3, 4, and each of
/// 2, 3, 4 joined to both 5 and 6. Minimum vertex cut {2, 3, 4}.
pub fn six_vertex_example() -> WeightedGraph {
    WeightedGraph::unweighted(
        6,
        [
            (0, 1),
            (0, 2),
            (0, 3),
            (3, 5),
            (3, 4),
            (2, 5),
            (2, 4),
            (1, 5),
            (1, 4),
        ],
    )
    .expect("static graph")
}

/// Five vertices: 1-2, 1-3, 1-4, 3-4, 3-5. Both {1} and {3} are cut vertices.
pub fn five_vertex_example() -> WeightedGraph {
    WeightedGraph::unweighted(5, [(0, 1), (0, 2), (0, 3), (3, 2), (2, 4)]).expect("static graph")
}

pub fn path(n: usize) -> WeightedGraph {
    WeightedGraph::unweighted(n, (1..n).map(|i| (i - 1, i))).expect("static graph")
}

pub fn cycle(n: usize) -> WeightedGraph {
    WeightedGraph::unweighted(n, (0..n).map(|i| (i, (i + 1) % n))).expect("static graph")
}

pub fn complete(n: usize) -> WeightedGraph {
    WeightedGraph::unweighted(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
        .expect("static graph")
}

/// Star with center 0 and `leaves` leaves.
pub fn star(leaves: usize) -> WeightedGraph {
    WeightedGraph::unweighted(leaves + 1, (1..=leaves).map(|l| (0, l))).expect("static graph")
}

/// The 3-cube: 8 vertices, adjacent when labels differ in one bit.
pub fn cube() -> WeightedGraph {
    let edges = (0..8usize).flat_map(|v| {
        (0..3)
            .map(move |b| (v, v ^ (1 << b)))
            .filter(|&(a, b)| a < b)
    });
    WeightedGraph::unweighted(8, edges).expect("static graph")
}
