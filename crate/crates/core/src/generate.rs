//! Seeded random graph families.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::graph::WeightedGraph;
use crate::rng;

pub const MAX_ATTEMPTS: usize = 1000;
const PAIRING_RETRIES: usize = 100;

/// Random connected simple `k`-regular graph with unit weights.
///
/// Stubs are paired one edge at a time; a pair that would create a loop or a
/// repeated edge is redrawn, and an attempt that gets stuck or ends
/// disconnected is discarded.
pub fn generate_regular(n: usize, k: usize, seed: u64) -> Result<WeightedGraph> {
    if k >= n {
        return invalid(format!("degree {k} needs more than {n} vertices"));
    }
    if (n * k) % 2 == 1 {
        return invalid(format!("n·k = {} is odd", n * k));
    }
    let mut rng = rng::stream(seed, "regular-graph", 0);
    for attempt in 0..MAX_ATTEMPTS {
        if let Some(g) = try_pairing(n, k, &mut rng) {
            if g.is_connected() {
                log::trace!("regular graph accepted after {} attempts", attempt + 1);
                return Ok(g);
            }
        }
    }
    Err(Error::Generation(MAX_ATTEMPTS))
}

fn try_pairing<R: Rng>(n: usize, k: usize, rng: &mut R) -> Option<WeightedGraph> {
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, k)).collect();
    stubs.shuffle(rng);
    let mut g = WeightedGraph::new(n);
    while !stubs.is_empty() {
        let mut placed = false;
        for _ in 0..PAIRING_RETRIES {
            let a = rng.gen_range(0..stubs.len());
            let b = rng.gen_range(0..stubs.len());
            let (u, v) = (stubs[a], stubs[b]);
            if a == b || u == v || g.has_edge(u, v) {
                continue;
            }
            g.add_edge(u, v, 1.0).ok()?;
            let (hi, lo) = (a.max(b), a.min(b));
            stubs.swap_remove(hi);
            stubs.swap_remove(lo);
            placed = true;
            break;
        }
        if !placed {
            return None;
        }
    }
    Some(g)
}

/// Random connected graph: a random spanning tree plus each remaining pair
/// with probability `p`, integer weights drawn uniformly from `lo..=hi`.
pub fn generate_connected(n: usize, p: f64, lo: i64, hi: i64, seed: u64) -> Result<WeightedGraph> {
    if n == 0 {
        return invalid("graph needs at least one vertex");
    }
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("edge probability {p} outside [0, 1]"));
    }
    if lo > hi {
        return invalid(format!("empty weight range {lo}..={hi}"));
    }
    let mut rng = rng::stream(seed, "connected-graph", 0);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut g = WeightedGraph::new(n);
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        g.add_edge(order[i], parent, rng.gen_range(lo..=hi) as f64)?;
    }
    for u in 0..n {
        for v in u + 1..n {
            if !g.has_edge(u, v) && rng.gen_bool(p) {
                g.add_edge(u, v, rng.gen_range(lo..=hi) as f64)?;
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn four_vertex_cubic_is_k4() {
        let g = generate_regular(4, 3, 7).unwrap();
        assert!(g.is_complete());
    }

    #[test]
    fn odd_product_rejected() {
        assert!(matches!(generate_regular(5, 3, 0), Err(Error::InvalidInput(_))));
        assert!(generate_regular(3, 3, 0).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_regular(20, 3, 11).unwrap();
        let b = generate_regular(20, 3, 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_regular(20, 3, 12).unwrap());
    }

    #[test]
    fn perfect_matching_never_connected() {
        assert!(matches!(generate_regular(6, 1, 0), Err(Error::Generation(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn regular_graphs_pass_verification(half in 3usize..20, k in 2usize..6, seed in any::<u64>()) {
            let n = 2 * half;
            let g = generate_regular(n, k, seed).unwrap();
            prop_assert!(g.is_regular(k));
            prop_assert!(g.is_connected());
            prop_assert_eq!(g.num_edges(), n * k / 2);
        }

        #[test]
        fn connected_graphs_are_connected(n in 1usize..15, p in 0.0f64..1.0, seed in any::<u64>()) {
            let g = generate_connected(n, p, 1, 5, seed).unwrap();
            prop_assert!(g.is_connected());
            prop_assert!(g.edges().all(|(_, _, w)| (1.0..=5.0).contains(&w) && w.fract() == 0.0));
        }
    }
}
