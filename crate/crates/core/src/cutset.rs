//! Vertex cut sets.
//!
//! The global minimum cut uses the vertex-splitting construction: each vertex
//! `v` becomes `v_in → v_out` with unit capacity, each undirected edge becomes
//! two infinite arcs `u_out → v_in`, `v_out → u_in`, and the max flow from
//! `s_out` to `t_in` counts internally vertex-disjoint `s`–`t` paths. Only
//! `O(n + δ²)` source/target pairs need probing: fix a minimum-degree vertex
//! `u`, probe `u` against every non-neighbor, and every non-adjacent pair
//! inside `N(u)`.
//!
//! Edge weights play no role here. When several minimum cuts are found, the
//! lexicographically smallest sorted `K` among the probe results wins, so the
//! output does not depend on probe scheduling.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Cut set `K` with the two sides left after removing it.
///
/// All three lists are sorted. `v2` is the smallest component of `G − K`
/// (ties go to the component holding the smallest label); `v1` is the union
/// of all other components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutPartition {
    pub cut: Vec<usize>,
    pub v1: Vec<usize>,
    pub v2: Vec<usize>,
}

impl CutPartition {
    pub fn k(&self) -> usize {
        self.cut.len()
    }

    /// Checks disjointness, coverage of `0..n`, and that no edge joins
    /// `v1` to `v2`.
    pub fn is_valid_for(&self, g: &WeightedGraph) -> bool {
        let n = g.n();
        let mut side = vec![0u8; n];
        for (tag, set) in [(1u8, &self.v1), (2, &self.v2), (3, &self.cut)] {
            for &v in set {
                if v >= n || side[v] != 0 {
                    return false;
                }
                side[v] = tag;
            }
        }
        if side.contains(&0) || self.v1.is_empty() || self.v2.is_empty() {
            return false;
        }
        g.edges()
            .all(|(i, j, _)| !matches!((side[i], side[j]), (1, 2) | (2, 1)))
    }
}

/// How to pick the cut set at each decomposition step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutStrategy {
    /// Minimum-cardinality vertex separator.
    #[default]
    GlobalMin,
    /// Neighborhood of a minimum-degree vertex.
    MinDegreeNeighborhood,
}

/// Splits `G − K` into the smallest component `V2` and the rest `V1`.
pub fn split_components(g: &WeightedGraph, cut: &[usize]) -> Result<CutPartition> {
    let mut k = cut.to_vec();
    k.sort_unstable();
    k.dedup();
    if let Some(&v) = k.iter().find(|&&v| v >= g.n()) {
        return Err(Error::InvalidInput(format!("cut vertex {v} out of range")));
    }
    let comps = g.components_avoiding(&k);
    if comps.len() < 2 {
        return Err(Error::NotACut);
    }
    // components come ordered by smallest label, so min_by_key keeps the
    // first of equally small ones
    let (small, _) = comps
        .iter()
        .enumerate()
        .min_by_key(|(_, c)| c.len())
        .expect("at least two components");
    let v2 = comps[small].clone();
    let mut v1: Vec<usize> = comps
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != small)
        .flat_map(|(_, c)| c.iter().copied())
        .collect();
    v1.sort_unstable();
    Ok(CutPartition { cut: k, v1, v2 })
}

/// Global minimum vertex cut of a connected, non-complete graph.
pub fn min_vertex_cut(g: &WeightedGraph) -> Result<CutPartition> {
    let n = g.n();
    if n < 2 || g.is_complete() {
        return Err(Error::NoCut);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let u = min_degree_vertex(g);
    let nbrs: Vec<usize> = g.neighbors(u).collect();
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .filter(|&w| w != u && !g.has_edge(u, w))
        .map(|w| (u, w))
        .collect();
    for (a, &x) in nbrs.iter().enumerate() {
        for &y in &nbrs[a + 1..] {
            if !g.has_edge(x, y) {
                pairs.push((x, y));
            }
        }
    }
    let net = SplitNetwork::new(g);
    let best = pairs
        .par_iter()
        .flat_map_iter(|&(s, t)| {
            let (fwd, bwd) = net.min_separators(s, t);
            [fwd, bwd]
        })
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
        .ok_or(Error::NoCut)?;
    split_components(g, &best)
}

/// Vertex connectivity κ(G); `n − 1` for complete graphs.
pub fn vertex_connectivity(g: &WeightedGraph) -> Result<usize> {
    if g.n() >= 1 && g.is_complete() {
        return Ok(g.n() - 1);
    }
    min_vertex_cut(g).map(|p| p.k())
}

/// Cut formed by the neighborhood of `v`; `V2` is the component of `v`.
pub fn neighborhood_cut(g: &WeightedGraph, v: usize) -> Result<CutPartition> {
    if v >= g.n() {
        return Err(Error::InvalidInput(format!("vertex {v} out of range")));
    }
    if g.degree(v) + 1 >= g.n() {
        return Err(Error::NoCut);
    }
    let cut: Vec<usize> = g.neighbors(v).collect();
    let comps = g.components_avoiding(&cut);
    let v2 = comps
        .iter()
        .find(|c| c.binary_search(&v).is_ok())
        .expect("v survives removal of its neighbors")
        .clone();
    let mut v1: Vec<usize> = comps
        .into_iter()
        .filter(|c| c.binary_search(&v).is_err())
        .flatten()
        .collect();
    v1.sort_unstable();
    Ok(CutPartition { cut, v1, v2 })
}

pub fn choose_cut(g: &WeightedGraph, strategy: CutStrategy) -> Result<CutPartition> {
    match strategy {
        CutStrategy::GlobalMin => min_vertex_cut(g),
        CutStrategy::MinDegreeNeighborhood => {
            if g.n() < 2 || g.is_complete() {
                return Err(Error::NoCut);
            }
            neighborhood_cut(g, min_degree_vertex(g))
        }
    }
}

fn min_degree_vertex(g: &WeightedGraph) -> usize {
    (0..g.n())
        .min_by_key(|&v| (g.degree(v), v))
        .expect("nonempty graph")
}

/// Residual network of the split graph; rebuilt per probe from a template.
struct SplitNetwork {
    n: usize,
    // arcs stored as (head, capacity); arc e and e^1 are mutual reverses
    head: Vec<usize>,
    cap: Vec<u32>,
    first: Vec<Vec<usize>>,
}

const INF: u32 = u32::MAX / 4;

impl SplitNetwork {
    fn new(g: &WeightedGraph) -> Self {
        let n = g.n();
        let mut net = SplitNetwork {
            n,
            head: Vec::new(),
            cap: Vec::new(),
            first: vec![Vec::new(); 2 * n],
        };
        for v in 0..n {
            net.arc(2 * v, 2 * v + 1, 1);
        }
        for (i, j, _) in g.edges() {
            net.arc(2 * i + 1, 2 * j, INF);
            net.arc(2 * j + 1, 2 * i, INF);
        }
        net
    }

    fn arc(&mut self, from: usize, to: usize, cap: u32) {
        self.first[from].push(self.head.len());
        self.head.push(to);
        self.cap.push(cap);
        self.first[to].push(self.head.len());
        self.head.push(from);
        self.cap.push(0);
    }

    /// Minimum `s`–`t` vertex separators for non-adjacent `s`, `t`: the one
    /// closest to `s` and the one closest to `t`.
    fn min_separators(&self, s: usize, t: usize) -> (Vec<usize>, Vec<usize>) {
        let mut cap = self.cap.clone();
        let source = 2 * s + 1;
        let sink = 2 * t;
        // Edmonds–Karp; every augmenting path carries one unit
        let mut pred = vec![usize::MAX; 2 * self.n];
        loop {
            pred.iter_mut().for_each(|p| *p = usize::MAX);
            let mut queue = VecDeque::from([source]);
            pred[source] = usize::MAX - 1;
            while let Some(x) = queue.pop_front() {
                if x == sink {
                    break;
                }
                for &e in &self.first[x] {
                    let y = self.head[e];
                    if cap[e] > 0 && pred[y] == usize::MAX {
                        pred[y] = e;
                        queue.push_back(y);
                    }
                }
            }
            if pred[sink] == usize::MAX {
                break;
            }
            let mut x = sink;
            while x != source {
                let e = pred[x];
                cap[e] -= 1;
                cap[e ^ 1] += 1;
                x = self.head[e ^ 1];
            }
        }
        let from_source = self.reach(&cap, source, false);
        let to_sink = self.reach(&cap, sink, true);
        let near_s = (0..self.n)
            .filter(|&v| from_source[2 * v] && !from_source[2 * v + 1])
            .collect();
        let near_t = (0..self.n)
            .filter(|&v| !to_sink[2 * v] && to_sink[2 * v + 1])
            .collect();
        (near_s, near_t)
    }

    /// Residual reachability from `start`, or co-reachability when `reverse`.
    fn reach(&self, cap: &[u32], start: usize, reverse: bool) -> Vec<bool> {
        let mut seen = vec![false; 2 * self.n];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &e in &self.first[x] {
                let y = self.head[e];
                // forward: arc x→y usable; reverse: arc y→x (index e^1) usable
                let usable = if reverse { cap[e ^ 1] > 0 } else { cap[e] > 0 };
                if usable && !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn split_examples() {
        let g = fixtures::five_vertex_example();
        let p = split_components(&g, &[2]).unwrap();
        assert_eq!(p.v2, vec![4]);
        assert_eq!(p.v1, vec![0, 1, 3]);

        let g = fixtures::six_vertex_example();
        let p = split_components(&g, &[1, 2, 3]).unwrap();
        assert_eq!(p.v2, vec![0]);
        assert_eq!(p.v1, vec![4, 5]);

        let p = split_components(&fixtures::path(3), &[1]).unwrap();
        assert_eq!(p.v2, vec![0]);
        assert_eq!(p.v1, vec![2]);

        assert!(matches!(
            split_components(&fixtures::cycle(5), &[0]),
            Err(Error::NotACut)
        ));
    }

    #[test]
    fn min_cut_examples() {
        assert_eq!(min_vertex_cut(&fixtures::path(3)).unwrap().cut, vec![1]);
        assert_eq!(
            min_vertex_cut(&fixtures::five_vertex_example()).unwrap().cut,
            vec![0]
        );
        // K_{3,3}: both sides are minimum cuts, the smaller sorted one wins
        let p = min_vertex_cut(&fixtures::six_vertex_example()).unwrap();
        assert_eq!(p.cut, vec![0, 4, 5]);
        assert_eq!(p.v2, vec![1]);
        assert!(p.is_valid_for(&fixtures::six_vertex_example()));
        assert_eq!(min_vertex_cut(&fixtures::cycle(5)).unwrap().k(), 2);
        assert!(matches!(
            min_vertex_cut(&fixtures::complete(4)),
            Err(Error::NoCut)
        ));
        let two = WeightedGraph::unweighted(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(min_vertex_cut(&two), Err(Error::Disconnected)));
    }

    #[test]
    fn neighborhood_examples() {
        let p = neighborhood_cut(&fixtures::six_vertex_example(), 0).unwrap();
        assert_eq!(p.cut, vec![1, 2, 3]);
        assert_eq!(p.v2, vec![0]);

        let p = neighborhood_cut(&fixtures::star(4), 3).unwrap();
        assert_eq!(p.cut, vec![0]);
        assert_eq!(p.v2, vec![3]);
        assert!(matches!(
            neighborhood_cut(&fixtures::star(4), 0),
            Err(Error::NoCut)
        ));

        let cube = fixtures::cube();
        for v in 0..8 {
            let p = neighborhood_cut(&cube, v).unwrap();
            assert_eq!(p.k(), 3);
            assert_eq!(p.v2, vec![v]);
            assert!(p.is_valid_for(&cube));
        }
    }

    #[test]
    fn strategy_dispatch() {
        let g = fixtures::five_vertex_example();
        assert_eq!(choose_cut(&g, CutStrategy::GlobalMin).unwrap().k(), 1);
        let p = choose_cut(&fixtures::six_vertex_example(), CutStrategy::MinDegreeNeighborhood).unwrap();
        assert_eq!(p.cut, vec![1, 2, 3]);
        let p = choose_cut(&fixtures::cube(), CutStrategy::MinDegreeNeighborhood).unwrap();
        assert_eq!(p.k(), 3);
        assert_eq!(p.v2, vec![0]);
        assert_eq!(
            choose_cut(&fixtures::cycle(5), CutStrategy::GlobalMin)
                .unwrap()
                .k(),
            2
        );
        assert!(choose_cut(&fixtures::complete(3), CutStrategy::MinDegreeNeighborhood).is_err());
    }
}
