//! Undirected weighted graphs with dense integer vertex ids.
//!
//! Text format (one graph per file):
//!
//! ```text
//! n m
//! i j w      (m lines, 0-based vertex ids, real weight)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Simple undirected graph on vertices `0..n` with one real weight per edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct WeightedGraph {
    adj: Vec<BTreeMap<usize, f64>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl TryFrom<GraphRepr> for WeightedGraph {
    type Error = Error;

    fn try_from(r: GraphRepr) -> Result<Self> {
        WeightedGraph::from_edges(r.n, r.edges)
    }
}

impl From<WeightedGraph> for GraphRepr {
    fn from(g: WeightedGraph) -> Self {
        GraphRepr {
            n: g.n(),
            edges: g.edges().collect(),
        }
    }
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        WeightedGraph {
            adj: vec![BTreeMap::new(); n],
        }
    }

    /// Builds a graph from `(i, j, w)` triples, rejecting loops, repeated
    /// pairs and non-finite weights.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut g = WeightedGraph::new(n);
        for (i, j, w) in edges {
            g.add_edge(i, j, w)?;
        }
        Ok(g)
    }

    /// Unit-weight graph from an edge list.
    pub fn unweighted<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges(n, edges.into_iter().map(|(i, j)| (i, j, 1.0)))
    }

    pub fn add_edge(&mut self, i: usize, j: usize, w: f64) -> Result<()> {
        let n = self.n();
        if i >= n || j >= n {
            return invalid(format!("edge ({i}, {j}) out of range for n = {n}"));
        }
        if i == j {
            return invalid(format!("self-loop at vertex {i}"));
        }
        if !w.is_finite() {
            return invalid(format!("non-finite weight on edge ({i}, {j})"));
        }
        if self.adj[i].contains_key(&j) {
            return invalid(format!("duplicate edge ({i}, {j})"));
        }
        self.adj[i].insert(j, w);
        self.adj[j].insert(i, w);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(BTreeMap::len).sum::<usize>() / 2
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.adj.get(i).and_then(|a| a.get(&j)).copied()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.weight(i, j).is_some()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Neighbors of `v` in increasing order.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].keys().copied()
    }

    /// Weighted neighborhood of `v` in increasing neighbor order.
    pub fn weighted_neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adj[v].iter().map(|(&u, &w)| (u, w))
    }

    /// Edges `(i, j, w)` with `i < j`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj.iter().enumerate().flat_map(|(i, a)| {
            a.range(i + 1..).map(move |(&j, &w)| (i, j, w))
        })
    }

    pub fn total_weight(&self) -> f64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    pub fn is_complete(&self) -> bool {
        let n = self.n();
        self.adj.iter().all(|a| a.len() + 1 == n)
    }

    pub fn is_regular(&self, k: usize) -> bool {
        self.adj.iter().all(|a| a.len() == k)
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.components_avoiding(&[]).len() == 1
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_avoiding(&[])
    }

    /// Connected components of the graph with `removed` deleted.
    pub fn components_avoiding(&self, removed: &[usize]) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        for &r in removed {
            seen[r] = true;
        }
        let mut comps = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for u in self.neighbors(v) {
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Induced subgraph on `vertices`, relabeled to `0..|S|` in increasing
    /// original order. The returned map sends new ids to original ids.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<(WeightedGraph, Vec<usize>)> {
        let n = self.n();
        let mut map: Vec<usize> = vertices.to_vec();
        map.sort_unstable();
        map.dedup();
        if let Some(&v) = map.iter().find(|&&v| v >= n) {
            return invalid(format!("vertex {v} not in graph of size {n}"));
        }
        let mut local = vec![usize::MAX; n];
        for (new, &old) in map.iter().enumerate() {
            local[old] = new;
        }
        let mut sub = WeightedGraph::new(map.len());
        for (new_i, &old_i) in map.iter().enumerate() {
            for (&old_j, &w) in self.adj[old_i].range(old_i + 1..) {
                let new_j = local[old_j];
                if new_j != usize::MAX {
                    sub.adj[new_i].insert(new_j, w);
                    sub.adj[new_j].insert(new_i, w);
                }
            }
        }
        Ok((sub, map))
    }

    /// Parses the plain-text `n m` / `i j w` format.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "empty graph file".into(),
        })?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 2 {
            return Err(Error::Parse {
                line: hl,
                msg: "expected header `n m`".into(),
            });
        }
        let n = parse_field::<usize>(head[0], hl)?;
        let m = parse_field::<usize>(head[1], hl)?;
        let mut g = WeightedGraph::new(n);
        let mut seen = 0;
        for (ln, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(Error::Parse {
                    line: ln,
                    msg: "expected `i j w`".into(),
                });
            }
            let i = parse_field::<usize>(f[0], ln)?;
            let j = parse_field::<usize>(f[1], ln)?;
            let w = parse_field::<f64>(f[2], ln)?;
            g.add_edge(i, j, w).map_err(|e| Error::Parse {
                line: ln,
                msg: e.to_string(),
            })?;
            seen += 1;
        }
        if seen != m {
            return Err(Error::Parse {
                line: hl,
                msg: format!("header declares {m} edges, found {seen}"),
            });
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n(), self.num_edges());
        for (i, j, w) in self.edges() {
            let _ = writeln!(out, "{i} {j} {w}");
        }
        out
    }
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse::<T>().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse `{s}`"),
    })
}
