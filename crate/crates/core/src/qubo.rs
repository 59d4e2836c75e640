//! QUBO instances, bitstrings, restriction and the MaxCut encoding.
//!
//! The objective is `C(z) = Σ_{i<j} J_ij z_i z_j + Σ_i J_ii z_i + offset`,
//! maximized over `z ∈ {0,1}^n`. Every unordered pair is stored exactly once.
//! A symmetric double-sum `Σ_i Σ_{j≠i} J_ij z_i z_j` corresponds to storing
//! `2 J_ij` here; all conversions are checked at the level of objective values.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::WeightedGraph;

/// Assignment `z ∈ {0,1}^n`. Displayed as `z_0 z_1 … z_{n-1}` without spaces.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Bitstring(Vec<bool>);

impl Bitstring {
    pub fn new(bits: Vec<bool>) -> Self {
        Bitstring(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Bitstring(vec![false; n])
    }

    /// Basis-state index convention: bit `i` of `index` is `z_i`.
    pub fn from_index(index: u64, n: usize) -> Self {
        Bitstring((0..n).map(|i| (index >> i) & 1 == 1).collect())
    }

    pub fn to_index(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, v: bool) {
        self.0[i] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn complement(&self) -> Self {
        Bitstring(self.0.iter().map(|b| !b).collect())
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => invalid(format!("bad bit `{c}` in bitstring")),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bitstring)
    }
}

impl From<Bitstring> for String {
    fn from(b: Bitstring) -> String {
        b.to_string()
    }
}

impl TryFrom<String> for Bitstring {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Quadratic pseudo-Boolean objective to be maximized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuboRepr", into = "QuboRepr")]
pub struct QuboInstance {
    lin: Vec<f64>,
    quad: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

/// On-disk JSON layout: `{"n", "quad": [[i, j, J]], "lin": [[i, J]], "offset"}`.
#[derive(Serialize, Deserialize)]
struct QuboRepr {
    n: usize,
    quad: Vec<(usize, usize, f64)>,
    lin: Vec<(usize, f64)>,
    #[serde(default)]
    offset: f64,
}

impl TryFrom<QuboRepr> for QuboInstance {
    type Error = Error;

    fn try_from(r: QuboRepr) -> Result<Self> {
        let mut q = QuboInstance::new(r.n);
        q.set_offset(r.offset)?;
        let mut seen = BTreeSet::new();
        for (i, j, v) in r.quad {
            if i == j {
                return invalid(format!("quadratic term on diagonal ({i}, {i}); use `lin`"));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return invalid(format!("duplicate quadratic term ({i}, {j})"));
            }
            q.add_quad(i, j, v)?;
        }
        let mut seen = BTreeSet::new();
        for (i, v) in r.lin {
            if !seen.insert(i) {
                return invalid(format!("duplicate linear term {i}"));
            }
            q.add_lin(i, v)?;
        }
        Ok(q)
    }
}

impl From<QuboInstance> for QuboRepr {
    fn from(q: QuboInstance) -> Self {
        QuboRepr {
            n: q.n(),
            quad: q.quad_terms().collect(),
            lin: q
                .lin
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(i, &v)| (i, v))
                .collect(),
            offset: q.offset,
        }
    }
}

impl QuboInstance {
    pub fn new(n: usize) -> Self {
        QuboInstance {
            lin: vec![0.0; n],
            quad: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.lin.len()
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn set_offset(&mut self, offset: f64) -> Result<()> {
        if !offset.is_finite() {
            return invalid("non-finite offset");
        }
        self.offset = offset;
        Ok(())
    }

    pub fn lin(&self, i: usize) -> f64 {
        self.lin[i]
    }

    pub fn linear_terms(&self) -> &[f64] {
        &self.lin
    }

    /// Coefficient of `z_i z_j` (order-insensitive), zero when absent.
    pub fn quad(&self, i: usize, j: usize) -> f64 {
        self.quad.get(&(i.min(j), i.max(j))).copied().unwrap_or(0.0)
    }

    /// Stored pair coefficients `(i, j, J_ij)` with `i < j`, sorted.
    pub fn quad_terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.quad.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn num_quad_terms(&self) -> usize {
        self.quad.len()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            return invalid(format!("variable {i} out of range for n = {}", self.n()));
        }
        Ok(())
    }

    /// Adds `v` to the pair coefficient of `(i, j)`. A sum of exactly zero
    /// removes the term.
    pub fn add_quad(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return invalid(format!("pair term needs distinct indices, got ({i}, {i})"));
        }
        if !v.is_finite() {
            return invalid(format!("non-finite coefficient on ({i}, {j})"));
        }
        let key = (i.min(j), i.max(j));
        let entry = self.quad.entry(key).or_insert(0.0);
        *entry += v;
        if *entry == 0.0 {
            self.quad.remove(&key);
        }
        Ok(())
    }

    pub fn add_lin(&mut self, i: usize, v: f64) -> Result<()> {
        self.check_index(i)?;
        if !v.is_finite() {
            return invalid(format!("non-finite coefficient on {i}"));
        }
        self.lin[i] += v;
        Ok(())
    }

    pub fn add_offset(&mut self, v: f64) -> Result<()> {
        self.set_offset(self.offset + v)
    }

    pub fn evaluate(&self, z: &Bitstring) -> Result<f64> {
        if z.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: z.len(),
            });
        }
        Ok(self.evaluate_bits(z.bits()))
    }

    /// Objective value for a slice of bits whose length is known to match.
    pub fn evaluate_bits(&self, z: &[bool]) -> f64 {
        let lin: f64 = self
            .lin
            .iter()
            .zip(z)
            .filter(|(_, &b)| b)
            .map(|(v, _)| v)
            .sum();
        let quad: f64 = self
            .quad
            .iter()
            .filter(|(&(i, j), _)| z[i] && z[j])
            .map(|(_, v)| v)
            .sum();
        lin + quad + self.offset
    }

    /// Objective value of basis state `index` (bit `i` is `z_i`).
    pub fn value_at_index(&self, index: u64) -> f64 {
        let bit = |i: usize| (index >> i) & 1 == 1;
        let lin: f64 = (0..self.n()).filter(|&i| bit(i)).map(|i| self.lin[i]).sum();
        let quad: f64 = self
            .quad
            .iter()
            .filter(|(&(i, j), _)| bit(i) && bit(j))
            .map(|(_, v)| v)
            .sum();
        lin + quad + self.offset
    }

    /// Interaction graph: an edge for every nonzero pair coefficient,
    /// weighted by that coefficient.
    pub fn interaction_graph(&self) -> WeightedGraph {
        WeightedGraph::from_edges(self.n(), self.quad_terms()).expect("valid by construction")
    }

    /// Terms supported on `vertices` (pairs with both ends inside, linear
    /// terms of members), relabeled in increasing order; offset dropped.
    pub fn induced(&self, vertices: &[usize]) -> Result<(QuboInstance, Vec<usize>)> {
        let mut map = vertices.to_vec();
        map.sort_unstable();
        map.dedup();
        for &v in &map {
            self.check_index(v)?;
        }
        let mut local = vec![usize::MAX; self.n()];
        for (k, &v) in map.iter().enumerate() {
            local[v] = k;
        }
        let mut sub = QuboInstance::new(map.len());
        for (k, &v) in map.iter().enumerate() {
            sub.lin[k] = self.lin[v];
        }
        for (i, j, v) in self.quad_terms() {
            if local[i] != usize::MAX && local[j] != usize::MAX {
                sub.quad.insert((local[i], local[j]), v);
            }
        }
        Ok((sub, map))
    }

    /// Copy of this instance with variable `i` renamed to `map[i]` inside a
    /// space of `n` variables.
    pub fn embed(&self, n: usize, map: &[usize]) -> Result<QuboInstance> {
        if map.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: map.len(),
            });
        }
        let mut out = QuboInstance::new(n);
        out.set_offset(self.offset)?;
        for (i, &v) in self.lin.iter().enumerate() {
            out.add_lin(map[i], v)?;
        }
        for (i, j, v) in self.quad_terms() {
            out.add_quad(map[i], map[j], v)?;
        }
        Ok(out)
    }

    /// Fixes the variables in `r` and returns the problem over the rest.
    pub fn restrict(&self, r: &Restriction) -> Result<RestrictedInstance> {
        let n = self.n();
        for &i in r.fixed0.iter().chain(&r.fixed1) {
            self.check_index(i)?;
        }
        let mut state = vec![None; n];
        for &i in &r.fixed0 {
            state[i] = Some(false);
        }
        for &i in &r.fixed1 {
            state[i] = Some(true);
        }
        let free_vars: Vec<usize> = (0..n).filter(|&i| state[i].is_none()).collect();
        let mut local = vec![usize::MAX; n];
        for (k, &v) in free_vars.iter().enumerate() {
            local[v] = k;
        }

        let mut sub = QuboInstance::new(free_vars.len());
        let mut constant = self.offset;
        for (i, &v) in self.lin.iter().enumerate() {
            match state[i] {
                None => sub.lin[local[i]] += v,
                Some(true) => constant += v,
                Some(false) => {}
            }
        }
        for (i, j, v) in self.quad_terms() {
            match (state[i], state[j]) {
                (None, None) => {
                    sub.quad.insert((local[i], local[j]), v);
                }
                (None, Some(true)) => sub.lin[local[i]] += v,
                (Some(true), None) => sub.lin[local[j]] += v,
                (Some(true), Some(true)) => constant += v,
                _ => {}
            }
        }
        Ok(RestrictedInstance {
            free_vars,
            sub,
            constant,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// `cut(z) = Σ_{(i,j)∈E} w_ij (z_i + z_j − 2 z_i z_j)`: the weight of edges
/// whose endpoints receive different bits.
pub fn maxcut_to_qubo(g: &WeightedGraph) -> QuboInstance {
    let mut q = QuboInstance::new(g.n());
    for (i, j, w) in g.edges() {
        q.lin[i] += w;
        q.lin[j] += w;
        *q.quad.entry((i, j)).or_insert(0.0) += -2.0 * w;
    }
    q.quad.retain(|_, v| *v != 0.0);
    q
}

/// Cut weight of the partition induced by `z`.
pub fn cut_value(g: &WeightedGraph, z: &[bool]) -> f64 {
    g.edges()
        .filter(|&(i, j, _)| z[i] != z[j])
        .map(|(_, _, w)| w)
        .sum()
}

/// Variables fixed to 0 and to 1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Restriction {
    fixed0: BTreeSet<usize>,
    fixed1: BTreeSet<usize>,
}

impl Restriction {
    pub fn new<A, B>(fixed0: A, fixed1: B) -> Result<Self>
    where
        A: IntoIterator<Item = usize>,
        B: IntoIterator<Item = usize>,
    {
        let fixed0: BTreeSet<usize> = fixed0.into_iter().collect();
        let fixed1: BTreeSet<usize> = fixed1.into_iter().collect();
        if let Some(i) = fixed0.intersection(&fixed1).next() {
            return invalid(format!("variable {i} fixed to both 0 and 1"));
        }
        Ok(Restriction { fixed0, fixed1 })
    }

    /// Fixes `vars[l]` to `bits[l]`.
    pub fn from_assignment(vars: &[usize], bits: &[bool]) -> Result<Self> {
        if vars.len() != bits.len() {
            return Err(Error::LengthMismatch {
                expected: vars.len(),
                got: bits.len(),
            });
        }
        let f0 = vars.iter().zip(bits).filter(|(_, &b)| !b).map(|(&v, _)| v);
        let f1 = vars.iter().zip(bits).filter(|(_, &b)| b).map(|(&v, _)| v);
        Restriction::new(f0, f1)
    }

    pub fn fixed0(&self) -> &BTreeSet<usize> {
        &self.fixed0
    }

    pub fn fixed1(&self) -> &BTreeSet<usize> {
        &self.fixed1
    }
}

/// Result of [`QuboInstance::restrict`]: `parent(lift(y)) = sub(y) + constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedInstance {
    pub free_vars: Vec<usize>,
    pub sub: QuboInstance,
    pub constant: f64,
}

impl RestrictedInstance {
    /// Full assignment from fixed values plus an assignment of the free ones.
    pub fn lift(&self, r: &Restriction, n: usize, free: &Bitstring) -> Result<Bitstring> {
        if free.len() != self.free_vars.len() {
            return Err(Error::LengthMismatch {
                expected: self.free_vars.len(),
                got: free.len(),
            });
        }
        let mut z = Bitstring::zeros(n);
        for &i in r.fixed1() {
            z.set(i, true);
        }
        for (k, &v) in self.free_vars.iter().enumerate() {
            z.set(v, free.get(k));
        }
        Ok(z)
    }
}
