//! Ising form of a QUBO via `z_i = (1 − σ_i) / 2`, so `z = 0 ↔ σ = +1`
//! (the `|0⟩` eigenvalue of Pauli Z).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::qubo::QuboInstance;

/// `E(σ) = Σ_{i<j} J_ij σ_i σ_j + Σ_i h_i σ_i + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingInstance {
    fields: Vec<f64>,
    couplings: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl IsingInstance {
    pub fn new(n: usize) -> Self {
        IsingInstance {
            fields: vec![0.0; n],
            couplings: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.fields.len()
    }

    pub fn field(&self, i: usize) -> f64 {
        self.fields[i]
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings
            .get(&(i.min(j), i.max(j)))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.couplings.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn add_coupling(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        let n = self.n();
        if i >= n || j >= n || i == j {
            return invalid(format!("bad coupling indices ({i}, {j}) for n = {n}"));
        }
        if !v.is_finite() {
            return invalid("non-finite coupling");
        }
        let key = (i.min(j), i.max(j));
        let e = self.couplings.entry(key).or_insert(0.0);
        *e += v;
        if *e == 0.0 {
            self.couplings.remove(&key);
        }
        Ok(())
    }

    pub fn add_field(&mut self, i: usize, v: f64) -> Result<()> {
        if i >= self.n() || !v.is_finite() {
            return invalid(format!("bad field on {i}"));
        }
        self.fields[i] += v;
        Ok(())
    }

    pub fn add_offset(&mut self, v: f64) {
        self.offset += v;
    }

    /// Energy of spins given as `σ_i = +1` for `false`, `−1` for `true`.
    pub fn energy_bits(&self, z: &[bool]) -> f64 {
        let s = |i: usize| if z[i] { -1.0 } else { 1.0 };
        let f: f64 = self.fields.iter().enumerate().map(|(i, h)| h * s(i)).sum();
        let c: f64 = self.couplings().map(|(i, j, v)| v * s(i) * s(j)).sum();
        f + c + self.offset
    }

    /// Energy of basis state `index` (bit `i` set ⇔ `σ_i = −1`).
    pub fn energy_at_index(&self, index: u64) -> f64 {
        let s = |i: usize| if (index >> i) & 1 == 1 { -1.0 } else { 1.0 };
        let f: f64 = self.fields.iter().enumerate().map(|(i, h)| h * s(i)).sum();
        let c: f64 = self.couplings().map(|(i, j, v)| v * s(i) * s(j)).sum();
        f + c + self.offset
    }
}

pub fn qubo_to_ising(q: &QuboInstance) -> IsingInstance {
    let mut ising = IsingInstance::new(q.n());
    let mut offset = q.offset();
    for (i, &v) in q.linear_terms().iter().enumerate() {
        ising.fields[i] -= v / 2.0;
        offset += v / 2.0;
    }
    for (i, j, v) in q.quad_terms() {
        let quarter = v / 4.0;
        *ising.couplings.entry((i, j)).or_insert(0.0) += quarter;
        ising.fields[i] -= quarter;
        ising.fields[j] -= quarter;
        offset += quarter;
    }
    ising.couplings.retain(|_, v| *v != 0.0);
    ising.offset = offset;
    ising
}

pub fn ising_to_qubo(ising: &IsingInstance) -> QuboInstance {
    let mut q = QuboInstance::new(ising.n());
    let mut offset = ising.offset;
    for (i, &h) in ising.fields.iter().enumerate() {
        offset += h;
        q.add_lin(i, -2.0 * h).expect("finite");
    }
    for (i, j, v) in ising.couplings() {
        offset += v;
        q.add_lin(i, -2.0 * v).expect("finite");
        q.add_lin(j, -2.0 * v).expect("finite");
        q.add_quad(i, j, 4.0 * v).expect("finite");
    }
    q.set_offset(offset).expect("finite");
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::Bitstring;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn random_qubo(n: usize, seed: u64) -> QuboInstance {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut q = QuboInstance::new(n);
        for i in 0..n {
            q.add_lin(i, rng.gen_range(-8..=8) as f64 * 0.5).unwrap();
            for j in i + 1..n {
                if rng.gen_bool(0.6) {
                    q.add_quad(i, j, rng.gen_range(-8..=8) as f64 * 0.5).unwrap();
                }
            }
        }
        q.set_offset(rng.gen_range(-5..=5) as f64).unwrap();
        q
    }

    #[test]
    fn single_linear_term() {
        let mut q = QuboInstance::new(1);
        q.add_lin(0, 1.0).unwrap();
        let s = qubo_to_ising(&q);
        assert_eq!(s.energy_bits(&[false]), 0.0);
        assert_eq!(s.energy_bits(&[true]), 1.0);
    }

    #[test]
    fn single_edge_maxcut_values() {
        let mut q = QuboInstance::new(2);
        q.add_quad(0, 1, -2.0).unwrap();
        q.add_lin(0, 1.0).unwrap();
        q.add_lin(1, 1.0).unwrap();
        let s = qubo_to_ising(&q);
        for x in 0..4 {
            assert_eq!(s.energy_at_index(x), q.value_at_index(x));
        }
        assert_eq!(s.coupling(0, 1), -0.5);
        assert_eq!(s.offset(), 0.5);
    }

    #[test]
    fn random_eight_variable_values() {
        let q = random_qubo(8, 42);
        let s = qubo_to_ising(&q);
        for x in 0..256u64 {
            let z = Bitstring::from_index(x, 8);
            assert_eq!(s.energy_bits(z.bits()), q.evaluate(&z).unwrap());
        }
    }

    proptest! {
        #[test]
        fn round_trip_preserves_values(seed in 0u64..1000, n in 1usize..11) {
            let q = random_qubo(n, seed);
            let s = qubo_to_ising(&q);
            let back = ising_to_qubo(&s);
            for x in 0..(1u64 << n) {
                let v = q.value_at_index(x);
                prop_assert!((s.energy_at_index(x) - v).abs() <= 1e-12);
                prop_assert!((back.value_at_index(x) - v).abs() <= 1e-12);
            }
        }
    }
}
