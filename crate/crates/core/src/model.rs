//! Disorder, spin configurations and the SK Hamiltonian
//! `H(σ) = -(1/√n) Σ_{i<j} J_ij σ_i σ_j`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, SkError};
use crate::rng::SplitMix64;

/// Upper-triangular Gaussian couplings, row-major over pairs `i < j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    n: usize,
    couplings: Vec<f64>,
    seed: u64,
}

#[inline]
fn pair_offset(n: usize, i: usize) -> usize {
    i * n - i * (i + 1) / 2
}

impl CouplingMatrix {
    /// Builds a matrix from explicit couplings (seed recorded as 0).
    pub fn from_couplings(n: usize, couplings: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return invalid("site count must be at least 1");
        }
        let expected = n * (n - 1) / 2;
        if couplings.len() != expected {
            return invalid(format!(
                "expected {expected} couplings for n = {n}, got {}",
                couplings.len()
            ));
        }
        if couplings.iter().any(|c| !c.is_finite()) {
            return invalid("couplings must be finite");
        }
        Ok(CouplingMatrix {
            n,
            couplings,
            seed: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    /// `J_ij` for any `i != j` (symmetric); zero on the diagonal.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        if a == b {
            return 0.0;
        }
        self.couplings[pair_offset(self.n, a) + (b - a - 1)]
    }

    /// Dense symmetric `n × n` copy with zero diagonal.
    pub fn dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                m[i * n + j] = self.couplings[k];
                m[j * n + i] = self.couplings[k];
                k += 1;
            }
        }
        m
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.n {
            return invalid(format!(
                "configuration has {n} sites but couplings have {}",
                self.n
            ));
        }
        Ok(())
    }
}

/// Draws `n(n-1)/2` standard normal couplings from the splitmix64/Box–Muller stream
/// seeded with `seed`.
///
/// Draws are taken column by column (`J_01`, then `J_02, J_12`, ...), so the
/// instance for `n` is the leading `n × n` block of the instance for any larger
/// size with the same seed.
pub fn sample_couplings(n: usize, seed: u64) -> Result<CouplingMatrix> {
    if n == 0 {
        return invalid("site count must be at least 1");
    }
    let mut rng = SplitMix64::new(seed);
    let mut couplings = vec![0.0; n * (n - 1) / 2];
    for j in 1..n {
        for i in 0..j {
            couplings[pair_offset(n, i) + (j - i - 1)] = rng.next_normal();
        }
    }
    Ok(CouplingMatrix { n, couplings, seed })
}

/// `n` Ising spins; bit `i` of `index` is set iff `σ_i = +1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinConfiguration {
    spins: Vec<i8>,
}

impl SpinConfiguration {
    pub fn from_spins(spins: Vec<i8>) -> Result<Self> {
        if spins.is_empty() {
            return invalid("configuration needs at least one spin");
        }
        if spins.len() > 64 {
            return invalid("configurations are limited to 64 sites");
        }
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return invalid("spins must be +1 or -1");
        }
        Ok(SpinConfiguration { spins })
    }

    pub fn from_index(n: usize, index: u64) -> Result<Self> {
        if n == 0 || n > 64 {
            return invalid(format!("site count {n} outside 1..=64"));
        }
        if n < 64 && index >> n != 0 {
            return invalid(format!("index {index} does not fit in {n} bits"));
        }
        let spins = (0..n)
            .map(|i| if index >> i & 1 == 1 { 1 } else { -1 })
            .collect();
        Ok(SpinConfiguration { spins })
    }

    pub fn n(&self) -> usize {
        self.spins.len()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn index(&self) -> u64 {
        self.spins
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 1)
            .fold(0u64, |acc, (i, _)| acc | 1 << i)
    }

    pub fn flip(&mut self, site: usize) {
        self.spins[site] = -self.spins[site];
    }

    /// The globally flipped configuration `-σ`.
    pub fn flipped(&self) -> Self {
        SpinConfiguration {
            spins: self.spins.iter().map(|s| -s).collect(),
        }
    }
}

/// A strictly positive, finite inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct InverseTemperature(f64);

impl InverseTemperature {
    /// The reference temperature `β₁ ≡ 1` that fixes the scale.
    pub const REFERENCE: InverseTemperature = InverseTemperature(1.0);

    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return invalid(format!("inverse temperature must be finite and > 0, got {beta}"));
        }
        Ok(InverseTemperature(beta))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for InverseTemperature {
    type Error = SkError;

    fn try_from(beta: f64) -> Result<Self> {
        InverseTemperature::new(beta)
    }
}

/// Converts a slice of raw betas, rejecting empty or non-positive input.
pub fn betas_from(values: &[f64]) -> Result<Vec<InverseTemperature>> {
    if values.is_empty() {
        return invalid("beta list is empty");
    }
    values.iter().map(|&b| InverseTemperature::new(b)).collect()
}

/// `H_n(σ, J)` by the direct O(n²) double sum, in a fixed summation order.
pub fn energy(config: &SpinConfiguration, j: &CouplingMatrix) -> Result<f64> {
    j.check_dim(config.n())?;
    Ok(energy_unchecked(config.spins(), j))
}

pub(crate) fn energy_unchecked(spins: &[i8], j: &CouplingMatrix) -> f64 {
    let n = j.n();
    let mut sum = 0.0;
    let mut k = 0;
    for a in 0..n {
        let sa = spins[a] as f64;
        let mut row = 0.0;
        for b in (a + 1)..n {
            row += j.couplings[k] * spins[b] as f64;
            k += 1;
        }
        sum += sa * row;
    }
    -sum / (n as f64).sqrt()
}

/// Energy of the configuration encoded by `index`; bit-identical for `index` and its complement.
pub(crate) fn energy_of_index(index: u64, j: &CouplingMatrix) -> f64 {
    let n = j.n();
    let top = (index >> (n - 1)) & 1;
    // Canonicalize so σ and -σ share one summation path.
    let canon = if top == 1 { !index } else { index };
    let spins: Vec<i8> = (0..n)
        .map(|i| if canon >> i & 1 == 1 { 1 } else { -1 })
        .collect();
    energy_unchecked(&spins, j)
}

/// `H(σ with spin `site` flipped) − H(σ)` in O(n).
pub fn delta_energy(config: &SpinConfiguration, j: &CouplingMatrix, site: usize) -> Result<f64> {
    j.check_dim(config.n())?;
    let n = j.n();
    if site >= n {
        return invalid(format!("site {site} out of range for n = {n}"));
    }
    let spins = config.spins();
    let field: f64 = (0..n)
        .filter(|&b| b != site)
        .map(|b| j.get(site, b) * spins[b] as f64)
        .sum();
    Ok(2.0 * spins[site] as f64 * field / (n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn pair(j12: f64) -> CouplingMatrix {
        CouplingMatrix::from_couplings(2, vec![j12]).unwrap()
    }

    #[test]
    fn n1_has_no_couplings() {
        let j = sample_couplings(1, 1234).unwrap();
        assert!(j.couplings().is_empty());
        let c = SpinConfiguration::from_index(1, 1).unwrap();
        assert_eq!(energy(&c, &j).unwrap(), 0.0);
    }

    #[test]
    fn zero_sites_rejected() {
        assert!(matches!(sample_couplings(0, 1), Err(SkError::InvalidArgument(_))));
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_couplings(5, 42).unwrap();
        let b = sample_couplings(5, 42).unwrap();
        assert_eq!(a.couplings().len(), 10);
        let bits = |m: &CouplingMatrix| m.couplings().iter().map(|c| c.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_ne!(bits(&a), bits(&sample_couplings(5, 43).unwrap()));
    }

    #[test]
    fn smaller_instances_are_leading_blocks() {
        let big = sample_couplings(12, 9).unwrap();
        for n in [2, 5, 11] {
            let small = sample_couplings(n, 9).unwrap();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(small.get(i, j).to_bits(), big.get(i, j).to_bits());
                }
            }
        }
    }

    #[test]
    fn coupling_moments_over_seeds() {
        let seeds = 100_000u64;
        let slots = 6;
        let mut sum = vec![0.0; slots];
        let mut sum2 = vec![0.0; slots];
        for s in 0..seeds {
            let j = sample_couplings(4, crate::rng::derive_seed(7, s)).unwrap();
            for (k, &c) in j.couplings().iter().enumerate() {
                sum[k] += c;
                sum2[k] += c * c;
            }
        }
        let k = seeds as f64;
        for slot in 0..slots {
            let mean = sum[slot] / k;
            let var = sum2[slot] / k - mean * mean;
            assert!(mean.abs() < 3.0 / k.sqrt(), "slot {slot} mean {mean}");
            assert!((var - 1.0).abs() < 0.05, "slot {slot} var {var}");
        }
    }

    #[test]
    fn two_site_energies() {
        let j = pair(1.0);
        let up = SpinConfiguration::from_spins(vec![1, 1]).unwrap();
        let mixed = SpinConfiguration::from_spins(vec![1, -1]).unwrap();
        assert!((energy(&up, &j).unwrap() + INV_SQRT2).abs() < 1e-15);
        assert!((energy(&mixed, &j).unwrap() - INV_SQRT2).abs() < 1e-15);
        let d = delta_energy(&up, &j, 0).unwrap();
        assert!((d - 2.0 * INV_SQRT2).abs() < 1e-15);
    }

    #[test]
    fn index_roundtrip_and_bits() {
        let c = SpinConfiguration::from_spins(vec![1, -1, 1]).unwrap();
        assert_eq!(c.index(), 0b101);
        assert_eq!(SpinConfiguration::from_index(3, 0b101).unwrap(), c);
        assert!(SpinConfiguration::from_index(3, 8).is_err());
        assert!(SpinConfiguration::from_spins(vec![1, 0]).is_err());
    }

    #[test]
    fn dimension_and_site_errors() {
        let j = sample_couplings(3, 1).unwrap();
        let c = SpinConfiguration::from_index(2, 0).unwrap();
        assert!(energy(&c, &j).is_err());
        let c3 = SpinConfiguration::from_index(3, 0).unwrap();
        assert!(delta_energy(&c3, &j, 3).is_err());
    }

    #[test]
    fn energy_of_index_matches_energy() {
        let j = sample_couplings(7, 5).unwrap();
        for idx in 0..128u64 {
            let c = SpinConfiguration::from_index(7, idx).unwrap();
            let e = energy(&c, &j).unwrap();
            assert!((energy_of_index(idx, &j) - e).abs() < 1e-13);
            assert_eq!(energy_of_index(idx, &j).to_bits(), energy_of_index(idx ^ 127, &j).to_bits());
        }
    }

    #[test]
    fn delta_matches_recomputation_1000_triples() {
        let mut rng = SplitMix64::new(2024);
        for t in 0..1000 {
            let n = 2 + rng.below(11);
            let j = sample_couplings(n, t).unwrap();
            let idx = rng.next_u64() & ((1u64 << n) - 1);
            let c = SpinConfiguration::from_index(n, idx).unwrap();
            let k = rng.below(n);
            let mut f = c.clone();
            f.flip(k);
            let direct = energy(&f, &j).unwrap() - energy(&c, &j).unwrap();
            assert!((delta_energy(&c, &j, k).unwrap() - direct).abs() < 1e-12);
            // Flipping back undoes the change.
            let back = delta_energy(&f, &j, k).unwrap();
            assert!((delta_energy(&c, &j, k).unwrap() + back).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_variance_over_disorder() {
        for &n in &[2usize, 8] {
            let seeds = 100_000u64;
            let c = SpinConfiguration::from_index(n, 0b1011 & ((1 << n) - 1)).unwrap();
            let (mut s, mut s2) = (0.0, 0.0);
            for seed in 0..seeds {
                let j = sample_couplings(n, crate::rng::derive_seed(11, seed)).unwrap();
                let e = energy(&c, &j).unwrap();
                s += e;
                s2 += e * e;
            }
            let k = seeds as f64;
            let var = s2 / k - (s / k).powi(2);
            let expected = (n as f64 - 1.0) / 2.0;
            assert!((var / expected - 1.0).abs() < 0.05, "n={n} var={var}");
        }
    }

    #[test]
    fn inverse_temperature_validation() {
        assert!(InverseTemperature::new(0.0).is_err());
        assert!(InverseTemperature::new(-1.0).is_err());
        assert!(InverseTemperature::new(f64::NAN).is_err());
        assert!(InverseTemperature::new(f64::INFINITY).is_err());
        assert_eq!(InverseTemperature::REFERENCE.value(), 1.0);
        assert!(betas_from(&[]).is_err());
    }

    proptest! {
        #[test]
        fn global_flip_symmetry(seed in any::<u64>(), n in 1usize..14, raw in any::<u64>()) {
            let j = sample_couplings(n, seed).unwrap();
            let idx = if n == 64 { raw } else { raw & ((1u64 << n) - 1) };
            let c = SpinConfiguration::from_index(n, idx).unwrap();
            let e = energy(&c, &j).unwrap();
            let ef = energy(&c.flipped(), &j).unwrap();
            prop_assert!((e - ef).abs() < 1e-12);
            prop_assert_eq!(SpinConfiguration::from_index(n, c.index()).unwrap(), c);
        }

        #[test]
        fn double_flip_is_identity(seed in any::<u64>(), n in 2usize..12, raw in any::<u64>(), site in 0usize..12) {
            let j = sample_couplings(n, seed).unwrap();
            let site = site % n;
            let c = SpinConfiguration::from_index(n, raw & ((1u64 << n) - 1)).unwrap();
            let mut f = c.clone();
            let d1 = delta_energy(&f, &j, site).unwrap();
            f.flip(site);
            let d2 = delta_energy(&f, &j, site).unwrap();
            prop_assert!((d1 + d2).abs() < 1e-12);
        }
    }
}
