//! Exact finite-n thermodynamics by Gray-code enumeration.
//!
//! The Hamiltonian is even under `σ → -σ`, so only the half of configuration
//! space with the top spin down is swept and every Boltzmann weight is counted
//! twice. Successive configurations differ in one spin (binary-reflected Gray
//! code, flipped bit = trailing zeros of the step counter), which makes each
//! step O(n): one energy update plus one local-field update per site.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, SkError};
use crate::model::{energy_of_index, CouplingMatrix, InverseTemperature};

/// Hard cap for streaming enumeration.
pub const MAX_ENUM_SITES: usize = 30;
/// Hard cap for operations that materialize all `2^n` weights.
pub const MAX_TABLE_SITES: usize = 20;

const DRIFT_CHECK_INTERVAL: u64 = 1 << 20;
const DRIFT_LIMIT: f64 = 1e-6;

/// Exact observables of one disorder sample at one inverse temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermoPoint {
    pub n: usize,
    pub beta: f64,
    pub log_z: f64,
    pub mean_h: f64,
    pub mean_h2: f64,
    /// Gibbs entropy in nats, `S = log Z + β⟨H⟩`.
    pub entropy: f64,
    pub free_energy_density: f64,
}

impl ThermoPoint {
    pub fn variance_h(&self) -> f64 {
        self.mean_h2 - self.mean_h * self.mean_h
    }

    pub fn entropy_density(&self) -> f64 {
        self.entropy / self.n as f64
    }

    pub fn energy_density(&self) -> f64 {
        self.mean_h / self.n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateResult {
    pub min_energy: f64,
    /// Smallest configuration index attaining the minimum.
    pub argmin_index: u64,
    pub degeneracy: u64,
    /// `min_energy / n`, i.e. `-ε_n(J)`.
    pub energy_density: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsDistribution {
    pub n: usize,
    pub beta: f64,
    pub probabilities: Vec<f64>,
}

/// Streaming log-sum-exp of `-βH` with shifted first and second moments of `H`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BoltzmannAccumulator {
    beta: f64,
    max: f64,
    sum: f64,
    sum_h: f64,
    sum_h2: f64,
}

impl BoltzmannAccumulator {
    pub(crate) fn new(beta: f64) -> Self {
        BoltzmannAccumulator {
            beta,
            max: f64::NEG_INFINITY,
            sum: 0.0,
            sum_h: 0.0,
            sum_h2: 0.0,
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, e: f64) {
        let x = -self.beta * e;
        if x > self.max {
            let scale = (self.max - x).exp();
            self.sum *= scale;
            self.sum_h *= scale;
            self.sum_h2 *= scale;
            self.max = x;
        }
        let w = (x - self.max).exp();
        self.sum += w;
        self.sum_h += w * e;
        self.sum_h2 += w * e * e;
    }

    /// Associative, commutative merge of two partial sweeps at the same beta.
    pub(crate) fn merge(&self, other: &Self) -> Self {
        debug_assert_eq!(self.beta, other.beta);
        if other.max == f64::NEG_INFINITY {
            return *self;
        }
        if self.max == f64::NEG_INFINITY {
            return *other;
        }
        let max = self.max.max(other.max);
        let a = (self.max - max).exp();
        let b = (other.max - max).exp();
        BoltzmannAccumulator {
            beta: self.beta,
            max,
            sum: self.sum * a + other.sum * b,
            sum_h: self.sum_h * a + other.sum_h * b,
            sum_h2: self.sum_h2 * a + other.sum_h2 * b,
        }
    }

    /// `log_offset` accounts for configurations counted by symmetry but not visited.
    pub(crate) fn finish(&self, n: usize, log_offset: f64) -> ThermoPoint {
        let log_z = self.max + self.sum.ln() + log_offset;
        let mean_h = self.sum_h / self.sum;
        let mean_h2 = self.sum_h2 / self.sum;
        ThermoPoint {
            n,
            beta: self.beta,
            log_z,
            mean_h,
            mean_h2,
            entropy: log_z + self.beta * mean_h,
            free_energy_density: log_z / n as f64,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct GroundTracker {
    min: f64,
    argmin: u64,
    count: u64,
}

impl GroundTracker {
    fn new() -> Self {
        GroundTracker {
            min: f64::INFINITY,
            argmin: u64::MAX,
            count: 0,
        }
    }

    /// `e` is the incremental energy; candidates are confirmed with the direct sum.
    #[inline]
    fn visit(&mut self, index: u64, e: f64, j: &CouplingMatrix) {
        if e > self.min + 1e-9 * (1.0 + self.min.abs()) {
            return;
        }
        let exact = energy_of_index(index, j);
        self.offer(exact, index, 1);
    }

    fn offer(&mut self, energy: f64, index: u64, count: u64) {
        if energy < self.min {
            *self = GroundTracker {
                min: energy,
                argmin: index,
                count,
            };
        } else if energy == self.min {
            self.count += count;
            self.argmin = self.argmin.min(index);
        }
    }

    fn merge(mut self, other: &Self) -> Self {
        self.offer(other.min, other.argmin, other.count);
        self
    }
}

fn ensure_cap(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(SkError::ResourceLimit { what, n, cap });
    }
    Ok(())
}

/// Visits every configuration whose bits `free_bits..n` equal those of `base`,
/// in Gray-code order, calling `visit(index, energy)`.
fn gray_sweep<F>(j: &CouplingMatrix, base: u64, free_bits: usize, mut visit: F) -> Result<()>
where
    F: FnMut(u64, f64),
{
    let n = j.n();
    let dense = j.dense();
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();
    let low_mask = if free_bits == 0 { 0 } else { (1u64 << free_bits) - 1 };
    let mut index = base & !low_mask;

    let mut spins: Vec<f64> = (0..n)
        .map(|i| if index >> i & 1 == 1 { 1.0 } else { -1.0 })
        .collect();
    let local_fields = |spins: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|a| (0..n).map(|b| dense[a * n + b] * spins[b]).sum())
            .collect()
    };
    let mut fields = local_fields(&spins);
    let mut e = energy_of_index(index, j);
    visit(index, e);

    let steps = 1u64 << free_bits;
    for t in 1..steps {
        let k = t.trailing_zeros() as usize;
        let old = spins[k];
        e += 2.0 * old * fields[k] * inv_sqrt_n;
        spins[k] = -old;
        let row = &dense[k * n..(k + 1) * n];
        let shift = -2.0 * old;
        for (h, &c) in fields.iter_mut().zip(row) {
            *h += shift * c;
        }
        index ^= 1 << k;

        if t.is_multiple_of(DRIFT_CHECK_INTERVAL) {
            let exact = energy_of_index(index, j);
            let drift = (exact - e).abs();
            if drift > DRIFT_LIMIT {
                return Err(SkError::Diagnostics(format!(
                    "incremental energy drifted by {drift:e} after {t} Gray-code steps"
                )));
            }
            e = exact;
            fields = local_fields(&spins);
        }
        visit(index, e);
    }
    Ok(())
}

struct BlockResult {
    accumulators: Vec<BoltzmannAccumulator>,
    ground: GroundTracker,
}

fn sweep_block(j: &CouplingMatrix, betas: &[f64], base: u64, free_bits: usize) -> Result<BlockResult> {
    let mut accumulators: Vec<_> = betas.iter().map(|&b| BoltzmannAccumulator::new(b)).collect();
    let mut ground = GroundTracker::new();
    gray_sweep(j, base, free_bits, |index, e| {
        for acc in accumulators.iter_mut() {
            acc.push(e);
        }
        ground.visit(index, e, j);
    })?;
    Ok(BlockResult {
        accumulators,
        ground,
    })
}

fn finish(j: &CouplingMatrix, block: BlockResult) -> (Vec<ThermoPoint>, GroundStateResult) {
    let n = j.n();
    let points = block
        .accumulators
        .iter()
        .map(|acc| acc.finish(n, LN_2))
        .collect();
    let ground = GroundStateResult {
        min_energy: block.ground.min,
        argmin_index: block.ground.argmin,
        degeneracy: 2 * block.ground.count,
        energy_density: block.ground.min / n as f64,
    };
    (points, ground)
}

/// Exact `log Z`, `⟨H⟩`, `⟨H²⟩` and entropy at every beta, plus the ground state,
/// from one sweep over all `2^n` configurations.
pub fn enumerate_observables(
    j: &CouplingMatrix,
    betas: &[InverseTemperature],
) -> Result<(Vec<ThermoPoint>, GroundStateResult)> {
    let n = j.n();
    ensure_cap("enumerate_observables", n, MAX_ENUM_SITES)?;
    if betas.is_empty() {
        return invalid("beta list is empty");
    }
    let raw: Vec<f64> = betas.iter().map(|b| b.value()).collect();
    let block = sweep_block(j, &raw, 0, n - 1)?;
    Ok(finish(j, block))
}

/// Same result as [`enumerate_observables`], with the sweep split into `2^split_bits`
/// independent sub-chains (fixed high bits) run in parallel and merged.
pub fn enumerate_observables_partitioned(
    j: &CouplingMatrix,
    betas: &[InverseTemperature],
    split_bits: usize,
) -> Result<(Vec<ThermoPoint>, GroundStateResult)> {
    let n = j.n();
    ensure_cap("enumerate_observables", n, MAX_ENUM_SITES)?;
    if betas.is_empty() {
        return invalid("beta list is empty");
    }
    if split_bits > n - 1 {
        return invalid(format!("cannot split {split_bits} bits of an n = {n} sweep"));
    }
    let raw: Vec<f64> = betas.iter().map(|b| b.value()).collect();
    let free_bits = n - 1 - split_bits;
    let blocks: Vec<BlockResult> = (0..1u64 << split_bits)
        .into_par_iter()
        .map(|prefix| sweep_block(j, &raw, prefix << free_bits, free_bits))
        .collect::<Result<_>>()?;
    let merged = blocks
        .into_iter()
        .reduce(|a, b| BlockResult {
            accumulators: a
                .accumulators
                .iter()
                .zip(&b.accumulators)
                .map(|(x, y)| x.merge(y))
                .collect(),
            ground: a.ground.merge(&b.ground),
        })
        .expect("at least one block");
    Ok(finish(j, merged))
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// All `2^n` energies of one disorder sample, indexed by configuration index.
///
/// Backs every operation that needs the full Gibbs measure.
#[derive(Debug, Clone)]
pub struct EnergyTable {
    n: usize,
    energies: Vec<f64>,
}

impl EnergyTable {
    pub fn new(j: &CouplingMatrix) -> Result<Self> {
        let n = j.n();
        ensure_cap("energy table", n, MAX_TABLE_SITES)?;
        let full_mask = (1u64 << n) - 1;
        let mut energies = vec![0.0; 1 << n];
        gray_sweep(j, 0, n - 1, |index, e| {
            energies[index as usize] = e;
            energies[(index ^ full_mask) as usize] = e;
        })?;
        Ok(EnergyTable { n, energies })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn log_z(&self, beta: f64) -> f64 {
        let max = self
            .energies
            .iter()
            .map(|&e| -beta * e)
            .fold(f64::NEG_INFINITY, f64::max);
        max + compensated_sum(self.energies.iter().map(|&e| (-beta * e - max).exp())).ln()
    }

    /// `log μ_β(σ)` for every configuration.
    pub fn log_probabilities(&self, beta: f64) -> Vec<f64> {
        let log_z = self.log_z(beta);
        self.energies.iter().map(|&e| -beta * e - log_z).collect()
    }

    pub fn distribution(&self, beta: f64) -> GibbsDistribution {
        GibbsDistribution {
            n: self.n,
            beta,
            probabilities: self.log_probabilities(beta).into_iter().map(f64::exp).collect(),
        }
    }

    pub fn mean_energy(&self, beta: f64) -> f64 {
        let lp = self.log_probabilities(beta);
        compensated_sum(lp.iter().zip(&self.energies).map(|(l, e)| l.exp() * e))
    }

    /// `-Σ p log p`.
    pub fn entropy_direct(&self, beta: f64) -> f64 {
        let lp = self.log_probabilities(beta);
        -compensated_sum(lp.iter().map(|&l| l.exp() * l))
    }

    /// `log Z + β⟨H⟩`.
    pub fn entropy_identity(&self, beta: f64) -> f64 {
        self.log_z(beta) + beta * self.mean_energy(beta)
    }

    /// `Σ μ₂ log(μ₂/μ₁)` by direct summation.
    pub fn relative_entropy(&self, beta2: f64, beta1: f64) -> f64 {
        let lp2 = self.log_probabilities(beta2);
        let lp1 = self.log_probabilities(beta1);
        compensated_sum(lp2.iter().zip(&lp1).map(|(&a, &b)| a.exp() * (a - b)))
    }

    /// `-(β₂-β₁)⟨H⟩_{β₂} + log Z(β₁) - log Z(β₂)`.
    pub fn relative_entropy_identity(&self, beta2: f64, beta1: f64) -> f64 {
        -(beta2 - beta1) * self.mean_energy(beta2) + self.log_z(beta1) - self.log_z(beta2)
    }

    /// `Σ μ log(μ 2^n)` by direct summation.
    pub fn relative_entropy_uniform(&self, beta: f64) -> f64 {
        let shift = self.n as f64 * LN_2;
        let lp = self.log_probabilities(beta);
        compensated_sum(lp.iter().map(|&l| l.exp() * (l + shift)))
    }

    /// `n log 2 - S(μ)`.
    pub fn relative_entropy_uniform_identity(&self, beta: f64) -> f64 {
        self.n as f64 * LN_2 - self.entropy_identity(beta)
    }

    /// Largest `|log μ_β(σ) - [(β/β₁) log μ_{β₁}(σ) + (β/β₁) log Z(β₁) - log Z(β)]|`.
    pub fn functional_equation_residual(&self, beta: f64, beta1: f64) -> f64 {
        let ratio = beta / beta1;
        let lz = self.log_z(beta);
        let lz1 = self.log_z(beta1);
        let lp = self.log_probabilities(beta);
        let lp1 = self.log_probabilities(beta1);
        lp.iter()
            .zip(&lp1)
            .map(|(&l, &l1)| (l - (ratio * l1 + ratio * lz1 - lz)).abs())
            .fold(0.0, f64::max)
    }

    /// `(1/n) Σ μ_{β*} log μ_{β₁}`.
    pub fn cross_entropy_term(&self, beta_star: f64, beta1: f64) -> f64 {
        let lps = self.log_probabilities(beta_star);
        let lp1 = self.log_probabilities(beta1);
        compensated_sum(lps.iter().zip(&lp1).map(|(&a, &b)| a.exp() * b)) / self.n as f64
    }

    /// `(β/β₁)(1/n) log Z(β₁) - (1/n) log Z(β)`.
    pub fn alpha(&self, beta: f64, beta1: f64) -> f64 {
        let n = self.n as f64;
        (beta / beta1) * self.log_z(beta1) / n - self.log_z(beta) / n
    }
}

/// Every two-temperature quantity at `(β*, β₁)` from one pair of log-probability vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoTemperatureSummary {
    pub n: usize,
    pub beta_star: f64,
    pub beta1: f64,
    pub log_z_beta1: f64,
    pub log_z_beta_star: f64,
    /// `S(μ_β*)` by `-Σ p log p`.
    pub entropy_beta_star: f64,
    /// `S(μ_β* | μ_β₁)`.
    pub relative_entropy: f64,
    /// `(1/n) Σ μ_β* log μ_β₁`.
    pub cross_entropy_density: f64,
    /// `S(μ_β* | ν_n)`.
    pub relative_entropy_uniform: f64,
}

impl TwoTemperatureSummary {
    /// `α_n = (β*/β₁)(1/n) log Z(β₁) − (1/n) log Z(β*)`.
    pub fn alpha(&self) -> f64 {
        let n = self.n as f64;
        (self.beta_star / self.beta1) * self.log_z_beta1 / n - self.log_z_beta_star / n
    }
}

impl EnergyTable {
    pub fn two_temperature_summary(&self, beta_star: f64, beta1: f64) -> TwoTemperatureSummary {
        let lps = self.log_probabilities(beta_star);
        let lp1 = self.log_probabilities(beta1);
        let shift = self.n as f64 * LN_2;
        let mut entropy = Vec::with_capacity(lps.len());
        let mut kl = Vec::with_capacity(lps.len());
        let mut cross = Vec::with_capacity(lps.len());
        for (&a, &b) in lps.iter().zip(&lp1) {
            let p = a.exp();
            entropy.push(-p * a);
            kl.push(p * (a - b));
            cross.push(p * b);
        }
        let entropy_beta_star = compensated_sum(entropy);
        TwoTemperatureSummary {
            n: self.n,
            beta_star,
            beta1,
            log_z_beta1: self.log_z(beta1),
            log_z_beta_star: self.log_z(beta_star),
            entropy_beta_star,
            relative_entropy: compensated_sum(kl),
            cross_entropy_density: compensated_sum(cross) / self.n as f64,
            relative_entropy_uniform: shift - entropy_beta_star,
        }
    }
}

pub fn gibbs_distribution(j: &CouplingMatrix, beta: InverseTemperature) -> Result<GibbsDistribution> {
    Ok(EnergyTable::new(j)?.distribution(beta.value()))
}

/// `S(μ_{n,β₂} | μ_{n,β₁})` in nats.
pub fn relative_entropy(
    j: &CouplingMatrix,
    beta2: InverseTemperature,
    beta1: InverseTemperature,
) -> Result<f64> {
    Ok(EnergyTable::new(j)?.relative_entropy(beta2.value(), beta1.value()))
}

/// `S(μ_{n,β} | ν_n)` against the uniform measure.
pub fn relative_entropy_uniform(j: &CouplingMatrix, beta: InverseTemperature) -> Result<f64> {
    Ok(EnergyTable::new(j)?.relative_entropy_uniform(beta.value()))
}

pub fn functional_equation_residual(
    j: &CouplingMatrix,
    beta: InverseTemperature,
    beta1: InverseTemperature,
) -> Result<f64> {
    Ok(EnergyTable::new(j)?.functional_equation_residual(beta.value(), beta1.value()))
}

/// Finite-n `α_n(β₁, β) = (β/β₁)(1/n) log Z_n(β₁) - (1/n) log Z_n(β)`, by streaming enumeration.
pub fn alpha_n(j: &CouplingMatrix, beta: InverseTemperature, beta1: InverseTemperature) -> Result<f64> {
    let (points, _) = enumerate_observables(j, &[beta, beta1])?;
    let n = j.n() as f64;
    Ok((beta.value() / beta1.value()) * points[1].log_z / n - points[0].log_z / n)
}

pub fn cross_entropy_term(
    j: &CouplingMatrix,
    beta_star: InverseTemperature,
    beta1: InverseTemperature,
) -> Result<f64> {
    Ok(EnergyTable::new(j)?.cross_entropy_term(beta_star.value(), beta1.value()))
}
