//! Monte Carlo on the SK Hamiltonian: single-spin Metropolis, replica
//! exchange, thermodynamic integration of the free energy, entropy
//! reconstruction and simulated annealing for ground states.
//!
//! Every chain draws from its own splitmix64 stream derived from the run
//! seed, and replica swaps happen at sweep boundaries in a fixed order
//! (even pairs on even sweeps, odd pairs on odd sweeps), so results depend
//! only on the seed.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{energy_unchecked, CouplingMatrix};
use crate::rng::{derive_seed, SplitMix64};

/// Number of batches for batch-means standard errors.
pub const BATCH_COUNT: usize = 32;
const RESYNC_INTERVAL: usize = 4096;
const PARALLEL_SWEEP_SITES: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    /// One entry for a single chain; a non-decreasing ladder for tempering.
    pub beta_ladder: Vec<f64>,
    pub sweeps: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub measure_every: usize,
}

impl ChainConfig {
    pub fn single(beta: f64, sweeps: usize, burn_in: usize, seed: u64) -> Self {
        ChainConfig {
            beta_ladder: vec![beta],
            sweeps,
            burn_in,
            seed,
            measure_every: 1,
        }
    }

    pub fn with_ladder(&self, ladder: Vec<f64>) -> Self {
        ChainConfig {
            beta_ladder: ladder,
            ..self.clone()
        }
    }

    fn measurements(&self) -> usize {
        (self.sweeps - self.burn_in) / self.measure_every
    }

    fn validate(&self) -> Result<()> {
        if self.beta_ladder.is_empty() {
            return invalid("beta ladder is empty");
        }
        if self.beta_ladder.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
            return invalid("inverse temperatures must be finite and > 0");
        }
        if self.beta_ladder.windows(2).any(|w| w[1] < w[0]) {
            return invalid("beta ladder must be non-decreasing");
        }
        if self.measure_every == 0 {
            return invalid("measure_every must be at least 1");
        }
        if self.sweeps <= self.burn_in {
            return invalid("sweeps must exceed burn_in");
        }
        if self.measurements() < BATCH_COUNT {
            return invalid(format!(
                "need at least {BATCH_COUNT} measurements after burn-in, got {}",
                self.measurements()
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub beta: f64,
    /// `⟨H⟩/n`.
    pub mean_energy_density: f64,
    /// Batch-means standard error.
    pub std_error: f64,
    pub acceptance_rate: f64,
    /// Swap acceptance with the next rung up (tempering only, `None` on the top rung).
    pub swap_acceptance: Option<f64>,
    #[serde(skip)]
    pub batch_means: Vec<f64>,
}

/// A value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

fn batch_means(series: &[f64]) -> Vec<f64> {
    let size = series.len() / BATCH_COUNT;
    series
        .chunks_exact(size)
        .take(BATCH_COUNT)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect()
}

fn mean_and_se(batches: &[f64]) -> (f64, f64) {
    let k = batches.len() as f64;
    let mean = batches.iter().sum::<f64>() / k;
    let var = batches.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// One Metropolis chain with cached local fields `h_i = Σ_j J_ij σ_j`.
#[derive(Debug, Clone)]
pub struct MetropolisChain<'a> {
    couplings: &'a CouplingMatrix,
    dense: &'a [f64],
    inv_sqrt_n: f64,
    spins: Vec<f64>,
    fields: Vec<f64>,
    energy: f64,
    rng: SplitMix64,
    attempts: u64,
    accepted: u64,
}

impl<'a> MetropolisChain<'a> {
    /// Starts from a uniformly random configuration drawn from `seed`'s stream.
    pub fn new(couplings: &'a CouplingMatrix, dense: &'a [f64], seed: u64) -> Self {
        let n = couplings.n();
        let mut rng = SplitMix64::new(seed);
        let spins = (0..n)
            .map(|_| if rng.next_u64() >> 63 == 1 { 1.0 } else { -1.0 })
            .collect();
        let mut chain = MetropolisChain {
            couplings,
            dense,
            inv_sqrt_n: 1.0 / (n as f64).sqrt(),
            spins,
            fields: vec![0.0; n],
            energy: 0.0,
            rng,
            attempts: 0,
            accepted: 0,
        };
        chain.resync();
        chain
    }

    fn n(&self) -> usize {
        self.spins.len()
    }

    /// Recomputes fields and energy from scratch.
    pub fn resync(&mut self) {
        let n = self.n();
        for a in 0..n {
            self.fields[a] = (0..n).map(|b| self.dense[a * n + b] * self.spins[b]).sum();
        }
        let spins: Vec<i8> = self.spins.iter().map(|&s| s as i8).collect();
        self.energy = energy_unchecked(&spins, self.couplings);
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn spins(&self) -> &[f64] {
        &self.spins
    }

    /// Configuration index (bit `i` set iff `σ_i = +1`).
    pub fn state_index(&self) -> u64 {
        self.spins
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > 0.0)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    fn flip(&mut self, site: usize, delta: f64) {
        let n = self.n();
        let old = self.spins[site];
        self.energy += delta;
        self.spins[site] = -old;
        let shift = -2.0 * old;
        for (h, &c) in self.fields.iter_mut().zip(&self.dense[site * n..(site + 1) * n]) {
            *h += shift * c;
        }
    }

    /// One single-spin Metropolis update at a uniformly chosen site.
    #[inline]
    pub fn step(&mut self, beta: f64) -> bool {
        let site = self.rng.below(self.n());
        let delta = 2.0 * self.spins[site] * self.fields[site] * self.inv_sqrt_n;
        self.attempts += 1;
        if delta <= 0.0 || self.rng.next_f64() < (-beta * delta).exp() {
            self.flip(site, delta);
            self.accepted += 1;
            true
        } else {
            false
        }
    }

    /// `n` single-spin updates.
    pub fn sweep(&mut self, beta: f64) {
        for _ in 0..self.n() {
            self.step(beta);
        }
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.attempts == 0 {
            return 0.0;
        }
        self.accepted as f64 / self.attempts as f64
    }
}

/// Single-chain Metropolis estimate of `⟨H⟩/n` at `cfg.beta_ladder[0]`.
pub fn metropolis(j: &CouplingMatrix, cfg: &ChainConfig) -> Result<MCEstimate> {
    cfg.validate()?;
    let beta = cfg.beta_ladder[0];
    let dense = j.dense();
    let nf = j.n() as f64;
    let mut chain = MetropolisChain::new(j, &dense, derive_seed(cfg.seed, 0));
    let mut series = Vec::with_capacity(cfg.measurements());
    for sweep in 0..cfg.sweeps {
        chain.sweep(beta);
        if (sweep + 1) % RESYNC_INTERVAL == 0 {
            chain.resync();
        }
        if sweep >= cfg.burn_in && (sweep - cfg.burn_in + 1).is_multiple_of(cfg.measure_every) {
            series.push(chain.energy() / nf);
        }
    }
    let batches = batch_means(&series);
    let (mean, se) = mean_and_se(&batches);
    Ok(MCEstimate {
        beta,
        mean_energy_density: mean,
        std_error: se,
        acceptance_rate: chain.acceptance_rate(),
        swap_acceptance: None,
        batch_means: batches,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperingResult {
    /// One estimate per rung, in ladder order.
    pub estimates: Vec<MCEstimate>,
    /// Acceptance of swaps between rungs `i` and `i + 1`.
    pub pair_swap_acceptance: Vec<f64>,
}

/// Replica exchange over `cfg.beta_ladder` with adjacent swaps after every sweep.
pub fn parallel_tempering(j: &CouplingMatrix, cfg: &ChainConfig) -> Result<TemperingResult> {
    cfg.validate()?;
    let ladder = &cfg.beta_ladder;
    let rungs = ladder.len();
    if rungs < 2 {
        return invalid("parallel tempering needs at least two rungs");
    }
    let dense = j.dense();
    let nf = j.n() as f64;
    // replicas[r] currently sits at ladder[r]
    let mut replicas: Vec<MetropolisChain> = (0..rungs)
        .map(|r| MetropolisChain::new(j, &dense, derive_seed(cfg.seed, r as u64)))
        .collect();
    let mut swap_rng = SplitMix64::new(derive_seed(cfg.seed, rungs as u64));
    let mut swap_attempts = vec![0u64; rungs - 1];
    let mut swap_accepts = vec![0u64; rungs - 1];
    let mut rung_attempts = vec![0u64; rungs];
    let mut rung_accepts = vec![0u64; rungs];
    let mut series = vec![Vec::with_capacity(cfg.measurements()); rungs];
    let parallel = j.n() >= PARALLEL_SWEEP_SITES;

    for sweep in 0..cfg.sweeps {
        let before: Vec<(u64, u64)> = replicas.iter().map(|c| (c.attempts, c.accepted)).collect();
        if parallel {
            replicas
                .par_iter_mut()
                .zip(ladder.par_iter())
                .for_each(|(c, &beta)| c.sweep(beta));
        } else {
            for (c, &beta) in replicas.iter_mut().zip(ladder) {
                c.sweep(beta);
            }
        }
        for (r, c) in replicas.iter_mut().enumerate() {
            rung_attempts[r] += c.attempts - before[r].0;
            rung_accepts[r] += c.accepted - before[r].1;
            if (sweep + 1) % RESYNC_INTERVAL == 0 {
                c.resync();
            }
        }

        for i in (sweep % 2..rungs - 1).step_by(2) {
            let exponent = (ladder[i] - ladder[i + 1]) * (replicas[i].energy() - replicas[i + 1].energy());
            swap_attempts[i] += 1;
            if exponent >= 0.0 || swap_rng.next_f64() < exponent.exp() {
                replicas.swap(i, i + 1);
                swap_accepts[i] += 1;
            }
        }

        if sweep >= cfg.burn_in && (sweep - cfg.burn_in + 1).is_multiple_of(cfg.measure_every) {
            for (r, c) in replicas.iter().enumerate() {
                series[r].push(c.energy() / nf);
            }
        }
    }

    let pair_swap_acceptance: Vec<f64> = swap_attempts
        .iter()
        .zip(&swap_accepts)
        .map(|(&a, &s)| if a == 0 { 0.0 } else { s as f64 / a as f64 })
        .collect();
    let estimates = (0..rungs)
        .map(|r| {
            let batches = batch_means(&series[r]);
            let (mean, se) = mean_and_se(&batches);
            MCEstimate {
                beta: ladder[r],
                mean_energy_density: mean,
                std_error: se,
                acceptance_rate: rung_accepts[r] as f64 / rung_attempts[r].max(1) as f64,
                swap_acceptance: pair_swap_acceptance.get(r).copied(),
                batch_means: batches,
            }
        })
        .collect();
    Ok(TemperingResult {
        estimates,
        pair_swap_acceptance,
    })
}

/// `rungs` inverse temperatures spaced geometrically from `beta_min` to `beta_max`.
pub fn geometric_ladder(beta_min: f64, beta_max: f64, rungs: usize) -> Result<Vec<f64>> {
    if !(beta_min > 0.0 && beta_max > beta_min) || rungs < 2 {
        return invalid("geometric ladder needs 0 < beta_min < beta_max and at least two rungs");
    }
    let ratio = (beta_max / beta_min).powf(1.0 / (rungs - 1) as f64);
    let mut ladder: Vec<f64> = (0..rungs).map(|k| beta_min * ratio.powi(k as i32)).collect();
    ladder[rungs - 1] = beta_max;
    Ok(ladder)
}

const LADDER_TARGET_MIN: f64 = 0.2;
const LADDER_MAX_RUNGS: usize = 64;
const LADDER_PILOT_SWEEPS: usize = 2_000;

/// Smallest geometric ladder (grown from 4 rungs by ×1.5) whose pilot run has
/// every adjacent swap acceptance at least 0.2.
pub fn auto_ladder(j: &CouplingMatrix, beta_min: f64, beta_max: f64, seed: u64) -> Result<Vec<f64>> {
    let mut rungs = 4;
    loop {
        let ladder = geometric_ladder(beta_min, beta_max, rungs)?;
        let pilot = ChainConfig {
            beta_ladder: ladder.clone(),
            sweeps: LADDER_PILOT_SWEEPS,
            burn_in: LADDER_PILOT_SWEEPS / 4,
            seed,
            measure_every: 1,
        };
        let result = parallel_tempering(j, &pilot)?;
        let worst = result.pair_swap_acceptance.iter().cloned().fold(1.0, f64::min);
        if worst >= LADDER_TARGET_MIN || rungs >= LADDER_MAX_RUNGS {
            return Ok(ladder);
        }
        rungs = (rungs * 3).div_ceil(2).min(LADDER_MAX_RUNGS);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyPoint {
    pub beta: f64,
    /// `(1/n) log Z` estimate.
    pub f: f64,
    pub f_se: f64,
    /// `⟨H⟩/n` estimate.
    pub u: f64,
    pub u_se: f64,
}

/// `(1/n) log Z(β) = log 2 − ∫₀^β ⟨H⟩_b/n db`, trapezoidal on `beta_grid`
/// anchored at `⟨H⟩_0 = 0`. Energies come from tempering across the grid
/// itself (plain Metropolis for a one-point grid); standard errors are batch
/// means of the whole integral, so correlations between rungs are included.
pub fn thermo_integration_free_energy(
    j: &CouplingMatrix,
    beta_grid: &[f64],
    cfg: &ChainConfig,
) -> Result<Vec<FreeEnergyPoint>> {
    if beta_grid.is_empty() {
        return invalid("beta grid is empty");
    }
    if beta_grid.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("beta grid must be strictly ascending");
    }
    if !(beta_grid[0] > 0.0 && beta_grid[0] < 0.1) {
        return invalid("beta grid must start in (0, 0.1)");
    }
    let run_cfg = cfg.with_ladder(beta_grid.to_vec());
    let estimates = if beta_grid.len() == 1 {
        vec![metropolis(j, &run_cfg)?]
    } else {
        parallel_tempering(j, &run_cfg)?.estimates
    };

    let batches = estimates[0].batch_means.len();
    // integral[b][k] = ∫₀^{β_k} u db from batch b
    let mut per_batch = vec![vec![0.0; beta_grid.len()]; batches];
    for (b, row) in per_batch.iter_mut().enumerate() {
        let mut prev_beta = 0.0;
        let mut prev_u = 0.0;
        let mut acc = 0.0;
        for (k, est) in estimates.iter().enumerate() {
            let u = est.batch_means[b];
            acc += 0.5 * (beta_grid[k] - prev_beta) * (u + prev_u);
            row[k] = LN_2 - acc;
            prev_beta = beta_grid[k];
            prev_u = u;
        }
    }
    Ok(estimates
        .iter()
        .enumerate()
        .map(|(k, est)| {
            let column: Vec<f64> = per_batch.iter().map(|row| row[k]).collect();
            let (f, f_se) = mean_and_se(&column);
            FreeEnergyPoint {
                beta: beta_grid[k],
                f,
                f_se,
                u: est.mean_energy_density,
                u_se: est.std_error,
            }
        })
        .collect())
}

/// Entropy density `s = f + β u` with standard errors added in quadrature.
pub fn mc_entropy(beta: f64, f: Estimate, u: Estimate) -> Estimate {
    Estimate {
        value: f.value + beta * u.value,
        std_error: (f.std_error.powi(2) + (beta * u.std_error).powi(2)).sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub beta_start: f64,
    pub beta_end: f64,
    pub stages: usize,
    /// `None` means `n` sweeps per stage.
    pub sweeps_per_stage: Option<usize>,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            beta_start: 0.1,
            beta_end: 10.0,
            stages: 200,
            sweeps_per_stage: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealResult {
    /// Directly recomputed energy of `spins`.
    pub min_energy: f64,
    pub energy_density: f64,
    /// Index of the best configuration, taken from the `σ`/`−σ` pair with the top spin down.
    pub argmin_index: u64,
    pub spins: Vec<i8>,
    /// Best energy reached by each restart.
    pub restart_energies: Vec<f64>,
}

fn anneal_once(j: &CouplingMatrix, dense: &[f64], schedule: &AnnealSchedule, seed: u64) -> (f64, Vec<i8>) {
    let n = j.n();
    let sweeps = schedule.sweeps_per_stage.unwrap_or(n);
    let mut chain = MetropolisChain::new(j, dense, seed);
    let mut best = chain.energy();
    let mut best_spins = chain.spins().to_vec();
    let ratio = if schedule.stages > 1 {
        (schedule.beta_end / schedule.beta_start).powf(1.0 / (schedule.stages - 1) as f64)
    } else {
        1.0
    };
    let mut beta = schedule.beta_start;
    for _ in 0..schedule.stages {
        for _ in 0..sweeps {
            for _ in 0..n {
                if chain.step(beta) && chain.energy() < best {
                    best = chain.energy();
                    best_spins.copy_from_slice(chain.spins());
                }
            }
        }
        chain.resync();
        beta *= ratio;
    }
    let mut spins: Vec<i8> = best_spins.iter().map(|&s| s as i8).collect();
    if spins[n - 1] == 1 {
        spins.iter_mut().for_each(|s| *s = -*s);
    }
    (energy_unchecked(&spins, j), spins)
}

/// Best configuration over `restarts` independent geometric anneals.
pub fn simulated_annealing_ground_state(
    j: &CouplingMatrix,
    schedule: &AnnealSchedule,
    restarts: usize,
    seed: u64,
) -> Result<AnnealResult> {
    if restarts == 0 {
        return invalid("restarts must be at least 1");
    }
    if !(schedule.beta_start > 0.0 && schedule.beta_end >= schedule.beta_start) || schedule.stages == 0 {
        return invalid("annealing schedule needs 0 < beta_start <= beta_end and at least one stage");
    }
    if schedule.sweeps_per_stage == Some(0) {
        return invalid("sweeps_per_stage must be at least 1");
    }
    let dense = j.dense();
    let runs: Vec<(f64, Vec<i8>)> = (0..restarts)
        .into_par_iter()
        .map(|r| anneal_once(j, &dense, schedule, derive_seed(seed, r as u64)))
        .collect();
    let best = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(a.0.cmp(&b.0)))
        .map(|(r, _)| r)
        .expect("at least one restart");
    let (min_energy, spins) = runs[best].clone();
    let argmin_index = spins
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == 1)
        .fold(0u64, |acc, (i, _)| acc | 1 << i);
    Ok(AnnealResult {
        min_energy,
        energy_density: min_energy / j.n() as f64,
        argmin_index,
        spins,
        restart_energies: runs.iter().map(|r| r.0).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{enumerate_observables, EnergyTable};
    use crate::model::{energy, sample_couplings, InverseTemperature, SpinConfiguration};

    fn exact_u(j: &CouplingMatrix, beta: f64) -> f64 {
        let (pts, _) = enumerate_observables(j, &[InverseTemperature::new(beta).unwrap()]).unwrap();
        pts[0].energy_density()
    }

    #[test]
    fn two_site_metropolis() {
        let j = CouplingMatrix::from_couplings(2, vec![1.0]).unwrap();
        let cfg = ChainConfig::single(1.0, 1_000_000, 1000, 11);
        let est = metropolis(&j, &cfg).unwrap();
        let x = std::f64::consts::FRAC_1_SQRT_2;
        let exact = -x * x.tanh() / 2.0;
        assert!((exact + 0.215264).abs() < 1e-6);
        assert!((est.mean_energy_density - exact).abs() < 3.0 * est.std_error, "{est:?}");
    }

    #[test]
    fn near_zero_beta_accepts_everything() {
        let j = sample_couplings(10, 1).unwrap();
        let est = metropolis(&j, &ChainConfig::single(1e-6, 2000, 100, 5)).unwrap();
        assert!(est.acceptance_rate > 0.99);
    }

    #[test]
    fn deterministic_in_seed() {
        let j = sample_couplings(12, 2).unwrap();
        let cfg = ChainConfig::single(1.5, 3000, 300, 8);
        assert_eq!(metropolis(&j, &cfg).unwrap(), metropolis(&j, &cfg).unwrap());
        let pt = cfg.with_ladder(vec![0.5, 1.0, 2.0]);
        assert_eq!(parallel_tempering(&j, &pt).unwrap(), parallel_tempering(&j, &pt).unwrap());
    }

    #[test]
    fn config_validation() {
        let j = sample_couplings(4, 2).unwrap();
        assert!(metropolis(&j, &ChainConfig::single(1.0, 100, 100, 1)).is_err());
        assert!(metropolis(&j, &ChainConfig::single(1.0, 40, 20, 1)).is_err());
        assert!(metropolis(&j, &ChainConfig::single(0.0, 400, 20, 1)).is_err());
        let one = ChainConfig::single(1.0, 400, 20, 1);
        assert!(parallel_tempering(&j, &one).is_err());
        assert!(parallel_tempering(&j, &one.with_ladder(vec![2.0, 1.0])).is_err());
    }

    #[test]
    fn detailed_balance_histogram() {
        let j = sample_couplings(3, 19).unwrap();
        let dense = j.dense();
        let table = EnergyTable::new(&j).unwrap();
        let exact = table.distribution(1.0).probabilities;
        let mut chain = MetropolisChain::new(&j, &dense, 77);
        let steps = 10_000_000u64;
        let mut counts = [0u64; 8];
        for _ in 0..steps {
            chain.step(1.0);
            counts[chain.state_index() as usize] += 1;
        }
        let tv: f64 = counts
            .iter()
            .zip(&exact)
            .map(|(&c, &p)| (c as f64 / steps as f64 - p).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.01, "total variation {tv}");
    }

    #[test]
    fn tempering_matches_exact_at_n16() {
        let j = sample_couplings(16, 5).unwrap();
        let cfg = ChainConfig {
            beta_ladder: geometric_ladder(0.5, 2.8, 8).unwrap(),
            sweeps: 40_000,
            burn_in: 4_000,
            seed: 3,
            measure_every: 1,
        };
        let res = parallel_tempering(&j, &cfg).unwrap();
        for est in [&res.estimates[0], res.estimates.last().unwrap()] {
            let exact = exact_u(&j, est.beta);
            assert!(
                (est.mean_energy_density - exact).abs() < 3.0 * est.std_error,
                "beta {} mc {} exact {exact} se {}",
                est.beta,
                est.mean_energy_density,
                est.std_error
            );
        }
        for w in res.estimates.windows(2) {
            let slack = 3.0 * (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
            assert!(w[1].mean_energy_density <= w[0].mean_energy_density + slack);
        }
        assert!(res.pair_swap_acceptance.iter().all(|&a| (0.0..=1.0).contains(&a)));
    }

    #[test]
    fn identical_rungs_always_swap() {
        let j = sample_couplings(8, 1).unwrap();
        let cfg = ChainConfig::single(1.3, 2000, 100, 4).with_ladder(vec![1.3, 1.3]);
        let res = parallel_tempering(&j, &cfg).unwrap();
        assert_eq!(res.pair_swap_acceptance[0], 1.0);
    }

    #[test]
    fn auto_ladder_reaches_target() {
        let j = sample_couplings(24, 9).unwrap();
        let ladder = auto_ladder(&j, 0.3, 3.0, 2).unwrap();
        assert!(ladder.len() >= 4);
        assert_eq!(ladder[0], 0.3);
        assert_eq!(*ladder.last().unwrap(), 3.0);
    }

    #[test]
    fn integration_anchor_and_errors() {
        let j = sample_couplings(10, 3).unwrap();
        let cfg = ChainConfig::single(1.0, 4000, 400, 1);
        let pts = thermo_integration_free_energy(&j, &[0.05], &cfg).unwrap();
        assert!((pts[0].f - LN_2).abs() < 0.01);
        assert!(thermo_integration_free_energy(&j, &[0.05, 0.04], &cfg).is_err());
        assert!(thermo_integration_free_energy(&j, &[0.2, 0.3], &cfg).is_err());
        assert!(thermo_integration_free_energy(&j, &[], &cfg).is_err());
    }

    #[test]
    fn integration_high_temperature_n14() {
        let j = sample_couplings(14, 21).unwrap();
        let grid: Vec<f64> = (1..=20).map(|k| 0.05 * k as f64).collect();
        let cfg = ChainConfig::single(1.0, 20_000, 2_000, 6);
        let pts = thermo_integration_free_energy(&j, &grid, &cfg).unwrap();
        let (exact, _) = enumerate_observables(&j, &[InverseTemperature::new(1.0).unwrap()]).unwrap();
        let last = pts.last().unwrap();
        assert!((last.f - exact[0].free_energy_density).abs() <= 0.01);
        let s = mc_entropy(1.0, Estimate { value: last.f, std_error: last.f_se }, Estimate { value: last.u, std_error: last.u_se });
        assert!((s.value - exact[0].entropy_density()).abs() < 3.0 * s.std_error + 1e-3);
    }

    #[test]
    fn entropy_at_infinite_temperature() {
        let s = mc_entropy(0.0, Estimate { value: LN_2, std_error: 0.0 }, Estimate { value: -0.3, std_error: 0.1 });
        assert_eq!(s.value, LN_2);
        assert_eq!(s.std_error, 0.0);
    }

    #[test]
    fn annealing_two_sites_and_recompute() {
        let j = CouplingMatrix::from_couplings(2, vec![1.0]).unwrap();
        let res = simulated_annealing_ground_state(&j, &AnnealSchedule::default(), 10, 1).unwrap();
        assert!((res.min_energy + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(res.restart_energies.iter().all(|&e| (e - res.min_energy).abs() < 1e-15));

        let j = sample_couplings(12, 4).unwrap();
        let res = simulated_annealing_ground_state(&j, &AnnealSchedule::default(), 3, 2).unwrap();
        let c = SpinConfiguration::from_spins(res.spins.clone()).unwrap();
        assert!((energy(&c, &j).unwrap() - res.min_energy).abs() < 1e-12);
        assert_eq!(c.index(), res.argmin_index);
        assert!(simulated_annealing_ground_state(&j, &AnnealSchedule::default(), 0, 2).is_err());
    }
}
