//! Disorder averages over independently seeded coupling samples.
//!
//! Sample `k` of an ensemble uses couplings drawn with
//! [`derive_seed`]`(master_seed, k)`. Samples are evaluated on a worker pool,
//! written to slot `k` of a preallocated result vector and reduced in index
//! order, so every statistic is bit-identical for any worker count.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::exact::{enumerate_observables, GroundStateResult, ThermoPoint};
use crate::model::{betas_from, sample_couplings};
use crate::rng::derive_seed;

/// Sample counts above this do not keep per-sample values unless asked to.
pub const RETAIN_DEFAULT_LIMIT: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n: usize,
    pub betas: Vec<f64>,
    pub sample_count: usize,
    pub master_seed: u64,
    /// `None` retains per-sample values only up to [`RETAIN_DEFAULT_LIMIT`] samples.
    pub retain_samples: Option<bool>,
    /// `None` uses all available cores.
    pub workers: Option<usize>,
}

impl EnsembleConfig {
    pub fn new(n: usize, betas: Vec<f64>, sample_count: usize, master_seed: u64) -> Self {
        EnsembleConfig {
            n,
            betas,
            sample_count,
            master_seed,
            retain_samples: None,
            workers: None,
        }
    }

    pub fn retains(&self) -> bool {
        self.retain_samples
            .unwrap_or(self.sample_count <= RETAIN_DEFAULT_LIMIT)
    }

    fn validate(&self) -> Result<()> {
        if self.sample_count == 0 {
            return invalid("sample_count must be at least 1");
        }
        if self.n == 0 {
            return invalid("site count must be at least 1");
        }
        if self.workers == Some(0) {
            return invalid("worker count must be at least 1");
        }
        betas_from(&self.betas)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub n: usize,
    pub beta: f64,
    pub quantity_name: String,
    pub mean: f64,
    pub std_error: f64,
    pub sample_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<f64>>,
}

/// Mean and standard error (sample standard deviation / √count), Welford-accumulated
/// in slice order.
pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, &x) in values.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
    }
    let count = values.len();
    if count < 2 {
        return (mean, 0.0);
    }
    let var = (m2 / (count - 1) as f64).max(0.0);
    (mean, (var / count as f64).sqrt())
}

fn sample_variance(values: &[f64]) -> f64 {
    let (mean, _) = mean_and_std_error(values);
    if values.len() < 2 {
        return 0.0;
    }
    values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64
}

impl EnsembleStats {
    pub fn from_values(n: usize, beta: f64, name: &str, values: Vec<f64>, retain: bool) -> Self {
        let (mean, std_error) = mean_and_std_error(&values);
        EnsembleStats {
            n,
            beta,
            quantity_name: name.to_string(),
            mean,
            std_error,
            sample_count: values.len(),
            samples: retain.then_some(values),
        }
    }
}

/// Runs `task(k, seed_k)` for every sample index on the configured pool and
/// returns results in index order.
pub fn map_samples<T, F>(
    sample_count: usize,
    master_seed: u64,
    workers: Option<usize>,
    task: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, u64) -> Result<T> + Sync + Send,
{
    let run = || {
        (0..sample_count)
            .into_par_iter()
            .map(|k| task(k, derive_seed(master_seed, k as u64)))
            .collect::<Result<Vec<T>>>()
    };
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| crate::SkError::InvalidArgument(format!("worker pool: {e}")))?
            .install(run),
        None => run(),
    }
}

#[derive(Debug, Clone)]
pub struct SampleObservables {
    pub seed: u64,
    pub points: Vec<ThermoPoint>,
    pub ground: GroundStateResult,
}

/// Exact per-sample observables of a whole ensemble, one enumeration per sample.
#[derive(Debug, Clone)]
pub struct EnsembleRun {
    pub config: EnsembleConfig,
    pub samples: Vec<SampleObservables>,
}

pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleRun> {
    cfg.validate()?;
    let betas = betas_from(&cfg.betas)?;
    let samples = map_samples(cfg.sample_count, cfg.master_seed, cfg.workers, |_, seed| {
        let j = sample_couplings(cfg.n, seed)?;
        let (points, ground) = enumerate_observables(&j, &betas)?;
        Ok(SampleObservables {
            seed,
            points,
            ground,
        })
    })?;
    Ok(EnsembleRun {
        config: cfg.clone(),
        samples,
    })
}

/// Empirical annealed free energy with its heavy-tail diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealedStats {
    /// `std_error` is the jackknife standard error.
    pub stats: EnsembleStats,
    /// Fraction of the sample mean of `Z` carried by the largest sample.
    pub top_sample_weight: f64,
    pub heavy_tail: bool,
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `(1/n) log( (1/K) Σ_k Z_k )` from per-sample `log Z_k`, with a leave-one-out jackknife.
pub fn annealed_from_log_z(n: usize, beta: f64, log_z: &[f64], retain: bool) -> AnnealedStats {
    let k = log_z.len();
    let nf = n as f64;
    let max = log_z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = log_z.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == min {
        // Identical samples (e.g. n = 1): the log-mean is exact.
        return AnnealedStats {
            stats: EnsembleStats {
                n,
                beta,
                quantity_name: "annealed_free_energy".into(),
                mean: max / nf,
                std_error: 0.0,
                sample_count: k,
                samples: retain.then(|| log_z.iter().map(|l| l / nf).collect()),
            },
            top_sample_weight: 1.0 / k as f64,
            heavy_tail: k == 1,
        };
    }
    let total = log_sum_exp(log_z);
    let estimate = (total - (k as f64).ln()) / nf;
    let top_sample_weight = (max - total).exp();

    let mut std_error = 0.0;
    if k > 1 {
        // Leave-one-out sums from prefix/suffix log-sums, stable even when one term dominates.
        let mut prefix = vec![f64::NEG_INFINITY; k + 1];
        for i in 0..k {
            prefix[i + 1] = log_add_exp(prefix[i], log_z[i]);
        }
        let mut suffix = vec![f64::NEG_INFINITY; k + 1];
        for i in (0..k).rev() {
            suffix[i] = log_add_exp(suffix[i + 1], log_z[i]);
        }
        let log_km1 = ((k - 1) as f64).ln();
        let loo: Vec<f64> = (0..k)
            .map(|i| (log_add_exp(prefix[i], suffix[i + 1]) - log_km1) / nf)
            .collect();
        let loo_mean = loo.iter().sum::<f64>() / k as f64;
        let ss: f64 = loo.iter().map(|x| (x - loo_mean).powi(2)).sum();
        std_error = ((k - 1) as f64 / k as f64 * ss).sqrt();
    }
    AnnealedStats {
        stats: EnsembleStats {
            n,
            beta,
            quantity_name: "annealed_free_energy".into(),
            mean: estimate,
            std_error,
            sample_count: k,
            samples: retain.then(|| log_z.iter().map(|l| l / nf).collect()),
        },
        top_sample_weight,
        heavy_tail: top_sample_weight > 0.5,
    }
}

impl EnsembleRun {
    fn per_beta<F>(&self, name: &str, value: F) -> Vec<EnsembleStats>
    where
        F: Fn(&ThermoPoint) -> f64,
    {
        let retain = self.config.retains();
        self.config
            .betas
            .iter()
            .enumerate()
            .map(|(b, &beta)| {
                let values = self.samples.iter().map(|s| value(&s.points[b])).collect();
                EnsembleStats::from_values(self.config.n, beta, name, values, retain)
            })
            .collect()
    }

    /// `f_n(β) = (1/n) E_J log Z_n(β, J)`.
    pub fn quenched_free_energy(&self) -> Vec<EnsembleStats> {
        self.per_beta("free_energy", |p| p.free_energy_density)
    }

    /// `(1/n) E_J S(μ_{n,β,J})`.
    pub fn quenched_entropy(&self) -> Vec<EnsembleStats> {
        self.per_beta("entropy", |p| p.entropy_density())
    }

    /// `(1/n) E_J ⟨H⟩`.
    pub fn quenched_energy(&self) -> Vec<EnsembleStats> {
        self.per_beta("energy", |p| p.energy_density())
    }

    pub fn annealed_free_energy(&self) -> Vec<AnnealedStats> {
        let retain = self.config.retains();
        self.config
            .betas
            .iter()
            .enumerate()
            .map(|(b, &beta)| {
                let log_z: Vec<f64> = self.samples.iter().map(|s| s.points[b].log_z).collect();
                annealed_from_log_z(self.config.n, beta, &log_z, retain)
            })
            .collect()
    }

    /// Disorder average of the ground-state energy density `min H / n`.
    pub fn ground_state_density(&self) -> EnsembleStats {
        let values = self.samples.iter().map(|s| s.ground.energy_density).collect();
        EnsembleStats::from_values(self.config.n, f64::INFINITY, "ground_state_density", values, self.config.retains())
    }
}

pub fn quenched_free_energy(cfg: &EnsembleConfig) -> Result<Vec<EnsembleStats>> {
    Ok(run_ensemble(cfg)?.quenched_free_energy())
}

pub fn quenched_entropy(cfg: &EnsembleConfig) -> Result<Vec<EnsembleStats>> {
    Ok(run_ensemble(cfg)?.quenched_entropy())
}

pub fn annealed_free_energy_empirical(cfg: &EnsembleConfig) -> Result<Vec<AnnealedStats>> {
    Ok(run_ensemble(cfg)?.annealed_free_energy())
}

/// `(1/n) log E_J Z_n = log 2 + β²(n-1)/(4n)`.
pub fn annealed_free_energy_exact(n: usize, beta: f64) -> f64 {
    let nf = n as f64;
    LN_2 + beta * beta * (nf - 1.0) / (4.0 * nf)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfAveragingRow {
    pub n: usize,
    /// Sample variance of `(1/n) log Z` over disorder.
    pub variance: f64,
    pub variance_std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfAveragingReport {
    pub beta: f64,
    pub samples: usize,
    pub rows: Vec<SelfAveragingRow>,
    /// Least-squares slope of `log variance` against `log n` over rows with
    /// positive variance; `None` with fewer than two such rows.
    pub power_law_exponent: Option<f64>,
}

/// Standard error of the sample variance from the fourth central moment.
fn variance_std_error(values: &[f64]) -> f64 {
    let k = values.len();
    if k < 4 {
        return 0.0;
    }
    let kf = k as f64;
    let mean = values.iter().sum::<f64>() / kf;
    let s2 = sample_variance(values);
    let m4 = values.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / kf;
    ((m4 - (kf - 3.0) / (kf - 1.0) * s2 * s2) / kf).max(0.0).sqrt()
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn self_averaging_diagnostic(
    n_list: &[usize],
    beta: f64,
    samples: usize,
    master_seed: u64,
) -> Result<SelfAveragingReport> {
    if n_list.is_empty() {
        return invalid("n list is empty");
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mut cfg = EnsembleConfig::new(n, vec![beta], samples, master_seed);
        cfg.retain_samples = Some(false);
        let run = run_ensemble(&cfg)?;
        let values: Vec<f64> = run.samples.iter().map(|s| s.points[0].free_energy_density).collect();
        rows.push(SelfAveragingRow {
            n,
            variance: sample_variance(&values),
            variance_std_error: variance_std_error(&values),
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.variance > 0.0)
        .map(|r| ((r.n as f64).ln(), r.variance.ln()))
        .unzip();
    Ok(SelfAveragingReport {
        beta,
        samples,
        rows,
        power_law_exponent: least_squares_slope(&xs, &ys),
    })
}
