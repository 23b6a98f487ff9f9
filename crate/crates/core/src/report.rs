//! Report building for the command-line front end: ensemble sweeps with
//! finite-size extrapolation, finite-n comparisons against the limit values,
//! and the zero-crossing search for the extrapolated entropy.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytics::{predictions, PredictionSet, BETA_ONE, BETA_STAR};
use crate::ensemble::{map_samples, mean_and_std_error, run_ensemble, EnsembleConfig};
use crate::error::{invalid, Result};
use crate::exact::EnergyTable;
use crate::model::sample_couplings;

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "n,beta,f_mean,f_se,s_mean,s_se,u_mean,u_se";
/// Name of the only finite-size model implemented.
pub const EXTRAPOLATION_MODEL: &str = "linear-in-1/n";
const Z_95: f64 = 1.959_963_984_540_054;

/// `steps` evenly spaced inverse temperatures from `min` to `max` inclusive.
pub fn linear_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return invalid("beta steps must be at least 1");
    }
    if !(min.is_finite() && max.is_finite() && min > 0.0 && max >= min) {
        return invalid("beta range needs 0 < beta_min <= beta_max");
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let h = (max - min) / (steps - 1) as f64;
    let mut grid: Vec<f64> = (0..steps).map(|k| min + h * k as f64).collect();
    grid[steps - 1] = max;
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    /// Estimate at `1/n → 0`.
    pub intercept: f64,
    pub slope: f64,
    pub intercept_se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Weighted least squares of `s` against `1/n` with weights `1/SE²`.
///
/// The covariance is scaled by the reduced chi-square when that exceeds one.
/// If any SE is zero or non-finite, all points get unit weight and the
/// covariance is always scaled by the residual variance.
pub fn extrapolate_entropy(n_list: &[usize], s_means: &[f64], s_ses: &[f64]) -> Result<Extrapolation> {
    if n_list.len() != s_means.len() || n_list.len() != s_ses.len() {
        return invalid("n list, means and standard errors differ in length");
    }
    let mut distinct = n_list.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 || distinct[0] == 0 {
        return invalid("extrapolation needs at least 3 distinct positive n");
    }
    let known_errors = s_ses.iter().all(|&se| se.is_finite() && se > 0.0);
    let weights: Vec<f64> = if known_errors {
        s_ses.iter().map(|se| 1.0 / (se * se)).collect()
    } else {
        vec![1.0; s_ses.len()]
    };
    let xs: Vec<f64> = n_list.iter().map(|&n| 1.0 / n as f64).collect();
    let (mut sw, mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&x, &y), &w) in xs.iter().zip(s_means).zip(&weights) {
        sw += w;
        sx += w * x;
        sxx += w * x * x;
        sy += w * y;
        sxy += w * x * y;
    }
    let det = sw * sxx - sx * sx;
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    let chi2: f64 = xs
        .iter()
        .zip(s_means)
        .zip(&weights)
        .map(|((&x, &y), &w)| w * (y - intercept - slope * x).powi(2))
        .sum();
    let dof = (xs.len() - 2) as f64;
    let reduced = chi2 / dof;
    let scale = if known_errors { reduced.max(1.0) } else { reduced };
    let intercept_se = (sxx / det * scale).sqrt();
    Ok(Extrapolation {
        intercept,
        slope,
        intercept_se,
        ci_low: intercept - Z_95 * intercept_se,
        ci_high: intercept + Z_95 * intercept_se,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub beta: f64,
    pub f_mean: f64,
    pub f_se: f64,
    pub s_mean: f64,
    pub s_se: f64,
    pub u_mean: f64,
    pub u_se: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<RowSamples>,
}

/// Per-sample densities, kept only when requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowSamples {
    pub f: Vec<f64>,
    pub s: Vec<f64>,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationRow {
    pub beta: f64,
    pub model: String,
    #[serde(flatten)]
    pub fit: Extrapolation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub version: String,
    pub master_seed: u64,
    pub n_list: Vec<usize>,
    pub betas: Vec<f64>,
    pub sample_count: usize,
    pub extrapolation_model: String,
    pub units: String,
    /// SHA-256 over the serialized rows, predictions and extrapolation.
    pub content_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub metadata: SweepMetadata,
    pub rows: Vec<SweepRow>,
    pub predictions: PredictionSet,
    pub extrapolation: Option<Vec<ExtrapolationRow>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub n_list: Vec<usize>,
    pub betas: Vec<f64>,
    pub samples: usize,
    pub master_seed: u64,
    pub workers: Option<usize>,
    pub retain_samples: bool,
}

pub fn build_sweep_report(req: &SweepRequest) -> Result<SweepReport> {
    if req.n_list.is_empty() {
        return invalid("n list is empty");
    }
    let mut rows = Vec::with_capacity(req.n_list.len() * req.betas.len());
    for &n in &req.n_list {
        let cfg = EnsembleConfig {
            n,
            betas: req.betas.clone(),
            sample_count: req.samples,
            master_seed: req.master_seed,
            retain_samples: Some(req.retain_samples),
            workers: req.workers,
        };
        let run = run_ensemble(&cfg)?;
        let f = run.quenched_free_energy();
        let s = run.quenched_entropy();
        let u = run.quenched_energy();
        for b in 0..req.betas.len() {
            let samples = req.retain_samples.then(|| RowSamples {
                f: f[b].samples.clone().unwrap_or_default(),
                s: s[b].samples.clone().unwrap_or_default(),
                u: u[b].samples.clone().unwrap_or_default(),
            });
            rows.push(SweepRow {
                n,
                beta: req.betas[b],
                f_mean: f[b].mean,
                f_se: f[b].std_error,
                s_mean: s[b].mean,
                s_se: s[b].std_error,
                u_mean: u[b].mean,
                u_se: u[b].std_error,
                samples,
            });
        }
    }

    let mut distinct = req.n_list.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let extrapolation = if distinct.len() >= 3 {
        let mut fits = Vec::with_capacity(req.betas.len());
        for &beta in &req.betas {
            let at_beta: Vec<&SweepRow> = rows.iter().filter(|r| r.beta == beta).collect();
            let ns: Vec<usize> = at_beta.iter().map(|r| r.n).collect();
            let means: Vec<f64> = at_beta.iter().map(|r| r.s_mean).collect();
            let ses: Vec<f64> = at_beta.iter().map(|r| r.s_se).collect();
            fits.push(ExtrapolationRow {
                beta,
                model: EXTRAPOLATION_MODEL.to_string(),
                fit: extrapolate_entropy(&ns, &means, &ses)?,
            });
        }
        Some(fits)
    } else {
        None
    };

    let predictions = predictions();
    let content_hash = content_hash(&(&rows, &predictions, &extrapolation));
    Ok(SweepReport {
        schema_version: SCHEMA_VERSION,
        metadata: SweepMetadata {
            version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed: req.master_seed,
            n_list: req.n_list.clone(),
            betas: req.betas.clone(),
            sample_count: req.samples,
            extrapolation_model: EXTRAPOLATION_MODEL.to_string(),
            units: "nats".to_string(),
            content_hash,
        },
        rows,
        predictions,
        extrapolation,
    })
}

/// Hex SHA-256 of the compact JSON serialization of `value`.
pub fn content_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("report types serialize");
    hex::encode(Sha256::digest(&bytes))
}

impl SweepReport {
    /// CSV with the frozen header; floats in shortest round-trip form, LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.n, r.beta, r.f_mean, r.f_se, r.s_mean, r.s_se, r.u_mean, r.u_se
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report types serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub quantity: String,
    pub n: usize,
    pub mean: f64,
    pub std_error: f64,
    pub limit: f64,
    /// `mean − limit`, sign preserved.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionMeasurement {
    pub samples: usize,
    pub master_seed: u64,
    pub rows: Vec<ComparisonRow>,
    /// Extrapolation of `s_n(β*)` when at least three sizes were measured.
    pub entropy_extrapolation: Option<Extrapolation>,
}

/// Quantities compared by [`measure_predictions`], with their limit values.
pub fn comparison_targets() -> [(&'static str, f64); 7] {
    let p = predictions();
    [
        ("f_n(1)", p.f_beta1),
        ("f_n(beta*)", p.f_beta_star),
        ("s_n(beta*)", p.entropy_at_beta_star),
        ("alpha_n", p.alpha_infinity),
        ("kl_density", p.kl_prediction),
        ("cross_entropy_density", p.cross_entropy_prediction),
        ("uniform_kl_density", p.kl_uniform_at_beta_star),
    ]
}

/// Disorder-averaged finite-n versions of every limit value at `(β*, β₁ = 1)`.
pub fn measure_predictions(
    n_list: &[usize],
    samples: usize,
    master_seed: u64,
    workers: Option<usize>,
) -> Result<PredictionMeasurement> {
    if n_list.is_empty() {
        return invalid("n list is empty");
    }
    if samples == 0 {
        return invalid("sample count must be at least 1");
    }
    let targets = comparison_targets();
    let mut rows = Vec::new();
    let mut entropy_points = (Vec::new(), Vec::new(), Vec::new());
    for &n in n_list {
        let per_sample = map_samples(samples, master_seed, workers, |_, seed| {
            let j = sample_couplings(n, seed)?;
            let t = EnergyTable::new(&j)?.two_temperature_summary(BETA_STAR, BETA_ONE);
            let nf = n as f64;
            Ok([
                t.log_z_beta1 / nf,
                t.log_z_beta_star / nf,
                t.entropy_beta_star / nf,
                t.alpha(),
                t.relative_entropy / nf,
                t.cross_entropy_density,
                t.relative_entropy_uniform / nf,
            ])
        })?;
        for (q, &(name, limit)) in targets.iter().enumerate() {
            let values: Vec<f64> = per_sample.iter().map(|v| v[q]).collect();
            let (mean, se) = mean_and_std_error(&values);
            if q == 2 {
                entropy_points.0.push(n);
                entropy_points.1.push(mean);
                entropy_points.2.push(se);
            }
            rows.push(ComparisonRow {
                quantity: name.to_string(),
                n,
                mean,
                std_error: se,
                limit,
                gap: mean - limit,
            });
        }
    }
    let mut distinct = n_list.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let entropy_extrapolation = if distinct.len() >= 3 {
        Some(extrapolate_entropy(&entropy_points.0, &entropy_points.1, &entropy_points.2)?)
    } else {
        None
    };
    Ok(PredictionMeasurement {
        samples,
        master_seed,
        rows,
        entropy_extrapolation,
    })
}

/// `max(0, log 2 − β²/4) + 0.8/n`: an entropy with a known zero at the REM
/// freezing point, used to test the zero-crossing pipeline.
pub fn synthetic_rem_entropy(n: usize, beta: f64) -> f64 {
    (LN_2 - beta * beta / 4.0).max(0.0) + 0.8 / n as f64
}

/// Intercepts at or below this count as "not positive".
const ZERO_LEVEL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCrossing {
    pub beta: f64,
    /// Where the lower 95% band of the intercept crosses zero, if it does in the bracket.
    pub ci_low: Option<f64>,
    /// Where the upper 95% band crosses zero, if it does in the bracket.
    pub ci_high: Option<f64>,
    /// `beta − β*`.
    pub distance_to_beta_star: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoCrossing {
    pub beta_lo: f64,
    pub beta_hi: f64,
    pub intercept_lo: f64,
    pub intercept_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ZeroCrossOutcome {
    Crossing(ZeroCrossing),
    NoCrossing(NoCrossing),
}

fn bisect<F>(mut lo: f64, mut hi: f64, tol: f64, mut value: F) -> Result<Option<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(value(lo)? > ZERO_LEVEL && value(hi)? <= ZERO_LEVEL) {
        return Ok(None);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if value(mid)? > ZERO_LEVEL {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Bisection on `β ↦ intercept(β)` for the point where the extrapolated
/// entropy stops being positive, to within `tolerance` in `β`.
pub fn locate_zero_crossing<F>(
    beta_lo: f64,
    beta_hi: f64,
    tolerance: f64,
    mut intercept_at: F,
) -> Result<ZeroCrossOutcome>
where
    F: FnMut(f64) -> Result<Extrapolation>,
{
    if !(beta_lo > 0.0 && beta_hi > beta_lo) || !(tolerance > 0.0) {
        return invalid("zero-cross bracket needs 0 < beta_lo < beta_hi and a positive tolerance");
    }
    let mut cache: Vec<(f64, Extrapolation)> = Vec::new();
    let mut eval = |beta: f64| -> Result<Extrapolation> {
        if let Some((_, e)) = cache.iter().find(|(b, _)| *b == beta) {
            return Ok(*e);
        }
        let e = intercept_at(beta)?;
        cache.push((beta, e));
        Ok(e)
    };

    let lo = eval(beta_lo)?;
    let hi = eval(beta_hi)?;
    if !(lo.intercept > ZERO_LEVEL && hi.intercept <= ZERO_LEVEL) {
        return Ok(ZeroCrossOutcome::NoCrossing(NoCrossing {
            beta_lo,
            beta_hi,
            intercept_lo: lo.intercept,
            intercept_hi: hi.intercept,
        }));
    }
    let beta = bisect(beta_lo, beta_hi, tolerance, |b| Ok(eval(b)?.intercept))?
        .expect("endpoint signs checked above");
    let ci_low = bisect(beta_lo, beta_hi, tolerance, |b| Ok(eval(b)?.ci_low))?;
    let ci_high = bisect(beta_lo, beta_hi, tolerance, |b| Ok(eval(b)?.ci_high))?;
    Ok(ZeroCrossOutcome::Crossing(ZeroCrossing {
        beta,
        ci_low,
        ci_high,
        distance_to_beta_star: beta - BETA_STAR,
        evaluations: cache.len(),
    }))
}

/// Extrapolated intercept of the synthetic REM-form entropy at `beta`.
pub fn synthetic_intercept(n_list: &[usize], beta: f64) -> Result<Extrapolation> {
    let means: Vec<f64> = n_list.iter().map(|&n| synthetic_rem_entropy(n, beta)).collect();
    let ses = vec![1e-6; n_list.len()];
    extrapolate_entropy(n_list, &means, &ses)
}

/// Extrapolated intercept of the disorder-averaged SK entropy density at `beta`.
pub fn ensemble_intercept(
    n_list: &[usize],
    beta: f64,
    samples: usize,
    master_seed: u64,
    workers: Option<usize>,
) -> Result<Extrapolation> {
    let mut means = Vec::with_capacity(n_list.len());
    let mut ses = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mut cfg = EnsembleConfig::new(n, vec![beta], samples, master_seed);
        cfg.workers = workers;
        cfg.retain_samples = Some(false);
        let s = run_ensemble(&cfg)?.quenched_entropy().remove(0);
        means.push(s.mean);
        ses.push(s.std_error);
    }
    extrapolate_entropy(n_list, &means, &ses)
}
