//! Self-check suite for the exact identities the engine is built on.
//!
//! Every check runs on seeded random instances and reports its worst
//! deviation together with the first failing `(n, seed, β)`.

use serde::Serialize;

use crate::analytics::BETA_STAR;
use crate::error::{invalid, Result, SkError};
use crate::exact::{enumerate_observables, enumerate_observables_partitioned, EnergyTable, GibbsDistribution, MAX_TABLE_SITES};
use crate::model::{betas_from, delta_energy, energy, sample_couplings, CouplingMatrix, SpinConfiguration};
use crate::oracle::{naive_thermo, MAX_ORACLE_SITES};
use crate::rng::{derive_seed, SplitMix64};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationOptions {
    /// Run every check at this size instead of the default spread of sizes.
    pub n: Option<usize>,
    pub master_seed: u64,
    /// Also materialize and return the Gibbs distribution of the first instance at β = 1.
    pub distribution: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FailureTuple {
    pub n: usize,
    pub seed: u64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub failure: Option<FailureTuple>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub master_seed: u64,
    pub checks: Vec<CheckResult>,
    #[serde(skip)]
    pub distribution: Option<GibbsDistribution>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Accumulates one check: a deviation above `tolerance` is a failure.
struct Check {
    result: CheckResult,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Check {
            result: CheckResult {
                name,
                passed: true,
                cases: 0,
                worst: 0.0,
                tolerance,
                failure: None,
            },
        }
    }

    fn record(&mut self, deviation: f64, n: usize, seed: u64, beta: f64) {
        let r = &mut self.result;
        r.cases += 1;
        let bad = !(deviation <= r.tolerance);
        r.worst = if deviation.is_nan() { f64::INFINITY } else { r.worst.max(deviation) };
        if bad && r.passed {
            r.passed = false;
            r.failure = Some(FailureTuple { n, seed, beta });
        }
    }

    fn finish(self) -> CheckResult {
        self.result
    }
}

struct Instance {
    j: CouplingMatrix,
    table: EnergyTable,
}

impl Instance {
    fn new(n: usize, seed: u64) -> Result<Self> {
        let j = sample_couplings(n, seed)?;
        let table = EnergyTable::new(&j)?;
        Ok(Instance { j, table })
    }

    fn n(&self) -> usize {
        self.table.n()
    }

    fn seed(&self) -> u64 {
        self.j.seed()
    }
}

fn instances(opts: &ValidationOptions, stream: u64, count: usize, sizes: impl Fn(usize) -> usize) -> Result<Vec<Instance>> {
    let base = derive_seed(opts.master_seed, stream);
    (0..count)
        .map(|k| Instance::new(opts.n.unwrap_or_else(|| sizes(k)), derive_seed(base, k as u64)))
        .collect()
}

const IDENTITY_BETAS: [f64; 4] = [0.1, 1.0, BETA_STAR, 6.0];
const GRID_POINTS: usize = 40;

/// Runs every check. Sizes beyond the energy-table cap are refused up front.
pub fn run_validation(opts: &ValidationOptions) -> Result<ValidationReport> {
    if let Some(n) = opts.n {
        if n < 2 {
            return invalid("validation needs n >= 2");
        }
        if n > MAX_TABLE_SITES {
            return Err(SkError::ResourceLimit {
                what: if opts.distribution { "gibbs distribution" } else { "energy table" },
                n,
                cap: MAX_TABLE_SITES,
            });
        }
    }

    let small = instances(opts, 0, 50, |k| 2 + k % 11)?;
    let medium = instances(opts, 1, 20, |k| 4 + k % 13)?;
    let pairs: [(f64, f64); 4] = [(BETA_STAR, 1.0), (2.0, 1.0), (0.3, 1.0), (1.5, 1.5)];
    let mut checks = Vec::new();

    let mut c = Check::new("entropy_identity", 1e-9);
    for inst in &small {
        for &beta in &IDENTITY_BETAS {
            let dev = (inst.table.entropy_direct(beta) - inst.table.entropy_identity(beta)).abs();
            c.record(dev / inst.n() as f64, inst.n(), inst.seed(), beta);
        }
    }
    checks.push(c.finish());

    let mut fe = Check::new("functional_equation", 1e-10);
    let mut kl = Check::new("kl_two_route", 1e-9);
    let mut kl_pos = Check::new("kl_nonnegative", 0.0);
    let mut uni = Check::new("uniform_kl_complement", 1e-9);
    let mut cross = Check::new("cross_entropy_decomposition", 1e-9);
    for inst in &medium {
        let (n, seed, t) = (inst.n(), inst.seed(), &inst.table);
        for &(beta, beta1) in &pairs {
            fe.record(t.functional_equation_residual(beta, beta1), n, seed, beta);
            let direct = t.relative_entropy(beta, beta1);
            kl.record((direct - t.relative_entropy_identity(beta, beta1)).abs(), n, seed, beta);
            // Rounding can leave a true zero slightly negative.
            kl_pos.record((-direct - 1e-12).max(0.0), n, seed, beta);
            let s = t.entropy_direct(beta);
            let decomposed = -(s + direct) / n as f64;
            cross.record((t.cross_entropy_term(beta, beta1) - decomposed).abs(), n, seed, beta);
            let complement = n as f64 * std::f64::consts::LN_2 - s;
            uni.record((t.relative_entropy_uniform(beta) - complement).abs(), n, seed, beta);
        }
    }
    checks.extend([fe, kl, kl_pos, uni, cross].map(Check::finish));

    let grid: Vec<f64> = (0..GRID_POINTS).map(|k| 0.05 + 0.15 * k as f64).collect();
    let mut mono = Check::new("entropy_monotone", 1e-9);
    let mut convex = Check::new("log_z_convex", 1e-9);
    for inst in &medium {
        let (n, seed) = (inst.n(), inst.seed());
        let s: Vec<f64> = grid.iter().map(|&b| inst.table.entropy_identity(b)).collect();
        let lz: Vec<f64> = grid.iter().map(|&b| inst.table.log_z(b)).collect();
        for k in 1..GRID_POINTS {
            mono.record((s[k] - s[k - 1]).max(0.0), n, seed, grid[k]);
        }
        for k in 1..GRID_POINTS - 1 {
            let second = lz[k + 1] - 2.0 * lz[k] + lz[k - 1];
            convex.record((-second).max(0.0), n, seed, grid[k]);
        }
    }
    checks.extend([mono, convex].map(Check::finish));

    // Quenched average of log Z never exceeds the log of the average Z.
    let mut jensen = Check::new("jensen_ordering", 1e-12);
    let jensen_set = instances(opts, 2, 20, |_| 8)?;
    for &beta in &IDENTITY_BETAS {
        let lz: Vec<f64> = jensen_set.iter().map(|i| i.table.log_z(beta)).collect();
        let count = lz.len() as f64;
        let quenched = lz.iter().sum::<f64>() / count;
        let max = lz.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let annealed = max + (lz.iter().map(|&l| (l - max).exp()).sum::<f64>() / count).ln();
        let n = jensen_set[0].n();
        jensen.record((quenched - annealed).max(0.0) / n as f64, n, jensen_set[0].seed(), beta);
    }
    checks.push(jensen.finish());

    let mut oracle_lz = Check::new("naive_oracle_log_z", 1e-10);
    let mut oracle_s = Check::new("naive_oracle_entropy", 1e-10);
    let oracle_n = |k: usize| 2 + k % 3;
    let oracle_opts = ValidationOptions {
        n: opts.n.filter(|&n| n <= MAX_ORACLE_SITES.min(12)),
        ..opts.clone()
    };
    for inst in instances(&oracle_opts, 3, 12, oracle_n)? {
        for &beta in &IDENTITY_BETAS {
            let naive = naive_thermo(&inst.j, beta)?;
            let (n, seed) = (inst.n(), inst.seed());
            oracle_lz.record((naive.log_z - inst.table.log_z(beta)).abs(), n, seed, beta);
            oracle_s.record((naive.entropy - inst.table.entropy_identity(beta)).abs(), n, seed, beta);
        }
    }
    checks.extend([oracle_lz, oracle_s].map(Check::finish));

    let mut flip = Check::new("flip_symmetry", 0.0);
    for inst in &medium {
        let e = inst.table.energies();
        let mask = e.len() - 1;
        let worst = (0..e.len()).map(|i| (e[i] - e[i ^ mask]).abs()).fold(0.0, f64::max);
        flip.record(worst, inst.n(), inst.seed(), f64::NAN);
    }
    checks.push(flip.finish());

    let mut delta = Check::new("delta_energy", 1e-10);
    for inst in &medium {
        let n = inst.n();
        let mut rng = SplitMix64::new(inst.seed());
        for _ in 0..20 {
            let sigma = SpinConfiguration::from_index(n, rng.next_u64() & ((1u64 << n) - 1))?;
            let site = rng.below(n);
            let mut flipped = sigma.clone();
            flipped.flip(site);
            let direct = energy(&flipped, &inst.j)? - energy(&sigma, &inst.j)?;
            delta.record((direct - delta_energy(&sigma, &inst.j, site)?).abs(), n, inst.seed(), f64::NAN);
        }
    }
    checks.push(delta.finish());

    let mut part = Check::new("partitioned_agreement", 1e-10);
    let betas = betas_from(&IDENTITY_BETAS)?;
    for inst in medium.iter().filter(|i| i.n() >= 6).take(4) {
        let seq = enumerate_observables(&inst.j, &betas)?;
        let par = enumerate_observables_partitioned(&inst.j, &betas, 2)?;
        for (a, b) in seq.0.iter().zip(&par.0) {
            let dev = (a.log_z - b.log_z).abs().max((a.entropy - b.entropy).abs());
            part.record(dev, inst.n(), inst.seed(), a.beta);
        }
    }
    checks.push(part.finish());

    let distribution = if opts.distribution {
        Some(small[0].table.distribution(1.0))
    } else {
        None
    };
    Ok(ValidationReport {
        master_seed: opts.master_seed,
        checks,
        distribution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let report = run_validation(&ValidationOptions::default()).unwrap();
        assert!(report.checks.len() >= 8);
        for c in &report.checks {
            assert!(c.passed, "{} failed: worst {} at {:?}", c.name, c.worst, c.failure);
            assert!(c.cases > 0, "{} ran no cases", c.name);
        }
    }

    #[test]
    fn fixed_size_and_caps() {
        let report = run_validation(&ValidationOptions { n: Some(6), ..Default::default() }).unwrap();
        assert!(report.all_passed());
        let err = run_validation(&ValidationOptions {
            n: Some(25),
            distribution: true,
            ..Default::default()
        })
        .unwrap_err();
        assert!(matches!(err, SkError::ResourceLimit { n: 25, .. }));
        assert!(run_validation(&ValidationOptions { n: Some(1), ..Default::default() }).is_err());
    }

    #[test]
    fn check_records_first_failure() {
        let mut c = Check::new("x", 1e-3);
        c.record(1e-4, 4, 1, 0.5);
        c.record(1.0, 5, 2, 1.0);
        c.record(2.0, 6, 3, 2.0);
        let r = c.finish();
        assert!(!r.passed);
        assert_eq!(r.worst, 2.0);
        assert_eq!(r.failure, Some(FailureTuple { n: 5, seed: 2, beta: 1.0 }));
        let mut nan = Check::new("y", 1.0);
        nan.record(f64::NAN, 2, 0, 1.0);
        assert!(!nan.finish().passed);
    }
}
