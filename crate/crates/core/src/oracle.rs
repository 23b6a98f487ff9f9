//! Brute-force reference computations, deliberately sharing no code path with
//! the Gray-code engine: every energy is a fresh double loop and every sum is
//! Kahan-compensated.

use crate::error::Result;
use crate::model::{energy, CouplingMatrix, SpinConfiguration};

/// Hard cap for the brute-force oracle.
pub const MAX_ORACLE_SITES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaiveThermo {
    pub log_z: f64,
    pub mean_h: f64,
    /// `-Σ p log p`.
    pub entropy: f64,
}

fn kahan<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

pub fn naive_thermo(j: &CouplingMatrix, beta: f64) -> Result<NaiveThermo> {
    let n = j.n();
    if n > MAX_ORACLE_SITES {
        return Err(crate::SkError::ResourceLimit {
            what: "naive oracle",
            n,
            cap: MAX_ORACLE_SITES,
        });
    }
    let energies = (0..1u64 << n)
        .map(|idx| energy(&SpinConfiguration::from_index(n, idx)?, j))
        .collect::<Result<Vec<f64>>>()?;
    let shift = energies.iter().map(|&e| -beta * e).fold(f64::NEG_INFINITY, f64::max);
    let log_z = shift + kahan(energies.iter().map(|&e| (-beta * e - shift).exp())).ln();
    let probs: Vec<f64> = energies.iter().map(|&e| (-beta * e - log_z).exp()).collect();
    let mean_h = kahan(probs.iter().zip(&energies).map(|(p, e)| p * e));
    let entropy = -kahan(probs.iter().map(|&p| if p > 0.0 { p * p.ln() } else { 0.0 }));
    Ok(NaiveThermo {
        log_z,
        mean_h,
        entropy,
    })
}
