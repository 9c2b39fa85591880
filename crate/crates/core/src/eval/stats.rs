//! Wilcoxon signed-rank test and the two-sample power calculation.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::metrics::average_ranks;
use super::EvalError;

/// Largest number of non-zero differences handled by exact enumeration.
pub const EXACT_MAX_N: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PMethod {
    Exact,
    Normal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wilcoxon {
    /// `min(W+, W-)`.
    pub statistic: f64,
    pub p_value: f64,
    /// Pairs left after dropping zero differences.
    pub n: usize,
    pub method: PMethod,
}

/// Two-sided signed-rank test on `a - b`. Zero differences are dropped and
/// tied absolute differences share average ranks. The p-value is exact for
/// up to [`EXACT_MAX_N`] pairs and uses the tie-corrected normal
/// approximation (no continuity correction) above that.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<Wilcoxon, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch(a.len(), b.len()));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Err(EvalError::TooFewPairs);
    }
    let ranks = average_ranks(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
    let w_plus: f64 = ranks.iter().zip(&diffs).filter(|(_, d)| **d > 0.0).fold(0.0, |acc, (r, _)| acc + r);
    let total = (n * (n + 1)) as f64 / 2.0;
    let statistic = w_plus.min(total - w_plus);
    if n <= EXACT_MAX_N {
        return Ok(Wilcoxon {
            statistic,
            p_value: exact_p(&ranks, statistic),
            n,
            method: PMethod::Exact,
        });
    }
    let mean = total / 2.0;
    let mut var = (n * (n + 1) * (2 * n + 1)) as f64 / 24.0;
    for t in tie_sizes(&ranks) {
        let t = t as f64;
        var -= (t * t * t - t) / 48.0;
    }
    let z = (statistic - mean) / var.sqrt();
    let p = 2.0 * Normal::new(0.0, 1.0).expect("standard normal").cdf(z);
    Ok(Wilcoxon {
        statistic,
        p_value: p.min(1.0),
        n,
        method: PMethod::Normal,
    })
}

fn tie_sizes(ranks: &[f64]) -> Vec<usize> {
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|r| **r == sorted[i]).count();
        out.push(j);
        i += j;
    }
    out
}

/// `P(min(W+, W-) <= statistic)` under random signs, by counting subset sums
/// of the doubled (hence integral) ranks.
fn exact_p(ranks: &[f64], statistic: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0u64; total + 1];
    counts[0] = 1;
    for &r in &doubled {
        for s in (r..=total).rev() {
            counts[s] += counts[s - r];
        }
    }
    let limit = (statistic * 2.0).round() as usize;
    let lower: u64 = counts[..=limit].iter().sum();
    let p = 2.0 * lower as f64 / 2f64.powi(ranks.len() as i32);
    p.min(1.0)
}

/// Per-group sample size for a two-sided, two-sample comparison at
/// significance `alpha`, the given `power` and standardized effect `d`:
/// `ceil(2 * ((z_{1-alpha/2} + z_power) / d)^2)`.
pub fn min_sample_size(alpha: f64, power: f64, d: f64) -> Result<u64, EvalError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(EvalError::Domain(format!("alpha must be in (0, 1), got {alpha}")));
    }
    if !(power > 0.0 && power < 1.0) {
        return Err(EvalError::Domain(format!("power must be in (0, 1), got {power}")));
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(EvalError::Domain(format!("effect size must be positive, got {d}")));
    }
    let std = Normal::new(0.0, 1.0).expect("standard normal");
    let z = std.inverse_cdf(1.0 - alpha / 2.0) + std.inverse_cdf(power);
    Ok((2.0 * (z / d).powi(2)).ceil() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_statistic() {
        let w = wilcoxon_signed_rank(&[1.0, 2.0, 3.0, -1.0], &[0.0; 4]).unwrap();
        assert_eq!(w.statistic, 1.5);
        assert_eq!(w.method, PMethod::Exact);
        // W+ <= 1.5 happens for sign patterns with W+ in {0, 1.5}: 1 + 2 of 16.
        assert!((w.p_value - 2.0 * 3.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn all_zero_differences() {
        assert!(matches!(
            wilcoxon_signed_rank(&[1.0, 2.0], &[1.0, 2.0]),
            Err(EvalError::TooFewPairs)
        ));
    }

    #[test]
    fn large_shift_is_significant() {
        let b: Vec<f64> = (0..20).map(|i| (i as f64 * 0.37).sin()).collect();
        let a: Vec<f64> = b.iter().enumerate().map(|(i, v)| v + 5.0 + 0.01 * i as f64).collect();
        let w = wilcoxon_signed_rank(&a, &b).unwrap();
        assert_eq!(w.method, PMethod::Normal);
        assert!(w.p_value < 0.01);
        assert_eq!(w.statistic, 0.0);
    }

    #[test]
    fn sample_sizes() {
        assert_eq!(min_sample_size(0.1, 0.8, 0.8).unwrap(), 20);
        assert_eq!(min_sample_size(0.05, 0.8, 0.8).unwrap(), 25);
        assert_eq!(min_sample_size(0.05, 0.8, 100.0).unwrap(), 1);
        assert!(min_sample_size(0.0, 0.8, 0.8).is_err());
        assert!(min_sample_size(0.05, 0.8, 0.0).is_err());
    }
}
