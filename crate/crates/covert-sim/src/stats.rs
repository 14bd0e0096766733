//! Small statistical helpers shared by the detector, the countermeasure
//! formulas and the scenario reports.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Standard-normal quantile `Φ⁻¹(p)` for `p ∈ (0, 1)`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param(format!(
            "normal quantile requires p in (0, 1), got {p}"
        )));
    }
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal is always valid");
    Ok(std_normal.inverse_cdf(p))
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (n − 1 denominator).
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of the sample mean.
pub fn stderr_mean(xs: &[f64]) -> f64 {
    (sample_variance(xs) / xs.len() as f64).sqrt()
}

/// Standard error of an empirical proportion `p` over `n` trials.
pub fn proportion_stderr(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// One-sided z statistic for `mean_a − mean_b` given each side's standard
/// error. Positive values favour `a`.
pub fn welch_z(mean_a: f64, se_a: f64, mean_b: f64, se_b: f64) -> f64 {
    (mean_a - mean_b) / (se_a * se_a + se_b * se_b).sqrt()
}

/// Pearson chi-square statistic for observed vs expected counts.
/// Panics in debug builds if the slices disagree in length.
pub fn chi_square_stat(observed: &[f64], expected: &[f64]) -> f64 {
    debug_assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum()
}

/// Kolmogorov statistic `sup |F_n(x) − x|` of a sample against U(0, 1).
pub fn ks_statistic_uniform(sample: &mut [f64]) -> f64 {
    sample.sort_by(|a, b| a.partial_cmp(b).expect("no NaNs in KS sample"));
    let n = sample.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in sample.iter().enumerate() {
        let hi = (i + 1) as f64 / n - x;
        let lo = x - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    d
}
