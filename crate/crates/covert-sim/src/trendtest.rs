//! Nonparametric sign test for a downward trend in a power vector.
//!
//! The vector of 2t readings (ordered by increasing distance) is split in
//! half and location `i` is paired with location `t + i`. The statistic
//! counts pairs whose difference `v_i − v_{t+i}` is negative; zero
//! differences are discarded and shrink the effective pair count `t_used`.
//! Under the no-transmission hypothesis each nonzero difference is negative
//! with probability ½ independently, so the statistic is Binomial(t_used, ½)
//! and a *downward* trend (near readings larger than far ones, i.e. few
//! negative differences) is declared when the statistic falls strictly below
//! a lower β-quantile threshold.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::channel::PowerVector;
use crate::error::{Error, Result};
use crate::stats::normal_quantile;

/// How the decision threshold is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMethod {
    /// Largest integer `k` with `P{Bin(t,½) < k} ≤ β`; preserves size ≤ β
    /// exactly, at the cost of conservatism from discreteness.
    ExactBinomial,
    /// `½·(t + √t·Φ⁻¹(β))`, the Gaussian approximation of the same quantile.
    NormalApprox,
    /// ExactBinomial for `t_used ≤ 20`, NormalApprox above.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrendDecision {
    DownwardTrend,
    NoTrend,
}

/// Outcome of one trend test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrendVerdict {
    /// Count of negative pair differences.
    pub statistic: u32,
    /// Pairs remaining after zero differences are dropped.
    pub t_used: u32,
    /// Decision cut: `DownwardTrend ⇔ statistic < threshold`.
    pub threshold: f64,
    pub beta: f64,
    /// The method actually applied (`Auto` is resolved).
    pub method: ThresholdMethod,
    pub decision: TrendDecision,
}

/// Count of negative differences and the effective pair count.
///
/// `values` must have even length ≥ 2. Returns `(statistic, t_used)`.
pub fn cox_stuart_statistic(values: &[f64]) -> Result<(u32, u32)> {
    if values.len() < 2 || !values.len().is_multiple_of(2) {
        return Err(Error::param(format!(
            "sign test needs an even number of values >= 2, got {}",
            values.len()
        )));
    }
    let t = values.len() / 2;
    let mut negatives = 0u32;
    let mut t_used = 0u32;
    for i in 0..t {
        let diff = values[i] - values[t + i];
        if diff == 0.0 {
            continue;
        }
        t_used += 1;
        if diff < 0.0 {
            negatives += 1;
        }
    }
    Ok((negatives, t_used))
}

/// Gaussian-approximate lower β-quantile of Binomial(t, ½):
/// `½·(t + √t·Φ⁻¹(β))`. May be negative for tiny `t` and small `β`, in
/// which case no statistic can fall below it.
pub fn normal_threshold(t: u32, beta: f64) -> Result<f64> {
    if t == 0 {
        return Err(Error::param("normal_threshold requires t >= 1"));
    }
    let q = normal_quantile(beta)?;
    let t = f64::from(t);
    Ok(0.5 * (t + t.sqrt() * q))
}

/// Largest integer `k` such that `P{Bin(t, ½) < k} ≤ β`. Used as a strict
/// cut, this preserves the false-positive rate at or below β.
pub fn exact_binomial_threshold(t: u32, beta: f64) -> Result<u32> {
    if t == 0 {
        return Err(Error::param("exact_binomial_threshold requires t >= 1"));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::param(format!("beta must lie in (0, 1), got {beta}")));
    }
    let bin = Binomial::new(0.5, u64::from(t)).expect("p = 1/2 and t >= 1 are valid");
    // P{Bin < k} = cdf(k − 1); scan up while the mass stays within beta.
    let mut threshold = 0u32;
    for k in 1..=t {
        if bin.cdf(u64::from(k) - 1) <= beta {
            threshold = k;
        } else {
            break;
        }
    }
    Ok(threshold)
}

/// Run the sign test on a power vector at significance `beta`.
///
/// Zero differences are dropped before thresholding; if every pair ties,
/// the threshold degenerates to 0 and the verdict is `NoTrend`.
pub fn detect_trend(
    powers: &PowerVector,
    beta: f64,
    method: ThresholdMethod,
) -> Result<TrendVerdict> {
    detect_trend_values(&powers.values(), beta, method)
}

/// [`detect_trend`] on a raw slice of readings (ordered by distance).
pub fn detect_trend_values(
    values: &[f64],
    beta: f64,
    method: ThresholdMethod,
) -> Result<TrendVerdict> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::param(format!("beta must lie in (0, 1), got {beta}")));
    }
    let (statistic, t_used) = cox_stuart_statistic(values)?;
    let resolved = match method {
        ThresholdMethod::Auto => {
            if t_used <= 20 {
                ThresholdMethod::ExactBinomial
            } else {
                ThresholdMethod::NormalApprox
            }
        }
        m => m,
    };
    let threshold = if t_used == 0 {
        0.0
    } else {
        match resolved {
            ThresholdMethod::ExactBinomial => f64::from(exact_binomial_threshold(t_used, beta)?),
            ThresholdMethod::NormalApprox => normal_threshold(t_used, beta)?,
            ThresholdMethod::Auto => unreachable!("resolved above"),
        }
    };
    let decision = if f64::from(statistic) < threshold {
        TrendDecision::DownwardTrend
    } else {
        TrendDecision::NoTrend
    };
    Ok(TrendVerdict {
        statistic,
        t_used,
        threshold,
        beta,
        method: resolved,
        decision,
    })
}
