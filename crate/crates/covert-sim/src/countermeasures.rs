//! Transmitter-side countermeasures against the walking energy detector:
//! deterministic power descent and randomized on/off scheduling, plus the
//! closed forms describing how scheduling starves the sign test.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{sample_radiometer, ChannelParams};
use crate::error::{Error, Result};
use crate::stats::normal_quantile;

/// The source's transmit schedule over campaign time slots.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TxProcess {
    AlwaysOn,
    AlwaysOff,
    /// Transmit independently each slot with probability `p`, at the
    /// channel's configured power.
    Bernoulli { p: f64 },
    /// Start at `p_max_db` and shed `delta_db` per slot, clamped at
    /// `p_min_db`; always transmitting.
    PowerDescent {
        p_max_db: f64,
        p_min_db: f64,
        delta_db: f64,
    },
}

impl TxProcess {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TxProcess::AlwaysOn | TxProcess::AlwaysOff => Ok(()),
            TxProcess::Bernoulli { p } => {
                if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                    return Err(Error::param(format!(
                        "bernoulli transmit probability must lie in [0, 1], got {p}"
                    )));
                }
                Ok(())
            }
            TxProcess::PowerDescent {
                p_max_db,
                p_min_db,
                delta_db,
            } => {
                if !p_max_db.is_finite() || !p_min_db.is_finite() || !delta_db.is_finite() {
                    return Err(Error::param("power descent parameters must be finite"));
                }
                if p_max_db < p_min_db {
                    return Err(Error::param(format!(
                        "power descent needs p_max_db >= p_min_db, got {p_max_db} < {p_min_db}"
                    )));
                }
                if delta_db < 0.0 {
                    return Err(Error::param(format!(
                        "power descent step must be >= 0 dB, got {delta_db}"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Transmit decision for one slot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlotState {
    pub transmitting: bool,
    /// Power override in dB; `None` means the channel's configured power.
    pub power_db: Option<f64>,
}

/// Evaluate a schedule at 1-based `slot`.
///
/// `PowerDescent` emits `max(p_max_db − (slot−1)·delta_db, p_min_db)`;
/// `Bernoulli` consumes one uniform draw per call.
pub fn power_at_slot(process: &TxProcess, slot: u32, rng: &mut impl Rng) -> Result<SlotState> {
    if slot == 0 {
        return Err(Error::param("slots are 1-based"));
    }
    process.validate()?;
    Ok(match *process {
        TxProcess::AlwaysOn => SlotState {
            transmitting: true,
            power_db: None,
        },
        TxProcess::AlwaysOff => SlotState {
            transmitting: false,
            power_db: None,
        },
        TxProcess::Bernoulli { p } => SlotState {
            transmitting: rng.gen::<f64>() < p,
            power_db: None,
        },
        TxProcess::PowerDescent {
            p_max_db,
            p_min_db,
            delta_db,
        } => SlotState {
            transmitting: true,
            power_db: Some((p_max_db - f64::from(slot - 1) * delta_db).max(p_min_db)),
        },
    })
}

/// Expected sign-test statistic under Bernoulli(p) scheduling over `t`
/// pairs: `½·(1−p)²·t`.
///
/// This is the small-p asymptote in a geometry where the signal dominates
/// the noise at every location the warden visits: only silent/silent pairs
/// contribute coin flips, and the cross terms of order `p(1−p)` are
/// neglected. The exact per-pair probability is available by simulation via
/// [`scheduled_neg_diff_prob_mc`].
pub fn expected_statistic_scheduled(p: f64, t: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::param(format!(
            "transmit probability must lie in [0, 1], got {p}"
        )));
    }
    if t == 0 {
        return Err(Error::param("expected statistic needs t >= 1"));
    }
    Ok(0.5 * (1.0 - p) * (1.0 - p) * f64::from(t))
}

/// Result of [`covert_p_threshold`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CovertThreshold {
    /// Transmit probabilities strictly below this stay under the warden's
    /// decision threshold in expectation.
    Probability(f64),
    /// The warden tests at enough locations that no positive transmit
    /// probability is safe (`t ≤ Φ⁻¹(β)²`, or `β > ½`).
    NoCovertProbability,
}

/// Largest safe Bernoulli transmit probability against a `t`-pair sign test
/// at significance `beta`: `1 − sqrt(1 + Φ⁻¹(β)/√t)`.
///
/// Requires `t > Φ⁻¹(β)²` for the root to exist; at `beta = 0.5` the
/// threshold degenerates to 0 (the null expectation already sits on the
/// decision cut).
pub fn covert_p_threshold(beta: f64, t: u32) -> Result<CovertThreshold> {
    if t == 0 {
        return Err(Error::param("covert threshold needs t >= 1"));
    }
    let q = normal_quantile(beta)?;
    let t = f64::from(t);
    if t <= q * q && q < 0.0 {
        return Ok(CovertThreshold::NoCovertProbability);
    }
    let value = 1.0 - (1.0 + q / t.sqrt()).sqrt();
    if value < 0.0 {
        // beta > ½: the cut sits above the null mean; nothing is safe.
        return Ok(CovertThreshold::NoCovertProbability);
    }
    Ok(CovertThreshold::Probability(value))
}

/// Monte-Carlo estimate of `P{Δ_i < 0}` for one location pair under
/// Bernoulli(p) scheduling ("exact-by-simulation"; no closed form is used).
///
/// `p_near`/`p_far` are the mean received signal powers at the paired
/// locations; each draw simulates both radiometer readings with `m`
/// averaged samples and independent transmit states.
pub fn scheduled_neg_diff_prob_mc(
    p: f64,
    p_near: f64,
    p_far: f64,
    noise: f64,
    m: u32,
    draws: u32,
    rng: &mut impl Rng,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!(
            "transmit probability must lie in [0, 1], got {p}"
        )));
    }
    if p_near < p_far || p_far < 0.0 {
        return Err(Error::param(format!(
            "expected p_near >= p_far >= 0, got p_near={p_near}, p_far={p_far}"
        )));
    }
    if draws == 0 {
        return Err(Error::param("need at least one draw"));
    }
    // Reuse the radiometer sampler with per-pair powers expressed as a
    // channel at unit distance.
    let near = ChannelParams::new(10.0 * p_near.max(f64::MIN_POSITIVE).log10(), 3.0)?
        .with_noise_power(noise)?;
    let far = ChannelParams::new(10.0 * p_far.max(f64::MIN_POSITIVE).log10(), 3.0)?
        .with_noise_power(noise)?;
    let mut negatives = 0u32;
    for _ in 0..draws {
        let tx_near = p_near > 0.0 && rng.gen::<f64>() < p;
        let tx_far = p_far > 0.0 && rng.gen::<f64>() < p;
        let a = sample_radiometer(&near, 1.0, m, tx_near, rng)?;
        let b = sample_radiometer(&far, 1.0, m, tx_far, rng)?;
        if a.value < b.value {
            negatives += 1;
        }
    }
    Ok(f64::from(negatives) / f64::from(draws))
}
