//! The mobile warden: a walk of 2t radiometer dwells at geometrically
//! spaced distances, fed to the sign test, plus the closed-form bounds on
//! what such a walk can detect.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{sample_radiometer, ChannelParams, PowerVector};
use crate::countermeasures::{power_at_slot, TxProcess};
use crate::error::{Error, Result};
use crate::stats::normal_quantile;
use crate::trendtest::{detect_trend, ThresholdMethod, TrendVerdict};

/// Which end of the walk the warden starts from.
///
/// Statistically irrelevant for memoryless schedules (the vector is
/// re-ordered by distance before testing), but it decides which time slot —
/// and hence which scheduled power under a descent — lands at which
/// distance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkDirection {
    /// Start at the far end and close in (the warden's natural move: walk
    /// toward the suspected source while the readings stay suspicious).
    #[default]
    Approach,
    /// Start near the source and walk outward.
    Retreat,
}

/// A measurement walk: 2t dwells at distances `d_min + (i−1)·d_spacing`,
/// `i = 1..=2t` (index 1 nearest), each averaging `m` samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkPlan {
    t: u32,
    d_spacing: f64,
    d_min: f64,
    d_max: Option<f64>,
    m: u32,
    direction: WalkDirection,
}

impl WalkPlan {
    pub fn new(t: u32, d_spacing: f64, d_min: f64, m: u32) -> Result<Self> {
        if t == 0 {
            return Err(Error::param("a walk needs t >= 1 location pairs"));
        }
        if !(d_spacing > 0.0) || !d_spacing.is_finite() {
            return Err(Error::param(format!(
                "location spacing must be finite and > 0, got {d_spacing}"
            )));
        }
        if !(d_min > 0.0) || !d_min.is_finite() {
            return Err(Error::param(format!(
                "nearest stand-off must be finite and > 0, got {d_min}"
            )));
        }
        if m == 0 {
            return Err(Error::param("each dwell needs m >= 1 samples"));
        }
        Ok(WalkPlan {
            t,
            d_spacing,
            d_min,
            d_max: None,
            m,
            direction: WalkDirection::Approach,
        })
    }

    /// Constrain the walk to end by `d_max`.
    pub fn with_d_max(mut self, d_max: f64) -> Result<Self> {
        if !(d_max > 0.0) || !d_max.is_finite() {
            return Err(Error::param(format!(
                "d_max must be finite and > 0, got {d_max}"
            )));
        }
        if self.farthest_distance() > d_max {
            return Err(Error::param(format!(
                "walk reaches {} m which exceeds d_max = {d_max} m",
                self.farthest_distance()
            )));
        }
        self.d_max = Some(d_max);
        Ok(self)
    }

    pub fn with_direction(mut self, direction: WalkDirection) -> Self {
        self.direction = direction;
        self
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn d_spacing(&self) -> f64 {
        self.d_spacing
    }

    pub fn d_min(&self) -> f64 {
        self.d_min
    }

    pub fn d_max(&self) -> Option<f64> {
        self.d_max
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn direction(&self) -> WalkDirection {
        self.direction
    }

    pub fn location_count(&self) -> u32 {
        2 * self.t
    }

    /// Distance of 1-based location `index` (1 = nearest).
    pub fn distance(&self, index: u32) -> f64 {
        debug_assert!(index >= 1 && index <= self.location_count());
        self.d_min + f64::from(index - 1) * self.d_spacing
    }

    pub fn farthest_distance(&self) -> f64 {
        self.distance(self.location_count())
    }

    pub fn distances(&self) -> Vec<f64> {
        (1..=self.location_count()).map(|i| self.distance(i)).collect()
    }

    /// Location index visited in 1-based time `slot`.
    pub fn slot_location(&self, slot: u32) -> u32 {
        debug_assert!(slot >= 1 && slot <= self.location_count());
        match self.direction {
            WalkDirection::Approach => self.location_count() + 1 - slot,
            WalkDirection::Retreat => slot,
        }
    }
}

/// 2t-dwell walk with `m = 100` samples per dwell.
pub fn plan_walk(t: u32, d_spacing: f64, d_min: f64) -> Result<WalkPlan> {
    WalkPlan::new(t, d_spacing, d_min, 100)
}

/// One full walk-and-test run.
#[derive(Clone, Debug)]
pub struct DetectionCampaign {
    pub plan: WalkPlan,
    /// Readings re-ordered by increasing distance.
    pub powers: PowerVector,
    pub verdict: TrendVerdict,
}

/// Walk every location, sampling the radiometer under the schedule's state
/// for that time slot, then run the sign test on the distance-ordered
/// readings.
pub fn run_campaign(
    params: &ChannelParams,
    plan: &WalkPlan,
    tx: &TxProcess,
    beta: f64,
    method: ThresholdMethod,
    rng: &mut impl Rng,
) -> Result<DetectionCampaign> {
    params.validate()?;
    tx.validate()?;
    let mut samples = Vec::with_capacity(plan.location_count() as usize);
    for slot in 1..=plan.location_count() {
        let location = plan.slot_location(slot);
        let distance = plan.distance(location);
        let state = power_at_slot(tx, slot, rng)?;
        let slot_params = match state.power_db {
            Some(db) => params.with_p0_db(db),
            None => *params,
        };
        samples.push(sample_radiometer(
            &slot_params,
            distance,
            plan.m,
            state.transmitting,
            rng,
        )?);
    }
    let powers = PowerVector::new(samples)?;
    let verdict = detect_trend(&powers, beta, method)?;
    Ok(DetectionCampaign {
        plan: *plan,
        powers,
        verdict,
    })
}

/// Tail bound on `P{Δ_i < 0}` for one location pair in the large-m regime:
/// `((p_far + noise)/(p_near + noise))²`.
///
/// Requires `p_near ≥ p_far ≥ 0` (power cannot grow with distance) and
/// `noise > 0`.
pub fn neg_diff_prob_bound(p_near: f64, p_far: f64, noise: f64) -> Result<f64> {
    if !(noise > 0.0) || !noise.is_finite() {
        return Err(Error::param(format!("noise must be finite and > 0, got {noise}")));
    }
    if !p_far.is_finite() || !p_near.is_finite() || p_far < 0.0 {
        return Err(Error::param("powers must be finite and >= 0"));
    }
    if p_near < p_far {
        return Err(Error::param(format!(
            "pair bound needs p_near >= p_far, got {p_near} < {p_far}"
        )));
    }
    let ratio = (p_far + noise) / (p_near + noise);
    Ok(ratio * ratio)
}

/// Finite-m version of [`neg_diff_prob_bound`], scaled by `E[F(m,m)²] =
/// m(m+2)/((m−2)(m−4))`. Rejects `m ≤ 4`, where the ratio's second moment
/// diverges. May exceed 1 (vacuous) for small `m`.
pub fn neg_diff_prob_bound_finite_m(p_near: f64, p_far: f64, noise: f64, m: u32) -> Result<f64> {
    let base = neg_diff_prob_bound(p_near, p_far, noise)?;
    Ok(base * crate::channel::f_ratio_second_moment(m)?)
}

/// Geometry-independent pair bound `(2/(2^α + 1))²`, valid whenever the
/// signal still reaches the noise floor at the walk's far end
/// (`P_2t ≥ σ0²`) under unbounded `d^(−α)` loss with doubling distances.
pub fn geometric_neg_diff_bound(alpha: f64) -> Result<f64> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::param(format!("alpha must be finite and > 2, got {alpha}")));
    }
    let r = 2.0 / (2f64.powf(alpha) + 1.0);
    Ok(r * r)
}

/// Fewest location pairs that push the expected sign-test statistic under
/// the warden's threshold: smallest integer `t` strictly exceeding
/// `(Φ⁻¹(β)/(1 − 8/(2^α+1)²))²`.
///
/// Requires `β ∈ (0, ½)` and `α > 2`.
pub fn required_locations(beta: f64, alpha: f64) -> Result<u32> {
    if !(beta > 0.0 && beta < 0.5) {
        return Err(Error::param(format!(
            "required_locations needs beta in (0, 0.5), got {beta}"
        )));
    }
    Ok(required_locations_bound(beta, alpha)?.floor() as u32 + 1)
}

/// The real-valued bound underneath [`required_locations`].
pub fn required_locations_bound(beta: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::param(format!("alpha must be finite and > 2, got {alpha}")));
    }
    let q = normal_quantile(beta)?;
    let denom = 1.0 - 8.0 / (2f64.powf(alpha) + 1.0).powi(2);
    let root = q / denom;
    Ok(root * root)
}

/// Transmit power (dB) that places the mean received signal power at the
/// walk's farthest location exactly at `far_power` (unbounded loss).
pub fn p0_db_matching_far_power(plan: &WalkPlan, alpha: f64, far_power: f64) -> Result<f64> {
    if !(far_power > 0.0) || !far_power.is_finite() {
        return Err(Error::param(format!(
            "far_power must be finite and > 0, got {far_power}"
        )));
    }
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::param(format!("alpha must be finite and > 2, got {alpha}")));
    }
    Ok(10.0 * (far_power * plan.farthest_distance().powf(alpha)).log10())
}
