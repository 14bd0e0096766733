//! AWGN channel with large-scale path loss and an energy-detecting receiver.
//!
//! All powers are linear and relative to the unit noise floor: `σ0² = 1`
//! corresponds to 0 dB, and `p0_db` is the transmit power at unit distance
//! in dB over that floor. The warden's radiometer averages `m` squared
//! observations, so a single reading at distance `d` is distributed as
//! `((P_d + σ0²)/m)·χ²(m)` while the source transmits and `(σ0²/m)·χ²(m)`
//! while it is silent. The ratio of two independent silent readings with a
//! common `m` is therefore F(m, m) — the quantity the trend detector's
//! tail bounds are built on.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Large-scale attenuation law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathLossModel {
    /// `d^(−α)`; diverges as `d → 0`, so it requires `d > 0`.
    Unbounded,
    /// `1/(1 + d^α)`; finite everywhere, gain 1 at the transmitter.
    Bounded,
}

/// Small-scale fading applied to the received signal power.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fading {
    None,
    /// Unit-mean Rayleigh block fading: one exponential(1) power multiplier
    /// drawn per radiometer dwell (the warden pauses briefly per location,
    /// so the channel is coherent across the averaged samples).
    Rayleigh,
    /// Unit-mean Rayleigh fading redrawn independently for every averaged
    /// sample. O(m) per reading instead of O(1); use when modelling a fast
    /// channel.
    RayleighPerSample,
}

/// Static channel description shared by every location of a walk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Transmit power at unit distance, dB relative to the noise floor.
    pub p0_db: f64,
    /// Path-loss exponent; the analysis requires `α > 2`.
    pub alpha: f64,
    /// Noise power `σ0²` (linear). Unit noise = 1.0.
    pub noise_power: f64,
    pub path_loss: PathLossModel,
    pub fading: Fading,
}

impl ChannelParams {
    /// Unbounded path loss, unit noise, no fading.
    pub fn new(p0_db: f64, alpha: f64) -> Result<Self> {
        let params = ChannelParams {
            p0_db,
            alpha,
            noise_power: 1.0,
            path_loss: PathLossModel::Unbounded,
            fading: Fading::None,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_p0_db(mut self, p0_db: f64) -> Self {
        self.p0_db = p0_db;
        self
    }

    pub fn with_noise_power(mut self, noise_power: f64) -> Result<Self> {
        self.noise_power = noise_power;
        self.validate()?;
        Ok(self)
    }

    pub fn with_path_loss(mut self, model: PathLossModel) -> Self {
        self.path_loss = model;
        self
    }

    pub fn with_fading(mut self, fading: Fading) -> Self {
        self.fading = fading;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.p0_db.is_finite() {
            return Err(Error::param(format!("p0_db must be finite, got {}", self.p0_db)));
        }
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return Err(Error::param(format!(
                "alpha must be finite and > 2, got {}",
                self.alpha
            )));
        }
        if !(self.noise_power > 0.0) || !self.noise_power.is_finite() {
            return Err(Error::param(format!(
                "noise_power must be finite and > 0, got {}",
                self.noise_power
            )));
        }
        Ok(())
    }

    /// Transmit power in linear units.
    pub fn p0_linear(&self) -> f64 {
        10f64.powf(self.p0_db / 10.0)
    }

    /// Mean received *signal* power at `distance` (noise excluded).
    pub fn signal_power(&self, distance: f64) -> Result<f64> {
        Ok(self.p0_linear() * path_loss(self.path_loss, distance, self.alpha)?)
    }

    /// Mean observed power at the radiometer: `P0·l(d) + σ0²` while
    /// transmitting, `σ0²` while silent. Fading leaves this mean unchanged
    /// (the multiplier has unit mean); individual readings fluctuate around
    /// it per [`sample_radiometer`].
    pub fn received_power(&self, distance: f64, transmitting: bool) -> Result<f64> {
        let signal = self.signal_power(distance)?;
        Ok(if transmitting { signal } else { 0.0 } + self.noise_power)
    }
}

/// Attenuation factor at `distance` under `model` with exponent `alpha`.
///
/// `distance` must be finite and ≥ 0 (strictly > 0 for [`PathLossModel::Unbounded`]);
/// `alpha` must be > 2.
pub fn path_loss(model: PathLossModel, distance: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::param(format!("alpha must be finite and > 2, got {alpha}")));
    }
    if !distance.is_finite() || distance < 0.0 {
        return Err(Error::param(format!(
            "distance must be finite and non-negative, got {distance}"
        )));
    }
    match model {
        PathLossModel::Unbounded => {
            if distance == 0.0 {
                return Err(Error::param(
                    "unbounded path loss diverges at distance 0; use the bounded model",
                ));
            }
            Ok(distance.powf(-alpha))
        }
        PathLossModel::Bounded => Ok(1.0 / (1.0 + distance.powf(alpha))),
    }
}

/// One radiometer reading.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerSample {
    /// Warden-to-source distance at which the reading was taken.
    pub distance: f64,
    /// Averaged received power, `(1/m)·Σ y²`.
    pub value: f64,
    /// Number of samples averaged.
    pub m: u32,
}

/// Draw one radiometer reading at `distance` with `m` averaged samples.
///
/// While transmitting the reading is `((P_d·h + σ0²)/m)·χ²(m)` with `h` the
/// fading multiplier (1 without fading); while silent it is `(σ0²/m)·χ²(m)`.
/// Per-sample fading draws `m` Gaussians instead of one χ² variate.
pub fn sample_radiometer(
    params: &ChannelParams,
    distance: f64,
    m: u32,
    transmitting: bool,
    rng: &mut impl Rng,
) -> Result<PowerSample> {
    params.validate()?;
    if m == 0 {
        return Err(Error::param("radiometer needs m >= 1 samples"));
    }
    // Validate the distance for silent reads too, so both arms share a domain.
    let signal = if transmitting {
        params.signal_power(distance)?
    } else {
        params.signal_power(distance).map(|_| 0.0)?
    };

    let value = match (params.fading, transmitting) {
        (Fading::RayleighPerSample, true) => {
            // y_j = sqrt(P·h_j)·s_j + n_j with s_j ~ N(0,1), n_j ~ N(0,σ0²).
            let mut acc = 0.0;
            for _ in 0..m {
                let h: f64 = rng.sample(Exp1);
                let s: f64 = rng.sample(StandardNormal);
                let n: f64 = rng.sample(StandardNormal);
                let y = (signal * h).sqrt() * s + params.noise_power.sqrt() * n;
                acc += y * y;
            }
            acc / m as f64
        }
        (fading, _) => {
            let effective = if transmitting && fading == Fading::Rayleigh {
                let h: f64 = rng.sample(Exp1);
                signal * h
            } else {
                signal
            };
            let chi2 = ChiSquared::new(m as f64).expect("m >= 1 checked above");
            (effective + params.noise_power) / m as f64 * chi2.sample(rng)
        }
    };

    Ok(PowerSample { distance, value, m })
}

/// A campaign's readings ordered by increasing distance.
///
/// Invariants enforced at construction: even length ≥ 2 and strictly
/// increasing distances (the trend test pairs location `i` with `t + i`).
#[derive(Clone, Debug, PartialEq)]
pub struct PowerVector {
    samples: Vec<PowerSample>,
}

impl PowerVector {
    /// Sorts `samples` by distance, then checks the invariants.
    pub fn new(mut samples: Vec<PowerSample>) -> Result<Self> {
        if samples.len() < 2 || !samples.len().is_multiple_of(2) {
            return Err(Error::param(format!(
                "power vector needs an even number of readings >= 2, got {}",
                samples.len()
            )));
        }
        samples.sort_by(|a, b| {
            a.distance
                .partial_cmp(&b.distance)
                .expect("distances are finite")
        });
        if samples.windows(2).any(|w| w[0].distance >= w[1].distance) {
            return Err(Error::param(
                "power vector distances must be strictly increasing",
            ));
        }
        Ok(PowerVector { samples })
    }

    pub fn samples(&self) -> &[PowerSample] {
        &self.samples
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.value).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Number of paired locations, `t = len/2`.
    pub fn half_len(&self) -> usize {
        self.samples.len() / 2
    }
}

/// Mean of the silent-reading ratio F(m, m); finite for `m > 2`.
pub fn f_ratio_mean(m: u32) -> Result<f64> {
    if m <= 2 {
        return Err(Error::param(format!("F(m,m) has no mean for m <= 2, got m={m}")));
    }
    let m = f64::from(m);
    Ok(m / (m - 2.0))
}

/// Variance of the silent-reading ratio F(m, m); finite for `m > 4`.
pub fn f_ratio_variance(m: u32) -> Result<f64> {
    if m <= 4 {
        return Err(Error::param(format!(
            "F(m,m) has no variance for m <= 4, got m={m}"
        )));
    }
    let m = f64::from(m);
    Ok(4.0 * (m - 1.0) * m / ((m - 2.0) * (m - 2.0) * (m - 4.0)))
}

/// Second raw moment E[F²] of F(m, m); finite for `m > 4`. This is the
/// constant that multiplies the finite-m Chebyshev-style tail bound.
pub fn f_ratio_second_moment(m: u32) -> Result<f64> {
    if m <= 4 {
        return Err(Error::param(format!(
            "F(m,m) has no second moment for m <= 4, got m={m}"
        )));
    }
    let m = f64::from(m);
    Ok(m * (m + 2.0) / ((m - 2.0) * (m - 4.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_channel() -> ChannelParams {
        // P0 = 1 (0 dB), unit noise.
        ChannelParams::new(0.0, 3.0).unwrap()
    }

    #[test]
    fn bounded_loss_is_one_at_the_transmitter() {
        assert_abs_diff_eq!(
            path_loss(PathLossModel::Bounded, 0.0, 3.0).unwrap(),
            1.0
        );
    }

    #[test]
    fn unbounded_loss_matches_the_power_law() {
        assert_abs_diff_eq!(
            path_loss(PathLossModel::Unbounded, 2.0, 3.0).unwrap(),
            0.125,
            epsilon = 1e-15
        );
        assert!(path_loss(PathLossModel::Unbounded, 0.0, 3.0).is_err());
    }

    #[test]
    fn alpha_at_or_below_two_is_rejected() {
        assert!(path_loss(PathLossModel::Unbounded, 1.0, 2.0).is_err());
        assert!(path_loss(PathLossModel::Bounded, 1.0, 1.5).is_err());
        assert!(ChannelParams::new(30.0, 2.0).is_err());
        assert!(ChannelParams::new(30.0, f64::NAN).is_err());
    }

    #[test]
    fn received_power_reference_points() {
        // 30 dB ⇒ P0 = 1000: at d = 10, α = 3 the signal lands exactly on the
        // noise floor, so the observed mean is 1000/1000 + 1 = 2.
        let p = ChannelParams::new(30.0, 3.0).unwrap();
        assert_abs_diff_eq!(p.received_power(10.0, true).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.received_power(10.0, false).unwrap(), 1.0, epsilon = 1e-12);

        let b = p.with_path_loss(PathLossModel::Bounded);
        assert_abs_diff_eq!(b.received_power(0.0, true).unwrap(), 1001.0, epsilon = 1e-12);
        // Silent reads see only the noise floor, at any distance.
        assert_abs_diff_eq!(b.received_power(123.0, false).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn signal_power_scales_linearly_with_p0() {
        let p = ChannelParams::new(20.0, 3.5).unwrap();
        let q = p.with_p0_db(30.0);
        let d = 7.3;
        assert_abs_diff_eq!(
            q.signal_power(d).unwrap() / p.signal_power(d).unwrap(),
            10.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn radiometer_moments_match_the_scaled_chi_square() {
        // P_t = 1, σ0² = 1, m = 20: mean (P+σ²) = 2, var 2(P+σ²)²/m = 0.4.
        let params = unit_channel();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| {
                sample_radiometer(&params, 1.0, 20, true, &mut rng)
                    .unwrap()
                    .value
            })
            .collect();
        let mean = crate::stats::mean(&draws);
        let var = crate::stats::sample_variance(&draws);
        assert!((mean - 2.0).abs() < 0.01, "mean {mean}");
        assert!((var - 0.4).abs() < 0.01, "var {var}");
    }

    #[test]
    fn silent_reading_ignores_transmit_power() {
        let loud = ChannelParams::new(80.0, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 20_000;
        let mean = (0..n)
            .map(|_| {
                sample_radiometer(&loud, 0.5, 50, false, &mut rng)
                    .unwrap()
                    .value
            })
            .sum::<f64>()
            / n as f64;
        // Silent readings are pure noise: mean σ0² = 1.
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn silent_ratio_behaves_like_f_m_m() {
        let params = unit_channel();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = 10;
        let n = 100_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let a = sample_radiometer(&params, 1.0, m, false, &mut rng).unwrap();
            let b = sample_radiometer(&params, 1.0, m, false, &mut rng).unwrap();
            acc += a.value / b.value;
        }
        let mean = acc / n as f64;
        // E[F(10,10)] = 10/8 = 1.25; 3·SE ≈ 0.009 at 1e5 draws.
        assert!((mean - 1.25).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn rayleigh_fading_keeps_the_mean_power() {
        let params = unit_channel().with_fading(Fading::Rayleigh);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 100_000;
        let mean = (0..n)
            .map(|_| {
                sample_radiometer(&params, 1.0, 20, true, &mut rng)
                    .unwrap()
                    .value
            })
            .sum::<f64>()
            / n as f64;
        // E[h] = 1 ⇒ mean stays P + σ0² = 2. Var is larger (≈1.5) so the
        // tolerance is wider than in the unfaded test: 3·SE ≈ 0.012.
        assert!((mean - 2.0).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn per_sample_fading_keeps_the_mean_power() {
        let params = unit_channel().with_fading(Fading::RayleighPerSample);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let n = 20_000;
        let mean = (0..n)
            .map(|_| {
                sample_radiometer(&params, 1.0, 20, true, &mut rng)
                    .unwrap()
                    .value
            })
            .sum::<f64>()
            / n as f64;
        assert!((mean - 2.0).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn power_vector_enforces_shape() {
        let s = |d: f64| PowerSample { distance: d, value: 1.0, m: 10 };
        assert!(PowerVector::new(vec![s(1.0)]).is_err());
        assert!(PowerVector::new(vec![s(1.0), s(2.0), s(3.0)]).is_err());
        assert!(PowerVector::new(vec![s(1.0), s(1.0)]).is_err());

        // Unordered input is sorted by distance.
        let v = PowerVector::new(vec![s(2.0), s(1.0)]).unwrap();
        assert_eq!(v.samples()[0].distance, 1.0);
        assert_eq!(v.half_len(), 1);
    }

    #[test]
    fn f_ratio_moment_domains() {
        assert!(f_ratio_mean(2).is_err());
        assert!(f_ratio_variance(4).is_err());
        assert!(f_ratio_second_moment(4).is_err());
        assert_abs_diff_eq!(f_ratio_mean(10).unwrap(), 1.25, epsilon = 1e-12);
        assert_abs_diff_eq!(f_ratio_variance(10).unwrap(), 0.9375, epsilon = 1e-12);
        // E[F²] = Var + E² must agree with the closed form m(m+2)/((m−2)(m−4)).
        for m in [5u32, 6, 10, 50, 200] {
            let lhs = f_ratio_second_moment(m).unwrap();
            let rhs = f_ratio_variance(m).unwrap() + f_ratio_mean(m).unwrap().powi(2);
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn path_loss_is_monotone_decreasing(
                d1 in 0.01f64..500.0,
                gap in 0.01f64..100.0,
                alpha in 2.01f64..6.0,
            ) {
                let d2 = d1 + gap;
                for model in [PathLossModel::Unbounded, PathLossModel::Bounded] {
                    let near = path_loss(model, d1, alpha).unwrap();
                    let far = path_loss(model, d2, alpha).unwrap();
                    prop_assert!(far < near);
                }
            }

            #[test]
            fn bounded_loss_never_exceeds_one(
                d in 0.0f64..1000.0,
                alpha in 2.01f64..6.0,
            ) {
                let l = path_loss(PathLossModel::Bounded, d, alpha).unwrap();
                prop_assert!(l > 0.0 && l <= 1.0);
            }

            #[test]
            fn radiometer_value_is_positive(
                p0_db in -20.0f64..40.0,
                d in 0.1f64..100.0,
                m in 1u32..64,
                seed in any::<u64>(),
            ) {
                let params = ChannelParams::new(p0_db, 3.0).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let s = sample_radiometer(&params, d, m, true, &mut rng).unwrap();
                prop_assert!(s.value > 0.0);
                prop_assert_eq!(s.m, m);
            }
        }
    }
}
