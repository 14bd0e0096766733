//! Monte-Carlo simulator for covert wireless communication against a
//! mobile, energy-detecting warden.
//!
//! The warden walks a line of measurement locations, averages received
//! power at each (a radiometer), and runs a nonparametric trend test on the
//! distance-ordered readings: a significant downward trend in power vs
//! distance betrays a transmitter. The library models that detector and the
//! transmitter's countermeasures — shedding power as the warden approaches,
//! randomizing transmit slots — plus the dense-network regime where
//! neighboring nodes shadow each other from isolated testing, with a
//! density-seeking multi-hop routing scheme to exploit it.
//!
//! Start with the `examples/` directory, one runnable program per
//! capability:
//!
//! * `trend_demo` — radiometer walks and the trend test
//! * `active_warden` — how many locations a walking warden needs
//! * `power_descent` — the power-descent countermeasure (and its weakness)
//! * `randomized_scheduling` — Bernoulli slot scheduling and the covert
//!   transmit-probability threshold
//! * `shadow_network` — void probability, isolation radius, shadow density
//! * `density_routing` — beacon floods, DBR vs GBR, secure-relay ratios
//!
//! The same capabilities are scriptable through the thin `covert-sim`
//! binary: `covert-sim run <config.toml>` executes a named scenario
//! deterministically and writes CSV tables; see [`scenario`].
//!
//! Power convention throughout: linear power relative to unit noise, so the
//! noise floor is 1.0 and `p0_db = 30` means a transmit power of 1000.

// Validation deliberately writes `!(x > 0.0)` instead of `x <= 0.0`: the
// negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod channel;
pub mod countermeasures;
mod error;
pub mod netsim;
pub mod routing;
pub mod scenario;
pub mod seed;
pub mod stats;
pub mod trendtest;

pub use error::{Error, Result};

pub use adversary::{plan_walk, run_campaign, DetectionCampaign, WalkDirection, WalkPlan};
pub use channel::{sample_radiometer, ChannelParams, Fading, PathLossModel, PowerVector};
pub use countermeasures::{covert_p_threshold, power_at_slot, CovertThreshold, TxProcess};
pub use netsim::{NodeGraph, NodeId, Region};
pub use routing::{beacon_flood, route_dbr, route_gbr, secure_relay_ratio, RoutePath};
pub use scenario::{load_config, run_scenario, ScenarioConfig, ScenarioKind, ScenarioOutcome};
pub use trendtest::{detect_trend, ThresholdMethod, TrendDecision, TrendVerdict};
