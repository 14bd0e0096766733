//! Scenario descriptions: everything a reproducible experiment needs —
//! channel, walk, transmitter, network, routing, trials, seed — plus the
//! per-scenario defaults that make a two-line config file runnable.

pub mod config;
pub mod report;
mod runner;

pub use config::{load_config, parse_config, ConfigError};
pub use runner::{run_scenario, run_scenario_with_threads, ScenarioOutcome};

use serde::{Deserialize, Serialize};

use crate::adversary::{plan_walk, WalkPlan};
use crate::channel::{ChannelParams, Fading, PathLossModel};
use crate::countermeasures::TxProcess;
use crate::netsim::ClusterSpec;
use crate::routing::CandidateMode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Received-power profile of a measurement walk, transmitting vs silent.
    TrendDemo,
    /// Closed-form table: locations the warden needs vs significance level.
    BetaVsT,
    /// Power-descent countermeasure against an approaching warden, with a
    /// constant-power comparator arm.
    PowerDescent,
    /// Detection rate and trend statistic under Bernoulli slot scheduling.
    SchedulingDemo,
    /// Closed-form table: covert scheduling threshold vs significance level.
    BetaVsP,
    /// One network realization: nodes, edges, floods, and both routes.
    NetworkDemo,
    /// Secure-relay ratio of density-based vs gradient routing across n.
    SecureRatio,
    /// False-positive calibration of the trend test under a silent channel.
    Calibration,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 8] = [
        ScenarioKind::TrendDemo,
        ScenarioKind::BetaVsT,
        ScenarioKind::PowerDescent,
        ScenarioKind::SchedulingDemo,
        ScenarioKind::BetaVsP,
        ScenarioKind::NetworkDemo,
        ScenarioKind::SecureRatio,
        ScenarioKind::Calibration,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::TrendDemo => "trend_demo",
            ScenarioKind::BetaVsT => "beta_vs_t",
            ScenarioKind::PowerDescent => "power_descent",
            ScenarioKind::SchedulingDemo => "scheduling_demo",
            ScenarioKind::BetaVsP => "beta_vs_p",
            ScenarioKind::NetworkDemo => "network_demo",
            ScenarioKind::SecureRatio => "secure_ratio",
            ScenarioKind::Calibration => "calibration",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            ScenarioKind::TrendDemo => {
                "received-power profile over a measurement walk, transmitting vs silent"
            }
            ScenarioKind::BetaVsT => {
                "closed-form table of required warden locations vs significance level"
            }
            ScenarioKind::PowerDescent => {
                "power-descent countermeasure vs an approaching warden, with constant-power comparator"
            }
            ScenarioKind::SchedulingDemo => {
                "detection rate under Bernoulli slot scheduling for several transmit probabilities"
            }
            ScenarioKind::BetaVsP => {
                "closed-form table of covert transmit-probability thresholds vs significance level"
            }
            ScenarioKind::NetworkDemo => {
                "one dense-network realization: nodes, edges, hops, and both routing schemes"
            }
            ScenarioKind::SecureRatio => {
                "secure-relay ratio of density-based vs gradient routing across network sizes"
            }
            ScenarioKind::Calibration => {
                "false-positive calibration of the trend test with a silent transmitter"
            }
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.name() == name)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkKind {
    #[default]
    Uniform,
    Clustered,
    /// Poisson point process with intensity `n / area` (expected count `n`).
    Ppp,
}

/// Network generator settings. `clusters` is carried regardless of kind and
/// consulted only by `Clustered`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub kind: NetworkKind,
    pub n: u32,
    pub width: f64,
    pub height: f64,
    pub d_link: f64,
    pub comm_radius: f64,
    pub clusters: Vec<ClusterSpec>,
}

impl NetworkSpec {
    /// Five-blob layout echoing the usual uneven sensor deployments, sized
    /// for the default 200 x 100 region.
    pub fn default_clusters() -> Vec<ClusterSpec> {
        [
            ((15.0, 50.0), 13.0),
            ((60.0, 35.0), 14.0),
            ((100.0, 65.0), 15.0),
            ((140.0, 35.0), 14.0),
            ((185.0, 50.0), 13.0),
        ]
        .into_iter()
        .map(|(center, std_dev)| ClusterSpec {
            center,
            std_dev,
            weight: 1.0,
        })
        .collect()
    }
}

impl Default for NetworkSpec {
    fn default() -> Self {
        NetworkSpec {
            kind: NetworkKind::Uniform,
            n: 300,
            width: 200.0,
            height: 100.0,
            d_link: 5.0,
            comm_radius: 20.0,
            clusters: NetworkSpec::default_clusters(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoutingParams {
    pub p_max: f64,
    pub candidate_mode: CandidateMode,
}

impl Default for RoutingParams {
    fn default() -> Self {
        RoutingParams {
            p_max: 0.2,
            candidate_mode: CandidateMode::StrictBackward,
        }
    }
}

/// A fully resolved experiment description. Construct via
/// [`ScenarioConfig::defaults_for`] or by parsing a config file (which
/// starts from those defaults and overlays the file's keys).
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub seed: u64,
    pub trials: u32,
    pub channel: ChannelParams,
    pub walk: WalkPlan,
    pub tx: TxProcess,
    pub network: NetworkSpec,
    pub routing: RoutingParams,
}

/// Constant-power comparator arm of the power-descent scenario (dB).
pub const DESCENT_COMPARATOR_P0_DB: f64 = 33.0;

/// Transmit probabilities swept by the scheduling demo.
pub const SCHEDULING_P_GRID: [f64; 3] = [0.1, 0.5, 0.9];

/// Significance levels swept by the calibration scenario.
pub const CALIBRATION_BETA_GRID: [f64; 3] = [0.01, 0.05, 0.1];

/// Location-pair counts tabulated by the covert-threshold scenario.
pub const BETA_VS_P_T_GRID: [u32; 3] = [50, 100, 200];

/// Network sizes swept by the secure-ratio scenario.
pub const SECURE_RATIO_N_GRID: [u32; 4] = [100, 200, 300, 400];

impl ScenarioConfig {
    /// The runnable default for each scenario kind. Sized so every scenario
    /// finishes in well under two minutes on a small desktop machine.
    pub fn defaults_for(kind: ScenarioKind) -> Self {
        let mut cfg = ScenarioConfig {
            scenario: kind,
            seed: 42,
            trials: 1,
            channel: ChannelParams::new(30.0, 3.0).expect("valid defaults"),
            walk: plan_walk(50, 0.5, 0.5).expect("valid defaults"),
            tx: TxProcess::AlwaysOn,
            network: NetworkSpec::default(),
            routing: RoutingParams::default(),
        };
        match kind {
            ScenarioKind::TrendDemo => {
                cfg.trials = 200;
                cfg.channel = cfg
                    .channel
                    .with_path_loss(PathLossModel::Bounded)
                    .with_fading(Fading::Rayleigh);
            }
            ScenarioKind::BetaVsT => {}
            ScenarioKind::PowerDescent => {
                cfg.trials = 500;
                cfg.walk = plan_walk(10, 0.5, 0.5).expect("valid defaults");
                cfg.channel = cfg.channel.with_path_loss(PathLossModel::Bounded);
                cfg.tx = TxProcess::PowerDescent {
                    p_max_db: 36.0,
                    p_min_db: 20.0,
                    delta_db: 0.8,
                };
            }
            ScenarioKind::SchedulingDemo => {
                cfg.trials = 2_000;
                cfg.tx = TxProcess::Bernoulli { p: 0.5 };
                // Hot geometry: the farthest dwell still sits at the noise
                // floor, so an unscheduled transmitter is caught immediately.
                let p0 = crate::adversary::p0_db_matching_far_power(&cfg.walk, 3.0, 1.0)
                    .expect("valid defaults");
                cfg.channel = cfg.channel.with_p0_db(p0);
            }
            ScenarioKind::BetaVsP => {}
            ScenarioKind::NetworkDemo => {}
            ScenarioKind::SecureRatio => {
                cfg.trials = 200;
            }
            ScenarioKind::Calibration => {
                cfg.trials = 10_000;
                cfg.tx = TxProcess::AlwaysOff;
                cfg.walk = plan_walk(100, 0.5, 0.5).expect("valid defaults");
            }
        }
        cfg
    }
}
