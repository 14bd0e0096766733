//! Config-file handling: TOML in, validated [`ScenarioConfig`] out, and the
//! effective config back to TOML for hashing and round-trips.
//!
//! Files start from the scenario's defaults and overlay only the keys they
//! mention. Unknown keys anywhere are hard errors.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{NetworkKind, ScenarioConfig, ScenarioKind};
use crate::adversary::WalkPlan;
use crate::channel::{Fading, PathLossModel};
use crate::countermeasures::TxProcess;
use crate::netsim::ClusterSpec;
use crate::routing::CandidateMode;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// TOML syntax or structural error; the message carries line/column.
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown scenario {name:?} (known: {known})")]
    UnknownScenario { name: String, known: String },
    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        reason: reason.into(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: String,
    seed: Option<u64>,
    trials: Option<u32>,
    channel: Option<RawChannel>,
    walk: Option<RawWalk>,
    tx: Option<RawTx>,
    network: Option<RawNetwork>,
    routing: Option<RawRouting>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    p0_db: Option<f64>,
    alpha: Option<f64>,
    noise_power: Option<f64>,
    path_loss: Option<PathLossModel>,
    fading: Option<Fading>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWalk {
    t: Option<u32>,
    d_spacing: Option<f64>,
    d_min: Option<f64>,
    m: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTx {
    kind: Option<String>,
    p: Option<f64>,
    p_max_db: Option<f64>,
    p_min_db: Option<f64>,
    delta_db: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    kind: Option<NetworkKind>,
    n: Option<u32>,
    width: Option<f64>,
    height: Option<f64>,
    d_link: Option<f64>,
    comm_radius: Option<f64>,
    clusters: Option<Vec<RawCluster>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCluster {
    x: f64,
    y: f64,
    std_dev: f64,
    weight: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRouting {
    p_max: Option<f64>,
    candidate_mode: Option<CandidateMode>,
}

/// Parse a config from TOML text: scenario defaults overlaid with the
/// file's keys, then fully validated.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text)?;
    let kind = ScenarioKind::from_name(&raw.scenario).ok_or_else(|| {
        ConfigError::UnknownScenario {
            name: raw.scenario.clone(),
            known: ScenarioKind::ALL
                .iter()
                .map(|k| k.name())
                .collect::<Vec<_>>()
                .join(", "),
        }
    })?;
    let mut cfg = ScenarioConfig::defaults_for(kind);

    if let Some(seed) = raw.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = raw.trials {
        cfg.trials = trials;
    }
    if let Some(ch) = raw.channel {
        if let Some(v) = ch.p0_db {
            cfg.channel.p0_db = v;
        }
        if let Some(v) = ch.alpha {
            cfg.channel.alpha = v;
        }
        if let Some(v) = ch.noise_power {
            cfg.channel.noise_power = v;
        }
        if let Some(v) = ch.path_loss {
            cfg.channel.path_loss = v;
        }
        if let Some(v) = ch.fading {
            cfg.channel.fading = v;
        }
    }
    if let Some(w) = raw.walk {
        let t = w.t.unwrap_or(cfg.walk.t());
        let d_spacing = w.d_spacing.unwrap_or(cfg.walk.d_spacing());
        let d_min = w.d_min.unwrap_or(cfg.walk.d_min());
        let m = w.m.unwrap_or(cfg.walk.m());
        if t == 0 {
            return Err(invalid("walk.t", "must be >= 1"));
        }
        if !(d_spacing > 0.0) || !d_spacing.is_finite() {
            return Err(invalid("walk.d_spacing", "must be finite and > 0"));
        }
        if !(d_min > 0.0) || !d_min.is_finite() {
            return Err(invalid("walk.d_min", "must be finite and > 0"));
        }
        if m == 0 {
            return Err(invalid("walk.m", "must be >= 1"));
        }
        cfg.walk = WalkPlan::new(t, d_spacing, d_min, m)
            .map_err(|e| invalid("walk", e.to_string()))?;
    }
    if let Some(tx) = raw.tx {
        cfg.tx = resolve_tx(&cfg.tx, tx)?;
    }
    if let Some(net) = raw.network {
        if let Some(v) = net.kind {
            cfg.network.kind = v;
        }
        if let Some(v) = net.n {
            cfg.network.n = v;
        }
        if let Some(v) = net.width {
            cfg.network.width = v;
        }
        if let Some(v) = net.height {
            cfg.network.height = v;
        }
        if let Some(v) = net.d_link {
            cfg.network.d_link = v;
        }
        if let Some(v) = net.comm_radius {
            cfg.network.comm_radius = v;
        }
        if let Some(cl) = net.clusters {
            cfg.network.clusters = cl
                .into_iter()
                .map(|c| ClusterSpec {
                    center: (c.x, c.y),
                    std_dev: c.std_dev,
                    weight: c.weight,
                })
                .collect();
        }
    }
    if let Some(r) = raw.routing {
        if let Some(v) = r.p_max {
            cfg.routing.p_max = v;
        }
        if let Some(v) = r.candidate_mode {
            cfg.routing.candidate_mode = v;
        }
    }

    validate_config(&cfg)?;
    Ok(cfg)
}

fn resolve_tx(current: &TxProcess, raw: RawTx) -> Result<TxProcess, ConfigError> {
    let kind = match raw.kind.as_deref() {
        Some("always_on") => TxKindTag::AlwaysOn,
        Some("always_off") => TxKindTag::AlwaysOff,
        Some("bernoulli") => TxKindTag::Bernoulli,
        Some("power_descent") => TxKindTag::PowerDescent,
        Some(other) => {
            return Err(invalid(
                "tx.kind",
                format!(
                    "unknown kind {other:?} (known: always_on, always_off, bernoulli, power_descent)"
                ),
            ))
        }
        None => match current {
            TxProcess::AlwaysOn => TxKindTag::AlwaysOn,
            TxProcess::AlwaysOff => TxKindTag::AlwaysOff,
            TxProcess::Bernoulli { .. } => TxKindTag::Bernoulli,
            TxProcess::PowerDescent { .. } => TxKindTag::PowerDescent,
        },
    };
    let reject = |cond: bool, field: &'static str, kind: &str| {
        if cond {
            Err(invalid(field, format!("not applicable to tx.kind = {kind:?}")))
        } else {
            Ok(())
        }
    };
    match kind {
        TxKindTag::AlwaysOn | TxKindTag::AlwaysOff => {
            let name = if kind == TxKindTag::AlwaysOn {
                "always_on"
            } else {
                "always_off"
            };
            reject(raw.p.is_some(), "tx.p", name)?;
            reject(raw.p_max_db.is_some(), "tx.p_max_db", name)?;
            reject(raw.p_min_db.is_some(), "tx.p_min_db", name)?;
            reject(raw.delta_db.is_some(), "tx.delta_db", name)?;
            Ok(if kind == TxKindTag::AlwaysOn {
                TxProcess::AlwaysOn
            } else {
                TxProcess::AlwaysOff
            })
        }
        TxKindTag::Bernoulli => {
            reject(raw.p_max_db.is_some(), "tx.p_max_db", "bernoulli")?;
            reject(raw.p_min_db.is_some(), "tx.p_min_db", "bernoulli")?;
            reject(raw.delta_db.is_some(), "tx.delta_db", "bernoulli")?;
            let fallback = match *current {
                TxProcess::Bernoulli { p } => p,
                _ => 0.5,
            };
            Ok(TxProcess::Bernoulli {
                p: raw.p.unwrap_or(fallback),
            })
        }
        TxKindTag::PowerDescent => {
            reject(raw.p.is_some(), "tx.p", "power_descent")?;
            let (fb_max, fb_min, fb_delta) = match *current {
                TxProcess::PowerDescent {
                    p_max_db,
                    p_min_db,
                    delta_db,
                } => (p_max_db, p_min_db, delta_db),
                _ => (36.0, 20.0, 0.8),
            };
            Ok(TxProcess::PowerDescent {
                p_max_db: raw.p_max_db.unwrap_or(fb_max),
                p_min_db: raw.p_min_db.unwrap_or(fb_min),
                delta_db: raw.delta_db.unwrap_or(fb_delta),
            })
        }
    }
}

#[derive(PartialEq, Clone, Copy)]
enum TxKindTag {
    AlwaysOn,
    AlwaysOff,
    Bernoulli,
    PowerDescent,
}

/// Full cross-field validation with config-file field paths in the errors.
/// Also the gate for CLI-level `--seed`/`--trials` overrides.
pub fn validate_config(cfg: &ScenarioConfig) -> Result<(), ConfigError> {
    if cfg.seed > i64::MAX as u64 {
        return Err(invalid(
            "seed",
            "must fit in a signed 64-bit integer so the effective config stays serializable",
        ));
    }
    if cfg.trials == 0 {
        return Err(invalid("trials", "must be >= 1"));
    }
    if !cfg.channel.p0_db.is_finite() {
        return Err(invalid("channel.p0_db", "must be finite"));
    }
    if !(cfg.channel.alpha > 2.0) || !cfg.channel.alpha.is_finite() {
        return Err(invalid("channel.alpha", "must be finite and > 2"));
    }
    if !(cfg.channel.noise_power > 0.0) || !cfg.channel.noise_power.is_finite() {
        return Err(invalid("channel.noise_power", "must be finite and > 0"));
    }
    match cfg.tx {
        TxProcess::AlwaysOn | TxProcess::AlwaysOff => {}
        TxProcess::Bernoulli { p } => {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(invalid("tx.p", "must lie in [0, 1]"));
            }
        }
        TxProcess::PowerDescent {
            p_max_db,
            p_min_db,
            delta_db,
        } => {
            if !p_max_db.is_finite() || !p_min_db.is_finite() {
                return Err(invalid("tx.p_max_db", "descent powers must be finite"));
            }
            if p_max_db < p_min_db {
                return Err(invalid("tx.p_max_db", "must be >= tx.p_min_db"));
            }
            if !(delta_db >= 0.0) || !delta_db.is_finite() {
                return Err(invalid("tx.delta_db", "must be finite and >= 0"));
            }
        }
    }
    if cfg.network.n == 0 {
        return Err(invalid("network.n", "must be >= 1"));
    }
    if !(cfg.network.width > 0.0) || !cfg.network.width.is_finite() {
        return Err(invalid("network.width", "must be finite and > 0"));
    }
    if !(cfg.network.height > 0.0) || !cfg.network.height.is_finite() {
        return Err(invalid("network.height", "must be finite and > 0"));
    }
    if !(cfg.network.d_link > 0.0) || !cfg.network.d_link.is_finite() {
        return Err(invalid("network.d_link", "must be finite and > 0"));
    }
    if !cfg.network.comm_radius.is_finite() || cfg.network.comm_radius < cfg.network.d_link {
        return Err(invalid("network.comm_radius", "must be finite and >= network.d_link"));
    }
    if cfg.network.kind == NetworkKind::Clustered {
        if cfg.network.clusters.is_empty() {
            return Err(invalid("network.clusters", "clustered placement needs >= 1 cluster"));
        }
        for (i, c) in cfg.network.clusters.iter().enumerate() {
            let inside = c.center.0.is_finite()
                && c.center.1.is_finite()
                && (0.0..=cfg.network.width).contains(&c.center.0)
                && (0.0..=cfg.network.height).contains(&c.center.1);
            if !inside {
                return Err(invalid(
                    "network.clusters",
                    format!("cluster {i} center must lie inside the region"),
                ));
            }
            if !(c.std_dev > 0.0) || !c.std_dev.is_finite() {
                return Err(invalid(
                    "network.clusters",
                    format!("cluster {i} std_dev must be finite and > 0"),
                ));
            }
            if !(c.weight > 0.0) || !c.weight.is_finite() {
                return Err(invalid(
                    "network.clusters",
                    format!("cluster {i} weight must be finite and > 0"),
                ));
            }
        }
    }
    if !(cfg.routing.p_max > 0.0 && cfg.routing.p_max < 1.0) {
        return Err(invalid("routing.p_max", "must lie strictly in (0, 1)"));
    }
    Ok(())
}

/// Read and parse a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

#[derive(Serialize)]
struct EffConfig<'a> {
    scenario: &'a str,
    seed: u64,
    trials: u32,
    channel: EffChannel,
    walk: EffWalk,
    tx: EffTx,
    network: EffNetwork,
    routing: EffRouting,
}

#[derive(Serialize)]
struct EffChannel {
    p0_db: f64,
    alpha: f64,
    noise_power: f64,
    path_loss: PathLossModel,
    fading: Fading,
}

#[derive(Serialize)]
struct EffWalk {
    t: u32,
    d_spacing: f64,
    d_min: f64,
    m: u32,
}

#[derive(Serialize)]
struct EffTx {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_max_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_min_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta_db: Option<f64>,
}

#[derive(Serialize)]
struct EffNetwork {
    kind: NetworkKind,
    n: u32,
    width: f64,
    height: f64,
    d_link: f64,
    comm_radius: f64,
    clusters: Vec<EffCluster>,
}

#[derive(Serialize)]
struct EffCluster {
    x: f64,
    y: f64,
    std_dev: f64,
    weight: f64,
}

#[derive(Serialize)]
struct EffRouting {
    p_max: f64,
    candidate_mode: CandidateMode,
}

/// Render the fully resolved config as TOML. Reparsing the result yields an
/// identical config; its bytes feed the CSV metadata hash.
pub fn effective_toml(cfg: &ScenarioConfig) -> String {
    let tx = match cfg.tx {
        TxProcess::AlwaysOn => EffTx {
            kind: "always_on",
            p: None,
            p_max_db: None,
            p_min_db: None,
            delta_db: None,
        },
        TxProcess::AlwaysOff => EffTx {
            kind: "always_off",
            p: None,
            p_max_db: None,
            p_min_db: None,
            delta_db: None,
        },
        TxProcess::Bernoulli { p } => EffTx {
            kind: "bernoulli",
            p: Some(p),
            p_max_db: None,
            p_min_db: None,
            delta_db: None,
        },
        TxProcess::PowerDescent {
            p_max_db,
            p_min_db,
            delta_db,
        } => EffTx {
            kind: "power_descent",
            p: None,
            p_max_db: Some(p_max_db),
            p_min_db: Some(p_min_db),
            delta_db: Some(delta_db),
        },
    };
    let eff = EffConfig {
        scenario: cfg.scenario.name(),
        seed: cfg.seed,
        trials: cfg.trials,
        channel: EffChannel {
            p0_db: cfg.channel.p0_db,
            alpha: cfg.channel.alpha,
            noise_power: cfg.channel.noise_power,
            path_loss: cfg.channel.path_loss,
            fading: cfg.channel.fading,
        },
        walk: EffWalk {
            t: cfg.walk.t(),
            d_spacing: cfg.walk.d_spacing(),
            d_min: cfg.walk.d_min(),
            m: cfg.walk.m(),
        },
        tx,
        network: EffNetwork {
            kind: cfg.network.kind,
            n: cfg.network.n,
            width: cfg.network.width,
            height: cfg.network.height,
            d_link: cfg.network.d_link,
            comm_radius: cfg.network.comm_radius,
            clusters: cfg
                .network
                .clusters
                .iter()
                .map(|c| EffCluster {
                    x: c.center.0,
                    y: c.center.1,
                    std_dev: c.std_dev,
                    weight: c.weight,
                })
                .collect(),
        },
        routing: EffRouting {
            p_max: cfg.routing.p_max,
            candidate_mode: cfg.routing.candidate_mode,
        },
    };
    toml::to_string(&eff).expect("effective config is always serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::countermeasures::TxProcess;

    #[test]
    fn minimal_file_gets_scenario_defaults() {
        let cfg = parse_config("scenario = \"trend_demo\"\nseed = 7\n").unwrap();
        assert_eq!(cfg.scenario, ScenarioKind::TrendDemo);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.trials, 200);
        assert_eq!(cfg.channel.p0_db, 30.0);
        assert_eq!(cfg.channel.alpha, 3.0);
        assert_eq!(cfg.channel.path_loss, PathLossModel::Bounded);
        assert_eq!(cfg.channel.fading, Fading::Rayleigh);
        assert_eq!(cfg.walk.d_spacing(), 0.5);
        assert_eq!(cfg.walk.m(), 100);
    }

    #[test]
    fn alpha_at_the_boundary_is_named_in_the_error() {
        let err = parse_config(
            "scenario = \"trend_demo\"\n[channel]\nalpha = 2.0\n",
        )
        .unwrap_err();
        match err {
            ConfigError::Invalid { field, .. } => assert_eq!(field, "channel.alpha"),
            other => panic!("expected invalid-field error, got {other}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let err = parse_config("scenario = \"trend_demo\"\nbogus = 1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus"), "message was: {msg}");

        let err = parse_config("scenario = \"trend_demo\"\n[walk]\nspacing = 1.0\n").unwrap_err();
        assert!(err.to_string().contains("spacing"));
    }

    #[test]
    fn unknown_scenarios_list_the_known_ones() {
        let err = parse_config("scenario = \"fig_11\"\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("fig_11") && msg.contains("trend_demo") && msg.contains("calibration"));
    }

    #[test]
    fn overlays_replace_only_named_keys() {
        let cfg = parse_config(
            "scenario = \"scheduling_demo\"\ntrials = 50\n[tx]\np = 0.25\n[walk]\nt = 10\n",
        )
        .unwrap();
        assert_eq!(cfg.trials, 50);
        assert_eq!(cfg.tx, TxProcess::Bernoulli { p: 0.25 });
        assert_eq!(cfg.walk.t(), 10);
        // Unnamed walk keys keep their defaults.
        assert_eq!(cfg.walk.d_spacing(), 0.5);
        assert_eq!(cfg.walk.m(), 100);
    }

    #[test]
    fn inapplicable_tx_keys_are_errors() {
        let err = parse_config("scenario = \"trend_demo\"\n[tx]\np = 0.5\n").unwrap_err();
        match err {
            ConfigError::Invalid { field, .. } => assert_eq!(field, "tx.p"),
            other => panic!("unexpected {other}"),
        }
        let err = parse_config(
            "scenario = \"trend_demo\"\n[tx]\nkind = \"bernoulli\"\ndelta_db = 1.0\n",
        )
        .unwrap_err();
        match err {
            ConfigError::Invalid { field, .. } => assert_eq!(field, "tx.delta_db"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn value_range_errors_carry_field_paths() {
        for (text, field) in [
            ("scenario = \"trend_demo\"\ntrials = 0\n", "trials"),
            ("scenario = \"trend_demo\"\n[walk]\nt = 0\n", "walk.t"),
            (
                "scenario = \"scheduling_demo\"\n[tx]\np = 1.5\n",
                "tx.p",
            ),
            (
                "scenario = \"network_demo\"\n[network]\ncomm_radius = 1.0\n",
                "network.comm_radius",
            ),
            (
                "scenario = \"secure_ratio\"\n[routing]\np_max = 1.0\n",
                "routing.p_max",
            ),
            (
                "scenario = \"network_demo\"\n[network]\nkind = \"clustered\"\n[[network.clusters]]\nx = 10.0\ny = 10.0\nstd_dev = 0.0\nweight = 1.0\n",
                "network.clusters",
            ),
        ] {
            match parse_config(text).unwrap_err() {
                ConfigError::Invalid { field: f, .. } => assert_eq!(f, field, "for {text}"),
                other => panic!("expected invalid {field}, got {other} for {text}"),
            }
        }
    }

    #[test]
    fn effective_config_round_trips_for_every_scenario() {
        for kind in ScenarioKind::ALL {
            let minimal = format!("scenario = \"{}\"\n", kind.name());
            let cfg = parse_config(&minimal).unwrap();
            let eff = effective_toml(&cfg);
            let reparsed = parse_config(&eff).unwrap_or_else(|e| {
                panic!("effective config for {} failed to reparse: {e}\n{eff}", kind.name())
            });
            assert_eq!(cfg, reparsed, "round-trip drift for {}", kind.name());
        }
    }

    #[test]
    fn effective_config_round_trips_with_overrides() {
        let text = r#"
scenario = "secure_ratio"
seed = 99
trials = 64

[channel]
p0_db = 40.0
alpha = 3.5
fading = "rayleigh_per_sample"

[tx]
kind = "power_descent"
p_max_db = 30.0

[network]
kind = "clustered"
n = 120

[[network.clusters]]
x = 50.0
y = 50.0
std_dev = 10.0
weight = 2.0

[[network.clusters]]
x = 150.0
y = 50.0
std_dev = 12.0
weight = 1.0

[routing]
p_max = 0.3
candidate_mode = "literal"
"#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.network.clusters.len(), 2);
        assert_eq!(
            cfg.tx,
            TxProcess::PowerDescent {
                p_max_db: 30.0,
                p_min_db: 20.0,
                delta_db: 0.8
            }
        );
        assert_eq!(cfg.routing.candidate_mode, CandidateMode::Literal);
        let reparsed = parse_config(&effective_toml(&cfg)).unwrap();
        assert_eq!(cfg, reparsed);
    }

    #[test]
    fn oversized_seeds_are_rejected_for_serializability() {
        let mut cfg = ScenarioConfig::defaults_for(ScenarioKind::TrendDemo);
        cfg.seed = u64::MAX;
        match validate_config(&cfg).unwrap_err() {
            ConfigError::Invalid { field, .. } => assert_eq!(field, "seed"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn load_config_reports_missing_files_as_io() {
        match load_config("/definitely/not/here.toml").unwrap_err() {
            ConfigError::Io { path, .. } => assert!(path.contains("not/here")),
            other => panic!("unexpected {other}"),
        }
    }
}
