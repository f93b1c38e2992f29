//! TOML configuration files.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::allocation::AllocationMode;
use crate::channel::ChannelParams;
use crate::clustering::{ClusterStrategy, OrderingMethod};
use crate::experiment::{DisparityGrid, ExperimentError, SimConfig, StrategyEntry};

/// Window radius used at unit density.
const DEFAULT_WINDOW_AT_UNIT_DENSITY: f64 = 15.0;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        key: Option<String>,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: unknown key `{key}`")]
    UnknownKey {
        path: String,
        key: String,
        line: usize,
    },
    #[error("{path}{}: invalid `{key}`: {message}", line_suffix(*.line))]
    Invalid {
        path: String,
        key: String,
        line: Option<usize>,
        message: String,
    },
}

impl ConfigError {
    /// The offending key, when one can be named.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::Io { .. } => None,
            ConfigError::Parse { key, .. } => key.as_deref(),
            ConfigError::UnknownKey { key, .. } | ConfigError::Invalid { key, .. } => Some(key),
        }
    }

    /// 1-based line of the offending entry, when known.
    pub fn line(&self) -> Option<usize> {
        match self {
            ConfigError::Io { .. } => None,
            ConfigError::Parse { line, .. } | ConfigError::UnknownKey { line, .. } => Some(*line),
            ConfigError::Invalid { line, .. } => *line,
        }
    }
}

fn line_suffix(line: Option<usize>) -> String {
    line.map(|l| format!(":{l}")).unwrap_or_default()
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    density: Option<f64>,
    window_radius: Option<f64>,
    eta: Option<f64>,
    noise: Option<f64>,
    interferer_power: Option<f64>,
    budget: Option<f64>,
    mode: Option<AllocationMode>,
    fixed_fractions: Option<Vec<f64>>,
    theta_list: Option<Vec<f64>>,
    disparity: Option<RawGrid>,
    trials: Option<u64>,
    seed: Option<u64>,
    // A single `[strategy]` table or an array of `[[strategy]]` tables.
    strategy: Option<toml::Value>,
    ordering: Option<OrderingMethod>,
    robust_allocation: Option<bool>,
    instantaneous_csi: Option<bool>,
    cluster_size: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    min: Option<f64>,
    max: Option<f64>,
    step: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStrategy {
    name: String,
    label: Option<String>,
    radius: Option<f64>,
    r_disk: Option<f64>,
    r_in: Option<f64>,
    r_out: Option<f64>,
    t1: Option<f64>,
    t2: Option<f64>,
    disparity: Option<f64>,
    mode: Option<AllocationMode>,
    fixed_fractions: Option<Vec<f64>>,
}

/// Reads and validates a configuration file.
pub fn parse_config(path: &Path) -> Result<SimConfig, ConfigError> {
    let label = path.display().to_string();
    let source = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: label.clone(),
        source,
    })?;
    parse_config_source(&source, &label)
}

/// Parses configuration text; `origin` names the source in error messages.
pub fn parse_config_source(source: &str, origin: &str) -> Result<SimConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(source).map_err(|e| toml_error(&e, source, origin))?;
    let config = build(raw, source, origin)?;
    config.validate().map_err(|e| match e {
        ExperimentError::InvalidConfig { key, message } => invalid(source, origin, &key, message),
        other => invalid(source, origin, "config", other.to_string()),
    })?;
    Ok(config)
}

fn toml_error(e: &toml::de::Error, source: &str, origin: &str) -> ConfigError {
    let offset = e.span().map(|s| s.start).unwrap_or(0);
    let line = line_of_offset(source, offset);
    let message = e.message().trim().to_string();
    if let Some(key) = unknown_field(&message) {
        return ConfigError::UnknownKey {
            path: origin.to_string(),
            key,
            line,
        };
    }
    ConfigError::Parse {
        path: origin.to_string(),
        key: key_on_line(source, line),
        line,
        message,
    }
}

fn unknown_field(message: &str) -> Option<String> {
    let rest = message.strip_prefix("unknown field `")?;
    Some(rest[..rest.find('`')?].to_string())
}

fn line_of_offset(source: &str, offset: usize) -> usize {
    let offset = offset.min(source.len());
    source.as_bytes()[..offset]
        .iter()
        .filter(|&&b| b == b'\n')
        .count()
        + 1
}

fn key_on_line(source: &str, line: usize) -> Option<String> {
    let text = source.lines().nth(line.checked_sub(1)?)?;
    let (key, _) = text.split_once('=')?;
    let key = key.trim();
    (!key.is_empty()).then(|| key.to_string())
}

/// First line assigning the last segment of a dotted key (`step` for
/// `disparity.step`), falling back to the first segment.
fn line_of_key(source: &str, key: &str) -> Option<usize> {
    let assigns = |name: &str| {
        source.lines().position(|text| {
            text.trim_start()
                .strip_prefix(name)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
    };
    let leaf = key.rsplit('.').next().unwrap_or(key);
    let head = key.split('.').next().unwrap_or(key);
    assigns(leaf).or_else(|| assigns(head)).map(|i| i + 1)
}

fn invalid(source: &str, origin: &str, key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        path: origin.to_string(),
        key: key.to_string(),
        line: line_of_key(source, key),
        message: message.into(),
    }
}

fn build(raw: RawConfig, source: &str, origin: &str) -> Result<SimConfig, ConfigError> {
    let defaults = SimConfig::default();
    let density = raw.density.unwrap_or(defaults.density);
    // Without an explicit window the radius keeps the mean interferer count
    // of the unit-density default.
    let window_radius = raw.window_radius.unwrap_or_else(|| {
        if density.is_finite() && density > 0.0 {
            DEFAULT_WINDOW_AT_UNIT_DENSITY / density.sqrt()
        } else {
            DEFAULT_WINDOW_AT_UNIT_DENSITY
        }
    });
    let channel = ChannelParams {
        path_loss_exponent: raw.eta.unwrap_or(defaults.channel.path_loss_exponent),
        noise_power: raw.noise.unwrap_or(defaults.channel.noise_power),
        interferer_power: raw
            .interferer_power
            .unwrap_or(defaults.channel.interferer_power),
        ..defaults.channel
    };
    let grid = raw.disparity.unwrap_or_default();
    let disparity = DisparityGrid {
        min: grid.min.unwrap_or(defaults.disparity.min),
        max: grid.max.unwrap_or(defaults.disparity.max),
        step: grid.step.unwrap_or(defaults.disparity.step),
    };
    let strategies = match raw.strategy {
        None => defaults.strategies.clone(),
        Some(value) => parse_strategies(value, source, origin)?,
    };
    Ok(SimConfig {
        density,
        window_radius,
        channel,
        budget: raw.budget.unwrap_or(defaults.budget),
        mode: raw.mode.unwrap_or(defaults.mode),
        fixed_fractions: raw.fixed_fractions.unwrap_or(defaults.fixed_fractions),
        theta_list: raw.theta_list.unwrap_or(defaults.theta_list),
        disparity,
        trials: raw.trials.unwrap_or(defaults.trials),
        seed: raw.seed.unwrap_or(defaults.seed),
        strategies,
        ordering: raw.ordering.unwrap_or(defaults.ordering),
        robust_allocation: raw.robust_allocation.unwrap_or(defaults.robust_allocation),
        instantaneous_csi: raw.instantaneous_csi.unwrap_or(defaults.instantaneous_csi),
        cluster_size: raw.cluster_size.unwrap_or(defaults.cluster_size),
        limits: defaults.limits,
    })
}

fn parse_strategies(
    value: toml::Value,
    source: &str,
    origin: &str,
) -> Result<Vec<StrategyEntry>, ConfigError> {
    let tables = match value {
        toml::Value::Array(items) => items,
        table @ toml::Value::Table(_) => vec![table],
        _ => {
            return Err(invalid(
                source,
                origin,
                "strategy",
                "expected a table or array of tables",
            ))
        }
    };
    if tables.is_empty() {
        return Err(invalid(
            source,
            origin,
            "strategy",
            "needs at least one entry",
        ));
    }
    tables
        .into_iter()
        .map(|table| {
            let raw: RawStrategy = table.try_into().map_err(|e: toml::de::Error| {
                let message = e.message().trim().to_string();
                match unknown_field(&message) {
                    Some(key) => {
                        let key = format!("strategy.{key}");
                        ConfigError::UnknownKey {
                            path: origin.to_string(),
                            line: line_of_key(source, &key).unwrap_or(1),
                            key,
                        }
                    }
                    None => invalid(source, origin, "strategy", message),
                }
            })?;
            strategy_entry(raw, source, origin)
        })
        .collect()
}

fn strategy_entry(
    raw: RawStrategy,
    source: &str,
    origin: &str,
) -> Result<StrategyEntry, ConfigError> {
    let need = |value: Option<f64>, key: &str| {
        value.ok_or_else(|| {
            invalid(
                source,
                origin,
                &format!("strategy.{key}"),
                format!("required by strategy `{}`", raw.name),
            )
        })
    };
    let strategy = match raw.name.as_str() {
        "random_in_cell" => ClusterStrategy::RandomInCell,
        "in_disk_half_rho" => ClusterStrategy::InDiskHalfRho,
        "fixed_disk" => ClusterStrategy::FixedDisk {
            radius: need(raw.radius, "radius")?,
        },
        "disk_annulus" => ClusterStrategy::DiskAnnulus {
            r_disk: need(raw.r_disk, "r_disk")?,
            r_in: need(raw.r_in, "r_in")?,
            r_out: need(raw.r_out, "r_out")?,
        },
        "sinr_threshold" => ClusterStrategy::SinrThreshold {
            t1: need(raw.t1, "t1")?,
            t2: need(raw.t2, "t2")?,
        },
        "controlled_disparity" => ClusterStrategy::ControlledDisparity {
            disparity: need(raw.disparity, "disparity")?,
        },
        other => {
            return Err(invalid(
                source,
                origin,
                "strategy.name",
                format!("unknown strategy `{other}`"),
            ))
        }
    };
    Ok(StrategyEntry {
        label: raw.label.unwrap_or_else(|| strategy.name().to_string()),
        strategy,
        mode: raw.mode,
        fixed_fractions: raw.fixed_fractions,
    })
}

/// Canonical TOML for a configuration; `parse_config` reads it back to the
/// same value. Selection limits are not configurable and are not written.
pub fn to_toml(config: &SimConfig) -> String {
    let mut out = String::new();
    let list = |values: &[f64]| {
        let items: Vec<String> = values.iter().map(|v| format!("{v:?}")).collect();
        format!("[{}]", items.join(", "))
    };
    let _ = writeln!(out, "density = {:?}", config.density);
    let _ = writeln!(out, "window_radius = {:?}", config.window_radius);
    let _ = writeln!(out, "eta = {:?}", config.channel.path_loss_exponent);
    let _ = writeln!(out, "noise = {:?}", config.channel.noise_power);
    let _ = writeln!(
        out,
        "interferer_power = {:?}",
        config.channel.interferer_power
    );
    let _ = writeln!(out, "budget = {:?}", config.budget);
    let _ = writeln!(out, "mode = \"{}\"", config.mode);
    let _ = writeln!(out, "fixed_fractions = {}", list(&config.fixed_fractions));
    let _ = writeln!(out, "theta_list = {}", list(&config.theta_list));
    let _ = writeln!(out, "trials = {}", config.trials);
    let _ = writeln!(out, "seed = {}", config.seed);
    let _ = writeln!(out, "ordering = \"{}\"", config.ordering.as_str());
    let _ = writeln!(out, "robust_allocation = {}", config.robust_allocation);
    let _ = writeln!(out, "instantaneous_csi = {}", config.instantaneous_csi);
    let _ = writeln!(out, "cluster_size = {}", config.cluster_size);
    let _ = writeln!(out, "\n[disparity]");
    let _ = writeln!(out, "min = {:?}", config.disparity.min);
    let _ = writeln!(out, "max = {:?}", config.disparity.max);
    let _ = writeln!(out, "step = {:?}", config.disparity.step);
    for entry in &config.strategies {
        let _ = writeln!(out, "\n[[strategy]]");
        let _ = writeln!(out, "name = \"{}\"", entry.strategy.name());
        let _ = writeln!(out, "label = {}", toml::Value::String(entry.label.clone()));
        match entry.strategy {
            ClusterStrategy::RandomInCell | ClusterStrategy::InDiskHalfRho => {}
            ClusterStrategy::FixedDisk { radius } => {
                let _ = writeln!(out, "radius = {radius:?}");
            }
            ClusterStrategy::DiskAnnulus {
                r_disk,
                r_in,
                r_out,
            } => {
                let _ = writeln!(
                    out,
                    "r_disk = {r_disk:?}\nr_in = {r_in:?}\nr_out = {r_out:?}"
                );
            }
            ClusterStrategy::SinrThreshold { t1, t2 } => {
                let _ = writeln!(out, "t1 = {t1:?}\nt2 = {t2:?}");
            }
            ClusterStrategy::ControlledDisparity { disparity } => {
                let _ = writeln!(out, "disparity = {disparity:?}");
            }
        }
        if let Some(mode) = entry.mode {
            let _ = writeln!(out, "mode = \"{mode}\"");
        }
        if let Some(fractions) = &entry.fixed_fractions {
            let _ = writeln!(out, "fixed_fractions = {}", list(fractions));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> Result<SimConfig, ConfigError> {
        parse_config_source(src, "test.toml")
    }

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(parse("").unwrap(), SimConfig::default());
    }

    #[test]
    fn sum_rate_setup_file() {
        let src = "mode = \"sum_rate_weak_qos\"\ntheta_list = [0.5, 0.9, 1.0]\ntrials = 100000\nbudget = 1\n";
        assert_eq!(parse(src).unwrap(), SimConfig::sum_rate_setup());
    }

    #[test]
    fn min_power_setup_file() {
        let src = "mode = \"min_power_qos\"\ntheta_list = [2.0]\n";
        assert_eq!(parse(src).unwrap(), SimConfig::min_power_setup());
    }

    #[test]
    fn unknown_key_reports_name_and_line() {
        let err = parse("density = 1.0\n\nbogus = 3\n").unwrap_err();
        match err {
            ConfigError::UnknownKey { ref key, line, .. } => {
                assert_eq!(key, "bogus");
                assert_eq!(line, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_nested_key_is_reported() {
        let err = parse("[disparity]\nmin = 1.0\nstride = 0.5\n").unwrap_err();
        assert_eq!(err.key(), Some("stride"));
        assert_eq!(err.line(), Some(3));
    }

    #[test]
    fn wrong_type_reports_key_and_line() {
        let err = parse("budget = 1.0\ntrials = \"many\"\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { .. }), "{err:?}");
        assert_eq!(err.key(), Some("trials"));
        assert_eq!(err.line(), Some(2));
    }

    #[test]
    fn invalid_value_reports_key_and_line() {
        let err = parse("seed = 4\nbudget = -2.0\n").unwrap_err();
        assert_eq!(err.key(), Some("budget"));
        assert_eq!(err.line(), Some(2));
        let err = parse("[disparity]\nmin = 1.0\nstep = 0.0\n").unwrap_err();
        assert_eq!(err.key(), Some("disparity.step"));
        assert_eq!(err.line(), Some(3));
    }

    #[test]
    fn syntax_error_has_line() {
        let err = parse("density = 1.0\ntheta_list = [0.5,\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { .. }));
        assert!(err.line().is_some());
    }

    #[test]
    fn unknown_mode_is_rejected() {
        let err = parse("mode = \"max_min\"\n").unwrap_err();
        assert_eq!(err.key(), Some("mode"));
    }

    #[test]
    fn strategy_tables() {
        let src = r#"
[[strategy]]
name = "fixed_disk"
radius = 0.3

[[strategy]]
name = "controlled_disparity"
disparity = 2.0
mode = "fixed"
fixed_fractions = [0.2, 0.8]
label = "f-noma"
"#;
        let config = parse(src).unwrap();
        assert_eq!(config.strategies.len(), 2);
        assert_eq!(
            config.strategies[0].strategy,
            ClusterStrategy::FixedDisk { radius: 0.3 }
        );
        assert_eq!(config.strategies[1].label, "f-noma");
        assert_eq!(config.strategies[1].mode, Some(AllocationMode::Fixed));

        let single = parse("[strategy]\nname = \"in_disk_half_rho\"\n").unwrap();
        assert_eq!(
            single.strategies,
            vec![StrategyEntry::new(ClusterStrategy::InDiskHalfRho)]
        );
    }

    #[test]
    fn strategy_missing_parameter() {
        let err = parse("[[strategy]]\nname = \"fixed_disk\"\n").unwrap_err();
        assert_eq!(err.key(), Some("strategy.radius"));
        let err = parse("[[strategy]]\nname = \"hexagon\"\n").unwrap_err();
        assert_eq!(err.key(), Some("strategy.name"));
        let err = parse("[[strategy]]\nname = \"fixed_disk\"\nradious = 1.0\n").unwrap_err();
        assert_eq!(err.key(), Some("strategy.radious"));
        assert_eq!(err.line(), Some(3));
    }

    #[test]
    fn window_follows_density_when_unset() {
        let config = parse("density = 4.0\n").unwrap();
        assert_eq!(config.window_radius, 7.5);
        let config = parse("density = 4.0\nwindow_radius = 20.0\n").unwrap();
        assert_eq!(config.window_radius, 20.0);
    }

    #[test]
    fn canonical_round_trip() {
        let mut config = SimConfig::min_power_setup();
        config.density = 0.3;
        config.window_radius = 27.123456789;
        config.channel.noise_power = 1e-5;
        config.disparity = DisparityGrid {
            min: 1.0,
            max: 5.0,
            step: 0.5,
        };
        config.ordering = OrderingMethod::ByMeanSignalQuality;
        config.robust_allocation = false;
        config.strategies = vec![
            StrategyEntry::new(ClusterStrategy::DiskAnnulus {
                r_disk: 0.1,
                r_in: 0.2,
                r_out: 0.45,
            }),
            StrategyEntry {
                label: "fixed \"quoted\"".into(),
                strategy: ClusterStrategy::SinrThreshold { t1: 10.0, t2: 1.0 },
                mode: Some(AllocationMode::Fixed),
                fixed_fractions: Some(vec![0.2, 0.8]),
            },
        ];
        assert_eq!(parse(&to_toml(&config)).unwrap(), config);
        assert_eq!(
            parse(&to_toml(&SimConfig::default())).unwrap(),
            SimConfig::default()
        );
    }
}
