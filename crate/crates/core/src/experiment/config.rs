//! Experiment configuration: a TOML document with one table per concern,
//! optionally patched by `SPIKESCORE_<SECTION>_<KEY>=value` variables.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::{ActuatorConfig, FoveatorConfig, TrackerConfig};
use crate::error::{Error, Result};
use crate::sim::{DynamicsConfig, SleepConfig};

pub const ENV_PREFIX: &str = "SPIKESCORE_";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    #[default]
    Tracker,
    Foveator,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvironmentConfig {
    pub kind: TaskKind,
    pub grid: usize,
    pub target: usize,
    pub speed: usize,
    pub gap: usize,
    pub timeout: usize,
    pub area_size: usize,
    pub threshold: usize,
    pub window: usize,
}

impl Default for EnvironmentConfig {
    fn default() -> Self {
        let t = TrackerConfig::default();
        let f = FoveatorConfig::default();
        let a = ActuatorConfig::default();
        Self {
            kind: TaskKind::Tracker,
            grid: t.grid,
            target: t.target,
            speed: t.speed,
            gap: t.gap,
            timeout: f.timeout,
            area_size: a.area_size,
            threshold: a.threshold,
            window: a.window,
        }
    }
}

impl EnvironmentConfig {
    pub fn tracker(&self) -> TrackerConfig {
        TrackerConfig {
            grid: self.grid,
            target: self.target,
            speed: self.speed,
            gap: self.gap,
        }
    }

    pub fn foveator(&self) -> FoveatorConfig {
        FoveatorConfig {
            grid: self.grid,
            timeout: self.timeout,
            gap: self.gap,
        }
    }

    pub fn actuator(&self) -> ActuatorConfig {
        ActuatorConfig {
            areas: 8,
            area_size: self.area_size,
            threshold: self.threshold,
            window: self.window,
        }
    }
}

/// Layer sizes, random wiring densities and initial weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopologyConfig {
    pub v: usize,
    /// Size of the delayed layer; 0 drops it.
    pub d: usize,
    pub inh: usize,
    /// Tics from S to D.
    pub delay: usize,
    pub feedback_delay: usize,
    pub p_sv: f64,
    pub p_sd: f64,
    pub p_hm: f64,
    pub p_fb: f64,
    pub p_inh_in: f64,
    pub p_inh_out: f64,
    pub w_inh_in: f64,
    pub w_inh: f64,
    /// Plastic weights start uniform on `(0, init_max)`.
    pub init_max: f64,
    /// `false` freezes the V and D banks so only M learns.
    pub hidden_plastic: bool,
    /// Start every bank that has a sleep K from its top-K binarization.
    pub binary_init: bool,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        Self {
            v: 100,
            d: 100,
            inh: 100,
            delay: 3,
            feedback_delay: 0,
            p_sv: 1.0,
            p_sd: 1.0,
            p_hm: 1.0,
            p_fb: 1.0,
            p_inh_in: 0.1,
            p_inh_out: 0.1,
            w_inh_in: 0.5,
            w_inh: 0.5,
            init_max: 0.2,
            hidden_plastic: true,
            binary_init: false,
        }
    }
}

impl TopologyConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p_sv", self.p_sv),
            ("p_sd", self.p_sd),
            ("p_hm", self.p_hm),
            ("p_fb", self.p_fb),
            ("p_inh_in", self.p_inh_in),
            ("p_inh_out", self.p_inh_out),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("topology.{name} must lie in [0,1], got {p}")));
            }
        }
        if self.v == 0 {
            return Err(Error::Config("topology.v must be positive".into()));
        }
        if !(self.init_max > 0.0 && self.init_max <= 1.0) {
            return Err(Error::Config("topology.init_max must lie in (0,1]".into()));
        }
        if !(self.w_inh >= 0.0 && self.w_inh_in >= 0.0) {
            return Err(Error::Config("inhibitory weight magnitudes must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeedsConfig {
    pub list: Vec<u64>,
}

impl Default for SeedsConfig {
    fn default() -> Self {
        Self { list: vec![0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DurationConfig {
    pub tics: u64,
    /// Tics excluded from the metrics; a warmup past `tics` measures nothing.
    pub warmup: u64,
}

impl Default for DurationConfig {
    fn default() -> Self {
        Self {
            tics: 50_000,
            warmup: 10_000,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SnapshotConfig {
    /// Tics between weight snapshots; 0 keeps only the final one.
    pub interval: u64,
    /// Projection names to capture; empty captures every plastic projection.
    pub projections: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub topology: TopologyConfig,
    pub dynamics: DynamicsConfig,
    pub sleep: SleepConfig,
    pub environment: EnvironmentConfig,
    pub seeds: SeedsConfig,
    pub duration: DurationConfig,
    pub snapshots: SnapshotConfig,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.topology.validate()?;
        self.dynamics.validate()?;
        self.sleep.validate()?;
        self.environment.actuator().validate()?;
        match self.environment.kind {
            TaskKind::Tracker => self.environment.tracker().validate()?,
            TaskKind::Foveator => self.environment.foveator().validate()?,
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = self.seeds.list.iter().find(|s| !seen.insert(**s)) {
            return Err(Error::Config(format!("seed {dup} listed twice")));
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let value: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
        Self::from_table(value)
    }

    fn from_table(table: toml::Table) -> Result<Self> {
        let cfg: Self = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses `text` after applying overrides from `vars`.
    pub fn from_toml_with_overrides<I, K, V>(text: &str, vars: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
        for (k, v) in vars {
            if let Some((section, key)) = parse_override_key(k.as_ref())? {
                apply_override(&mut table, &section, &key, v.as_ref())?;
            }
        }
        Self::from_table(table)
    }

    /// Reads a config file and applies `SPIKESCORE_*` process variables.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_with_overrides(&text, std::env::vars())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Splits `SPIKESCORE_SECTION_KEY` into lowercase `(section, key)`.
/// Variables without the prefix yield `None`.
pub fn parse_override_key(name: &str) -> Result<Option<(String, String)>> {
    let Some(rest) = name.strip_prefix(ENV_PREFIX) else {
        return Ok(None);
    };
    match rest.split_once('_') {
        Some((section, key)) if !section.is_empty() && !key.is_empty() => {
            Ok(Some((section.to_ascii_lowercase(), key.to_ascii_lowercase())))
        }
        _ => Err(Error::Parse(format!("override `{name}` must look like {ENV_PREFIX}SECTION_KEY"))),
    }
}

/// A TOML scalar (or array), falling back to a bare string.
pub fn parse_override_value(raw: &str) -> toml::Value {
    match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.to_string())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

pub fn apply_override(table: &mut toml::Table, section: &str, key: &str, raw: &str) -> Result<()> {
    let entry = table
        .entry(section.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    let toml::Value::Table(sec) = entry else {
        return Err(Error::Parse(format!("`{section}` is not a table")));
    };
    sec.insert(key.to_string(), parse_override_value(raw));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(ExperimentConfig::from_toml_str("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = ExperimentConfig::default();
        let text = cfg.to_toml_string();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn overrides_patch_sections() {
        let vars = [
            ("SPIKESCORE_DYNAMICS_LR_FF", "0.5"),
            ("SPIKESCORE_TOPOLOGY_HIDDEN_PLASTIC", "false"),
            ("SPIKESCORE_ENVIRONMENT_KIND", "foveator"),
            ("SPIKESCORE_SEEDS_LIST", "[4, 5]"),
            ("HOME", "/root"),
        ];
        let cfg = ExperimentConfig::from_toml_with_overrides("[dynamics]\nlr_ff = 0.1\n", vars).unwrap();
        assert_eq!(cfg.dynamics.lr_ff, 0.5);
        assert!(!cfg.topology.hidden_plastic);
        assert_eq!(cfg.environment.kind, TaskKind::Foveator);
        assert_eq!(cfg.seeds.list, vec![4, 5]);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(ExperimentConfig::from_toml_str("[dynamics]\nbogus = 1\n").is_err());
        assert!(ExperimentConfig::from_toml_str("[dynamics]\ntrace_decay = 1.5\n").is_err());
        assert!(ExperimentConfig::from_toml_str("[seeds]\nlist = [1, 1]\n").is_err());
        assert!(ExperimentConfig::from_toml_str("not toml ===").is_err());
        assert!(parse_override_key("SPIKESCORE_NOKEY").is_err());
        assert_eq!(parse_override_key("PATH").unwrap(), None);
    }
}
