//! Experiment configuration: a TOML file with one section per module.
//!
//! Every key has a default, so an empty file is a valid configuration.
//! Unknown keys are rejected. `section.key=value` overrides are applied
//! on top of the file before validation.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::game::catalog::MAX_SHARE_LEVELS;
use crate::learners::{EpsilonSchedule, EsnParams};
use crate::vr_traffic::VrParams;
use crate::wifi_coex::WifiMacParams;

/// Learning algorithm run by every UAV in an episode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Leaky-integrator ESN over licensed and unlicensed bands.
    EsnLeaky,
    /// Conventional ESN (no leak) over both bands.
    Esn,
    /// Q-learning over both bands.
    Q,
    /// Q-learning with the unlicensed band disabled.
    QLte,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::EsnLeaky, Algorithm::Esn, Algorithm::Q, Algorithm::QLte];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::EsnLeaky => "esn-leaky",
            Algorithm::Esn => "esn",
            Algorithm::Q => "q",
            Algorithm::QLte => "q-lte",
        }
    }

    pub fn uses_unlicensed(self) -> bool {
        self != Algorithm::QLte
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown algorithm `{s}` (expected esn-leaky, esn, q or q-lte)")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GameConfig {
    /// M: unlicensed airtime shares are 1, 1/2, ..., 1/M of the duty cycle, or 0.
    pub share_levels: usize,
    /// A_max: per-UAV catalog cap.
    pub max_actions: usize,
    /// Largest utility table the equilibrium oracle will enumerate.
    pub oracle_cell_cap: u64,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            share_levels: 5,
            max_actions: 60,
            oracle_cell_cap: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QConfig {
    /// α
    pub learning_rate: f64,
}

impl Default for QConfig {
    fn default() -> Self {
        Self { learning_rate: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExplorationConfig {
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Geometric decay from start to end over the horizon; otherwise fixed at start.
    pub decay: bool,
}

impl Default for ExplorationConfig {
    fn default() -> Self {
        Self {
            epsilon_start: 0.1,
            epsilon_end: 0.01,
            decay: true,
        }
    }
}

impl ExplorationConfig {
    pub fn schedule(&self, horizon: usize) -> EpsilonSchedule {
        if self.decay {
            EpsilonSchedule::Exponential {
                start: self.epsilon_start,
                end: self.epsilon_end,
                horizon,
            }
        } else {
            EpsilonSchedule::Fixed(self.epsilon_start)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TopologyConfig {
    pub n_uavs: usize,
    pub n_users: usize,
    /// Radius of the disc holding users and UAV ground projections, m.
    pub area_radius: f64,
    pub uav_altitude: f64,
    /// Per-UAV coverage radius, m. Defaults to `area_radius`.
    pub coverage_radius: Option<f64>,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        Self {
            n_uavs: 5,
            n_users: 20,
            area_radius: 500.0,
            uav_altitude: 100.0,
            coverage_radius: None,
        }
    }
}

impl TopologyConfig {
    pub fn coverage(&self) -> f64 {
        self.coverage_radius.unwrap_or(self.area_radius)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    /// Iterations per run.
    pub horizon: usize,
    pub n_runs: usize,
    pub master_seed: u64,
    /// UAV counts swept by `sweep` and `figures`.
    pub sweep_uavs: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    /// UAV count for the QoE-vs-iteration figure.
    pub fig5_uavs: usize,
    /// Trailing moving-average window used before testing convergence.
    pub smoothing_window: usize,
    /// Trailing window over which final metrics are averaged.
    pub final_window: usize,
    /// Relative half-width of the convergence band.
    pub convergence_band: f64,
    pub out_dir: String,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            horizon: 2000,
            n_runs: 50,
            master_seed: 1,
            sweep_uavs: (1..=6).collect(),
            algorithms: Algorithm::ALL.to_vec(),
            fig5_uavs: 5,
            smoothing_window: 50,
            final_window: 500,
            convergence_band: 0.05,
            out_dir: "results".into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub channel: ChannelParams<f64>,
    pub vr: VrParams<f64>,
    pub wifi: WifiMacParams<f64>,
    pub game: GameConfig,
    pub esn: EsnParams<f64>,
    pub q_learning: QConfig,
    pub exploration: ExplorationConfig,
    pub topology: TopologyConfig,
    pub experiment: ExperimentSection,
}

impl ExperimentConfig {
    /// Parses TOML text, applies overrides and validates.
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut value: toml::Table = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        let cfg: Self = toml::Value::Table(value)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        self.vr.validate()?;
        self.wifi.validate()?;
        self.esn.validate("esn")?;
        let g = &self.game;
        if g.share_levels > MAX_SHARE_LEVELS {
            return Err(Error::config("game.share_levels", format!("must be at most {MAX_SHARE_LEVELS}")));
        }
        if g.max_actions == 0 {
            return Err(Error::config("game.max_actions", "must be >= 1"));
        }
        let q = self.q_learning.learning_rate;
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::config("q_learning.learning_rate", "must lie in [0, 1]"));
        }
        let e = &self.exploration;
        if !(0.0..=1.0).contains(&e.epsilon_start) {
            return Err(Error::config("exploration.epsilon_start", "must lie in [0, 1]"));
        }
        if e.decay && !(e.epsilon_end > 0.0 && e.epsilon_end <= e.epsilon_start) {
            return Err(Error::config("exploration.epsilon_end", "must lie in (0, epsilon_start] when decaying"));
        }
        let t = &self.topology;
        if t.n_uavs == 0 {
            return Err(Error::config("topology.n_uavs", "must be >= 1"));
        }
        if t.n_users == 0 {
            return Err(Error::config("topology.n_users", "must be >= 1"));
        }
        if !(t.area_radius >= 0.0 && t.area_radius.is_finite()) {
            return Err(Error::config("topology.area_radius", "must be finite and >= 0"));
        }
        if !(t.uav_altitude > 0.0 && t.uav_altitude.is_finite()) {
            return Err(Error::config("topology.uav_altitude", "must be finite and > 0"));
        }
        if !(t.coverage() >= 0.0) {
            return Err(Error::config("topology.coverage_radius", "must be >= 0"));
        }
        let x = &self.experiment;
        if x.n_runs == 0 {
            return Err(Error::config("experiment.n_runs", "must be >= 1"));
        }
        if x.sweep_uavs.is_empty() || x.sweep_uavs.contains(&0) {
            return Err(Error::config("experiment.sweep_uavs", "must be a nonempty list of positive counts"));
        }
        if x.algorithms.is_empty() {
            return Err(Error::config("experiment.algorithms", "must not be empty"));
        }
        if x.fig5_uavs == 0 {
            return Err(Error::config("experiment.fig5_uavs", "must be >= 1"));
        }
        if x.smoothing_window == 0 {
            return Err(Error::config("experiment.smoothing_window", "must be >= 1"));
        }
        if x.final_window == 0 {
            return Err(Error::config("experiment.final_window", "must be >= 1"));
        }
        if !(x.convergence_band > 0.0) {
            return Err(Error::config("experiment.convergence_band", "must be > 0"));
        }
        Ok(())
    }
}

/// Reads and validates a config file.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    ExperimentConfig::from_toml_str(&text, overrides)
}

/// Applies one `section.key=value` override. The value is read as a TOML
/// value, falling back to a bare string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("override `{assignment}` is not of the form section.key=value")))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::Parse(format!("bad key path `{path}`")));
    }
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let (last, parents) = keys.split_last().expect("nonempty path");
    let mut cur = table;
    for k in parents {
        let entry = cur
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Parse(format!("`{k}` in `{path}` is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = ExperimentConfig::from_toml_str("", &[]).unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_toml_str("[channel]\nbogus = 1\n", &[]).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
        let err = ExperimentConfig::from_toml_str("[nope]\n", &[]).unwrap_err();
        assert!(err.to_string().contains("nope"), "{err}");
    }

    #[test]
    fn inverted_attenuation_is_rejected_by_name() {
        let text = "[channel]\neta_nlos_licensed = 0.5\neta_los_licensed = 1.0\n";
        let err = ExperimentConfig::from_toml_str(text, &[]).unwrap_err();
        assert!(err.to_string().contains("channel.eta_nlos_licensed"), "{err}");
    }

    #[test]
    fn overrides_apply_after_file() {
        let cfg = ExperimentConfig::from_toml_str(
            "[topology]\nn_uavs = 3\n",
            &[
                "topology.n_uavs=4".into(),
                "experiment.algorithms=[\"esn\", \"q\"]".into(),
                "experiment.out_dir=somewhere".into(),
                "esn.reservoir_size = 64".into(),
            ],
        )
        .unwrap();
        assert_eq!(cfg.topology.n_uavs, 4);
        assert_eq!(cfg.experiment.algorithms, vec![Algorithm::Esn, Algorithm::Q]);
        assert_eq!(cfg.experiment.out_dir, "somewhere");
        assert_eq!(cfg.esn.reservoir_size, 64);
        assert!(ExperimentConfig::from_toml_str("", &["topology.n_uavs".into()]).is_err());
        assert!(ExperimentConfig::from_toml_str("", &["topology.n_uavs=0".into()]).is_err());
    }

    #[test]
    fn zero_resource_blocks_fail_before_any_run() {
        let err = ExperimentConfig::from_toml_str("[channel]\nnum_downlink_rbs = 0\n", &[]).unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    #[test]
    fn serialization_round_trips() {
        let cfg = ExperimentConfig::default();
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&text, &[]).unwrap(), cfg);
    }

    #[test]
    fn algorithm_names() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("sarsa".parse::<Algorithm>().is_err());
    }
}
