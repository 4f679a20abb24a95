//! Scenario configuration.
//!
//! Configs are small TOML documents. Every key is optional; a missing key
//! takes the reference-cell default. Example:
//!
//! ```toml
//! experiment = "ber"          # ber | ber_single_user | rate | rate_single_user | ratio
//! seed = 42
//!
//! [topology]
//! distances = [0.5, 1.5, 2.5, 3.5, 4.5]   # km, strictly increasing
//! cell_radius = 5.0                        # km
//! path_loss_exponent = 3.0
//! groups = 2
//!
//! [simulation]
//! total_power = 40.0          # W
//! modulation = "qpsk"
//! frames = 500
//! bits_per_frame = 6144       # per user
//! rate_realizations = 10000   # fading draws per SNR point for rate experiments
//! snr_grid = "0:5:60"         # start:step:stop (inclusive), "0,10,20", or [0, 10, 20]
//! decoding_order = "distance"       # distance | instantaneous
//! fading_coherence = "block"        # block (new fade every T slots) | frame
//! tdma_baseline = "eq22_time_share"
//! ```

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::receiver::OrderMode;
use crate::topology::{
    Topology, REFERENCE_DISTANCES, REFERENCE_GROUPS, REFERENCE_PATH_LOSS_EXPONENT,
    REFERENCE_RADIUS_KM, REFERENCE_TOTAL_POWER,
};

pub const DEFAULT_SNR_GRID: &str = "0:5:60";
pub const DEFAULT_FRAMES: u64 = 500;
pub const DEFAULT_BITS_PER_FRAME: usize = 6144;
pub const DEFAULT_RATE_REALIZATIONS: u64 = 10_000;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid snr grid {spec:?}: {reason}")]
    SnrGrid { spec: String, reason: String },
    #[error("invalid config:\n  - {}", .0.join("\n  - "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    #[default]
    Ber,
    BerSingleUser,
    Rate,
    RateSingleUser,
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modulation {
    #[default]
    Qpsk,
}

/// TDMA reference for the sum-rate ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
pub enum TdmaBaseline {
    /// Equal time shares, each at the single-user rate with full power.
    #[default]
    #[serde(rename = "eq22_time_share")]
    TimeShare,
}

/// How long a fading realization lasts in BER runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coherence {
    /// A fresh draw for every `T`-slot block.
    #[default]
    Block,
    /// One draw held for the whole frame.
    Frame,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawOrderMode {
    Instantaneous,
    #[default]
    Distance,
}

impl From<RawOrderMode> for OrderMode {
    fn from(m: RawOrderMode) -> Self {
        match m {
            RawOrderMode::Instantaneous => OrderMode::Instantaneous,
            RawOrderMode::Distance => OrderMode::Distance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SnrGridSpec {
    Text(String),
    List(Vec<f64>),
}

impl SnrGridSpec {
    pub fn resolve(&self) -> Result<Vec<f64>, ConfigError> {
        match self {
            SnrGridSpec::Text(s) => parse_snr_grid(s),
            SnrGridSpec::List(v) => Ok(v.clone()),
        }
    }
}

/// Parses `start:step:stop` (inclusive), a comma list, or a single value.
pub fn parse_snr_grid(spec: &str) -> Result<Vec<f64>, ConfigError> {
    let err = |reason: &str| ConfigError::SnrGrid {
        spec: spec.to_string(),
        reason: reason.to_string(),
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| err("not a number"));
    let spec_t = spec.trim();
    if spec_t.is_empty() {
        return Ok(Vec::new());
    }
    if spec_t.contains(':') {
        let parts: Vec<&str> = spec_t.split(':').collect();
        let [start, step, stop] = parts[..] else {
            return Err(err("range needs start:step:stop"));
        };
        let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
        if !(start.is_finite() && step.is_finite() && stop.is_finite()) {
            return Err(err("range bounds must be finite"));
        }
        if step == 0.0 || (stop - start) * step < 0.0 {
            return Err(err("step must be non-zero and point from start to stop"));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..n).map(|i| start + i as f64 * step).collect());
    }
    spec_t.split(',').map(num).collect()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawTopology {
    pub distances: Vec<f64>,
    pub cell_radius: f64,
    pub path_loss_exponent: f64,
    pub groups: usize,
}

impl Default for RawTopology {
    fn default() -> Self {
        RawTopology {
            distances: REFERENCE_DISTANCES.to_vec(),
            cell_radius: REFERENCE_RADIUS_KM,
            path_loss_exponent: REFERENCE_PATH_LOSS_EXPONENT,
            groups: REFERENCE_GROUPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawSimulation {
    pub total_power: f64,
    pub modulation: Modulation,
    pub frames: u64,
    pub bits_per_frame: usize,
    pub rate_realizations: u64,
    pub snr_grid: SnrGridSpec,
    decoding_order: RawOrderMode,
    pub fading_coherence: Coherence,
    pub tdma_baseline: TdmaBaseline,
}

impl Default for RawSimulation {
    fn default() -> Self {
        RawSimulation {
            total_power: REFERENCE_TOTAL_POWER,
            modulation: Modulation::Qpsk,
            frames: DEFAULT_FRAMES,
            bits_per_frame: DEFAULT_BITS_PER_FRAME,
            rate_realizations: DEFAULT_RATE_REALIZATIONS,
            snr_grid: SnrGridSpec::Text(DEFAULT_SNR_GRID.to_string()),
            decoding_order: RawOrderMode::Distance,
            fading_coherence: Coherence::Block,
            tdma_baseline: TdmaBaseline::TimeShare,
        }
    }
}

/// Unvalidated config as read from text. Overrides are applied here before
/// [`RawConfig::validate`].
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub topology: RawTopology,
    pub simulation: RawSimulation,
}

impl Default for RawConfig {
    fn default() -> Self {
        RawConfig {
            experiment: Experiment::Ber,
            seed: DEFAULT_SEED,
            topology: RawTopology::default(),
            simulation: RawSimulation::default(),
        }
    }
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn set_order_mode(&mut self, mode: OrderMode) {
        self.simulation.decoding_order = match mode {
            OrderMode::Instantaneous => RawOrderMode::Instantaneous,
            OrderMode::Distance => RawOrderMode::Distance,
        };
    }

    /// Checks every invariant and reports all violations at once.
    pub fn validate(&self) -> Result<SimConfig, ConfigError> {
        let mut problems = Vec::new();
        let t = &self.topology;
        let s = &self.simulation;

        let topology = Topology::new(
            t.distances.clone(),
            t.cell_radius,
            t.path_loss_exponent,
            t.groups,
        )
        .map_err(|e| problems.push(format!("topology: {e}")))
        .ok();

        if !(s.total_power.is_finite() && s.total_power > 0.0) {
            problems.push(format!(
                "simulation.total_power: must be positive, got {}",
                s.total_power
            ));
        }
        if s.frames == 0 {
            problems.push("simulation.frames: must be at least 1".to_string());
        }
        if s.rate_realizations == 0 {
            problems.push("simulation.rate_realizations: must be at least 1".to_string());
        }
        let block = 2 * t.groups.max(1);
        if s.bits_per_frame == 0 || !s.bits_per_frame.is_multiple_of(block) {
            problems.push(format!(
                "simulation.bits_per_frame: must be a positive multiple of 2*groups = {block}, got {}",
                s.bits_per_frame
            ));
        }
        let snr_grid = match s.snr_grid.resolve() {
            Ok(g) if g.is_empty() => {
                problems.push("simulation.snr_grid: must not be empty".to_string());
                Vec::new()
            }
            Ok(g) if g.iter().any(|x| !x.is_finite()) => {
                problems.push("simulation.snr_grid: values must be finite".to_string());
                Vec::new()
            }
            Ok(g) => g,
            Err(e) => {
                problems.push(format!("simulation.snr_grid: {e}"));
                Vec::new()
            }
        };

        match topology {
            Some(topology) if problems.is_empty() => Ok(SimConfig {
                topology,
                total_power: s.total_power,
                modulation: s.modulation,
                frames: s.frames,
                bits_per_frame: s.bits_per_frame,
                rate_realizations: s.rate_realizations,
                snr_grid,
                seed: self.seed,
                order_mode: s.decoding_order.into(),
                coherence: s.fading_coherence,
                tdma_baseline: s.tdma_baseline,
                experiment: self.experiment,
            }),
            _ => Err(ConfigError::Invalid(problems)),
        }
    }
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub topology: Topology,
    pub total_power: f64,
    pub modulation: Modulation,
    pub frames: u64,
    /// Payload bits per user per frame.
    pub bits_per_frame: usize,
    pub rate_realizations: u64,
    /// Transmit SNR `P_T / sigma^2` in dB.
    pub snr_grid: Vec<f64>,
    pub seed: u64,
    pub order_mode: OrderMode,
    pub coherence: Coherence,
    pub tdma_baseline: TdmaBaseline,
    pub experiment: Experiment,
}

impl Default for SimConfig {
    fn default() -> Self {
        RawConfig::default()
            .validate()
            .expect("default config is valid")
    }
}

/// Parses and validates config text.
pub fn parse_config(text: &str) -> Result<SimConfig, ConfigError> {
    RawConfig::parse(text)?.validate()
}

pub fn read_raw_config(path: &Path) -> Result<RawConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    RawConfig::parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_reference_scenario() {
        let c = parse_config("").unwrap();
        assert_eq!(c.topology, Topology::reference());
        assert_eq!(c.total_power, 40.0);
        assert_eq!(c.frames, 500);
        assert_eq!(c.bits_per_frame, 6144);
        assert_eq!(c.seed, 42);
        assert_eq!(c.order_mode, OrderMode::Distance);
        assert_eq!(c.coherence, Coherence::Block);
        assert_eq!(c.experiment, Experiment::Ber);
        assert_eq!(c.snr_grid.first(), Some(&0.0));
        assert_eq!(c, SimConfig::default());
    }

    #[test]
    fn zero_frames_is_named() {
        let err = parse_config("[simulation]\nframes = 0\n").unwrap_err();
        assert!(err.to_string().contains("simulation.frames"), "{err}");
    }

    #[test]
    fn all_violations_reported() {
        let text = "[topology]\ndistances = [2.0, 1.0]\n[simulation]\nframes = 0\nbits_per_frame = 7\nsnr_grid = []\n";
        let ConfigError::Invalid(problems) = parse_config(text).unwrap_err() else {
            panic!("expected validation error");
        };
        assert_eq!(problems.len(), 4, "{problems:?}");
    }

    #[test]
    fn bits_must_fill_slot_groups() {
        let err = parse_config("[simulation]\nbits_per_frame = 6\n").unwrap_err();
        assert!(err.to_string().contains("bits_per_frame"));
        assert!(parse_config("[simulation]\nbits_per_frame = 8\n").is_ok());
    }

    #[test]
    fn snr_grid_forms() {
        assert_eq!(parse_snr_grid("0:2:30").unwrap().len(), 16);
        assert_eq!(parse_snr_grid("0:2:30").unwrap()[15], 30.0);
        assert_eq!(
            parse_snr_grid("30:-10:0").unwrap(),
            vec![30.0, 20.0, 10.0, 0.0]
        );
        assert_eq!(parse_snr_grid("0, 5,10").unwrap(), vec![0.0, 5.0, 10.0]);
        assert_eq!(parse_snr_grid("7").unwrap(), vec![7.0]);
        assert!(parse_snr_grid("0:0:10").is_err());
        assert!(parse_snr_grid("10:1:0").is_err());
        assert!(parse_snr_grid("a:b").is_err());
        let c = parse_config("[simulation]\nsnr_grid = [1.0, 2.5]\n").unwrap();
        assert_eq!(c.snr_grid, vec![1.0, 2.5]);
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = parse_config("seed = 1\n[simulation]\nframes = \"many\"\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3") || msg.contains("3:"), "{msg}");
        assert!(msg.contains("frames"), "{msg}");
        assert!(parse_config("bogus = 1\n")
            .unwrap_err()
            .to_string()
            .contains("bogus"));
    }

    #[test]
    fn enums_parse() {
        let c = parse_config(
            "experiment = \"ratio\"\n[simulation]\ndecoding_order = \"instantaneous\"\nfading_coherence = \"frame\"\ntdma_baseline = \"eq22_time_share\"\n",
        )
        .unwrap();
        assert_eq!(c.experiment, Experiment::Ratio);
        assert_eq!(c.order_mode, OrderMode::Instantaneous);
        assert_eq!(c.coherence, Coherence::Frame);
        assert!(parse_config("[simulation]\nmodulation = \"16qam\"\n").is_err());
    }
}
