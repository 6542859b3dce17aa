//! Run configuration: one JSON document with a block per module.
//!
//! Every block is optional and defaults to the documented values, so `{}`
//! is a valid config. Unknown keys anywhere in the document are rejected
//! with the JSON path of the offending key.

use std::env;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use softcircuit_core::biosignal::{self, RPeakConfig};
use softcircuit_core::coldchain::ColdChainConfig;
use softcircuit_core::electromech::{
    occupancy_from_ag_weight, DamageModelParams, TraceGeometry, DEFAULT_FAILURE_THRESHOLD,
};
use softcircuit_core::recycle::InkFormulation;
use softcircuit_core::thermistor::{DividerConfig, NtcParams, DEFAULT_MOVING_AVERAGE_WINDOW};

use crate::CliError;

/// Environment variable that overrides the config seed.
pub const SEED_ENV_VAR: &str = "SOFTCIRCUIT_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Base seed for every randomized operation.
    pub seed: u64,
    /// Directory for output artifacts; `--out` overrides it.
    pub out_dir: PathBuf,
    pub electromech: ElectromechBlock,
    pub coldchain: ColdChainConfig,
    pub thermistor: ThermistorBlock,
    pub biosignal: BiosignalBlock,
    pub recycle: RecycleBlock,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            out_dir: PathBuf::from("out"),
            electromech: ElectromechBlock::default(),
            coldchain: ColdChainConfig::default(),
            thermistor: ThermistorBlock::default(),
            biosignal: BiosignalBlock::default(),
            recycle: RecycleBlock::default(),
        }
    }
}

impl RunConfig {
    /// Validate every block with its own module's rules.
    pub fn validate(&self) -> Result<(), CliError> {
        self.electromech.validate()?;
        self.coldchain
            .validate()
            .map_err(|e| CliError::Validation(format!("coldchain: {e}")))?;
        self.thermistor.validate()?;
        self.biosignal.validate()?;
        self.recycle
            .formulation
            .validate()
            .map_err(|e| CliError::Validation(format!("recycle.formulation: {e}")))?;
        Ok(())
    }
}

/// Lattice simulation settings for the `trace` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ElectromechBlock {
    pub rows: usize,
    pub cols: usize,
    /// Direct bond occupancy; mutually exclusive with `ag_wt_fraction`.
    pub occupancy: Option<f64>,
    /// Dry silver weight fraction, mapped to occupancy. When neither field
    /// is set the reference loading of 0.8918 applies.
    pub ag_wt_fraction: Option<f64>,
    pub damage: DamageModelParams,
    pub seeds: Vec<u64>,
    pub strain_max: f64,
    pub strain_steps: usize,
    pub failure_threshold: f64,
    pub geometry: TraceGeometry,
}

/// Reference dry silver weight fraction used when no loading is configured.
pub const DEFAULT_AG_WT_FRACTION: f64 = 0.8918;

impl Default for ElectromechBlock {
    fn default() -> Self {
        Self {
            rows: 32,
            cols: 32,
            occupancy: None,
            ag_wt_fraction: None,
            damage: DamageModelParams::ag_wpu(),
            seeds: vec![0],
            strain_max: 0.6,
            strain_steps: 120,
            failure_threshold: DEFAULT_FAILURE_THRESHOLD,
            geometry: TraceGeometry::reference_trace(),
        }
    }
}

impl ElectromechBlock {
    /// The bond occupancy this block asks for.
    pub fn resolved_occupancy(&self) -> Result<f64, CliError> {
        match (self.occupancy, self.ag_wt_fraction) {
            (Some(_), Some(_)) => Err(CliError::Validation(
                "electromech: set either occupancy or ag_wt_fraction, not both".into(),
            )),
            (Some(p), None) => {
                if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                    return Err(CliError::Validation(format!(
                        "electromech.occupancy: {p} is not in [0, 1]"
                    )));
                }
                Ok(p)
            }
            (None, fraction) => {
                occupancy_from_ag_weight(fraction.unwrap_or(DEFAULT_AG_WT_FRACTION))
                    .map_err(|e| CliError::Validation(format!("electromech.ag_wt_fraction: {e}")))
            }
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.rows < 2 || self.cols < 2 {
            return Err(CliError::Validation(format!(
                "electromech: lattice {}x{} is degenerate, need at least 2x2",
                self.rows, self.cols
            )));
        }
        self.resolved_occupancy()?;
        self.damage
            .validate()
            .map_err(|e| CliError::Validation(format!("electromech.damage: {e}")))?;
        if self.seeds.is_empty() {
            return Err(CliError::Validation(
                "electromech.seeds: at least one seed required".into(),
            ));
        }
        if !self.strain_max.is_finite() || self.strain_max <= 0.0 {
            return Err(CliError::Validation(format!(
                "electromech.strain_max: {} must be positive",
                self.strain_max
            )));
        }
        if self.strain_steps == 0 {
            return Err(CliError::Validation(
                "electromech.strain_steps: must be at least 1".into(),
            ));
        }
        if !self.failure_threshold.is_finite() || self.failure_threshold <= 1.0 {
            return Err(CliError::Validation(format!(
                "electromech.failure_threshold: {} must exceed 1",
                self.failure_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThermistorBlock {
    pub ntc: NtcParams,
    pub divider: DividerConfig,
    pub moving_average_window: usize,
}

impl Default for ThermistorBlock {
    fn default() -> Self {
        Self {
            ntc: NtcParams::default(),
            divider: DividerConfig::default(),
            moving_average_window: DEFAULT_MOVING_AVERAGE_WINDOW,
        }
    }
}

impl ThermistorBlock {
    pub fn validate(&self) -> Result<(), CliError> {
        self.ntc
            .validate()
            .map_err(|e| CliError::Validation(format!("thermistor.ntc: {e}")))?;
        self.divider
            .validate()
            .map_err(|e| CliError::Validation(format!("thermistor.divider: {e}")))?;
        if self.moving_average_window == 0 {
            return Err(CliError::Validation(
                "thermistor.moving_average_window: must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BiosignalBlock {
    pub sample_rate_hz: f64,
    pub gain: f64,
    pub notch_hz: f64,
    pub notch_q: f64,
    pub ecg_band_hz: (f64, f64),
    pub emg_band_hz: (f64, f64),
    pub ecg_envelope_window: usize,
    pub emg_envelope_window: usize,
    pub rpeak: RPeakConfig,
}

impl Default for BiosignalBlock {
    fn default() -> Self {
        Self {
            sample_rate_hz: biosignal::DEFAULT_SAMPLE_RATE_HZ,
            gain: biosignal::DEFAULT_GAIN,
            notch_hz: biosignal::MAINS_HZ,
            notch_q: biosignal::DEFAULT_NOTCH_Q,
            ecg_band_hz: biosignal::ECG_BAND_HZ,
            emg_band_hz: biosignal::EMG_BAND_HZ,
            ecg_envelope_window: biosignal::ECG_ENVELOPE_WINDOW,
            emg_envelope_window: biosignal::EMG_ENVELOPE_WINDOW,
            rpeak: RPeakConfig::default(),
        }
    }
}

impl BiosignalBlock {
    /// Validate by designing every configured filter; the filter module
    /// owns the frequency rules.
    pub fn validate(&self) -> Result<(), CliError> {
        let err = |e| CliError::Validation(format!("biosignal: {e}"));
        biosignal::design_filter(
            &biosignal::FilterSpec::Notch {
                f_hz: self.notch_hz,
                q: self.notch_q,
            },
            self.sample_rate_hz,
        )
        .map_err(err)?;
        biosignal::design_filter(
            &biosignal::FilterSpec::Bandpass {
                f_low_hz: self.ecg_band_hz.0,
                f_high_hz: self.ecg_band_hz.1,
            },
            self.sample_rate_hz,
        )
        .map_err(err)?;
        biosignal::design_filter(
            &biosignal::FilterSpec::Bandpass {
                f_low_hz: self.emg_band_hz.0,
                f_high_hz: self.emg_band_hz.1,
            },
            self.sample_rate_hz,
        )
        .map_err(err)?;
        if self.ecg_envelope_window == 0 || self.emg_envelope_window == 0 {
            return Err(CliError::Validation(
                "biosignal: envelope windows must be at least 1".into(),
            ));
        }
        self.rpeak
            .validate()
            .map_err(|e| CliError::Validation(format!("biosignal.rpeak: {e}")))?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RecycleBlock {
    pub formulation: FormulationDefault,
}

/// `InkFormulation` with the reference silver recipe as its default, so an
/// absent `recycle` block still describes a usable ink.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FormulationDefault(pub InkFormulation);

impl Default for FormulationDefault {
    fn default() -> Self {
        Self(InkFormulation::reference_ag_wpu())
    }
}

impl RecycleBlock {
    pub fn formulation(&self) -> &InkFormulation {
        &self.formulation.0
    }
}

impl std::ops::Deref for FormulationDefault {
    type Target = InkFormulation;
    fn deref(&self) -> &InkFormulation {
        &self.0
    }
}

/// Parse and validate a config file. Missing or unreadable files are I/O
/// errors; schema violations report the JSON path of the first offender.
pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let config: RunConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        CliError::Validation(format!(
            "config {}: {} (at {})",
            path.display(),
            e.inner(),
            e.path()
        ))
    })?;
    config.validate()?;
    Ok(config)
}

/// Final settings for one invocation: config file, then `SOFTCIRCUIT_SEED`,
/// then `--out`, each overriding the previous layer.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub seed: u64,
    pub out_dir: PathBuf,
}

pub fn resolve(
    config_path: Option<&Path>,
    out_override: Option<&Path>,
) -> Result<Resolved, CliError> {
    let config = match config_path {
        Some(path) => parse_config(path)?,
        None => RunConfig::default(),
    };
    let seed = match env::var(SEED_ENV_VAR) {
        Ok(text) => text.parse::<u64>().map_err(|_| {
            CliError::Validation(format!(
                "{SEED_ENV_VAR}: `{text}` is not an unsigned 64-bit integer"
            ))
        })?,
        Err(_) => config.seed,
    };
    let out_dir = out_override
        .map(Path::to_path_buf)
        .unwrap_or_else(|| config.out_dir.clone());
    Ok(Resolved {
        config,
        seed,
        out_dir,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_str(text: &str) -> Result<RunConfig, CliError> {
        let dir = std::env::temp_dir().join("softcircuit-config-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!("cfg-{:x}.json", {
            use std::hash::{Hash, Hasher};
            let mut h = std::collections::hash_map::DefaultHasher::new();
            text.hash(&mut h);
            h.finish()
        }));
        std::fs::write(&path, text).unwrap();
        parse_config(&path)
    }

    #[test]
    fn empty_object_gives_defaults() {
        let config = parse_str("{}").unwrap();
        assert_eq!(config, RunConfig::default());
        assert_eq!(config.coldchain.threshold_c, 5.0);
        assert_eq!(config.biosignal.sample_rate_hz, 250.0);
        assert_eq!(config.electromech.rows, 32);
    }

    #[test]
    fn unknown_key_is_named_with_path() {
        let err = parse_str(r#"{"coldchain": {"treshold_c": 4.0}}"#).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("treshold_c"), "{text}");
        assert!(text.contains("coldchain"), "{text}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn reserialization_round_trips() {
        let config = parse_str(r#"{"seed": 7, "electromech": {"rows": 8, "cols": 9}}"#).unwrap();
        let json = serde_json::to_string(&config).unwrap();
        let again: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(config, again);
    }

    #[test]
    fn occupancy_and_fraction_are_mutually_exclusive() {
        let err = parse_str(
            r#"{"electromech": {"occupancy": 0.5, "ag_wt_fraction": 0.9}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("not both"));
    }

    #[test]
    fn default_occupancy_is_reference_loading() {
        let block = ElectromechBlock::default();
        let p = block.resolved_occupancy().unwrap();
        assert!((p - 0.7672).abs() < 1e-12);
    }

    #[test]
    fn bad_module_value_is_rejected() {
        let err = parse_str(r#"{"coldchain": {"latch_duration_s": 0}}"#).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("latch_duration_s"));
    }

    #[test]
    fn missing_config_file_is_io_error() {
        let err = parse_config(Path::new("/nonexistent/config.json")).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
