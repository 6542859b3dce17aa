//! Smart-label cold-chain monitor.
//!
//! A label watches its storage temperature and latches a permanent alarm
//! once the temperature stays strictly above the threshold for a full
//! configured duration without interruption. A latched label never returns
//! to safe, matching the printed indicator that keeps its red LED on even
//! after the package cools back down.

mod telemetry;

pub use telemetry::{
    decode_telemetry, encode_telemetry, format_record, parse_record, TELEMETRY_VERSION_LINE,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ColdChainError {
    #[error("sample epoch {got} not after previous epoch {last}")]
    NonMonotonicTimestamp { last: u64, got: u64 },
    #[error("temperature {0} is not finite")]
    NonFiniteTemperature(f64),
    #[error("config field {name} invalid: {value}")]
    InvalidConfig { name: &'static str, value: f64 },
    #[error("sample {index}: {source}")]
    AtSample {
        index: usize,
        #[source]
        source: Box<ColdChainError>,
    },
    #[error("line {line}: expected version header `{expected}`")]
    UnknownVersion { line: usize, expected: &'static str },
    #[error("line {line}: expected `status=SAFE` or `status=UNSAFE`")]
    MalformedStatus { line: usize },
    #[error("line {line}: malformed record `{content}`")]
    MalformedRecord { line: usize, content: String },
    #[error("line {line}: epoch {got} not after previous epoch {last}")]
    NonMonotonicEpoch { line: usize, last: u64, got: u64 },
    #[error("payload is not valid UTF-8")]
    NotUtf8,
}

/// One temperature reading. The temperature is held as integer milli-degrees
/// Celsius, the same resolution the wire format uses, so a decoded sample
/// reproduces the encoded one exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemperatureSample {
    pub epoch_s: u64,
    pub temp_milli_c: i64,
}

impl TemperatureSample {
    /// Build from a temperature in degrees Celsius, rounded to the nearest
    /// milli-degree.
    pub fn new(epoch_s: u64, temp_c: f64) -> Result<Self, ColdChainError> {
        if !temp_c.is_finite() {
            return Err(ColdChainError::NonFiniteTemperature(temp_c));
        }
        Ok(Self {
            epoch_s,
            temp_milli_c: (temp_c * 1000.0).round() as i64,
        })
    }

    pub fn from_milli(epoch_s: u64, temp_milli_c: i64) -> Self {
        Self {
            epoch_s,
            temp_milli_c,
        }
    }

    pub fn temp_c(&self) -> f64 {
        self.temp_milli_c as f64 / 1000.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ColdChainConfig {
    /// Safe-storage ceiling. A sample is an excursion only when strictly
    /// above this value; a reading of exactly 5.000 degC is safe.
    pub threshold_c: f64,
    /// Contiguous excursion time that latches the alarm.
    pub latch_duration_s: u64,
    /// Largest sample gap treated as continuous coverage. A longer gap
    /// breaks an excursion only when the sample after the gap is back at or
    /// below the threshold; a still-hot sample after a gap conservatively
    /// counts the whole gap as excursion time.
    pub max_gap_s: u64,
}

impl Default for ColdChainConfig {
    fn default() -> Self {
        Self {
            threshold_c: 5.0,
            latch_duration_s: 3600,
            max_gap_s: 600,
        }
    }
}

impl ColdChainConfig {
    pub fn validate(&self) -> Result<(), ColdChainError> {
        if !self.threshold_c.is_finite() {
            return Err(ColdChainError::InvalidConfig {
                name: "threshold_c",
                value: self.threshold_c,
            });
        }
        if self.latch_duration_s == 0 {
            return Err(ColdChainError::InvalidConfig {
                name: "latch_duration_s",
                value: 0.0,
            });
        }
        if self.max_gap_s == 0 {
            return Err(ColdChainError::InvalidConfig {
                name: "max_gap_s",
                value: 0.0,
            });
        }
        Ok(())
    }

    /// Milli-degree form of the threshold used for exact comparisons.
    pub(crate) fn threshold_milli_c(&self) -> i64 {
        (self.threshold_c * 1000.0).round() as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelStatus {
    Safe,
    UnsafeLatched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedOutputs {
    pub green: bool,
    pub red: bool,
}

/// Monitor state. Snapshots are immutable; [`update`] returns a new state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColdChainState {
    pub status: LabelStatus,
    /// Epoch of the first sample of the current contiguous excursion.
    /// Present only while the label is still safe and the latest samples
    /// run strictly above the threshold.
    pub excursion_start: Option<u64>,
    pub last_sample: Option<TemperatureSample>,
    pub history: Vec<TemperatureSample>,
}

impl ColdChainState {
    pub fn new() -> Self {
        Self {
            status: LabelStatus::Safe,
            excursion_start: None,
            last_sample: None,
            history: Vec::new(),
        }
    }
}

impl Default for ColdChainState {
    fn default() -> Self {
        Self::new()
    }
}

/// Feed one sample into the monitor.
///
/// Excursion time is measured between the first and latest sample of a
/// contiguous strictly-above-threshold run; the alarm latches at the first
/// sample where that span reaches `latch_duration_s`, and never clears.
pub fn update(
    state: &ColdChainState,
    sample: TemperatureSample,
    config: &ColdChainConfig,
) -> Result<ColdChainState, ColdChainError> {
    config.validate()?;
    let mut next = state.clone();
    advance(&mut next, sample, config)?;
    Ok(next)
}

/// In-place transition shared by [`update`] and [`run_trace_from`]. Leaves
/// the state untouched on error; the monotonicity check runs before any
/// mutation.
fn advance(
    state: &mut ColdChainState,
    sample: TemperatureSample,
    config: &ColdChainConfig,
) -> Result<(), ColdChainError> {
    if let Some(last) = state.last_sample {
        if sample.epoch_s <= last.epoch_s {
            return Err(ColdChainError::NonMonotonicTimestamp {
                last: last.epoch_s,
                got: sample.epoch_s,
            });
        }
    }

    state.history.push(sample);
    state.last_sample = Some(sample);

    if state.status == LabelStatus::UnsafeLatched {
        return Ok(());
    }

    let is_excursion = sample.temp_milli_c > config.threshold_milli_c();
    if is_excursion {
        let start = state.excursion_start.unwrap_or(sample.epoch_s);
        if sample.epoch_s - start >= config.latch_duration_s {
            state.status = LabelStatus::UnsafeLatched;
            state.excursion_start = None;
        } else {
            state.excursion_start = Some(start);
        }
    } else {
        state.excursion_start = None;
    }
    Ok(())
}

pub fn led_outputs(state: &ColdChainState) -> LedOutputs {
    match state.status {
        LabelStatus::Safe => LedOutputs {
            green: true,
            red: false,
        },
        LabelStatus::UnsafeLatched => LedOutputs {
            green: false,
            red: true,
        },
    }
}

/// Final state plus the status after each sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub final_state: ColdChainState,
    pub timeline: Vec<LabelStatus>,
}

/// Fold a whole sample stream through [`update`].
pub fn run_trace(
    samples: &[TemperatureSample],
    config: &ColdChainConfig,
) -> Result<RunTrace, ColdChainError> {
    run_trace_from(ColdChainState::new(), samples, config)
}

/// Fold a sample stream starting from an existing state.
pub fn run_trace_from(
    initial: ColdChainState,
    samples: &[TemperatureSample],
    config: &ColdChainConfig,
) -> Result<RunTrace, ColdChainError> {
    config.validate()?;
    let mut state = initial;
    let mut timeline = Vec::with_capacity(samples.len());
    for (index, &sample) in samples.iter().enumerate() {
        advance(&mut state, sample, config).map_err(|source| ColdChainError::AtSample {
            index,
            source: Box::new(source),
        })?;
        timeline.push(state.status);
    }
    Ok(RunTrace {
        final_state: state,
        timeline,
    })
}
