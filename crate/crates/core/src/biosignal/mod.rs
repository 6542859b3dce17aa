//! Electrophysiology processing chain.
//!
//! Mains notch and Butterworth band selection, causal RMS envelopes,
//! R-peak and heart-rate extraction from ECG, and nearest-neighbor
//! classification of gesture envelopes by dynamic time warping or
//! Euclidean distance. All filtering is causal: the chain mirrors a
//! real-time acquisition path, not an offline zero-phase one.

mod dtw;
mod ecg;
mod envelope;
mod filter;

pub use dtw::{
    classify_nearest, dtw_distance, euclidean_distance, Assignment, Classification,
    DistanceMatrix, DistanceMetric, LabeledSequence,
};
pub use ecg::{detect_r_peaks, detect_r_peaks_with, EcgFeatures, RPeakConfig};
pub use envelope::{rms_envelope, RmsEnvelope};
pub use filter::{
    apply_filter, design_filter, magnitude_db, Biquad, FilterCascade, FilterSpec,
    DEFAULT_NOTCH_Q,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Acquisition defaults of the printed-electrode front end.
pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 250.0;
pub const DEFAULT_GAIN: f64 = 24.0;
/// ECG band edges in Hz.
pub const ECG_BAND_HZ: (f64, f64) = (5.0, 55.0);
/// EMG band edges in Hz.
pub const EMG_BAND_HZ: (f64, f64) = (2.0, 100.0);
/// Mains interference frequency in Hz.
pub const MAINS_HZ: f64 = 60.0;
/// Envelope windows used by the chain: short for ECG display, long for EMG
/// gesture features.
pub const ECG_ENVELOPE_WINDOW: usize = 50;
pub const EMG_ENVELOPE_WINDOW: usize = 250;

#[derive(Debug, Error, PartialEq)]
pub enum BiosignalError {
    #[error("sample_rate_hz must be positive and finite, got {0}")]
    InvalidSampleRate(f64),
    #[error("gain must be positive and finite, got {0}")]
    InvalidGain(f64),
    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },
    #[error("{name} frequency {f_hz} Hz outside (0, {nyquist_hz}) at {sample_rate_hz} Hz sampling")]
    FrequencyOutOfRange {
        name: &'static str,
        f_hz: f64,
        nyquist_hz: f64,
        sample_rate_hz: f64,
    },
    #[error("bandpass needs f_low < f_high, got {f_low_hz} >= {f_high_hz}")]
    BandEdgesOutOfOrder { f_low_hz: f64, f_high_hz: f64 },
    #[error("notch quality must be positive and finite, got {0}")]
    InvalidQ(f64),
    #[error("window must be at least 1 sample")]
    EmptyWindow,
    #[error("sequence must be non-empty")]
    EmptySequence,
    #[error("reference set must be non-empty")]
    EmptyReferenceSet,
    #[error("sequence `{label}` has no samples")]
    EmptyLabeledSequence { label: String },
    #[error("sequence `{label}` sample {index} is not finite")]
    NonFiniteLabeledSample { label: String, index: usize },
    #[error("detector parameter {name} invalid: {value}")]
    InvalidDetectorParam { name: &'static str, value: f64 },
}

/// A uniformly sampled biosignal with acquisition metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRecording")]
pub struct SignalRecording {
    samples: Vec<f64>,
    sample_rate_hz: f64,
    gain: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecording {
    samples: Vec<f64>,
    #[serde(default = "default_rate")]
    sample_rate_hz: f64,
    #[serde(default = "default_gain")]
    gain: f64,
}

fn default_rate() -> f64 {
    DEFAULT_SAMPLE_RATE_HZ
}

fn default_gain() -> f64 {
    DEFAULT_GAIN
}

impl TryFrom<RawRecording> for SignalRecording {
    type Error = BiosignalError;
    fn try_from(raw: RawRecording) -> Result<Self, Self::Error> {
        SignalRecording::new(raw.samples, raw.sample_rate_hz, raw.gain)
    }
}

impl SignalRecording {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64, gain: f64) -> Result<Self, BiosignalError> {
        if !sample_rate_hz.is_finite() || sample_rate_hz <= 0.0 {
            return Err(BiosignalError::InvalidSampleRate(sample_rate_hz));
        }
        if !gain.is_finite() || gain <= 0.0 {
            return Err(BiosignalError::InvalidGain(gain));
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(BiosignalError::NonFiniteSample { index });
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            gain,
        })
    }

    /// Recording at the front end's default 250 Hz rate and 24x gain.
    pub fn with_defaults(samples: Vec<f64>) -> Result<Self, BiosignalError> {
        Self::new(samples, DEFAULT_SAMPLE_RATE_HZ, DEFAULT_GAIN)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    /// Same metadata, new sample values.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self, BiosignalError> {
        Self::new(samples, self.sample_rate_hz, self.gain)
    }
}
