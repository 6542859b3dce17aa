//! R-peak detection and heart-rate features.

use serde::{Deserialize, Serialize};

use super::{BiosignalError, SignalRecording};

/// Detector settings. The threshold tracks a trailing rolling maximum so
/// the detector adapts to amplitude drift without a training pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RPeakConfig {
    /// Fraction of the rolling maximum a candidate must reach.
    pub threshold_fraction: f64,
    /// Length of the rolling-maximum window, seconds.
    pub rolling_window_s: f64,
    /// Minimum spacing between accepted peaks, seconds.
    pub refractory_s: f64,
}

impl Default for RPeakConfig {
    fn default() -> Self {
        Self {
            threshold_fraction: 0.6,
            rolling_window_s: 2.0,
            refractory_s: 0.2,
        }
    }
}

impl RPeakConfig {
    pub fn validate(&self) -> Result<(), BiosignalError> {
        let checks = [
            ("threshold_fraction", self.threshold_fraction),
            ("rolling_window_s", self.rolling_window_s),
            ("refractory_s", self.refractory_s),
        ];
        for (name, value) in checks {
            if !value.is_finite() || value <= 0.0 {
                return Err(BiosignalError::InvalidDetectorParam { name, value });
            }
        }
        if self.threshold_fraction >= 1.0 {
            return Err(BiosignalError::InvalidDetectorParam {
                name: "threshold_fraction",
                value: self.threshold_fraction,
            });
        }
        Ok(())
    }
}

/// Detected beat features. `heart_rate_bpm` is `None` when fewer than two
/// peaks were found (no RR interval exists); that outcome is a valid
/// result, not an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcgFeatures {
    pub r_peak_indices: Vec<usize>,
    pub rr_intervals_ms: Vec<f64>,
    pub heart_rate_bpm: Option<f64>,
}

impl EcgFeatures {
    pub fn sufficient_beats(&self) -> bool {
        self.heart_rate_bpm.is_some()
    }

    pub fn mean_rr_ms(&self) -> Option<f64> {
        if self.rr_intervals_ms.is_empty() {
            return None;
        }
        Some(self.rr_intervals_ms.iter().sum::<f64>() / self.rr_intervals_ms.len() as f64)
    }
}

/// Detect R peaks with the default adaptive threshold (0.6 of the rolling
/// 2 s maximum) and 200 ms refractory period.
pub fn detect_r_peaks(ecg: &SignalRecording) -> Result<EcgFeatures, BiosignalError> {
    detect_r_peaks_with(ecg, &RPeakConfig::default())
}

/// Detect R peaks. The input should already be band-filtered; candidates
/// are local maxima at or above `threshold_fraction` times the trailing
/// rolling maximum, and accepted peaks are separated by at least the
/// refractory period.
pub fn detect_r_peaks_with(
    ecg: &SignalRecording,
    config: &RPeakConfig,
) -> Result<EcgFeatures, BiosignalError> {
    config.validate()?;
    let fs = ecg.sample_rate_hz();
    let x = ecg.samples();
    let window = ((config.rolling_window_s * fs).round() as usize).max(1);
    let refractory = ((config.refractory_s * fs).round() as usize).max(1);

    let mut peaks: Vec<usize> = Vec::new();
    for i in 1..x.len().saturating_sub(1) {
        // Local maximum; a plateau keeps its first sample.
        if !(x[i] > x[i - 1] && x[i] >= x[i + 1]) {
            continue;
        }
        let start = (i + 1).saturating_sub(window);
        let rolling_max = x[start..=i].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if x[i] < config.threshold_fraction * rolling_max {
            continue;
        }
        if let Some(&last) = peaks.last() {
            if i - last < refractory {
                continue;
            }
        }
        peaks.push(i);
    }

    let ms_per_sample = 1000.0 / fs;
    let rr_intervals_ms: Vec<f64> = peaks
        .windows(2)
        .map(|w| (w[1] - w[0]) as f64 * ms_per_sample)
        .collect();
    let heart_rate_bpm = if rr_intervals_ms.is_empty() {
        None
    } else {
        let mean_rr = rr_intervals_ms.iter().sum::<f64>() / rr_intervals_ms.len() as f64;
        Some(60_000.0 / mean_rr)
    };

    Ok(EcgFeatures {
        r_peak_indices: peaks,
        rr_intervals_ms,
        heart_rate_bpm,
    })
}
