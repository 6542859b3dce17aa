//! Causal trailing-window RMS envelope.

use serde::{Deserialize, Serialize};

use super::BiosignalError;

/// RMS amplitude track of a signal; same length as the source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmsEnvelope {
    pub values: Vec<f64>,
    pub window_samples: usize,
}

/// Trailing-window RMS: output `i` is the root mean square of samples
/// `max(0, i - window + 1) ..= i`. The warm-up prefix uses whatever is
/// available.
pub fn rms_envelope(signal: &[f64], window_samples: usize) -> Result<RmsEnvelope, BiosignalError> {
    if window_samples == 0 {
        return Err(BiosignalError::EmptyWindow);
    }
    if let Some(index) = signal.iter().position(|v| !v.is_finite()) {
        return Err(BiosignalError::NonFiniteSample { index });
    }
    // Per-index windowed sums, left to right, so results match a windowed
    // reference computation bit for bit with no running-sum drift.
    let mut values = Vec::with_capacity(signal.len());
    for i in 0..signal.len() {
        let start = (i + 1).saturating_sub(window_samples);
        let mut sum_sq = 0.0;
        for &v in &signal[start..=i] {
            sum_sq += v * v;
        }
        values.push((sum_sq / (i - start + 1) as f64).sqrt());
    }
    Ok(RmsEnvelope {
        values,
        window_samples,
    })
}
