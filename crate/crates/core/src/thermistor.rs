//! NTC thermistor divider model and linear calibration.
//!
//! Forward model: beta-equation NTC in a resistive divider read by an ADC.
//! Calibration: ordinary least squares line from ADC counts to degrees
//! Celsius over a stated temperature range, the way the printed patch is
//! calibrated against a reference bath from 25 to 50 degC.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const KELVIN_OFFSET: f64 = 273.15;
/// Reference temperature of the R25 rating, in kelvin.
pub const T25_K: f64 = 25.0 + KELVIN_OFFSET;
/// Smoothing window of the patch firmware, in samples.
pub const DEFAULT_MOVING_AVERAGE_WINDOW: usize = 60;

#[derive(Debug, Error, PartialEq)]
pub enum ThermistorError {
    #[error("temperature {0} degC is at or below absolute zero")]
    BelowAbsoluteZero(f64),
    #[error("parameter {name} invalid: {value}")]
    InvalidParam { name: &'static str, value: f64 },
    #[error("adc_bits {0} outside the supported 8..=16 range")]
    UnsupportedAdcBits(u8),
    #[error("calibration needs at least 2 distinct ADC counts, got {0}")]
    DegenerateFit(usize),
    #[error("calibration point {index}: temperature {value} not finite")]
    NonFinitePoint { index: usize, value: f64 },
    #[error("window must be at least 1 sample")]
    EmptyWindow,
    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },
}

/// Beta-model parameters of the sensing element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NtcParams {
    /// Rated resistance at 25 degC.
    pub r25_ohm: f64,
    /// Beta constant. The part is only rated "10 kOhm at 25 degC"; 3435 K
    /// is the usual value for that family and is configurable.
    pub beta_k: f64,
}

impl Default for NtcParams {
    fn default() -> Self {
        Self {
            r25_ohm: 10_000.0,
            beta_k: 3435.0,
        }
    }
}

impl NtcParams {
    pub fn validate(&self) -> Result<(), ThermistorError> {
        for (name, value) in [("r25_ohm", self.r25_ohm), ("beta_k", self.beta_k)] {
            if !value.is_finite() || value <= 0.0 {
                return Err(ThermistorError::InvalidParam { name, value });
            }
        }
        Ok(())
    }
}

/// Which leg of the divider the thermistor occupies. The ADC always reads
/// the voltage across the lower leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThermistorPosition {
    HighSide,
    LowSide,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DividerConfig {
    pub r_fixed_ohm: f64,
    /// Supply voltage. The read-out is ratiometric, so this cancels out of
    /// the count; it is kept for documentation and voltage queries.
    pub vcc_v: f64,
    /// ADC resolution in bits, 8 to 16.
    pub adc_bits: u8,
    pub thermistor_position: ThermistorPosition,
}

impl Default for DividerConfig {
    fn default() -> Self {
        Self {
            r_fixed_ohm: 10_000.0,
            vcc_v: 3.3,
            adc_bits: 10,
            thermistor_position: ThermistorPosition::LowSide,
        }
    }
}

impl DividerConfig {
    pub fn validate(&self) -> Result<(), ThermistorError> {
        for (name, value) in [("r_fixed_ohm", self.r_fixed_ohm), ("vcc_v", self.vcc_v)] {
            if !value.is_finite() || value <= 0.0 {
                return Err(ThermistorError::InvalidParam { name, value });
            }
        }
        if !(8..=16).contains(&self.adc_bits) {
            return Err(ThermistorError::UnsupportedAdcBits(self.adc_bits));
        }
        Ok(())
    }

    pub fn full_scale(&self) -> u32 {
        (1u32 << self.adc_bits) - 1
    }

    /// Divider balanced for a measurement range: the fixed resistor equals
    /// the NTC resistance at the range midpoint, which centers the ADC
    /// ratio at one half and keeps the count-to-temperature response close
    /// to linear across the whole range. This is the usual way the fixed
    /// leg is picked for a calibrated span.
    pub fn balanced_for_range(
        ntc: &NtcParams,
        low_c: f64,
        high_c: f64,
    ) -> Result<Self, ThermistorError> {
        if !low_c.is_finite() || !high_c.is_finite() || low_c >= high_c {
            return Err(ThermistorError::InvalidParam {
                name: "range",
                value: low_c,
            });
        }
        let mid = 0.5 * (low_c + high_c);
        Ok(Self {
            r_fixed_ohm: ntc_resistance(mid, ntc)?,
            ..Self::default()
        })
    }
}

/// Beta equation: `R = R25 * exp(B * (1/T - 1/T25))` with `T` in kelvin.
pub fn ntc_resistance(temp_c: f64, params: &NtcParams) -> Result<f64, ThermistorError> {
    params.validate()?;
    if !temp_c.is_finite() || temp_c <= -KELVIN_OFFSET {
        return Err(ThermistorError::BelowAbsoluteZero(temp_c));
    }
    let t_k = temp_c + KELVIN_OFFSET;
    Ok(params.r25_ohm * (params.beta_k * (1.0 / t_k - 1.0 / T25_K)).exp())
}

/// Ideal ADC count for a temperature: divider ratio times full scale,
/// rounded half up and clamped to the converter range.
pub fn adc_from_temperature(
    temp_c: f64,
    ntc: &NtcParams,
    divider: &DividerConfig,
) -> Result<u32, ThermistorError> {
    divider.validate()?;
    let r_ntc = ntc_resistance(temp_c, ntc)?;
    let ratio = match divider.thermistor_position {
        ThermistorPosition::LowSide => r_ntc / (r_ntc + divider.r_fixed_ohm),
        ThermistorPosition::HighSide => divider.r_fixed_ohm / (r_ntc + divider.r_fixed_ohm),
    };
    let full_scale = divider.full_scale() as f64;
    let count = (ratio * full_scale).round();
    Ok(count.clamp(0.0, full_scale) as u32)
}

/// Linear count-to-temperature calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationCurve {
    pub slope_c_per_count: f64,
    pub intercept_c: f64,
    /// Temperature span of the calibration data, degrees Celsius.
    pub fit_range_c: (f64, f64),
    pub residual_rms_c: f64,
}

/// A converted temperature; `extrapolated` flags values outside the
/// calibrated span.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperatureReading {
    pub temp_c: f64,
    pub extrapolated: bool,
}

/// Ordinary least squares fit `temp = slope * count + intercept` over
/// `(adc_count, true_temp_c)` pairs.
pub fn fit_linear_calibration(
    points: &[(u32, f64)],
) -> Result<CalibrationCurve, ThermistorError> {
    let distinct = {
        let mut counts: Vec<u32> = points.iter().map(|p| p.0).collect();
        counts.sort_unstable();
        counts.dedup();
        counts.len()
    };
    if distinct < 2 {
        return Err(ThermistorError::DegenerateFit(distinct));
    }
    for (index, &(_, t)) in points.iter().enumerate() {
        if !t.is_finite() {
            return Err(ThermistorError::NonFinitePoint { index, value: t });
        }
    }

    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0 as f64).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in points {
        let dx = x as f64 - mean_x;
        sxx += dx * dx;
        sxy += dx * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;

    let ss_res: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (slope * x as f64 + intercept);
            r * r
        })
        .sum();
    let residual_rms = (ss_res / n).sqrt();

    let mut low = f64::INFINITY;
    let mut high = f64::NEG_INFINITY;
    for &(_, t) in points {
        low = low.min(t);
        high = high.max(t);
    }

    Ok(CalibrationCurve {
        slope_c_per_count: slope,
        intercept_c: intercept,
        fit_range_c: (low, high),
        residual_rms_c: residual_rms,
    })
}

/// Apply a calibration curve to a raw count.
pub fn temperature_from_adc(count: u32, curve: &CalibrationCurve) -> TemperatureReading {
    let temp_c = curve.slope_c_per_count * count as f64 + curve.intercept_c;
    let (low, high) = curve.fit_range_c;
    TemperatureReading {
        temp_c,
        extrapolated: !(low..=high).contains(&temp_c),
    }
}

/// Causal trailing mean: output `i` averages samples
/// `max(0, i - window + 1) ..= i`. The warm-up prefix averages whatever is
/// available, and the output has the same length as the input.
pub fn moving_average(signal: &[f64], window: usize) -> Result<Vec<f64>, ThermistorError> {
    if window == 0 {
        return Err(ThermistorError::EmptyWindow);
    }
    for (index, v) in signal.iter().enumerate() {
        if !v.is_finite() {
            return Err(ThermistorError::NonFiniteSample { index });
        }
    }
    // Sums are re-accumulated per index, left to right, so results match a
    // windowed reference computation bit for bit with no running-sum drift.
    let mut out = Vec::with_capacity(signal.len());
    for i in 0..signal.len() {
        let start = (i + 1).saturating_sub(window);
        let mut sum = 0.0;
        for &v in &signal[start..=i] {
            sum += v;
        }
        out.push(sum / (i - start + 1) as f64);
    }
    Ok(out)
}

/// Window size covering `duration_s` at `sample_rate_hz`, at least one
/// sample. At the patch's 0.2 Hz logging rate a 60 second window is 12
/// samples, while the firmware's documented filter length is 60 samples;
/// both conventions are expressible through this helper.
pub fn window_from_duration(duration_s: f64, sample_rate_hz: f64) -> Result<usize, ThermistorError> {
    for (name, value) in [("duration_s", duration_s), ("sample_rate_hz", sample_rate_hz)] {
        if !value.is_finite() || value <= 0.0 {
            return Err(ThermistorError::InvalidParam { name, value });
        }
    }
    Ok(((duration_s * sample_rate_hz).round() as usize).max(1))
}
