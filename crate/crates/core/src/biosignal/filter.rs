//! IIR filter design: second-order Butterworth sections via the bilinear
//! transform with frequency pre-warp, plus a standard biquad notch.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::BiosignalError;

pub const DEFAULT_NOTCH_Q: f64 = 30.0;
const BUTTERWORTH_Q: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// What to design. Each variant yields second-order sections; the bandpass
/// is the cascade of a 2nd-order highpass at the low edge and a 2nd-order
/// lowpass at the high edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FilterSpec {
    Notch {
        f_hz: f64,
        #[serde(default = "default_q")]
        q: f64,
    },
    Highpass {
        f_hz: f64,
    },
    Lowpass {
        f_hz: f64,
    },
    Bandpass {
        f_low_hz: f64,
        f_high_hz: f64,
    },
}

fn default_q() -> f64 {
    DEFAULT_NOTCH_Q
}

impl FilterSpec {
    /// 60 Hz mains notch at the default quality factor.
    pub fn mains_notch() -> Self {
        FilterSpec::Notch {
            f_hz: super::MAINS_HZ,
            q: DEFAULT_NOTCH_Q,
        }
    }

    /// ECG band selection, 5 to 55 Hz.
    pub fn ecg_band() -> Self {
        FilterSpec::Bandpass {
            f_low_hz: super::ECG_BAND_HZ.0,
            f_high_hz: super::ECG_BAND_HZ.1,
        }
    }

    /// EMG band selection, 2 to 100 Hz.
    pub fn emg_band() -> Self {
        FilterSpec::Bandpass {
            f_low_hz: super::EMG_BAND_HZ.0,
            f_high_hz: super::EMG_BAND_HZ.1,
        }
    }
}

/// One normalized second-order section: `a0` is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    /// Frequency response at `f_hz` for sampling rate `fs_hz`.
    pub fn response(&self, f_hz: f64, fs_hz: f64) -> Complex64 {
        let w = 2.0 * std::f64::consts::PI * f_hz / fs_hz;
        let z1 = Complex64::from_polar(1.0, -w);
        let z2 = Complex64::from_polar(1.0, -2.0 * w);
        (self.b0 + self.b1 * z1 + self.b2 * z2) / (Complex64::new(1.0, 0.0) + self.a1 * z1 + self.a2 * z2)
    }

    /// Both poles strictly inside the unit circle. For the quadratic
    /// `z^2 + a1 z + a2` this is the stability triangle `|a2| < 1` and
    /// `|a1| < 1 + a2`.
    pub fn is_stable(&self) -> bool {
        self.a2.abs() < 1.0 && self.a1.abs() < 1.0 + self.a2
    }
}

/// A cascade of second-order sections applied in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterCascade {
    pub sections: Vec<Biquad>,
    /// Sampling rate the sections were designed for.
    pub sample_rate_hz: f64,
}

impl FilterCascade {
    pub fn response(&self, f_hz: f64) -> Complex64 {
        self.sections
            .iter()
            .map(|s| s.response(f_hz, self.sample_rate_hz))
            .product()
    }

    pub fn magnitude_db(&self, f_hz: f64) -> f64 {
        20.0 * self.response(f_hz).norm().log10()
    }

    pub fn is_stable(&self) -> bool {
        self.sections.iter().all(Biquad::is_stable)
    }
}

/// Magnitude of a cascade at one frequency, in dB.
pub fn magnitude_db(cascade: &FilterCascade, f_hz: f64) -> f64 {
    cascade.magnitude_db(f_hz)
}

fn check_frequency(
    name: &'static str,
    f_hz: f64,
    sample_rate_hz: f64,
) -> Result<(), BiosignalError> {
    let nyquist_hz = sample_rate_hz / 2.0;
    if !f_hz.is_finite() || f_hz <= 0.0 || f_hz >= nyquist_hz {
        return Err(BiosignalError::FrequencyOutOfRange {
            name,
            f_hz,
            nyquist_hz,
            sample_rate_hz,
        });
    }
    Ok(())
}

/// Butterworth 2nd-order prototype mapped through the bilinear transform.
/// The pre-warp `K = tan(pi f_c / f_s)` places the half-power point exactly
/// at `f_c`.
fn butterworth_section(f_c: f64, fs: f64, highpass: bool) -> Biquad {
    let k = (std::f64::consts::PI * f_c / fs).tan();
    let k2 = k * k;
    let norm = 1.0 / (1.0 + k / BUTTERWORTH_Q + k2);
    let a1 = 2.0 * (k2 - 1.0) * norm;
    let a2 = (1.0 - k / BUTTERWORTH_Q + k2) * norm;
    if highpass {
        Biquad {
            b0: norm,
            b1: -2.0 * norm,
            b2: norm,
            a1,
            a2,
        }
    } else {
        Biquad {
            b0: k2 * norm,
            b1: 2.0 * k2 * norm,
            b2: k2 * norm,
            a1,
            a2,
        }
    }
}

/// Constrained biquad notch at `f0` with quality `q`: unit gain at DC and
/// Nyquist, zero on the unit circle at `f0`.
fn notch_section(f0: f64, q: f64, fs: f64) -> Biquad {
    let w0 = 2.0 * std::f64::consts::PI * f0 / fs;
    let alpha = w0.sin() / (2.0 * q);
    let cos_w0 = w0.cos();
    let a0 = 1.0 + alpha;
    Biquad {
        b0: 1.0 / a0,
        b1: -2.0 * cos_w0 / a0,
        b2: 1.0 / a0,
        a1: -2.0 * cos_w0 / a0,
        a2: (1.0 - alpha) / a0,
    }
}

/// Design the second-order-section cascade for `spec` at `sample_rate_hz`.
pub fn design_filter(spec: &FilterSpec, sample_rate_hz: f64) -> Result<FilterCascade, BiosignalError> {
    if !sample_rate_hz.is_finite() || sample_rate_hz <= 0.0 {
        return Err(BiosignalError::InvalidSampleRate(sample_rate_hz));
    }
    let sections = match *spec {
        FilterSpec::Notch { f_hz, q } => {
            check_frequency("notch", f_hz, sample_rate_hz)?;
            if !q.is_finite() || q <= 0.0 {
                return Err(BiosignalError::InvalidQ(q));
            }
            vec![notch_section(f_hz, q, sample_rate_hz)]
        }
        FilterSpec::Highpass { f_hz } => {
            check_frequency("highpass", f_hz, sample_rate_hz)?;
            vec![butterworth_section(f_hz, sample_rate_hz, true)]
        }
        FilterSpec::Lowpass { f_hz } => {
            check_frequency("lowpass", f_hz, sample_rate_hz)?;
            vec![butterworth_section(f_hz, sample_rate_hz, false)]
        }
        FilterSpec::Bandpass { f_low_hz, f_high_hz } => {
            check_frequency("bandpass low edge", f_low_hz, sample_rate_hz)?;
            check_frequency("bandpass high edge", f_high_hz, sample_rate_hz)?;
            if f_low_hz >= f_high_hz {
                return Err(BiosignalError::BandEdgesOutOfOrder { f_low_hz, f_high_hz });
            }
            vec![
                butterworth_section(f_low_hz, sample_rate_hz, true),
                butterworth_section(f_high_hz, sample_rate_hz, false),
            ]
        }
    };
    Ok(FilterCascade {
        sections,
        sample_rate_hz,
    })
}

/// Causal direct-form-II-transposed evaluation with zero initial state.
pub fn apply_filter(cascade: &FilterCascade, signal: &[f64]) -> Vec<f64> {
    let mut out = signal.to_vec();
    for s in &cascade.sections {
        let mut s1 = 0.0f64;
        let mut s2 = 0.0f64;
        for x in out.iter_mut() {
            let input = *x;
            let y = s.b0 * input + s1;
            s1 = s.b1 * input - s.a1 * y + s2;
            s2 = s.b2 * input - s.a2 * y;
            *x = y;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FS: f64 = 250.0;

    fn rms(x: &[f64]) -> f64 {
        (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
    }

    fn sine(f: f64, fs: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * f * i as f64 / fs).sin())
            .collect()
    }

    #[test]
    fn highpass_cutoff_sits_at_half_power() {
        for fc in [2.0, 5.0, 30.0, 75.0] {
            let c = design_filter(&FilterSpec::Highpass { f_hz: fc }, FS).unwrap();
            let db = c.magnitude_db(fc);
            assert!((db + 3.0103).abs() < 0.01, "fc {fc}: {db} dB");
        }
    }

    #[test]
    fn lowpass_cutoff_sits_at_half_power() {
        for fc in [10.0, 55.0, 100.0] {
            let c = design_filter(&FilterSpec::Lowpass { f_hz: fc }, FS).unwrap();
            let db = c.magnitude_db(fc);
            assert!((db + 3.0103).abs() < 0.01, "fc {fc}: {db} dB");
        }
    }

    #[test]
    fn lowpass_rolls_off_at_forty_db_per_decade() {
        let c = design_filter(&FilterSpec::Lowpass { f_hz: 2.0 }, 2000.0).unwrap();
        let d1 = c.magnitude_db(20.0);
        let d2 = c.magnitude_db(200.0);
        // Second order: about -40 dB per decade well above cutoff.
        assert!((d1 - d2 - 40.0).abs() < 1.5, "{d1} vs {d2}");
    }

    #[test]
    fn notch_kills_center_and_passes_edges() {
        let c = design_filter(&FilterSpec::mains_notch(), FS).unwrap();
        assert!(c.magnitude_db(60.0) <= -40.0, "{} dB", c.magnitude_db(60.0));
        assert!(c.magnitude_db(1e-6) >= -0.1);
        assert!(c.magnitude_db(124.999) >= -0.1);
        assert!(c.magnitude_db(50.0) >= -1.0);
        assert!(c.magnitude_db(70.0) >= -1.0);
    }

    #[test]
    fn bandpass_center_matches_analytic_product() {
        let c = design_filter(&FilterSpec::ecg_band(), FS).unwrap();
        let center = (5.0f64 * 55.0).sqrt();
        // Analytic 2nd-order Butterworth magnitudes of the two halves.
        let hp = 1.0 / (1.0 + (5.0 / center).powi(4)).sqrt();
        let lp = 1.0 / (1.0 + (center / 55.0).powi(4)).sqrt();
        let expected_db = 20.0 * (hp * lp).log10();
        let got_db = c.magnitude_db(center);
        assert!((got_db - expected_db).abs() < 0.5, "{got_db} vs {expected_db}");
    }

    #[test]
    fn all_band_presets_are_stable() {
        for spec in [
            FilterSpec::mains_notch(),
            FilterSpec::ecg_band(),
            FilterSpec::emg_band(),
            FilterSpec::Highpass { f_hz: 0.5 },
            FilterSpec::Lowpass { f_hz: 124.0 },
        ] {
            let c = design_filter(&spec, FS).unwrap();
            assert!(c.is_stable(), "{spec:?}");
        }
    }

    #[test]
    fn design_rejects_out_of_range_specs() {
        assert!(design_filter(&FilterSpec::Lowpass { f_hz: 125.0 }, FS).is_err());
        assert!(design_filter(&FilterSpec::Highpass { f_hz: 0.0 }, FS).is_err());
        assert!(design_filter(&FilterSpec::Notch { f_hz: 60.0, q: 0.0 }, FS).is_err());
        assert!(design_filter(
            &FilterSpec::Bandpass { f_low_hz: 55.0, f_high_hz: 5.0 },
            FS
        )
        .is_err());
        assert!(design_filter(&FilterSpec::Lowpass { f_hz: 10.0 }, 0.0).is_err());
    }

    #[test]
    fn zero_in_zero_out() {
        let c = design_filter(&FilterSpec::ecg_band(), FS).unwrap();
        let out = apply_filter(&c, &vec![0.0; 500]);
        assert!(out.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn identity_cascade_passes_impulse() {
        let identity = FilterCascade {
            sections: vec![Biquad { b0: 1.0, b1: 0.0, b2: 0.0, a1: 0.0, a2: 0.0 }],
            sample_rate_hz: FS,
        };
        let mut impulse = vec![0.0; 16];
        impulse[0] = 1.0;
        assert_eq!(apply_filter(&identity, &impulse), impulse);
    }

    #[test]
    fn filtering_is_linear() {
        let c = design_filter(&FilterSpec::ecg_band(), FS).unwrap();
        let x = sine(12.0, FS, 400);
        let y = sine(33.0, FS, 400);
        let combo: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 2.0 * a - 0.5 * b).collect();
        let direct = apply_filter(&c, &combo);
        let fx = apply_filter(&c, &x);
        let fy = apply_filter(&c, &y);
        for i in 0..combo.len() {
            let recomposed = 2.0 * fx[i] - 0.5 * fy[i];
            assert!((direct[i] - recomposed).abs() <= 1e-9 * recomposed.abs().max(1.0));
        }
    }

    #[test]
    fn notch_attenuates_mains_sine() {
        let c = design_filter(&FilterSpec::mains_notch(), FS).unwrap();
        let x = sine(60.0, FS, 250 * 5);
        let y = apply_filter(&c, &x);
        // Measure after 1 s so the transient has settled.
        let settled = &y[250..];
        let ratio = rms(settled) / rms(&x[250..]);
        assert!(ratio <= 0.01, "residual ratio {ratio}");
    }

    #[test]
    fn bandpass_passes_in_band_and_rejects_out_of_band() {
        let c = design_filter(&FilterSpec::ecg_band(), FS).unwrap();
        let inband = apply_filter(&c, &sine(20.0, FS, 2500));
        let low = apply_filter(&c, &sine(0.5, FS, 2500));
        let high = apply_filter(&c, &sine(110.0, FS, 2500));
        let r_in = rms(&inband[500..]);
        assert!(r_in > 0.6, "in-band rms {r_in}");
        assert!(rms(&low[500..]) < 0.1);
        assert!(rms(&high[500..]) < 0.1);
    }

    #[test]
    fn random_valid_specs_are_stable() {
        // Deterministic scan over the valid design space.
        for i in 1..60 {
            let f = i as f64 * 2.0;
            if f < FS / 2.0 {
                assert!(design_filter(&FilterSpec::Highpass { f_hz: f }, FS).unwrap().is_stable());
                assert!(design_filter(&FilterSpec::Lowpass { f_hz: f }, FS).unwrap().is_stable());
                assert!(design_filter(&FilterSpec::Notch { f_hz: f, q: 5.0 + i as f64 }, FS)
                    .unwrap()
                    .is_stable());
            }
        }
    }

    #[test]
    fn spec_serde_round_trip() {
        let spec = FilterSpec::Bandpass { f_low_hz: 5.0, f_high_hz: 55.0 };
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<FilterSpec>(&json).unwrap(), spec);
        let notch: FilterSpec = serde_json::from_str(r#"{"kind":"notch","f_hz":60.0}"#).unwrap();
        assert_eq!(notch, FilterSpec::Notch { f_hz: 60.0, q: 30.0 });
    }
}
