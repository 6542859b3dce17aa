//! Property tests for the DSP chain.

use proptest::prelude::*;
use softcircuit_core::biosignal::{
    design_filter, detect_r_peaks, dtw_distance, rms_envelope, FilterSpec, SignalRecording,
};
use softcircuit_core::thermistor::moving_average;

fn finite_signal(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, 1..max_len)
}

proptest! {
    #[test]
    fn designed_sections_are_always_stable(
        f_frac in 0.01f64..0.99,
        band_split in 0.05f64..0.95,
        q in 0.1f64..200.0,
        fs in 20.0f64..4000.0,
    ) {
        let nyquist = fs / 2.0;
        let f = f_frac * nyquist;
        let f_low = (f * band_split).max(1e-3 * nyquist);
        let specs = [
            FilterSpec::Lowpass { f_hz: f },
            FilterSpec::Highpass { f_hz: f },
            FilterSpec::Notch { f_hz: f, q },
            FilterSpec::Bandpass { f_low_hz: f_low, f_high_hz: f },
        ];
        for spec in specs {
            if let FilterSpec::Bandpass { f_low_hz, f_high_hz } = spec {
                if f_low_hz >= f_high_hz {
                    continue;
                }
            }
            let cascade = design_filter(&spec, fs).unwrap();
            prop_assert!(cascade.is_stable(), "{spec:?} at fs {fs}");
        }
    }

    #[test]
    fn moving_average_matches_brute_force(signal in finite_signal(300), window in 1usize..80) {
        let out = moving_average(&signal, window).unwrap();
        for i in 0..signal.len() {
            let start = (i + 1).saturating_sub(window);
            let mut sum = 0.0;
            for &v in &signal[start..=i] {
                sum += v;
            }
            let expected = sum / (i - start + 1) as f64;
            prop_assert_eq!(out[i], expected, "index {}", i);
        }
    }

    #[test]
    fn rms_envelope_matches_brute_force(signal in finite_signal(300), window in 1usize..80) {
        let env = rms_envelope(&signal, window).unwrap();
        for i in 0..signal.len() {
            let start = (i + 1).saturating_sub(window);
            let mut sum_sq = 0.0;
            for &v in &signal[start..=i] {
                sum_sq += v * v;
            }
            let expected = (sum_sq / (i - start + 1) as f64).sqrt();
            prop_assert_eq!(env.values[i], expected, "index {}", i);
        }
    }

    #[test]
    fn rms_dominates_moving_mean(signal in finite_signal(200), window in 1usize..60) {
        let env = rms_envelope(&signal, window).unwrap();
        let mean = moving_average(&signal, window).unwrap();
        for i in 0..signal.len() {
            prop_assert!(env.values[i] + 1e-9 >= mean[i].abs());
        }
    }

    #[test]
    fn dtw_is_symmetric_and_zero_on_self(
        a in finite_signal(60),
        b in finite_signal(60),
    ) {
        prop_assert_eq!(dtw_distance(&a, &a).unwrap(), 0.0);
        let ab = dtw_distance(&a, &b).unwrap();
        let ba = dtw_distance(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!(ab >= 0.0);
    }

    #[test]
    fn dtw_zero_implies_equal_after_collapsing_repeats(
        a in finite_signal(40),
        b in finite_signal(40),
    ) {
        // DTW is not a metric; its kernel is run-length equivalence, not
        // equality.
        let collapse = |v: &[f64]| {
            let mut out: Vec<f64> = Vec::new();
            for &x in v {
                if out.last() != Some(&x) {
                    out.push(x);
                }
            }
            out
        };
        let d = dtw_distance(&a, &b).unwrap();
        if d == 0.0 {
            prop_assert_eq!(collapse(&a), collapse(&b));
        }
        if collapse(&a) == collapse(&b) {
            prop_assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn heart_rate_matches_rr_identity(
        period_ms in 250usize..2000,
        beats in 3usize..12,
    ) {
        let fs = 1000.0;
        let mut samples = vec![0.0; period_ms * beats + period_ms / 2];
        for b in 0..beats {
            samples[period_ms / 2 + b * period_ms] = 1.0;
        }
        let ecg = SignalRecording::new(samples, fs, 24.0).unwrap();
        let f = detect_r_peaks(&ecg).unwrap();
        if let Some(hr) = f.heart_rate_bpm {
            let mean_rr =
                f.rr_intervals_ms.iter().sum::<f64>() / f.rr_intervals_ms.len() as f64;
            prop_assert!((hr - 60_000.0 / mean_rr).abs() < 1e-9);
        }
    }

    #[test]
    fn filtering_preserves_length(signal in finite_signal(400)) {
        let cascade = design_filter(&FilterSpec::ecg_band(), 250.0).unwrap();
        let out = softcircuit_core::biosignal::apply_filter(&cascade, &signal);
        prop_assert_eq!(out.len(), signal.len());
        prop_assert!(out.iter().all(|v| v.is_finite()));
    }
}
