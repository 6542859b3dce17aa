//! `dsp`: filtering, envelopes, ECG features, nearest-reference
//! classification.
//!
//! Every input is a `t_s,value` CSV validated against the configured
//! sample rate.

use std::path::{Path, PathBuf};

use softcircuit_core::biosignal::{
    apply_filter, classify_nearest, design_filter, detect_r_peaks_with, rms_envelope,
    DistanceMetric, FilterSpec, LabeledSequence, SignalRecording,
};

use crate::config::Resolved;
use crate::io::{self, fmt_f64};
use crate::{CliError, FilterArgs, FilterPreset, MetricArg};

pub const ASSIGNMENTS_HEADER: &str = "query,label,reference_index,distance";

fn spec_from_args(resolved: &Resolved, args: &FilterArgs) -> Result<FilterSpec, CliError> {
    let bio = &resolved.config.biosignal;
    match (args.preset, &args.spec) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "pass either --preset or --spec, not both".into(),
        )),
        (None, None) => Err(CliError::Usage(
            "one of --preset or --spec is required".into(),
        )),
        (Some(preset), None) => Ok(match preset {
            FilterPreset::Ecg => FilterSpec::Bandpass {
                f_low_hz: bio.ecg_band_hz.0,
                f_high_hz: bio.ecg_band_hz.1,
            },
            FilterPreset::Emg => FilterSpec::Bandpass {
                f_low_hz: bio.emg_band_hz.0,
                f_high_hz: bio.emg_band_hz.1,
            },
            FilterPreset::Notch => FilterSpec::Notch {
                f_hz: bio.notch_hz,
                q: bio.notch_q,
            },
        }),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            let mut de = serde_json::Deserializer::from_str(&text);
            serde_path_to_error::deserialize(&mut de).map_err(|e| {
                CliError::Validation(format!(
                    "spec {}: {} (at {})",
                    path.display(),
                    e.inner(),
                    e.path()
                ))
            })
        }
    }
}

pub fn filter(resolved: &Resolved, args: &FilterArgs) -> Result<(), CliError> {
    let bio = &resolved.config.biosignal;
    let spec = spec_from_args(resolved, args)?;
    let signal = io::read_signal_csv(&args.input, bio.sample_rate_hz)?;
    let cascade = design_filter(&spec, bio.sample_rate_hz)?;
    let filtered = apply_filter(&cascade, &signal.values);
    io::write_signal_csv(
        &resolved.out_dir.join("filtered.csv"),
        &signal.times_s,
        &filtered,
    )?;
    println!(
        "filtered {} samples through {} biquad section(s)",
        filtered.len(),
        cascade.sections.len()
    );
    Ok(())
}

pub fn envelope(
    resolved: &Resolved,
    input: &Path,
    window: Option<usize>,
) -> Result<(), CliError> {
    let bio = &resolved.config.biosignal;
    let window = window.unwrap_or(bio.ecg_envelope_window);
    let signal = io::read_signal_csv(input, bio.sample_rate_hz)?;
    let envelope = rms_envelope(&signal.values, window)?;
    io::write_signal_csv(
        &resolved.out_dir.join("envelope.csv"),
        &signal.times_s,
        &envelope.values,
    )?;
    println!(
        "rms envelope over {} samples, window {} samples",
        envelope.values.len(),
        envelope.window_samples
    );
    Ok(())
}

pub fn ecg(resolved: &Resolved, input: &Path) -> Result<(), CliError> {
    let bio = &resolved.config.biosignal;
    let signal = io::read_signal_csv(input, bio.sample_rate_hz)?;
    let notch = design_filter(
        &FilterSpec::Notch {
            f_hz: bio.notch_hz,
            q: bio.notch_q,
        },
        bio.sample_rate_hz,
    )?;
    let band = design_filter(
        &FilterSpec::Bandpass {
            f_low_hz: bio.ecg_band_hz.0,
            f_high_hz: bio.ecg_band_hz.1,
        },
        bio.sample_rate_hz,
    )?;
    let filtered = apply_filter(&band, &apply_filter(&notch, &signal.values));
    let recording = SignalRecording::new(filtered, bio.sample_rate_hz, bio.gain)?;
    let features = detect_r_peaks_with(&recording, &bio.rpeak)?;

    io::write_json(&resolved.out_dir.join("ecg_features.json"), &features)?;
    println!("r peaks: {}", features.r_peak_indices.len());
    match (features.heart_rate_bpm, features.mean_rr_ms()) {
        (Some(bpm), Some(rr)) => {
            println!("heart rate: {} bpm (mean rr {} ms)", fmt_f64(bpm), fmt_f64(rr));
        }
        _ => println!("heart rate: not enough beats"),
    }
    Ok(())
}

/// Load each CSV as a labeled sequence; the label is the file stem, so
/// several recordings of one class can share a label by sharing a stem.
fn load_sequences(paths: &[PathBuf], sample_rate_hz: f64) -> Result<Vec<LabeledSequence>, CliError> {
    paths
        .iter()
        .map(|path| {
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .filter(|s| !s.is_empty())
                .ok_or_else(|| {
                    CliError::Validation(format!(
                        "{}: cannot derive a label from the file name",
                        path.display()
                    ))
                })?;
            if stem.contains(',') || stem.contains('"') {
                return Err(CliError::Validation(format!(
                    "{}: label `{stem}` contains CSV delimiters",
                    path.display()
                )));
            }
            let signal = io::read_signal_csv(path, sample_rate_hz)?;
            Ok(LabeledSequence::new(stem, signal.values))
        })
        .collect()
}

pub fn classify(
    resolved: &Resolved,
    references: &[PathBuf],
    queries: &[PathBuf],
    metric: MetricArg,
) -> Result<(), CliError> {
    let rate = resolved.config.biosignal.sample_rate_hz;
    let reference_seqs = load_sequences(references, rate)?;
    let query_seqs = load_sequences(queries, rate)?;
    let metric = match metric {
        MetricArg::Dtw => DistanceMetric::Dtw,
        MetricArg::Euclidean => DistanceMetric::Euclidean,
    };
    let result = classify_nearest(&query_seqs, &reference_seqs, metric)?;

    let labels = &result.matrix.labels;
    let header = std::iter::once("label")
        .chain(labels.iter().map(String::as_str))
        .collect::<Vec<_>>()
        .join(",");
    let rows = labels.iter().zip(result.matrix.rows()).map(|(label, row)| {
        std::iter::once(label.clone())
            .chain(row.iter().map(|d| fmt_f64(*d)))
            .collect::<Vec<_>>()
            .join(",")
    });
    io::write_csv(&resolved.out_dir.join("distances.csv"), &header, rows)?;

    let assignment_rows = result.assignments.iter().map(|a| {
        format!(
            "{},{},{},{}",
            query_seqs[a.query_index].label,
            a.label,
            a.reference_index,
            fmt_f64(a.distance)
        )
    });
    io::write_csv(
        &resolved.out_dir.join("assignments.csv"),
        ASSIGNMENTS_HEADER,
        assignment_rows,
    )?;

    for a in &result.assignments {
        println!(
            "{} -> {} (distance {})",
            query_seqs[a.query_index].label,
            a.label,
            fmt_f64(a.distance)
        );
    }
    Ok(())
}
