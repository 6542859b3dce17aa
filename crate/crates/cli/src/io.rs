//! CSV reading and writing.
//!
//! Number formatting uses the shortest decimal form that parses back to
//! the same f64, so write-then-read is the identity for finite values.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use softcircuit_core::coldchain::TemperatureSample;

use crate::CliError;

/// Header of a time-series CSV.
pub const SIGNAL_HEADER: &str = "t_s,value";
/// Header of a cold-chain sample CSV.
pub const TEMPERATURE_HEADER: &str = "epoch_s,temp_c";
/// Header of a calibration-point CSV.
pub const POINTS_HEADER: &str = "adc_count,true_temp_c";
/// Header of a raw ADC count CSV.
pub const COUNTS_HEADER: &str = "adc_count";

/// Largest tolerated deviation of a timestamp from the ideal uniform grid,
/// as a fraction of elapsed time: a 1 ppm clock drift allowance.
pub const UNIFORMITY_DRIFT: f64 = 1e-6;

/// A uniformly sampled signal read from CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalCsv {
    pub times_s: Vec<f64>,
    pub values: Vec<f64>,
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

/// Data lines of a CSV after checking the exact header. Line numbers are
/// 1-based positions in the file, so the first data line is line 2.
fn data_lines<'t>(
    text: &'t str,
    path: &Path,
    header: &str,
) -> Result<Vec<(usize, &'t str)>, CliError> {
    let mut lines = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if index == 0 {
            if line.trim() != header {
                return Err(CliError::Validation(format!(
                    "{}: line 1: expected header `{header}`, found `{line}`",
                    path.display()
                )));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        lines.push((index + 1, line));
    }
    Ok(lines)
}

fn parse_f64(path: &Path, line_no: usize, field: &str, text: &str) -> Result<f64, CliError> {
    let value: f64 = text.trim().parse().map_err(|_| {
        CliError::Validation(format!(
            "{}: line {line_no}: field {field}: `{text}` is not a number",
            path.display()
        ))
    })?;
    if !value.is_finite() {
        return Err(CliError::Validation(format!(
            "{}: line {line_no}: field {field}: value is not finite",
            path.display()
        )));
    }
    Ok(value)
}

fn two_fields<'t>(path: &Path, line_no: usize, line: &'t str) -> Result<(&'t str, &'t str), CliError> {
    let mut parts = line.split(',');
    let a = parts.next();
    let b = parts.next();
    match (a, b, parts.next()) {
        (Some(a), Some(b), None) => Ok((a, b)),
        _ => Err(CliError::Validation(format!(
            "{}: line {line_no}: expected exactly two comma-separated fields",
            path.display()
        ))),
    }
}

/// Read a `t_s,value` series and validate that it is uniformly sampled at
/// `sample_rate_hz`: each timestamp may deviate from the ideal grid
/// `t0 + i/rate` by at most 1 ppm of elapsed time (plus 1 ns of decimal
/// parsing slop), so a single dropped sample is rejected.
pub fn read_signal_csv(path: &Path, sample_rate_hz: f64) -> Result<SignalCsv, CliError> {
    if !sample_rate_hz.is_finite() || sample_rate_hz <= 0.0 {
        return Err(CliError::Validation(format!(
            "sample rate {sample_rate_hz} must be positive"
        )));
    }
    let text = read_file(path)?;
    let lines = data_lines(&text, path, SIGNAL_HEADER)?;
    let mut times_s = Vec::with_capacity(lines.len());
    let mut values = Vec::with_capacity(lines.len());
    let dt = 1.0 / sample_rate_hz;
    for (line_no, line) in lines {
        let (t_text, v_text) = two_fields(path, line_no, line)?;
        let t = parse_f64(path, line_no, "t_s", t_text)?;
        let v = parse_f64(path, line_no, "value", v_text)?;
        if let Some(&last) = times_s.last() {
            if t <= last {
                return Err(CliError::Validation(format!(
                    "{}: line {line_no}: timestamp {t} not after previous {last}",
                    path.display()
                )));
            }
        }
        let index = times_s.len();
        if index > 0 {
            let elapsed = index as f64 * dt;
            let ideal = times_s[0] + elapsed;
            let tolerance = UNIFORMITY_DRIFT * elapsed + 1e-9;
            if (t - ideal).abs() > tolerance {
                return Err(CliError::Validation(format!(
                    "{}: line {line_no}: timestamp {t} deviates from the uniform \
                     {sample_rate_hz} Hz grid (expected {ideal}, tolerance {tolerance})",
                    path.display()
                )));
            }
        }
        times_s.push(t);
        values.push(v);
    }
    Ok(SignalCsv { times_s, values })
}

/// Read an `epoch_s,temp_c` stream. Epoch monotonicity is enforced here
/// with line numbers; gap handling is the state machine's job.
pub fn read_temperature_csv(path: &Path) -> Result<Vec<TemperatureSample>, CliError> {
    let text = read_file(path)?;
    let lines = data_lines(&text, path, TEMPERATURE_HEADER)?;
    let mut samples: Vec<TemperatureSample> = Vec::with_capacity(lines.len());
    for (line_no, line) in lines {
        let (epoch_text, temp_text) = two_fields(path, line_no, line)?;
        let epoch_s: u64 = epoch_text.trim().parse().map_err(|_| {
            CliError::Validation(format!(
                "{}: line {line_no}: field epoch_s: `{epoch_text}` is not a non-negative integer",
                path.display()
            ))
        })?;
        let temp_c = parse_f64(path, line_no, "temp_c", temp_text)?;
        if let Some(last) = samples.last() {
            if epoch_s <= last.epoch_s {
                return Err(CliError::Validation(format!(
                    "{}: line {line_no}: epoch {epoch_s} not after previous {}",
                    path.display(),
                    last.epoch_s
                )));
            }
        }
        let sample = TemperatureSample::new(epoch_s, temp_c)
            .map_err(|e| CliError::Validation(format!("{}: line {line_no}: {e}", path.display())))?;
        samples.push(sample);
    }
    Ok(samples)
}

/// Read `adc_count,true_temp_c` calibration points.
pub fn read_points_csv(path: &Path) -> Result<Vec<(u32, f64)>, CliError> {
    let text = read_file(path)?;
    let lines = data_lines(&text, path, POINTS_HEADER)?;
    let mut points = Vec::with_capacity(lines.len());
    for (line_no, line) in lines {
        let (count_text, temp_text) = two_fields(path, line_no, line)?;
        let count: u32 = count_text.trim().parse().map_err(|_| {
            CliError::Validation(format!(
                "{}: line {line_no}: field adc_count: `{count_text}` is not a non-negative integer",
                path.display()
            ))
        })?;
        let temp = parse_f64(path, line_no, "true_temp_c", temp_text)?;
        points.push((count, temp));
    }
    Ok(points)
}

/// Read a single-column `adc_count` file.
pub fn read_counts_csv(path: &Path) -> Result<Vec<u32>, CliError> {
    let text = read_file(path)?;
    let lines = data_lines(&text, path, COUNTS_HEADER)?;
    let mut counts = Vec::with_capacity(lines.len());
    for (line_no, line) in lines {
        let count: u32 = line.trim().parse().map_err(|_| {
            CliError::Validation(format!(
                "{}: line {line_no}: `{line}` is not a non-negative integer",
                path.display()
            ))
        })?;
        counts.push(count);
    }
    Ok(counts)
}

/// Shortest decimal form of `v` that parses back to the same f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Write rows under a header, creating parent directories as needed.
pub fn write_csv<R: IntoIterator<Item = String>>(
    path: &Path,
    header: &str,
    rows: R,
) -> Result<(), CliError> {
    let mut text = String::new();
    text.push_str(header);
    text.push('\n');
    for row in rows {
        let _ = writeln!(text, "{row}");
    }
    write_bytes(path, text.as_bytes())
}

/// Write a `t_s,value` series.
pub fn write_signal_csv(path: &Path, times_s: &[f64], values: &[f64]) -> Result<(), CliError> {
    write_csv(
        path,
        SIGNAL_HEADER,
        times_s
            .iter()
            .zip(values)
            .map(|(t, v)| format!("{},{}", fmt_f64(*t), fmt_f64(*v))),
    )
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    fs::write(path, bytes)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Serialize a value as pretty JSON with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Validation(format!("cannot serialize {}: {e}", path.display())))?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}
