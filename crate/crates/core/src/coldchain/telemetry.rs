//! Line-oriented telemetry read-out of a label state.
//!
//! The payload is UTF-8 text: a version header, a status line, then one
//! record per sample as `epoch_s,temp_milli_c`. Temperatures travel as
//! signed integer milli-degrees so the round trip is exact. The same record
//! format is used for the append-only on-device log, where each line is
//! self-contained.

use super::{
    ColdChainConfig, ColdChainError, ColdChainState, LabelStatus, TemperatureSample,
};

pub const TELEMETRY_VERSION_LINE: &str = "SMARTLABEL v1";

/// One log/telemetry record line (no trailing newline).
pub fn format_record(sample: &TemperatureSample) -> String {
    format!("{},{}", sample.epoch_s, sample.temp_milli_c)
}

/// Parse one record line; `line` is the 1-based line number reported in
/// errors.
pub fn parse_record(content: &str, line: usize) -> Result<TemperatureSample, ColdChainError> {
    let malformed = || ColdChainError::MalformedRecord {
        line,
        content: content.to_string(),
    };
    let (epoch_str, temp_str) = content.split_once(',').ok_or_else(malformed)?;
    let epoch_s: u64 = epoch_str.parse().map_err(|_| malformed())?;
    let temp_milli_c: i64 = temp_str.parse().map_err(|_| malformed())?;
    Ok(TemperatureSample::from_milli(epoch_s, temp_milli_c))
}

/// Serialize a state for transfer. Every line ends with a newline.
pub fn encode_telemetry(state: &ColdChainState) -> Vec<u8> {
    let status = match state.status {
        LabelStatus::Safe => "SAFE",
        LabelStatus::UnsafeLatched => "UNSAFE",
    };
    let mut out = String::with_capacity(32 + 16 * state.history.len());
    out.push_str(TELEMETRY_VERSION_LINE);
    out.push('\n');
    out.push_str("status=");
    out.push_str(status);
    out.push('\n');
    for sample in &state.history {
        out.push_str(&format_record(sample));
        out.push('\n');
    }
    out.into_bytes()
}

/// Reconstruct a state snapshot from a payload.
///
/// The status line is authoritative; the state machine is not re-run. The
/// config is needed to rebuild the excursion bookkeeping: when the label is
/// still safe and the trailing samples run strictly above the threshold,
/// `excursion_start` points at the first sample of that run.
pub fn decode_telemetry(
    bytes: &[u8],
    config: &ColdChainConfig,
) -> Result<ColdChainState, ColdChainError> {
    config.validate()?;
    let text = std::str::from_utf8(bytes).map_err(|_| ColdChainError::NotUtf8)?;
    let mut lines: Vec<&str> = text.split('\n').map(|l| l.trim_end_matches('\r')).collect();
    // The final newline leaves one empty fragment; every other empty line
    // is an error.
    if lines.last() == Some(&"") {
        lines.pop();
    }

    if lines.first().copied() != Some(TELEMETRY_VERSION_LINE) {
        return Err(ColdChainError::UnknownVersion {
            line: 1,
            expected: TELEMETRY_VERSION_LINE,
        });
    }
    let status = match lines.get(1).copied() {
        Some("status=SAFE") => LabelStatus::Safe,
        Some("status=UNSAFE") => LabelStatus::UnsafeLatched,
        _ => return Err(ColdChainError::MalformedStatus { line: 2 }),
    };

    let mut history: Vec<TemperatureSample> = Vec::new();
    for (index, content) in lines.iter().enumerate().skip(2) {
        let line = index + 1;
        let sample = parse_record(content, line)?;
        if let Some(last) = history.last() {
            if sample.epoch_s <= last.epoch_s {
                return Err(ColdChainError::NonMonotonicEpoch {
                    line,
                    last: last.epoch_s,
                    got: sample.epoch_s,
                });
            }
        }
        history.push(sample);
    }

    let excursion_start = if status == LabelStatus::Safe {
        trailing_excursion_start(&history, config)
    } else {
        None
    };

    Ok(ColdChainState {
        status,
        excursion_start,
        last_sample: history.last().copied(),
        history,
    })
}

/// Epoch of the first sample of the trailing strictly-above-threshold run,
/// if the stream currently ends inside one.
fn trailing_excursion_start(
    history: &[TemperatureSample],
    config: &ColdChainConfig,
) -> Option<u64> {
    let threshold = config.threshold_milli_c();
    let mut start = None;
    for sample in history.iter().rev() {
        if sample.temp_milli_c > threshold {
            start = Some(sample.epoch_s);
        } else {
            break;
        }
    }
    start
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coldchain::{run_trace, update};

    fn cfg() -> ColdChainConfig {
        ColdChainConfig::default()
    }

    fn state_from(spec: &[(u64, f64)]) -> ColdChainState {
        let samples: Vec<_> = spec
            .iter()
            .map(|&(t, c)| TemperatureSample::new(t, c).unwrap())
            .collect();
        run_trace(&samples, &cfg()).unwrap().final_state
    }

    #[test]
    fn empty_safe_state_is_two_lines() {
        let payload = encode_telemetry(&ColdChainState::new());
        let text = String::from_utf8(payload).unwrap();
        assert_eq!(text, "SMARTLABEL v1\nstatus=SAFE\n");
    }

    #[test]
    fn record_format_round_trips() {
        let s = TemperatureSample::from_milli(1234, -5678);
        assert_eq!(format_record(&s), "1234,-5678");
        assert_eq!(parse_record("1234,-5678", 1).unwrap(), s);
    }

    #[test]
    fn round_trip_preserves_status_and_history() {
        let state = state_from(&[(0, 4.0), (600, 6.2), (1200, 6.3), (1800, 2.0)]);
        let decoded = decode_telemetry(&encode_telemetry(&state), &cfg()).unwrap();
        assert_eq!(decoded.status, state.status);
        assert_eq!(decoded.history, state.history);
        assert_eq!(decoded.last_sample, state.last_sample);
    }

    #[test]
    fn round_trip_reconstructs_excursion_start() {
        let state = state_from(&[(0, 4.0), (600, 6.2), (1200, 6.3)]);
        assert_eq!(state.excursion_start, Some(600));
        let decoded = decode_telemetry(&encode_telemetry(&state), &cfg()).unwrap();
        assert_eq!(decoded, state);
    }

    #[test]
    fn round_trip_of_latched_state() {
        let hot: Vec<_> = (0..=3600)
            .step_by(600)
            .map(|t| (t, 8.0))
            .collect();
        let state = state_from(&hot);
        assert_eq!(state.status, LabelStatus::UnsafeLatched);
        let decoded = decode_telemetry(&encode_telemetry(&state), &cfg()).unwrap();
        assert_eq!(decoded, state);
    }

    #[test]
    fn boundary_temperature_is_not_an_excursion() {
        let payload = b"SMARTLABEL v1\nstatus=SAFE\n0,4000\n600,5000\n";
        let decoded = decode_telemetry(payload, &cfg()).unwrap();
        assert_eq!(decoded.excursion_start, None);
        // One milli-degree above the threshold is.
        let payload = b"SMARTLABEL v1\nstatus=SAFE\n0,4000\n600,5001\n";
        let decoded = decode_telemetry(payload, &cfg()).unwrap();
        assert_eq!(decoded.excursion_start, Some(600));
    }

    #[test]
    fn decoded_state_continues_updating() {
        let state = state_from(&[(0, 6.0), (600, 6.0)]);
        let decoded = decode_telemetry(&encode_telemetry(&state), &cfg()).unwrap();
        let next = update(
            &decoded,
            TemperatureSample::new(3600, 6.0).unwrap(),
            &cfg(),
        )
        .unwrap();
        // 3600 - 0 >= 3600: the excursion that began before the transfer
        // still latches on time.
        assert_eq!(next.status, LabelStatus::UnsafeLatched);
    }

    #[test]
    fn rejects_unknown_version() {
        let err = decode_telemetry(b"SMARTLABEL v2\nstatus=SAFE\n", &cfg()).unwrap_err();
        assert_eq!(
            err,
            ColdChainError::UnknownVersion { line: 1, expected: TELEMETRY_VERSION_LINE }
        );
    }

    #[test]
    fn rejects_malformed_status() {
        let err = decode_telemetry(b"SMARTLABEL v1\nstatus=WARM\n", &cfg()).unwrap_err();
        assert_eq!(err, ColdChainError::MalformedStatus { line: 2 });
    }

    #[test]
    fn rejects_malformed_record_with_line_number() {
        let err = decode_telemetry(b"SMARTLABEL v1\nstatus=SAFE\n0,4000\nnope\n", &cfg())
            .unwrap_err();
        match err {
            ColdChainError::MalformedRecord { line, content } => {
                assert_eq!(line, 4);
                assert_eq!(content, "nope");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_float_temperature_record() {
        let err = decode_telemetry(b"SMARTLABEL v1\nstatus=SAFE\n0,4.5\n", &cfg()).unwrap_err();
        assert!(matches!(err, ColdChainError::MalformedRecord { line: 3, .. }));
    }

    #[test]
    fn rejects_non_monotonic_epochs() {
        let err = decode_telemetry(
            b"SMARTLABEL v1\nstatus=SAFE\n100,4000\n100,4000\n",
            &cfg(),
        )
        .unwrap_err();
        assert_eq!(
            err,
            ColdChainError::NonMonotonicEpoch { line: 4, last: 100, got: 100 }
        );
    }

    #[test]
    fn rejects_interior_blank_line() {
        let err = decode_telemetry(
            b"SMARTLABEL v1\nstatus=SAFE\n100,4000\n\n200,4000\n",
            &cfg(),
        )
        .unwrap_err();
        assert!(matches!(err, ColdChainError::MalformedRecord { line: 4, .. }));
    }

    #[test]
    fn tolerates_missing_trailing_newline_and_crlf() {
        let decoded =
            decode_telemetry(b"SMARTLABEL v1\r\nstatus=SAFE\r\n0,4000\r\n600,4100", &cfg())
                .unwrap();
        assert_eq!(decoded.history.len(), 2);
        assert_eq!(decoded.history[1], TemperatureSample::from_milli(600, 4100));
    }

    #[test]
    fn rejects_non_utf8() {
        let err = decode_telemetry(&[0xff, 0xfe, 0x00], &cfg()).unwrap_err();
        assert_eq!(err, ColdChainError::NotUtf8);
    }
}
