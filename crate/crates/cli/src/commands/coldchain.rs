//! `coldchain run`: feed a temperature CSV through the label monitor.
//!
//! Appends every accepted sample to `coldchain_samples.log` (the on-device
//! append-only log), writes the final telemetry payload to
//! `telemetry.txt`, and prints the resulting status.

use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::Path;

use softcircuit_core::coldchain::{self, LabelStatus};

use crate::config::Resolved;
use crate::io;
use crate::CliError;

pub fn run(resolved: &Resolved, samples_path: &Path) -> Result<(), CliError> {
    let config = &resolved.config.coldchain;
    config.validate()?;
    let samples = io::read_temperature_csv(samples_path)?;
    let trace = coldchain::run_trace(&samples, config)?;

    std::fs::create_dir_all(&resolved.out_dir).map_err(|e| {
        CliError::Io(format!("cannot create {}: {e}", resolved.out_dir.display()))
    })?;
    let log_path = resolved.out_dir.join("coldchain_samples.log");
    let mut log = OpenOptions::new()
        .append(true)
        .create(true)
        .open(&log_path)
        .map_err(|e| CliError::Io(format!("cannot open {}: {e}", log_path.display())))?;
    for sample in &samples {
        writeln!(log, "{}", coldchain::format_record(sample))
            .map_err(|e| CliError::Io(format!("cannot append to {}: {e}", log_path.display())))?;
    }

    io::write_bytes(
        &resolved.out_dir.join("telemetry.txt"),
        &coldchain::encode_telemetry(&trace.final_state),
    )?;

    let latch_epoch = trace
        .timeline
        .iter()
        .position(|&s| s == LabelStatus::UnsafeLatched)
        .map(|i| samples[i].epoch_s);
    match (trace.final_state.status, latch_epoch) {
        (LabelStatus::UnsafeLatched, Some(epoch)) => {
            println!("status: UNSAFE (latched at epoch {epoch})");
        }
        (LabelStatus::UnsafeLatched, None) => {
            // Unreachable from a fresh state, kept for completeness.
            println!("status: UNSAFE");
        }
        (LabelStatus::Safe, _) => println!("status: SAFE"),
    }
    println!("samples: {}", samples.len());
    Ok(())
}
