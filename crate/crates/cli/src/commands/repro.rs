//! `repro`: run the verification suite and write the report table.

use crate::accept;
use crate::config::Resolved;
use crate::io;
use crate::CliError;

pub fn run(resolved: &Resolved) -> Result<(), CliError> {
    let reports = accept::run_suite(resolved.seed);
    let text = accept::render_report(&reports);
    print!("{text}");
    io::write_bytes(
        &resolved.out_dir.join("acceptance_report.txt"),
        text.as_bytes(),
    )?;

    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name)
        .collect();
    if failed.is_empty() {
        println!("all {} checks passed (seed {})", reports.len(), resolved.seed);
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "{} of {} checks failed: {}",
            failed.len(),
            reports.len(),
            failed.join(", ")
        )))
    }
}
