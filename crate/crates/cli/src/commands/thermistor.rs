//! `thermistor calibrate` and `thermistor convert`.

use std::path::Path;

use softcircuit_core::thermistor::{
    fit_linear_calibration, temperature_from_adc, CalibrationCurve,
};

use crate::config::Resolved;
use crate::io::{self, fmt_f64};
use crate::CliError;

pub const TEMPERATURES_HEADER: &str = "adc_count,temp_c,extrapolated";

/// Fit `adc_count,true_temp_c` points and write `calibration.json`.
pub fn calibrate(resolved: &Resolved, points_path: &Path) -> Result<(), CliError> {
    let points = io::read_points_csv(points_path)?;
    let curve = fit_linear_calibration(&points)?;
    io::write_json(&resolved.out_dir.join("calibration.json"), &curve)?;
    println!(
        "fitted {} points: temp_c = {} * count + {}",
        points.len(),
        fmt_f64(curve.slope_c_per_count),
        fmt_f64(curve.intercept_c)
    );
    println!(
        "fit range {} to {} degC, residual rms {} degC",
        fmt_f64(curve.fit_range_c.0),
        fmt_f64(curve.fit_range_c.1),
        fmt_f64(curve.residual_rms_c)
    );
    Ok(())
}

/// Convert raw counts with a saved curve; write `temperatures.csv`.
pub fn convert(resolved: &Resolved, curve_path: &Path, counts_path: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(curve_path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", curve_path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let curve: CalibrationCurve = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        CliError::Validation(format!(
            "curve {}: {} (at {})",
            curve_path.display(),
            e.inner(),
            e.path()
        ))
    })?;
    let counts = io::read_counts_csv(counts_path)?;

    let mut extrapolated = 0usize;
    let rows = counts.iter().map(|&count| {
        let reading = temperature_from_adc(count, &curve);
        if reading.extrapolated {
            extrapolated += 1;
        }
        format!(
            "{count},{},{}",
            fmt_f64(reading.temp_c),
            reading.extrapolated
        )
    });
    io::write_csv(
        &resolved.out_dir.join("temperatures.csv"),
        TEMPERATURES_HEADER,
        rows,
    )?;
    println!("converted {} counts, {extrapolated} outside the fit range", counts.len());
    Ok(())
}
