//! Python bindings for softcircuit-core.
//!
//! The module mirrors the library's main operations with plain Python
//! types: floats, lists, tuples and a few small classes. Domain errors
//! surface as `ValueError`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyBytes;

use softcircuit_core::{biosignal, coldchain, electromech, recycle, thermistor};

fn val_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

// ---- printed traces ----

/// Normalized resistance of one simulated trace over a strain grid.
#[pyclass(frozen)]
struct TraceCurve {
    #[pyo3(get)]
    strain: Vec<f64>,
    #[pyo3(get)]
    normalized_resistance: Vec<f64>,
    /// Smallest grid strain where the trace failed, or None.
    #[pyo3(get)]
    failure_strain: Option<f64>,
}

#[pymethods]
impl TraceCurve {
    fn __repr__(&self) -> String {
        format!(
            "TraceCurve(points={}, failure_strain={:?})",
            self.strain.len(),
            self.failure_strain
        )
    }
}

/// Bond occupancy of the lattice model at a dry silver weight fraction.
#[pyfunction]
fn occupancy_from_ag_weight(ag_wt_fraction: f64) -> PyResult<f64> {
    electromech::occupancy_from_ag_weight(ag_wt_fraction).map_err(val_err)
}

/// Simulate stretching one seeded percolation trace.
///
/// `biphasic=True` switches to the liquid-metal-bridged damage model.
#[pyfunction]
#[pyo3(signature = (
    seed = 0,
    rows = 32,
    cols = 32,
    ag_wt_fraction = 0.8918,
    biphasic = false,
    strain_max = 0.6,
    steps = 120,
    failure_threshold = 100.0,
))]
#[allow(clippy::too_many_arguments)]
fn trace_curve(
    seed: u64,
    rows: usize,
    cols: usize,
    ag_wt_fraction: f64,
    biphasic: bool,
    strain_max: f64,
    steps: usize,
    failure_threshold: f64,
) -> PyResult<TraceCurve> {
    let occupancy = electromech::occupancy_from_ag_weight(ag_wt_fraction).map_err(val_err)?;
    let params = if biphasic {
        electromech::DamageModelParams::biphasic()
    } else {
        electromech::DamageModelParams::ag_wpu()
    };
    let network =
        electromech::build_network(rows, cols, occupancy, &params, seed).map_err(val_err)?;
    let grid = electromech::uniform_strain_grid(strain_max, steps).map_err(val_err)?;
    let options = electromech::SweepOptions { failure_threshold };
    let curve = electromech::strain_sweep_with_options(
        &network,
        &electromech::TraceGeometry::reference_trace(),
        &grid,
        options,
    )
    .map_err(val_err)?;
    Ok(TraceCurve {
        strain: curve.points.iter().map(|p| p.strain).collect(),
        normalized_resistance: curve
            .points
            .iter()
            .map(|p| p.normalized_resistance)
            .collect(),
        failure_strain: curve.failure_strain,
    })
}

/// Two-terminal conductance of a seeded lattice, or None if disconnected.
#[pyfunction]
#[pyo3(signature = (rows, cols, occupancy, seed = 0, strain = 0.0, biphasic = false))]
fn network_conductance(
    rows: usize,
    cols: usize,
    occupancy: f64,
    seed: u64,
    strain: f64,
    biphasic: bool,
) -> PyResult<Option<f64>> {
    let params = if biphasic {
        electromech::DamageModelParams::biphasic()
    } else {
        electromech::DamageModelParams::ag_wpu()
    };
    let network =
        electromech::build_network(rows, cols, occupancy, &params, seed).map_err(val_err)?;
    Ok(electromech::solve_conductance_at(&network, strain)
        .map_err(val_err)?
        .conductance())
}

// ---- cold-chain label ----

/// Latching over-temperature monitor with telemetry read-out.
#[pyclass]
struct ColdChainMonitor {
    state: coldchain::ColdChainState,
    config: coldchain::ColdChainConfig,
}

#[pymethods]
impl ColdChainMonitor {
    #[new]
    #[pyo3(signature = (threshold_c = 5.0, latch_duration_s = 3600, max_gap_s = 600))]
    fn new(threshold_c: f64, latch_duration_s: u64, max_gap_s: u64) -> PyResult<Self> {
        let config = coldchain::ColdChainConfig {
            threshold_c,
            latch_duration_s,
            max_gap_s,
        };
        config.validate().map_err(val_err)?;
        Ok(Self {
            state: coldchain::ColdChainState::new(),
            config,
        })
    }

    /// Feed one sample; returns the status after it ("SAFE" or "UNSAFE").
    fn update(&mut self, epoch_s: u64, temp_c: f64) -> PyResult<String> {
        let sample = coldchain::TemperatureSample::new(epoch_s, temp_c).map_err(val_err)?;
        self.state =
            coldchain::update(&self.state, sample, &self.config).map_err(val_err)?;
        Ok(self.status())
    }

    #[getter]
    fn status(&self) -> String {
        match self.state.status {
            coldchain::LabelStatus::Safe => "SAFE".to_string(),
            coldchain::LabelStatus::UnsafeLatched => "UNSAFE".to_string(),
        }
    }

    #[getter]
    fn latched(&self) -> bool {
        self.state.status == coldchain::LabelStatus::UnsafeLatched
    }

    #[getter]
    fn sample_count(&self) -> usize {
        self.state.history.len()
    }

    /// Wire-format read-out of the whole state.
    fn telemetry<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &coldchain::encode_telemetry(&self.state))
    }

    /// Rebuild a monitor from a telemetry payload.
    #[staticmethod]
    #[pyo3(signature = (payload, threshold_c = 5.0, latch_duration_s = 3600, max_gap_s = 600))]
    fn from_telemetry(
        payload: &[u8],
        threshold_c: f64,
        latch_duration_s: u64,
        max_gap_s: u64,
    ) -> PyResult<Self> {
        let config = coldchain::ColdChainConfig {
            threshold_c,
            latch_duration_s,
            max_gap_s,
        };
        let state = coldchain::decode_telemetry(payload, &config).map_err(val_err)?;
        Ok(Self { state, config })
    }

    fn __repr__(&self) -> String {
        format!(
            "ColdChainMonitor(status={}, samples={})",
            self.status(),
            self.state.history.len()
        )
    }
}

// ---- thermistor ----

/// Beta-model NTC resistance in ohms.
#[pyfunction]
#[pyo3(signature = (temp_c, r25_ohm = 10_000.0, beta_k = 3435.0))]
fn ntc_resistance(temp_c: f64, r25_ohm: f64, beta_k: f64) -> PyResult<f64> {
    thermistor::ntc_resistance(temp_c, &thermistor::NtcParams { r25_ohm, beta_k })
        .map_err(val_err)
}

/// Ideal ADC count for a temperature on a low-side divider.
#[pyfunction]
#[pyo3(signature = (temp_c, r_fixed_ohm = 10_000.0, adc_bits = 10, r25_ohm = 10_000.0, beta_k = 3435.0))]
fn adc_from_temperature(
    temp_c: f64,
    r_fixed_ohm: f64,
    adc_bits: u8,
    r25_ohm: f64,
    beta_k: f64,
) -> PyResult<u32> {
    let divider = thermistor::DividerConfig {
        r_fixed_ohm,
        adc_bits,
        ..Default::default()
    };
    thermistor::adc_from_temperature(
        temp_c,
        &thermistor::NtcParams { r25_ohm, beta_k },
        &divider,
    )
    .map_err(val_err)
}

/// Linear count-to-temperature calibration.
#[pyclass(frozen)]
struct Calibration {
    curve: thermistor::CalibrationCurve,
}

#[pymethods]
impl Calibration {
    #[getter]
    fn slope_c_per_count(&self) -> f64 {
        self.curve.slope_c_per_count
    }

    #[getter]
    fn intercept_c(&self) -> f64 {
        self.curve.intercept_c
    }

    #[getter]
    fn fit_range_c(&self) -> (f64, f64) {
        self.curve.fit_range_c
    }

    #[getter]
    fn residual_rms_c(&self) -> f64 {
        self.curve.residual_rms_c
    }

    /// Convert a count; returns (temp_c, extrapolated).
    fn temperature(&self, count: u32) -> (f64, bool) {
        let reading = thermistor::temperature_from_adc(count, &self.curve);
        (reading.temp_c, reading.extrapolated)
    }

    fn __repr__(&self) -> String {
        format!(
            "Calibration(slope={:.6}, intercept={:.3})",
            self.curve.slope_c_per_count, self.curve.intercept_c
        )
    }
}

/// Least-squares fit over (adc_count, true_temp_c) points.
#[pyfunction]
fn fit_linear_calibration(points: Vec<(u32, f64)>) -> PyResult<Calibration> {
    let curve = thermistor::fit_linear_calibration(&points).map_err(val_err)?;
    Ok(Calibration { curve })
}

/// Causal trailing mean with warm-up, same length as the input.
#[pyfunction]
fn moving_average(values: Vec<f64>, window: usize) -> PyResult<Vec<f64>> {
    thermistor::moving_average(&values, window).map_err(val_err)
}

// ---- biosignal DSP ----

/// A designed digital filter (cascade of biquads).
#[pyclass(frozen)]
struct Filter {
    cascade: biosignal::FilterCascade,
}

#[pymethods]
impl Filter {
    /// Run the filter over a signal (zero initial state).
    fn apply(&self, values: Vec<f64>) -> Vec<f64> {
        biosignal::apply_filter(&self.cascade, &values)
    }

    /// Magnitude response in dB at a frequency.
    fn magnitude_db(&self, f_hz: f64) -> f64 {
        self.cascade.magnitude_db(f_hz)
    }

    #[getter]
    fn is_stable(&self) -> bool {
        self.cascade.is_stable()
    }

    #[getter]
    fn section_count(&self) -> usize {
        self.cascade.sections.len()
    }

    #[getter]
    fn sample_rate_hz(&self) -> f64 {
        self.cascade.sample_rate_hz
    }

    fn __repr__(&self) -> String {
        format!(
            "Filter(sections={}, sample_rate_hz={})",
            self.cascade.sections.len(),
            self.cascade.sample_rate_hz
        )
    }
}

fn design(spec: biosignal::FilterSpec, sample_rate_hz: f64) -> PyResult<Filter> {
    let cascade = biosignal::design_filter(&spec, sample_rate_hz).map_err(val_err)?;
    Ok(Filter { cascade })
}

/// Mains-interference notch.
#[pyfunction]
#[pyo3(signature = (f_hz = 60.0, q = 30.0, sample_rate_hz = 250.0))]
fn design_notch(f_hz: f64, q: f64, sample_rate_hz: f64) -> PyResult<Filter> {
    design(biosignal::FilterSpec::Notch { f_hz, q }, sample_rate_hz)
}

/// Second-order Butterworth high-pass.
#[pyfunction]
#[pyo3(signature = (f_hz, sample_rate_hz = 250.0))]
fn design_highpass(f_hz: f64, sample_rate_hz: f64) -> PyResult<Filter> {
    design(biosignal::FilterSpec::Highpass { f_hz }, sample_rate_hz)
}

/// Second-order Butterworth low-pass.
#[pyfunction]
#[pyo3(signature = (f_hz, sample_rate_hz = 250.0))]
fn design_lowpass(f_hz: f64, sample_rate_hz: f64) -> PyResult<Filter> {
    design(biosignal::FilterSpec::Lowpass { f_hz }, sample_rate_hz)
}

/// High-pass low-pass cascade.
#[pyfunction]
#[pyo3(signature = (f_low_hz, f_high_hz, sample_rate_hz = 250.0))]
fn design_bandpass(f_low_hz: f64, f_high_hz: f64, sample_rate_hz: f64) -> PyResult<Filter> {
    design(
        biosignal::FilterSpec::Bandpass { f_low_hz, f_high_hz },
        sample_rate_hz,
    )
}

/// Trailing-window RMS envelope, same length as the input.
#[pyfunction]
fn rms_envelope(values: Vec<f64>, window: usize) -> PyResult<Vec<f64>> {
    Ok(biosignal::rms_envelope(&values, window)
        .map_err(val_err)?
        .values)
}

/// R peaks, RR intervals and heart rate of a filtered ECG.
#[pyclass(frozen)]
struct EcgSummary {
    #[pyo3(get)]
    r_peak_indices: Vec<usize>,
    #[pyo3(get)]
    rr_intervals_ms: Vec<f64>,
    #[pyo3(get)]
    heart_rate_bpm: Option<f64>,
}

#[pymethods]
impl EcgSummary {
    fn __repr__(&self) -> String {
        format!(
            "EcgSummary(peaks={}, heart_rate_bpm={:?})",
            self.r_peak_indices.len(),
            self.heart_rate_bpm
        )
    }
}

#[pyfunction]
#[pyo3(signature = (values, sample_rate_hz = 250.0))]
fn detect_r_peaks(values: Vec<f64>, sample_rate_hz: f64) -> PyResult<EcgSummary> {
    let recording = biosignal::SignalRecording::new(values, sample_rate_hz, 24.0)
        .map_err(val_err)?;
    let features = biosignal::detect_r_peaks(&recording).map_err(val_err)?;
    Ok(EcgSummary {
        r_peak_indices: features.r_peak_indices,
        rr_intervals_ms: features.rr_intervals_ms,
        heart_rate_bpm: features.heart_rate_bpm,
    })
}

/// Dynamic-time-warping distance.
#[pyfunction]
fn dtw_distance(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    biosignal::dtw_distance(&a, &b).map_err(val_err)
}

/// Euclidean distance after resampling to the longer length.
#[pyfunction]
fn euclidean_distance(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    biosignal::euclidean_distance(&a, &b).map_err(val_err)
}

/// Label each (label, values) query with its nearest reference; returns
/// one (assigned_label, distance) pair per query.
#[pyfunction]
#[pyo3(signature = (queries, references, metric = "dtw"))]
fn classify_nearest(
    queries: Vec<(String, Vec<f64>)>,
    references: Vec<(String, Vec<f64>)>,
    metric: &str,
) -> PyResult<Vec<(String, f64)>> {
    let metric = match metric {
        "dtw" => biosignal::DistanceMetric::Dtw,
        "euclidean" => biosignal::DistanceMetric::Euclidean,
        other => return Err(PyValueError::new_err(format!(
            "metric must be `dtw` or `euclidean`, got `{other}`"
        ))),
    };
    let to_seq = |pairs: Vec<(String, Vec<f64>)>| -> Vec<biosignal::LabeledSequence> {
        pairs
            .into_iter()
            .map(|(label, values)| biosignal::LabeledSequence::new(label, values))
            .collect()
    };
    let result =
        biosignal::classify_nearest(&to_seq(queries), &to_seq(references), metric)
            .map_err(val_err)?;
    Ok(result
        .assignments
        .into_iter()
        .map(|a| (a.label, a.distance))
        .collect())
}

// ---- recycling ----

/// Weight fraction of silver in the dried ink.
#[pyfunction]
#[pyo3(signature = (
    ag_mass_g,
    wpu_dispersion_mass_g,
    wpu_solid_fraction = 0.40,
    water_mass_g = 0.0,
    egain_mass_g = 0.0,
))]
fn ag_dry_weight_fraction(
    ag_mass_g: f64,
    wpu_dispersion_mass_g: f64,
    wpu_solid_fraction: f64,
    water_mass_g: f64,
    egain_mass_g: f64,
) -> PyResult<f64> {
    recycle::ag_dry_weight_fraction(&recycle::InkFormulation {
        ag_mass_g,
        wpu_dispersion_mass_g,
        wpu_solid_fraction,
        water_mass_g,
        egain_mass_g,
    })
    .map_err(val_err)
}

/// Circuit-separation ledger as (label, grams) pairs; decanting loss is
/// the remainder.
#[pyfunction]
fn separation_ledger(
    initial_g: f64,
    recovered_g: f64,
    substrate_bound_g: f64,
) -> PyResult<Vec<(String, f64)>> {
    Ok(recycle::separation_ledger(initial_g, recovered_g, substrate_bound_g)
        .map_err(val_err)?
        .outputs()
        .to_vec())
}

/// Powder-recovery wash ledger as (label, grams) pairs.
#[pyfunction]
fn wash_ledger(
    initial_g: f64,
    post_wash_g: f64,
    discarded_g: f64,
) -> PyResult<Vec<(String, f64)>> {
    Ok(recycle::wash_ledger(initial_g, post_wash_g, discarded_g)
        .map_err(val_err)?
        .outputs()
        .to_vec())
}

/// Recycled-over-pristine conductivity ratio.
#[pyfunction]
fn conductivity_retention(sigma_pristine: f64, sigma_recycled: f64) -> PyResult<f64> {
    Ok(recycle::conductivity_retention(sigma_pristine, sigma_recycled)
        .map_err(val_err)?
        .retention_fraction)
}

#[pymodule]
fn softcircuit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<TraceCurve>()?;
    m.add_class::<ColdChainMonitor>()?;
    m.add_class::<Calibration>()?;
    m.add_class::<Filter>()?;
    m.add_class::<EcgSummary>()?;
    m.add_function(wrap_pyfunction!(occupancy_from_ag_weight, m)?)?;
    m.add_function(wrap_pyfunction!(trace_curve, m)?)?;
    m.add_function(wrap_pyfunction!(network_conductance, m)?)?;
    m.add_function(wrap_pyfunction!(ntc_resistance, m)?)?;
    m.add_function(wrap_pyfunction!(adc_from_temperature, m)?)?;
    m.add_function(wrap_pyfunction!(fit_linear_calibration, m)?)?;
    m.add_function(wrap_pyfunction!(moving_average, m)?)?;
    m.add_function(wrap_pyfunction!(design_notch, m)?)?;
    m.add_function(wrap_pyfunction!(design_highpass, m)?)?;
    m.add_function(wrap_pyfunction!(design_lowpass, m)?)?;
    m.add_function(wrap_pyfunction!(design_bandpass, m)?)?;
    m.add_function(wrap_pyfunction!(rms_envelope, m)?)?;
    m.add_function(wrap_pyfunction!(detect_r_peaks, m)?)?;
    m.add_function(wrap_pyfunction!(dtw_distance, m)?)?;
    m.add_function(wrap_pyfunction!(euclidean_distance, m)?)?;
    m.add_function(wrap_pyfunction!(classify_nearest, m)?)?;
    m.add_function(wrap_pyfunction!(ag_dry_weight_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(separation_ledger, m)?)?;
    m.add_function(wrap_pyfunction!(wash_ledger, m)?)?;
    m.add_function(wrap_pyfunction!(conductivity_retention, m)?)?;
    Ok(())
}
