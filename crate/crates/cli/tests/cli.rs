//! End-to-end tests of the `softcircuit` binary: exit codes, stdout
//! contracts, and artifact files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_softcircuit")
}

/// Fresh output directory per test.
fn out_dir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    if dir.exists() {
        std::fs::remove_dir_all(&dir).unwrap();
    }
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Run the binary with the seed env var scrubbed so ambient values cannot
/// leak into tests.
fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .env_remove("SOFTCIRCUIT_SEED")
        .output()
        .unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("terminated by signal")
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("softcircuit"));
    assert!(stdout(&out).contains("trace"));
    assert!(stdout(&out).contains("repro"));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = run(&["frobnicate"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn missing_required_flag_is_usage_error() {
    let out = run(&["coldchain", "run"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("--samples"));
}

#[test]
fn config_with_unknown_key_is_validation_error() {
    let dir = out_dir("bad-config");
    let config = dir.join("config.json");
    std::fs::write(&config, r#"{"coldchain": {"treshold_c": 4.0}}"#).unwrap();
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "recycle",
        "recipe",
        "--json",
        "{}",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("treshold_c"), "{}", stderr(&out));
}

#[test]
fn missing_config_file_is_io_error() {
    let out = run(&["--config", "/nonexistent/config.json", "repro"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn bad_seed_env_is_validation_error() {
    let out = Command::new(binary())
        .args(["recycle", "recipe", "--json", "{}"])
        .env("SOFTCIRCUIT_SEED", "notanumber")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("SOFTCIRCUIT_SEED"));
}

#[test]
fn recycle_recipe_reports_reference_fraction() {
    let dir = out_dir("recipe");
    let out = run(&[
        "--out",
        dir.to_str().unwrap(),
        "recycle",
        "recipe",
        "--json",
        r#"{"ag_mass_g": 4.12, "wpu_dispersion_mass_g": 1.25, "water_mass_g": 0.5}"#,
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("89.18 %"), "{}", stdout(&out));
    let report = std::fs::read_to_string(dir.join("recipe.json")).unwrap();
    assert!(report.contains("ag_dry_weight_fraction"));
}

#[test]
fn recycle_recipe_accepts_a_file_path() {
    let dir = out_dir("recipe-file");
    let path = dir.join("ink.json");
    std::fs::write(&path, r#"{"ag_mass_g": 1.0, "wpu_dispersion_mass_g": 0.0}"#).unwrap();
    let out = run(&[
        "--out",
        dir.to_str().unwrap(),
        "recycle",
        "recipe",
        "--json",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("100.00 %"));
}

#[test]
fn recycle_ledger_rejects_nonconserving_split() {
    let dir = out_dir("ledger-bad");
    let out = run(&[
        "--out",
        dir.to_str().unwrap(),
        "recycle",
        "ledger",
        "--input",
        "100",
        "--recovered",
        "95",
        "--bound",
        "10",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn recycle_wash_writes_ledger_json() {
    let dir = out_dir("wash");
    let out = run(&[
        "--out",
        dir.to_str().unwrap(),
        "recycle",
        "wash",
        "--initial",
        "12",
        "--post-wash",
        "9.62",
        "--discarded",
        "0.73",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("recovered_powder"));
    let ledger = std::fs::read_to_string(dir.join("wash_ledger.json")).unwrap();
    assert!(ledger.contains("process_loss"));
}

#[test]
fn coldchain_run_latches_and_appends_log() {
    let dir = out_dir("coldchain");
    let samples = dir.join("samples.csv");
    let mut csv = String::from("epoch_s,temp_c\n");
    for i in 0..=60 {
        csv.push_str(&format!("{},{}\n", i * 60, 6.5));
    }
    std::fs::write(&samples, csv).unwrap();

    let args = [
        "--out",
        dir.to_str().unwrap(),
        "coldchain",
        "run",
        "--samples",
        samples.to_str().unwrap(),
    ];
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(
        stdout(&out).contains("UNSAFE (latched at epoch 3600)"),
        "{}",
        stdout(&out)
    );

    let telemetry = std::fs::read_to_string(dir.join("telemetry.txt")).unwrap();
    assert!(telemetry.starts_with("SMARTLABEL v1\nstatus=UNSAFE\n"));
    assert_eq!(telemetry.lines().count(), 2 + 61);

    // The sample log is append-only: a second run doubles it.
    let log_lines = |path: &Path| {
        std::fs::read_to_string(path)
            .unwrap()
            .lines()
            .count()
    };
    let log = dir.join("coldchain_samples.log");
    assert_eq!(log_lines(&log), 61);
    let again = run(&args);
    assert_eq!(code(&again), 0);
    assert_eq!(log_lines(&log), 122);
}

#[test]
fn coldchain_rejects_cooked_csv() {
    let dir = out_dir("coldchain-bad");
    let samples = dir.join("samples.csv");
    std::fs::write(&samples, "epoch_s,temp_c\n60,4.0\n60,4.0\n").unwrap();
    let out = run(&[
        "--out",
        dir.to_str().unwrap(),
        "coldchain",
        "run",
        "--samples",
        samples.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 3"));
}

#[test]
fn thermistor_calibrate_then_convert_round_trips() {
    let dir = out_dir("thermistor");
    let points = dir.join("points.csv");
    // Synthetic linear relation temp = -0.05 * count + 120.
    let mut csv = String::from("adc_count,true_temp_c\n");
    for count in [1400u32, 1500, 1600, 1700, 1800] {
        csv.push_str(&format!("{},{}\n", count, -0.05 * count as f64 + 120.0));
    }
    std::fs::write(&points, csv).unwrap();

    let out = run(&[
        "--out",
        dir.to_str().unwrap(),
        "thermistor",
        "calibrate",
        "--points",
        points.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let curve = dir.join("calibration.json");
    assert!(curve.exists());

    let counts = dir.join("counts.csv");
    std::fs::write(&counts, "adc_count\n1500\n1650\n100\n").unwrap();
    let out = run(&[
        "--out",
        dir.to_str().unwrap(),
        "thermistor",
        "convert",
        "--curve",
        curve.to_str().unwrap(),
        "--counts",
        counts.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let table = std::fs::read_to_string(dir.join("temperatures.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "adc_count,temp_c,extrapolated");
    assert_eq!(lines[1], "1500,45,false");
    assert_eq!(lines[2], "1650,37.5,false");
    // Count 100 sits far outside the fitted range.
    assert_eq!(lines[3], "100,115,true");
    assert!(stdout(&out).contains("1 outside the fit range"));
}

fn write_signal(path: &Path, values: &[f64], rate: f64) {
    let mut csv = String::from("t_s,value\n");
    for (i, v) in values.iter().enumerate() {
        csv.push_str(&format!("{},{}\n", i as f64 / rate, v));
    }
    std::fs::write(path, csv).unwrap();
}

#[test]
fn dsp_filter_requires_exactly_one_source() {
    let dir = out_dir("dsp-usage");
    let input = dir.join("sig.csv");
    write_signal(&input, &[0.0; 32], 250.0);
    let out = run(&[
        "--out",
        dir.to_str().unwrap(),
        "dsp",
        "filter",
        "--input",
        input.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("--preset"));
}

#[test]
fn dsp_filter_notch_removes_mains_tone() {
    let dir = out_dir("dsp-notch");
    let input = dir.join("sig.csv");
    let rate = 250.0;
    let values: Vec<f64> = (0..1250)
        .map(|i| (2.0 * std::f64::consts::PI * 60.0 * i as f64 / rate).sin())
        .collect();
    write_signal(&input, &values, rate);
    let out = run(&[
        "--out",
        dir.to_str().unwrap(),
        "dsp",
        "filter",
        "--input",
        input.to_str().unwrap(),
        "--preset",
        "notch",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let filtered = std::fs::read_to_string(dir.join("filtered.csv")).unwrap();
    let tail: Vec<f64> = filtered
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .skip(1000)
        .collect();
    let rms = (tail.iter().map(|v| v * v).sum::<f64>() / tail.len() as f64).sqrt();
    assert!(rms < 0.01, "steady-state rms {rms}");
}

#[test]
fn dsp_filter_rejects_gapped_input() {
    let dir = out_dir("dsp-gap");
    let input = dir.join("sig.csv");
    let mut csv = String::from("t_s,value\n");
    for i in (0..=10).chain(12..=20) {
        csv.push_str(&format!("{},0\n", i as f64 * 0.004));
    }
    std::fs::write(&input, csv).unwrap();
    let out = run(&[
        "--out",
        dir.to_str().unwrap(),
        "dsp",
        "filter",
        "--input",
        input.to_str().unwrap(),
        "--preset",
        "ecg",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("uniform"), "{}", stderr(&out));
}

#[test]
fn dsp_envelope_writes_same_length_series() {
    let dir = out_dir("dsp-envelope");
    let input = dir.join("sig.csv");
    let values: Vec<f64> = (0..500).map(|i| (i as f64 * 0.1).sin()).collect();
    write_signal(&input, &values, 250.0);
    let out = run(&[
        "--out",
        dir.to_str().unwrap(),
        "dsp",
        "envelope",
        "--input",
        input.to_str().unwrap(),
        "--window",
        "25",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("window 25 samples"));
    let envelope = std::fs::read_to_string(dir.join("envelope.csv")).unwrap();
    assert_eq!(envelope.lines().count(), 1 + 500);
}

#[test]
fn dsp_ecg_extracts_heart_rate() {
    let dir = out_dir("dsp-ecg");
    let input = dir.join("ecg.csv");
    let rate = 250.0;
    // 600 ms impulse train: 100 bpm.
    let mut values = vec![0.0f64; 2500];
    let mut idx = 100;
    while idx < values.len() {
        values[idx] = 1.0;
        idx += 150;
    }
    write_signal(&input, &values, rate);
    let out = run(&[
        "--out",
        dir.to_str().unwrap(),
        "dsp",
        "ecg",
        "--input",
        input.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let features: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("ecg_features.json")).unwrap())
            .unwrap();
    let bpm = features["heart_rate_bpm"].as_f64().unwrap();
    assert!((bpm - 100.0).abs() < 5.0, "bpm {bpm}");
}

#[test]
fn dsp_classify_labels_queries_by_stem() {
    let dir = out_dir("dsp-classify");
    let rate = 250.0;
    let bump: Vec<f64> = (0..100)
        .map(|i| (-((i as f64 - 50.0) / 10.0).powi(2)).exp())
        .collect();
    let ramp: Vec<f64> = (0..100).map(|i| i as f64 / 99.0).collect();
    let bump_file = dir.join("bump.csv");
    let ramp_file = dir.join("ramp.csv");
    let query_file = dir.join("query.csv");
    write_signal(&bump_file, &bump, rate);
    write_signal(&ramp_file, &ramp, rate);
    // The query is a slightly scaled bump.
    let query: Vec<f64> = bump.iter().map(|v| v * 1.05).collect();
    write_signal(&query_file, &query, rate);

    let out = run(&[
        "--out",
        dir.to_str().unwrap(),
        "dsp",
        "classify",
        "--references",
        bump_file.to_str().unwrap(),
        ramp_file.to_str().unwrap(),
        "--queries",
        query_file.to_str().unwrap(),
        "--metric",
        "dtw",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("query -> bump"), "{}", stdout(&out));

    let assignments = std::fs::read_to_string(dir.join("assignments.csv")).unwrap();
    let lines: Vec<&str> = assignments.lines().collect();
    assert_eq!(lines[0], "query,label,reference_index,distance");
    assert!(lines[1].starts_with("query,bump,0,"));

    let distances = std::fs::read_to_string(dir.join("distances.csv")).unwrap();
    assert!(distances.starts_with("label,bump,ramp,query\n"));
    assert_eq!(distances.lines().count(), 1 + 3);
}

#[test]
fn trace_writes_curves_and_summary() {
    let dir = out_dir("trace");
    let config = dir.join("config.json");
    std::fs::write(
        &config,
        r#"{"electromech": {"rows": 8, "cols": 8, "seeds": [0, 1], "strain_steps": 10}}"#,
    )
    .unwrap();
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "trace",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for seed in [0, 1] {
        let curve = std::fs::read_to_string(dir.join(format!("trace_seed{seed}.csv"))).unwrap();
        let lines: Vec<&str> = curve.lines().collect();
        assert_eq!(lines[0], "strain,normalized_resistance");
        assert!(lines[1].starts_with("0,1"), "{}", lines[1]);
    }
    let summary = std::fs::read_to_string(dir.join("trace_summary.csv")).unwrap();
    assert!(summary.starts_with("seed,occupancy,occupied_bonds,connected,failure_strain\n"));
    assert_eq!(summary.lines().count(), 1 + 2);
    assert_eq!(stdout(&out).lines().count(), 2);
}

#[test]
fn trace_seed_env_shifts_network_seeds() {
    let dir = out_dir("trace-seeded");
    let out = Command::new(binary())
        .args([
            "--out",
            dir.to_str().unwrap(),
            "trace",
        ])
        .env("SOFTCIRCUIT_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(dir.join("trace_seed7.csv").exists());
}
