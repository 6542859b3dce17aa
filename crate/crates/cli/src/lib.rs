//! `softcircuit`: command-line front end for the softcircuit-core library.
//!
//! One binary exposes the printed-trace simulator, the cold-chain label
//! monitor, thermistor calibration, the biosignal DSP chain, the recycling
//! ledgers, and `repro`, which runs the built-in verification suite.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation error, 3 I/O error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub mod accept;
pub mod config;
pub mod io;

mod commands;

use config::Resolved;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad command line; mirrors clap's usage failures.
    #[error("{0}")]
    Usage(String),
    /// Input that parsed but violates a documented rule.
    #[error("{0}")]
    Validation(String),
    /// Missing or unreadable/unwritable files.
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

macro_rules! core_error_to_validation {
    ($($ty:path),* $(,)?) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Validation(e.to_string())
            }
        })*
    };
}

core_error_to_validation!(
    softcircuit_core::electromech::ElectromechError,
    softcircuit_core::coldchain::ColdChainError,
    softcircuit_core::thermistor::ThermistorError,
    softcircuit_core::biosignal::BiosignalError,
    softcircuit_core::recycle::RecycleError,
);

#[derive(Debug, Parser)]
#[command(
    name = "softcircuit",
    version,
    about = "Printed-electronics toolkit: trace simulation, cold-chain labels, \
             thermistor calibration, biosignal DSP, recycling ledgers"
)]
pub struct Cli {
    /// JSON run configuration; documented defaults apply when omitted.
    #[arg(long, global = true, value_name = "JSON")]
    pub config: Option<PathBuf>,
    /// Directory for output artifacts (default: the config's out_dir).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate stretching printed traces: percolation networks swept over
    /// a strain grid into normalized resistance curves.
    Trace,
    /// Cold-chain smart-label monitor.
    #[command(subcommand)]
    Coldchain(ColdchainCmd),
    /// NTC thermistor calibration and conversion.
    #[command(subcommand)]
    Thermistor(ThermistorCmd),
    /// Biosignal filtering, envelopes, ECG features, classification.
    #[command(subcommand)]
    Dsp(DspCmd),
    /// Ink recycling mass ledgers.
    #[command(subcommand)]
    Recycle(RecycleCmd),
    /// Run the verification suite and write a report table.
    Repro,
}

#[derive(Debug, Subcommand)]
pub enum ColdchainCmd {
    /// Feed a temperature stream through the label state machine.
    Run {
        /// CSV with header `epoch_s,temp_c`.
        #[arg(long, value_name = "CSV")]
        samples: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum ThermistorCmd {
    /// Fit a linear count-to-temperature calibration.
    Calibrate {
        /// CSV with header `adc_count,true_temp_c`.
        #[arg(long, value_name = "CSV")]
        points: PathBuf,
    },
    /// Convert raw ADC counts with a fitted calibration curve.
    Convert {
        /// Calibration curve JSON written by `thermistor calibrate`.
        #[arg(long, value_name = "JSON")]
        curve: PathBuf,
        /// CSV with header `adc_count`.
        #[arg(long, value_name = "CSV")]
        counts: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum DspCmd {
    /// Apply a designed filter to a signal.
    Filter(FilterArgs),
    /// Trailing-window RMS envelope of a signal.
    Envelope {
        /// CSV with header `t_s,value`.
        #[arg(long, value_name = "CSV")]
        input: PathBuf,
        /// Window length in samples (default: the configured ECG window).
        #[arg(long)]
        window: Option<usize>,
    },
    /// Notch + band filtering followed by R-peak, RR and heart-rate
    /// extraction.
    Ecg {
        /// CSV with header `t_s,value`.
        #[arg(long, value_name = "CSV")]
        input: PathBuf,
    },
    /// Label query signals by nearest reference signal.
    Classify {
        /// Reference CSV files; each file's stem is its label.
        #[arg(long, value_name = "CSV", num_args = 1.., required = true)]
        references: Vec<PathBuf>,
        /// Query CSV files.
        #[arg(long, value_name = "CSV", num_args = 1.., required = true)]
        queries: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = MetricArg::Dtw)]
        metric: MetricArg,
    },
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// CSV with header `t_s,value`.
    #[arg(long, value_name = "CSV")]
    pub input: PathBuf,
    /// One of the configured filters.
    #[arg(long, value_enum)]
    pub preset: Option<FilterPreset>,
    /// A filter specification JSON file (alternative to --preset).
    #[arg(long, value_name = "JSON")]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterPreset {
    /// Band selection for ECG.
    Ecg,
    /// Band selection for EMG.
    Emg,
    /// Mains interference notch.
    Notch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Dtw,
    Euclidean,
}

#[derive(Debug, Subcommand)]
pub enum RecycleCmd {
    /// Dry-mass breakdown and silver weight fraction of an ink recipe.
    Recipe {
        /// Ink formulation: inline JSON (starts with `{`) or a file path.
        #[arg(long, value_name = "FORMULATION")]
        json: String,
    },
    /// Circuit-separation mass ledger; the loss is the remainder.
    Ledger {
        /// Initial ink mass, grams.
        #[arg(long, value_name = "G")]
        input: f64,
        /// Recovered ink mass, grams.
        #[arg(long, value_name = "G")]
        recovered: f64,
        /// Ink left bonded to the substrate, grams.
        #[arg(long, value_name = "G")]
        bound: f64,
    },
    /// Powder-recovery wash ledger.
    Wash {
        /// Solids going into the wash, grams.
        #[arg(long, value_name = "G")]
        initial: f64,
        /// Solids remaining after the wash, grams.
        #[arg(long = "post-wash", value_name = "G")]
        post_wash: f64,
        /// Discarded polymer fraction, grams.
        #[arg(long, value_name = "G")]
        discarded: f64,
    },
}

/// Parse argv, run the selected command and return the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let resolved: Resolved = config::resolve(cli.config.as_deref(), cli.out.as_deref())?;
    match cli.command {
        Command::Trace => commands::trace::run(&resolved),
        Command::Coldchain(ColdchainCmd::Run { samples }) => {
            commands::coldchain::run(&resolved, &samples)
        }
        Command::Thermistor(cmd) => match cmd {
            ThermistorCmd::Calibrate { points } => commands::thermistor::calibrate(&resolved, &points),
            ThermistorCmd::Convert { curve, counts } => {
                commands::thermistor::convert(&resolved, &curve, &counts)
            }
        },
        Command::Dsp(cmd) => match cmd {
            DspCmd::Filter(args) => commands::dsp::filter(&resolved, &args),
            DspCmd::Envelope { input, window } => {
                commands::dsp::envelope(&resolved, &input, window)
            }
            DspCmd::Ecg { input } => commands::dsp::ecg(&resolved, &input),
            DspCmd::Classify {
                references,
                queries,
                metric,
            } => commands::dsp::classify(&resolved, &references, &queries, metric),
        },
        Command::Recycle(cmd) => match cmd {
            RecycleCmd::Recipe { json } => commands::recycle::recipe(&resolved, &json),
            RecycleCmd::Ledger {
                input,
                recovered,
                bound,
            } => commands::recycle::ledger(&resolved, input, recovered, bound),
            RecycleCmd::Wash {
                initial,
                post_wash,
                discarded,
            } => commands::recycle::wash(&resolved, initial, post_wash, discarded),
        },
        Command::Repro => commands::repro::run(&resolved),
    }
}
