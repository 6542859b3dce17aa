//! Models for the lifecycle of printed soft-circuit electronics: the
//! electromechanics of silver-flake conductive traces (constant-volume
//! stretching and a percolation resistor network), the cold-chain smart-label
//! state machine with its telemetry wire format, NTC thermistor calibration,
//! the electrophysiology DSP chain, and recycling mass-balance ledgers.
//!
//! Everything here is a pure function of its inputs (plus an explicit seed
//! where randomness is involved), so results are reproducible bit-for-bit.

pub mod biosignal;
pub mod coldchain;
pub mod electromech;
pub mod recycle;
pub mod thermistor;
