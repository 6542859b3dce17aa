pub mod coldchain;
pub mod dsp;
pub mod recycle;
pub mod repro;
pub mod thermistor;
pub mod trace;
