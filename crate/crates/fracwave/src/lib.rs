//! File formats, the experiment runner and configuration handling on top
//! of `fracwave-core`.

pub mod config;
pub mod experiment;
pub mod io;

pub use experiment::{ExperimentSpec, Reg, RhoMode, Summary};
