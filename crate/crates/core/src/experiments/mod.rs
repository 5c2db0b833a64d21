//! Configuration-driven experiments: model families, presets and the
//! runner that writes density and error-table CSVs.

mod catalog;
pub mod config;
mod presets;
mod run;

pub use catalog::{build_exact, build_model};
pub use config::{ExperimentConfig, Family, InitialKind, Method};
pub use presets::{describe, find_preset, list_presets, load, Preset};
pub use run::{run, RunOptions, RunOutput, SolverRecord};
