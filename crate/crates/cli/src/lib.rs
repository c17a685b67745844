//! Experiment runner for kicked-wavepacket fidelity studies: configuration,
//! manifests, figure presets and the command implementations behind `kickfid`.

pub mod config;
pub mod error;
pub mod figures;
pub mod manifest;
pub mod runner;

pub use config::{ConfigOverrides, ExperimentConfig};
pub use error::{CliError, CliResult};
pub use figures::Figure;
pub use manifest::RunManifest;
pub use runner::RunOutput;
