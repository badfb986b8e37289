//! Scenario runner around `enclosure-core`: TOML configuration, CSV/JSON
//! artifacts, parallel indicator sweeps and the command-line front end.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod oracle;

pub use commands::{estimate, oracle as run_oracle_command, run_all, simulate, sweep, EstimateReport, RunOptions};
pub use config::{Scenario, ScenarioConfig};
pub use error::{LabError, LabResult};
