//! Scenario sweeps, backend cross-validation and optimal-state rings on top
//! of [`qfikit`], driven by flat `key = value` scenario files.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod scenario;

pub use commands::{emit_optimal_ring, selftest, tolerance_from_env, validate_backends, SelfCheck, ValidationReport};
pub use config::{Format, Model, ScenarioConfig};
pub use error::{CliError, Result, EXIT_NON_CONVERGENCE, EXIT_VALIDATION};
pub use output::{read_json, write_result};
pub use scenario::{run_scenario, SweepResult};
