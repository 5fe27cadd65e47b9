//! Configuration, persistence, reporting and the command line around
//! `warpmcf-core`.

pub mod config;
pub mod scenario;
pub mod snapshot;
pub mod timeseries;
pub mod verify;

pub use config::{load_config, parse_config, parse_config_in, ConfigErrors, ConfigIssue, IssueKind, RunConfig, RunKind};
pub use scenario::{
    apply_env_overrides, execute_flow, run_dir, run_scenario, run_scenario_with, ExitStatus, Outcome, RunOptions,
    RunReport, OUTPUT_DIR_ENV,
};
pub use snapshot::{load_curve, load_state, save_curve, save_state, SnapshotError};
pub use timeseries::{write_series, write_timeseries};
pub use verify::{conformance, ConformanceReport};
