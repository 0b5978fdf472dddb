//! Experiment runner: scenario definitions, metabase bootstrap, repeated
//! seeded runs and report generation.

mod config;
mod experiment;
mod scenario;
pub mod synth;

pub use config::{ExperimentConfig, SearchSettings};
pub use experiment::{
    bootstrap, derive_seed, load_bootstrap, read_error_table, report, run_experiment, write_bootstrap, write_experiment, Bootstrap,
    BootstrapRun, ExperimentOutput, LandmarkAudit, RepeatRecord, BEST_PIPELINES_FILE, LANDMARKER_COUNT, REPORT_DIR, RUN_DIR,
};
pub use scenario::{Mode, ScenarioSpec, STANDARD_KS};
