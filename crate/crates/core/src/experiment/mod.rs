//! Config-driven experiment running: TOML parsing, batched seeded runs,
//! trace/summary artifacts.

mod config;
mod runner;

pub use config::{
    emit, parse_config, ConfigError, ExperimentConfig, FixedPointsSpec, OutputSpec, ProblemSpec,
    RunSpec, ScheduleSpec, DEFAULT_MAX_ITER, DEFAULT_RESIDUAL_TOL,
};
pub use runner::{
    run_experiment, AggregateSummary, ExperimentError, ExperimentOutcome, RunSummary, SeedEntry,
    FEJER_TOL,
};
