//! Experiment configuration, Monte Carlo runners and CSV output.

pub mod config;
pub mod output;
pub mod sim;

pub use config::{parse_config, ConfigError, Experiment, RawConfig, SimConfig};
pub use output::{emit_csv, Entity, ExperimentResult, Metric, Row};
pub use sim::{
    run_ber_experiment, run_experiment, run_rate_experiment, run_single_user_experiment,
    run_with_threads, threads_from_env,
};
