//! Experiment runner, metrics files, scripted validation and the
//! interactive terminal mode.

mod experiment;
mod interactive;
mod metrics;
pub mod validate;

pub use experiment::{
    derive_seed, evaluate, par_map, run_experiment, run_seed, summarize, AgentKind, ExperimentConfig, ExperimentResult,
    LearnerConfig, SeedRun,
};
pub use interactive::{interactive_session, SessionSummary};
pub use metrics::{
    mean_std, read_metrics, write_aggregate, write_metrics, AggregateRow, MetricsRow, MetricsTable, METRICS_HEADER,
};
