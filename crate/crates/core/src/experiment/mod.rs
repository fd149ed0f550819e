//! Parameter sweeps: grid expansion, seeded replicate runs, aggregation
//! and scenario comparison, with their text formats.

mod config;
mod grid;
mod plots;
mod scenario;
mod summary;
mod sweep;

use thiserror::Error;

use crate::assignment::AssignmentError;
use crate::communities::CommunityId;
use crate::model::ModelError;

pub use config::{parse_scenarios, parse_sweep_spec, Scenario, ScenarioSet};
pub use grid::{
    community_label, derive_seed, expand_grid, ResolvedSetting, ScholarChoice, Setting, SweepSpec, MAX_REPLICATES,
    PARAMETER_NAMES,
};
pub use plots::{
    bot_grid, scholar_rows, sensitivity_pairs, write_bot_grid, write_scenario_series, write_scholar_rows,
    write_sensitivity_pairs, BotCell, ScholarRow, SensitivityPair, BOT_GRID_HEADER, SCENARIO_SERIES_HEADER,
    SCHOLAR_ROWS_HEADER, SENSITIVITY_HEADER,
};
pub use scenario::{scenario_compare, write_comparison, ScenarioRow, COMPARISON_HEADER};
pub use summary::{aggregate, read_summary, write_summary, SettingSummary, SUMMARY_HEADER};
pub use sweep::{read_results, run_setting, run_sweep, write_results, RunResult, SweepOptions, RESULTS_HEADER};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("parameter {0} has no values")]
    EmptyList(&'static str),
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("replicates = {0} must be in [1, 2^20)")]
    BadReplicates(u32),
    #[error("scholar community {id} does not exist (partition has {k} communities)")]
    UnknownCommunity { id: CommunityId, k: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("setting {setting_id}: {source}")]
    Assignment {
        setting_id: usize,
        #[source]
        source: AssignmentError,
    },
    #[error("setting {setting_id}: {source}")]
    Model {
        setting_id: usize,
        #[source]
        source: ModelError,
    },
    #[error("setting {setting_id}: replicate {replicate} is missing")]
    MissingReplicate { setting_id: usize, replicate: u32 },
    #[error("setting {setting_id}: replicate {replicate} appears twice")]
    DuplicateReplicate { setting_id: usize, replicate: u32 },
    #[error("setting {setting_id}: replicates disagree on parameter values")]
    InconsistentSetting { setting_id: usize },
    #[error("worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
