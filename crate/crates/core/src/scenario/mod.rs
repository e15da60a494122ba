mod explain;
mod parse;
mod run;

pub use explain::{explain, names};
pub use parse::{Entry, Scenario, Section, SectionKind};
pub use run::{compare_reports, error_kind, filtration_lines, run_scenario, RunOptions, RunOutput, TaskOutcome, OPS, TIMING_MARK};

use crate::error::Error;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{0}")]
    Parse(Error),
    #[error("{kind} {name} (line {line}): {module} precondition violated: {error}")]
    Setup { kind: String, name: String, line: usize, module: &'static str, error: Error },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

impl ScenarioError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

pub fn load(path: &std::path::Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io { path: path.display().to_string(), message: e.to_string() })?;
    Scenario::parse(&text).map_err(ScenarioError::Parse)
}
