//! Problem loading, run matrices and artifact emission.

mod builtin;
mod config;
mod run;

pub use builtin::{builtin_problem, BUILTIN_IDS};
pub use config::{load_problem_config, parse_problem_config};
pub use run::{
    exact_residual, paper_preset, run_matrix, CellKey, CellOutcome, CellResult, MatrixEntry, RunConfig, RunSummary,
};

use crate::metrics::MetricsError;
use crate::wrm::SolveError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("unknown builtin problem {0:?} (known: 1, 2, 3, 3c, 4)")]
    UnknownProblem(String),
    #[error("{path}{}: {message}", line.map(|l| format!(":{l}")).unwrap_or_default())]
    Config { path: String, line: Option<usize>, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid run configuration: {0}")]
    InvalidRun(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Resolves a builtin id or a path to a problem file.
pub fn resolve_problem(reference: &str) -> Result<crate::wrm::ProblemSpec, HarnessError> {
    if BUILTIN_IDS.contains(&reference) {
        builtin_problem(reference)
    } else {
        load_problem_config(std::path::Path::new(reference))
    }
}
