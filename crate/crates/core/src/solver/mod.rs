//! Backend contract for solving an [`OptModel`](crate::model::OptModel) and
//! turning the raw values into a typed [`ScheduleSolution`].
//!
//! Two backends ship: [`HighsBackend`] links HiGHS in-process, and
//! [`FileBackend`] writes the model as MPS, runs an external solver
//! executable that speaks the HiGHS command-line interface, and parses its
//! solution file.

mod file;
mod highs;
mod schedule;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::OptModel;

pub use file::{parse_highs_solution, FileBackend, SOLVER_ENV};
pub use highs::HighsBackend;
pub use schedule::{
    extract_schedule, ExtractError, ScheduleSolution, SolutionDocument, BINARY_TOLERANCE,
    BOUND_TOLERANCE,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Relative MIP gap at which the search stops.
    pub mip_gap: f64,
    pub time_limit_secs: f64,
    pub threads: Option<u32>,
    pub seed: Option<u32>,
    /// Absolute primal feasibility tolerance passed to the solver.
    pub feasibility_tolerance: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            mip_gap: 1e-6,
            time_limit_secs: 3600.0,
            threads: None,
            seed: Some(0),
            feasibility_tolerance: 1e-9,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<(), SolveError> {
        if self.mip_gap.is_nan() || self.mip_gap < 0.0 {
            return Err(SolveError::InvalidOptions(
                "MIP gap must be non-negative".into(),
            ));
        }
        if self.time_limit_secs.is_nan() || self.time_limit_secs <= 0.0 {
            return Err(SolveError::InvalidOptions(
                "time limit must be positive".into(),
            ));
        }
        if self.feasibility_tolerance.is_nan() || self.feasibility_tolerance <= 0.0 {
            return Err(SolveError::InvalidOptions(
                "feasibility tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    /// A limit was hit; values hold the best incumbent.
    FeasibleLimit,
    Infeasible,
    Unbounded,
    Error,
}

impl SolveStatus {
    pub fn has_values(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::FeasibleLimit)
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::FeasibleLimit => "feasible-limit",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub backend: String,
    pub wall_seconds: f64,
    /// Relative gap reported by the backend, when it reports one.
    pub gap: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RawSolution {
    pub status: SolveStatus,
    pub objective: f64,
    /// Variable name to value; present iff the status carries values.
    pub values: Option<BTreeMap<String, f64>>,
    pub stats: SolveStats,
}

impl RawSolution {
    pub fn without_values(status: SolveStatus, stats: SolveStats) -> Self {
        debug_assert!(!status.has_values());
        Self {
            status,
            objective: f64::NAN,
            values: None,
            stats,
        }
    }

    /// Values in variable-id order for `model`, if every variable is present.
    pub fn dense_values(&self, model: &OptModel) -> Option<Vec<f64>> {
        let values = self.values.as_ref()?;
        model
            .variables()
            .iter()
            .map(|v| values.get(&v.name).copied())
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("solver backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("limit reached before any feasible solution was found")]
    NoIncumbent,
    #[error("solver failed: {0}")]
    Failed(String),
    #[error("cannot parse solver output: {0}")]
    Parse(String),
    #[error("invalid solve options: {0}")]
    InvalidOptions(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub trait Backend: Send + Sync {
    fn name(&self) -> &str;

    fn solve(&self, model: &OptModel, options: &SolveOptions) -> Result<RawSolution, SolveError>;
}

/// Solves with the in-process HiGHS backend.
pub fn solve(model: &OptModel, options: &SolveOptions) -> Result<RawSolution, SolveError> {
    HighsBackend.solve(model, options)
}
