//! Post-solve verification and comparison metrics.

mod compare;
mod directions;
mod exactness;
mod linepack;
mod metrics;
pub mod report;

use thiserror::Error;

pub use compare::{compare_runs, ramp_percent, ComparisonReport, ModeSummary, RampSeries};
pub use directions::{
    default_flow_tolerance, verify_directions, DirectionChange, DirectionEntry, DirectionReport,
};
pub use exactness::{check_exactness, ExactnessCheck, ExactnessReport};
pub use linepack::{linepack_profile, LinepackProfile, PipelineLinepack};
pub use metrics::{
    approximation_error_delta, approximation_error_xi, delta_value, ApproxErrorReport, DeltaEntry,
    DENOMINATOR_EPSILON,
};

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("schedules do not match the system: {0}")]
    Mismatch(String),
    #[error("schedule lacks `{0}` values")]
    MissingSymbol(&'static str),
}
