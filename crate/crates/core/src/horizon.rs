//! Single-shot and window-by-window solves of a whole system.
//!
//! A split solve runs the windows in order. Each window starts from the
//! previous window's terminal linepack; only the last window carries the
//! terminal linepack requirement, measured against the original initial
//! linepack.

use std::ops::Range;

use thiserror::Error;

use crate::formulation::{
    build, FlowModel, FormulationConfig, FormulationError, Symbol, TerminalLinepack,
};
use crate::network::IntegratedSystem;
use crate::solver::{
    extract_schedule, Backend, ExtractError, ScheduleSolution, SolveError, SolveOptions,
    SolveStatus,
};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Formulation(#[from] FormulationError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error("window {window} (hours {first}-{last}) is {status}")]
    Unsolved {
        window: usize,
        first: usize,
        last: usize,
        status: SolveStatus,
    },
    #[error("invalid split points: {0}")]
    InvalidSplit(String),
}

impl RunError {
    /// True when the model itself has no feasible point, as opposed to a
    /// solver or data failure.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            RunError::Unsolved {
                status: SolveStatus::Infeasible | SolveStatus::Unbounded,
                ..
            }
        )
    }
}

/// Turns 1-based split hours into 0-based half-open windows.
///
/// A split at `h` starts a new window at hour `h`, so `[13]` on 24 hours gives
/// hours 1-12 and 13-24.
pub fn windows(hours: usize, splits: &[usize]) -> Result<Vec<Range<usize>>, RunError> {
    let mut prev = 1;
    for &s in splits {
        if s <= prev || s >= hours {
            return Err(RunError::InvalidSplit(format!(
                "split hours must be strictly increasing and lie strictly between 1 and {hours}, got {splits:?}"
            )));
        }
        prev = s;
    }
    let mut starts = vec![0];
    starts.extend(splits.iter().map(|s| s - 1));
    let mut ends: Vec<usize> = starts[1..].to_vec();
    ends.push(hours);
    Ok(starts.into_iter().zip(ends).map(|(a, b)| a..b).collect())
}

/// Builds, solves and extracts one model over the system's full horizon.
pub fn solve_once(
    sys: &IntegratedSystem,
    mode: FlowModel,
    config: &FormulationConfig,
    options: &SolveOptions,
    backend: &dyn Backend,
) -> Result<ScheduleSolution, RunError> {
    solve_window(sys, mode, config, options, backend, 1, 0..sys.hours)
}

fn solve_window(
    sys: &IntegratedSystem,
    mode: FlowModel,
    config: &FormulationConfig,
    options: &SolveOptions,
    backend: &dyn Backend,
    window: usize,
    hours: Range<usize>,
) -> Result<ScheduleSolution, RunError> {
    let art = build(sys, mode, config)?;
    let raw = backend.solve(&art.model, options)?;
    log::info!(
        "window {window}: {} {} in {:.3}s ({} vars, {} rows, {} binaries)",
        mode,
        raw.status,
        raw.stats.wall_seconds,
        art.model.num_variables(),
        art.model.num_constraints(),
        art.model.num_binaries()
    );
    if !raw.status.has_values() {
        return Err(RunError::Unsolved {
            window,
            first: hours.start + 1,
            last: hours.end,
            status: raw.status,
        });
    }
    Ok(extract_schedule(&art, &raw, sys)?)
}

/// Solves `sys` in the windows given by `splits` and stitches the results.
///
/// With no split points this is [`solve_once`].
pub fn solve_split(
    sys: &IntegratedSystem,
    mode: FlowModel,
    config: &FormulationConfig,
    options: &SolveOptions,
    splits: &[usize],
    backend: &dyn Backend,
) -> Result<ScheduleSolution, RunError> {
    let ranges = windows(sys.hours, splits)?;
    if ranges.len() == 1 {
        return solve_once(sys, mode, config, options, backend);
    }
    let target: Vec<f64> = sys
        .gas
        .pipelines
        .iter()
        .map(|p| p.initial_linepack)
        .collect();
    let mut h0 = target.clone();
    let mut parts = Vec::with_capacity(ranges.len());
    let last = ranges.len() - 1;
    for (i, range) in ranges.into_iter().enumerate() {
        let window = sys.window(range.clone()).with_initial_linepack(&h0);
        let mut cfg = config.clone();
        cfg.terminal = if i == last {
            TerminalLinepack::AtLeast(target.clone())
        } else {
            TerminalLinepack::Free
        };
        let part = solve_window(&window, mode, &cfg, options, backend, i + 1, range)?;
        if let Some(h) = part.get(Symbol::H) {
            h0 = h
                .iter()
                .map(|s| *s.last().expect("window has hours"))
                .collect();
        }
        parts.push(part);
    }
    Ok(ScheduleSolution::concat(&parts).expect("windows share one formulation"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_ranges() {
        assert_eq!(windows(24, &[]).unwrap(), vec![0..24]);
        assert_eq!(windows(24, &[13]).unwrap(), vec![0..12, 12..24]);
        assert_eq!(windows(6, &[3, 5]).unwrap(), vec![0..2, 2..4, 4..6]);
        assert_eq!(windows(6, &[5]).unwrap(), vec![0..4, 4..6]);
    }

    #[test]
    fn bad_splits_rejected() {
        for bad in [&[1][..], &[6], &[7], &[4, 4], &[5, 3], &[0]] {
            assert!(windows(6, bad).is_err(), "{bad:?}");
        }
    }
}
