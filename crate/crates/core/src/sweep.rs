//! Data-parallel batch work: many independent LP/MILP solves and bulk plane
//! evaluations.
//!
//! With the `parallel` feature (on by default) [`map`] fans out over the rayon
//! pool; without it, or through [`map_sequential`], items run in order on the
//! calling thread. Results always come back in input order.

use crate::formulation::{build, FlowModel, FormulationConfig, FormulationError, Plane};
use crate::model::OptModel;
use crate::network::IntegratedSystem;
use crate::solver::{Backend, RawSolution, SolveError, SolveOptions, SolveStatus};

/// Largest `|Z|·|T|` accepted by [`enumerate_direction_patterns`].
pub const MAX_ENUMERATION_CELLS: usize = 20;

pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_parallel<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Order-preserving map, parallel when the `parallel` feature is enabled.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_parallel(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_sequential(items, f)
    }
}

pub fn solve_batch(
    models: &[OptModel],
    options: &SolveOptions,
    backend: &dyn Backend,
) -> Vec<Result<RawSolution, SolveError>> {
    map(models, |m| backend.solve(m, options))
}

/// Smallest value of `plane(pm, pu) - exact(pm, pu)` over all planes and
/// samples, where `exact` is supplied by the caller.
pub fn min_plane_slack<E>(planes: &[Plane], samples: &[(f64, f64)], exact: E) -> f64
where
    E: Fn(f64, f64) -> f64 + Sync + Send,
{
    let per_sample = |&(pm, pu): &(f64, f64)| {
        let e = exact(pm, pu);
        planes
            .iter()
            .map(|pl| pl.eval(pm, pu) - e)
            .fold(f64::INFINITY, f64::min)
    };
    map(samples, per_sample)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// Direction pattern `pattern[z][t]`, `true` = declared orientation.
pub type DirectionPattern = Vec<Vec<bool>>;

/// Outcome of solving one LP per direction pattern.
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub patterns: usize,
    pub feasible: usize,
    /// Cheapest feasible pattern and its objective.
    pub best: Option<(DirectionPattern, f64)>,
}

pub fn pattern_from_index(index: usize, pipelines: usize, hours: usize) -> DirectionPattern {
    (0..pipelines)
        .map(|z| {
            (0..hours)
                .map(|t| index >> (z * hours + t) & 1 == 1)
                .collect()
        })
        .collect()
}

#[derive(Debug, thiserror::Error)]
pub enum EnumerationError {
    #[error(transparent)]
    Formulation(#[from] FormulationError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("{cells} direction cells exceed the enumeration limit of {MAX_ENUMERATION_CELLS}")]
    TooLarge { cells: usize },
}

/// Solves the bidirectional model once for each of the `2^(|Z|·|T|)` fixed
/// direction patterns.
pub fn enumerate_direction_patterns(
    sys: &IntegratedSystem,
    config: &FormulationConfig,
    options: &SolveOptions,
    backend: &dyn Backend,
    parallel: bool,
) -> Result<Enumeration, EnumerationError> {
    let (nz, nt) = (sys.gas.pipelines.len(), sys.hours);
    let cells = nz * nt;
    if cells > MAX_ENUMERATION_CELLS {
        return Err(EnumerationError::TooLarge { cells });
    }
    let base = build(sys, FlowModel::Bidirectional, config)?;
    let indices: Vec<usize> = (0..1usize << cells).collect();
    let run = |&i: &usize| -> Result<Option<f64>, EnumerationError> {
        let mut art = base.clone();
        art.fix_directions(&pattern_from_index(i, nz, nt))?;
        let raw = backend.solve(&art.model, options)?;
        Ok(match raw.status {
            SolveStatus::Optimal => Some(raw.objective),
            SolveStatus::Infeasible => None,
            other => {
                return Err(SolveError::Failed(format!("pattern {i} finished {other}")).into());
            }
        })
    };
    let results = if parallel {
        map(&indices, run)
    } else {
        map_sequential(&indices, run)
    };
    let mut out = Enumeration {
        patterns: indices.len(),
        feasible: 0,
        best: None,
    };
    let mut best: Option<(usize, f64)> = None;
    for (i, r) in results.into_iter().enumerate() {
        if let Some(obj) = r? {
            out.feasible += 1;
            if best.is_none_or(|(_, b)| obj < b) {
                best = Some((i, obj));
            }
        }
    }
    out.best = best.map(|(i, obj)| (pattern_from_index(i, nz, nt), obj));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_keeps_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map(&xs, |x| x * x);
        let b = map_sequential(&xs, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(a[999], 999 * 999);
    }

    #[test]
    fn patterns_cover_all_bits() {
        let p = pattern_from_index(0b10_01, 2, 2);
        assert_eq!(p, vec![vec![true, false], vec![false, true]]);
        let all: std::collections::BTreeSet<_> =
            (0..16).map(|i| pattern_from_index(i, 2, 2)).collect();
        assert_eq!(all.len(), 16);
    }

    #[test]
    fn slack_of_single_plane() {
        let pl = Plane::at(1.0, (2.0, 1.0)).unwrap();
        let s = min_plane_slack(&[pl], &[(2.0, 1.0), (4.0, 2.0)], |pm, pu| {
            (pm * pm - pu * pu).sqrt()
        });
        assert!(s.abs() < 1e-12);
    }
}
