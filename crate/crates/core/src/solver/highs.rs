use std::collections::BTreeMap;
use std::num::NonZeroU32;
use std::time::Instant;

use highs::{HighsModelStatus, RowProblem, Sense};

use crate::model::{ConstraintSense, OptModel, VarKind};

use super::{Backend, RawSolution, SolveError, SolveOptions, SolveStats, SolveStatus};

/// In-process HiGHS.
#[derive(Debug, Clone, Copy, Default)]
pub struct HighsBackend;

impl Backend for HighsBackend {
    fn name(&self) -> &str {
        "highs"
    }

    fn solve(&self, model: &OptModel, options: &SolveOptions) -> Result<RawSolution, SolveError> {
        options.validate()?;
        let start = Instant::now();
        let mut pb = RowProblem::default();
        let mut cost = vec![0.0; model.num_variables()];
        for &(v, c) in model.objective() {
            cost[v.0] += c;
        }
        let cols: Vec<_> = model
            .variables()
            .iter()
            .zip(&cost)
            .map(|(v, &c)| match v.kind {
                VarKind::Binary => pb.add_integer_column(c, v.lower..=v.upper),
                VarKind::Continuous => pb.add_column(c, v.lower..=v.upper),
            })
            .collect();
        for c in model.constraints() {
            let factors: Vec<_> = c.terms.iter().map(|&(v, a)| (cols[v.0], a)).collect();
            match c.sense {
                ConstraintSense::Le => pb.add_row(..=c.rhs, factors),
                ConstraintSense::Ge => pb.add_row(c.rhs.., factors),
                ConstraintSense::Eq => pb.add_row(c.rhs..=c.rhs, factors),
            }
        }

        let mut hm = pb.optimise(Sense::Minimise);
        hm.make_quiet();
        let set = |hm: &mut highs::Model, key: &str, v: f64| {
            hm.try_set_option(key, v)
                .map_err(|s| SolveError::InvalidOptions(format!("{key}: {s:?}")))
        };
        set(&mut hm, "mip_rel_gap", options.mip_gap)?;
        set(&mut hm, "time_limit", options.time_limit_secs)?;
        set(
            &mut hm,
            "primal_feasibility_tolerance",
            options.feasibility_tolerance,
        )?;
        set(
            &mut hm,
            "mip_feasibility_tolerance",
            options.feasibility_tolerance,
        )?;
        if let Some(seed) = options.seed {
            hm.try_set_option("random_seed", seed as i32)
                .map_err(|s| SolveError::InvalidOptions(format!("random_seed: {s:?}")))?;
        }
        if let Some(n) = options.threads.and_then(NonZeroU32::new) {
            hm.set_threads(n);
        }

        let solved = hm
            .try_solve()
            .map_err(|s| SolveError::Failed(format!("HiGHS run returned {s:?}")))?;
        let mip = model.num_binaries() > 0;
        let stats = SolveStats {
            backend: self.name().to_string(),
            wall_seconds: start.elapsed().as_secs_f64(),
            gap: Some(if mip { solved.mip_gap() } else { 0.0 }),
        };
        let status = match solved.status() {
            HighsModelStatus::Optimal | HighsModelStatus::ModelEmpty => SolveStatus::Optimal,
            HighsModelStatus::Infeasible | HighsModelStatus::UnboundedOrInfeasible => {
                SolveStatus::Infeasible
            }
            HighsModelStatus::Unbounded => SolveStatus::Unbounded,
            HighsModelStatus::ReachedTimeLimit
            | HighsModelStatus::ReachedIterationLimit
            | HighsModelStatus::ReachedSolutionLimit
            | HighsModelStatus::ReachedInterrupt => {
                let has_point = matches!(
                    solved.primal_solution_status(),
                    highs::HighsSolutionStatus::Feasible
                );
                if !has_point {
                    return Err(SolveError::NoIncumbent);
                }
                SolveStatus::FeasibleLimit
            }
            other => {
                log::warn!("HiGHS finished with status {other:?}");
                return Ok(RawSolution::without_values(SolveStatus::Error, stats));
            }
        };
        if !status.has_values() {
            return Ok(RawSolution::without_values(status, stats));
        }
        let sol = solved.get_solution();
        let values: BTreeMap<String, f64> = model
            .variables()
            .iter()
            .zip(sol.columns())
            .map(|(v, &x)| (v.name.clone(), x))
            .collect();
        let dense: Vec<f64> = sol.columns().to_vec();
        Ok(RawSolution {
            status,
            objective: model.objective_value(&dense),
            values: Some(values),
            stats,
        })
    }
}
