use serde::{Deserialize, Serialize};

use crate::formulation::{BigMConfig, Symbol};
use crate::network::IntegratedSystem;
use crate::solver::ScheduleSolution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionEntry {
    pub pipeline: usize,
    pub hour: usize,
    /// Direction chosen by the model: `y` in bidirectional runs, always the
    /// declared orientation in unidirectional runs.
    pub forward: bool,
    pub flow: f64,
    /// Sign of `pr_from^2 - pr_to^2`: -1, 0 or 1.
    pub pressure_sign: i8,
    pub consistent: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionChange {
    pub pipeline: usize,
    /// First hour of the new direction.
    pub hour: usize,
    pub from_forward: bool,
    pub to_forward: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionReport {
    /// Non-compressor pipelines only, pipeline-major.
    pub entries: Vec<DirectionEntry>,
    pub changes: Vec<DirectionChange>,
    pub inconsistent: usize,
}

impl DirectionReport {
    pub fn all_consistent(&self) -> bool {
        self.inconsistent == 0
    }

    pub fn consistency_percent(&self) -> f64 {
        if self.entries.is_empty() {
            return 100.0;
        }
        100.0 * (self.entries.len() - self.inconsistent) as f64 / self.entries.len() as f64
    }
}

/// `1e-6 * M_flow` per pipeline.
pub fn default_flow_tolerance(big_m: &BigMConfig) -> Vec<f64> {
    big_m.pipelines.iter().map(|m| 1e-6 * m.flow).collect()
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Checks each pipeline-hour flow against the direction implied by the
/// optimal pressures, and lists every change of `y`.
///
/// `tol_flow[z]` is the flow magnitude below which pipeline `z` counts as
/// idle and therefore consistent.
pub fn verify_directions(
    schedule: &ScheduleSolution,
    sys: &IntegratedSystem,
    tol_flow: &[f64],
) -> DirectionReport {
    let y = schedule.get(Symbol::Y);
    let mut entries = Vec::new();
    let mut changes = Vec::new();
    for (z, pipe) in sys.gas.pipelines.iter().enumerate() {
        let forward_at = |t: usize| y.is_none_or(|y| y[z][t] > 0.5);
        for t in 1..schedule.hours {
            if forward_at(t) != forward_at(t - 1) {
                changes.push(DirectionChange {
                    pipeline: z,
                    hour: t,
                    from_forward: forward_at(t - 1),
                    to_forward: forward_at(t),
                });
            }
        }
        if pipe.has_compressor() {
            continue;
        }
        for t in 0..schedule.hours {
            let q = schedule.value(Symbol::Q, z, t);
            let pm = schedule.value(Symbol::Pr, pipe.from, t);
            let pu = schedule.value(Symbol::Pr, pipe.to, t);
            let pressure_sign = sign(pm * pm - pu * pu);
            let consistent = q.abs() <= tol_flow[z] || sign(q) == pressure_sign;
            entries.push(DirectionEntry {
                pipeline: z,
                hour: t,
                forward: forward_at(t),
                flow: q,
                pressure_sign,
                consistent,
            });
        }
    }
    let inconsistent = entries.iter().filter(|e| !e.consistent).count();
    DirectionReport {
        entries,
        changes,
        inconsistent,
    }
}
