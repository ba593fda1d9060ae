//! Tabular and structured report documents.
//!
//! Every CSV document starts with a `# generated <time>` line followed by a
//! header row; hours are 1-based. The JSON summary carries no timestamps or
//! timings, so reruns with the same inputs reproduce it byte for byte.
//! Column layouts are described in `schema/reports-v1.md`.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::formulation::{FlowModel, Symbol};
use crate::network::IntegratedSystem;
use crate::solver::{ScheduleSolution, SolveStatus};

use super::{ApproxErrorReport, DirectionReport, ExactnessReport, LinepackProfile};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

pub fn timestamp_now() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("unix:{secs}")
}

fn start(generated: &str, columns: &str) -> String {
    format!("# generated {generated}\n{columns}\n")
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn delta_csv(report: &ApproxErrorReport, sys: &IntegratedSystem, generated: &str) -> String {
    let mut s = start(generated, "pipeline,hour,delta,defined");
    for d in &report.delta {
        let value = d.defined.then_some(d.value);
        let _ = writeln!(
            s,
            "{},{},{},{}",
            sys.gas.pipelines[d.pipeline].id,
            d.hour + 1,
            cell(value),
            d.defined
        );
    }
    s
}

pub fn directions_csv(report: &DirectionReport, sys: &IntegratedSystem, generated: &str) -> String {
    let mut s = start(
        generated,
        "pipeline,hour,forward,flow,pressure_sign,consistent",
    );
    for e in &report.entries {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            sys.gas.pipelines[e.pipeline].id,
            e.hour + 1,
            e.forward,
            e.flow,
            e.pressure_sign,
            e.consistent
        );
    }
    s
}

pub fn direction_changes_csv(
    report: &DirectionReport,
    sys: &IntegratedSystem,
    generated: &str,
) -> String {
    let mut s = start(generated, "pipeline,hour,from,to");
    let dir = |f: bool| if f { "forward" } else { "reverse" };
    for c in &report.changes {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            sys.gas.pipelines[c.pipeline].id,
            c.hour + 1,
            dir(c.from_forward),
            dir(c.to_forward)
        );
    }
    s
}

pub fn linepack_csv(profile: &LinepackProfile, generated: &str) -> String {
    let mut s = start(generated, "pipeline,hour,linepack,charge,discharge");
    for p in &profile.pipelines {
        for t in 0..p.linepack.len() {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                p.pipeline,
                t + 1,
                p.linepack[t],
                p.charge[t],
                p.discharge[t]
            );
        }
    }
    s
}

/// One column per labelled schedule of `sym` values for every pipeline-hour.
pub fn pipeline_series_csv(
    sym: Symbol,
    runs: &[(&str, &ScheduleSolution)],
    sys: &IntegratedSystem,
    generated: &str,
) -> String {
    let mut columns = String::from("pipeline,hour");
    for (label, _) in runs {
        let _ = write!(columns, ",{}_{label}", sym.prefix());
    }
    let mut s = start(generated, &columns);
    for (z, pipe) in sys.gas.pipelines.iter().enumerate() {
        for t in 0..sys.hours {
            let _ = write!(s, "{},{}", pipe.id, t + 1);
            for (_, run) in runs {
                let _ = write!(s, ",{}", run.value(sym, z, t));
            }
            s.push('\n');
        }
    }
    s
}

/// `Δ_a - Δ_b` as a pipeline-by-hour grid; blank where either is undefined.
pub fn delta_difference_csv(
    a: &ApproxErrorReport,
    b: &ApproxErrorReport,
    sys: &IntegratedSystem,
    generated: &str,
) -> String {
    let mut columns = String::from("pipeline");
    for t in 0..a.hours {
        let _ = write!(columns, ",h{}", t + 1);
    }
    let mut s = start(generated, &columns);
    for &z in &a.pipelines {
        s.push_str(&sys.gas.pipelines[z].id);
        for t in 0..a.hours {
            let v = match (a.get(z, t), b.get(z, t)) {
                (Some(x), Some(y)) if x.defined && y.defined => Some(x.value - y.value),
                _ => None,
            };
            let _ = write!(s, ",{}", cell(v));
        }
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    pub mode: FlowModel,
    pub status: SolveStatus,
    /// Set when the run stopped without a schedule.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub objective: Option<f64>,
    pub xi: Option<f64>,
    pub delta_undefined: Option<usize>,
    pub direction_consistency_percent: Option<f64>,
    pub inconsistent_cells: Option<usize>,
    pub direction_changes: Option<usize>,
    pub linepack_charge: Option<f64>,
    pub linepack_discharge: Option<f64>,
    pub exactness_passed: Option<bool>,
}

impl ModeReport {
    pub fn solved(
        s: &ScheduleSolution,
        delta: &ApproxErrorReport,
        directions: &DirectionReport,
        linepack: &LinepackProfile,
        exactness: &ExactnessReport,
    ) -> Self {
        Self {
            mode: s.mode,
            status: s.status,
            failure: None,
            objective: Some(s.objective),
            xi: Some(delta.xi),
            delta_undefined: Some(delta.undefined),
            direction_consistency_percent: Some(directions.consistency_percent()),
            inconsistent_cells: Some(directions.inconsistent),
            direction_changes: Some(directions.changes.len()),
            linepack_charge: Some(linepack.total_charge),
            linepack_discharge: Some(linepack.total_discharge),
            exactness_passed: Some(exactness.passed()),
        }
    }

    pub fn failed(mode: FlowModel, status: SolveStatus, failure: String) -> Self {
        Self {
            mode,
            status,
            failure: Some(failure),
            objective: None,
            xi: None,
            delta_undefined: None,
            direction_consistency_percent: None,
            inconsistent_cells: None,
            direction_changes: None,
            linepack_charge: None,
            linepack_discharge: None,
            exactness_passed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub system: String,
    pub hours: usize,
    pub points: usize,
    pub tightening: bool,
    pub split: Vec<usize>,
    pub modes: Vec<ModeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub savings_percent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gfpp_share_percent_uni: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gfpp_share_percent_bi: Option<f64>,
}

impl Summary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }
}
