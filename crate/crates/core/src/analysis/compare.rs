use serde::{Deserialize, Serialize};

use crate::formulation::{FlowModel, Symbol};
use crate::network::IntegratedSystem;
use crate::solver::ScheduleSolution;

use super::linepack::{linepack_profile, LinepackProfile};
use super::AnalysisError;

/// Hour-to-hour output change of one generator as a percentage of capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RampSeries {
    pub generator: String,
    pub gas_fired: bool,
    /// Entry `t - 1` is the change from hour `t - 1` to hour `t`.
    pub percent: Vec<f64>,
    pub max_up: f64,
    pub max_down: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub mode: FlowModel,
    pub cost: f64,
    /// GFPP output over total electric demand, in percent.
    pub gfpp_share_percent: f64,
    pub linepack: LinepackProfile,
    pub ramps: Vec<RampSeries>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub cost_uni: f64,
    pub cost_bi: f64,
    pub savings_percent: f64,
    pub uni: ModeSummary,
    pub bi: ModeSummary,
}

pub fn ramp_percent(output: &[f64], capacity: f64) -> Vec<f64> {
    output
        .windows(2)
        .map(|w| (w[1] - w[0]) / capacity * 100.0)
        .collect()
}

fn check_shape(s: &ScheduleSolution, sys: &IntegratedSystem) -> Result<(), AnalysisError> {
    if s.hours != sys.hours {
        return Err(AnalysisError::Mismatch(format!(
            "{} schedule has {} hours, system has {}",
            s.mode, s.hours, sys.hours
        )));
    }
    let counts = [
        (Symbol::P, sys.power.generators.len()),
        (Symbol::Pr, sys.gas.nodes.len()),
        (Symbol::Q, sys.gas.pipelines.len()),
        (Symbol::H, sys.gas.pipelines.len()),
    ];
    for (sym, n) in counts {
        let grid = s
            .get(sym)
            .ok_or(AnalysisError::MissingSymbol(sym.prefix()))?;
        if grid.len() != n {
            return Err(AnalysisError::Mismatch(format!(
                "{} schedule has {} `{}` series, system has {n}",
                s.mode,
                grid.len(),
                sym.prefix()
            )));
        }
    }
    Ok(())
}

fn summarize(s: &ScheduleSolution, sys: &IntegratedSystem) -> ModeSummary {
    let gens = &sys.power.generators;
    let gfpp: f64 = gens
        .iter()
        .enumerate()
        .filter(|(_, g)| g.is_gas_fired())
        .flat_map(|(i, _)| s.series(Symbol::P, i))
        .sum();
    let demand = sys.total_electric_demand();
    let ramps = gens
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let percent = ramp_percent(s.series(Symbol::P, i), g.capacity);
            RampSeries {
                generator: g.id.clone(),
                gas_fired: g.is_gas_fired(),
                max_up: percent.iter().copied().fold(0.0, f64::max),
                max_down: percent.iter().map(|p| -p).fold(0.0, f64::max),
                percent,
            }
        })
        .collect();
    ModeSummary {
        mode: s.mode,
        cost: s.objective,
        gfpp_share_percent: if demand > 0.0 {
            gfpp / demand * 100.0
        } else {
            0.0
        },
        linepack: linepack_profile(s, sys),
        ramps,
    }
}

/// Costs, savings and utilization metrics of a unidirectional and a
/// bidirectional schedule of the same system.
pub fn compare_runs(
    uni: &ScheduleSolution,
    bi: &ScheduleSolution,
    sys: &IntegratedSystem,
) -> Result<ComparisonReport, AnalysisError> {
    check_shape(uni, sys)?;
    check_shape(bi, sys)?;
    let savings_percent = if uni.objective == 0.0 {
        0.0
    } else {
        (uni.objective - bi.objective) / uni.objective * 100.0
    };
    Ok(ComparisonReport {
        cost_uni: uni.objective,
        cost_bi: bi.objective,
        savings_percent,
        uni: summarize(uni, sys),
        bi: summarize(bi, sys),
    })
}
