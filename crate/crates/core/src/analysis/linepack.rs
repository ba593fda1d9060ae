use serde::{Deserialize, Serialize};

use crate::formulation::Symbol;
use crate::network::IntegratedSystem;
use crate::solver::ScheduleSolution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineLinepack {
    pub pipeline: String,
    pub initial: f64,
    pub linepack: Vec<f64>,
    pub charge: Vec<f64>,
    pub discharge: Vec<f64>,
    pub total_charge: f64,
    pub total_discharge: f64,
    /// Final linepack is no lower than the initial level (to 1e-9).
    pub terminal_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinepackProfile {
    pub pipelines: Vec<PipelineLinepack>,
    pub total_charge: f64,
    pub total_discharge: f64,
}

pub fn linepack_profile(schedule: &ScheduleSolution, sys: &IntegratedSystem) -> LinepackProfile {
    let pipelines: Vec<PipelineLinepack> = sys
        .gas
        .pipelines
        .iter()
        .enumerate()
        .map(|(z, pipe)| {
            let h = schedule.series(Symbol::H, z).to_vec();
            let mut prev = pipe.initial_linepack;
            let (mut charge, mut discharge) = (Vec::new(), Vec::new());
            for &ht in &h {
                charge.push((ht - prev).max(0.0));
                discharge.push((prev - ht).max(0.0));
                prev = ht;
            }
            PipelineLinepack {
                pipeline: pipe.id.clone(),
                initial: pipe.initial_linepack,
                terminal_ok: h
                    .last()
                    .is_none_or(|&last| last >= pipe.initial_linepack - 1e-9),
                total_charge: charge.iter().sum(),
                total_discharge: discharge.iter().sum(),
                linepack: h,
                charge,
                discharge,
            }
        })
        .collect();
    LinepackProfile {
        total_charge: pipelines.iter().map(|p| p.total_charge).sum(),
        total_discharge: pipelines.iter().map(|p| p.total_discharge).sum(),
        pipelines,
    }
}
