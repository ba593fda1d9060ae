use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formulation::{EntityKind, FlowModel, FormulationArtifacts, Symbol};
use crate::network::IntegratedSystem;

use super::{RawSolution, SolveStats, SolveStatus};

/// Allowed distance of a direction binary from 0 or 1.
pub const BINARY_TOLERANCE: f64 = 1e-6;
/// Allowed excursion of a value beyond its variable bounds.
pub const BOUND_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("solution has no values (status {0})")]
    NoValues(SolveStatus),
    #[error("variable `{0}` missing from solution")]
    MissingVariable(String),
    #[error("solution violates invariants: {}", .0.join("; "))]
    Invariant(Vec<String>),
    #[error("solution document: {0}")]
    Document(String),
}

/// Optimal values of every decision variable, `values[symbol][entity][hour]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleSolution {
    pub mode: FlowModel,
    pub status: SolveStatus,
    pub objective: f64,
    pub hours: usize,
    pub stats: SolveStats,
    pub values: BTreeMap<Symbol, Vec<Vec<f64>>>,
}

impl ScheduleSolution {
    pub fn get(&self, sym: Symbol) -> Option<&Vec<Vec<f64>>> {
        self.values.get(&sym)
    }

    /// Series of `sym` for entity index `entity`.
    ///
    /// Panics if the symbol is absent from this solution.
    pub fn series(&self, sym: Symbol, entity: usize) -> &[f64] {
        &self.values[&sym][entity]
    }

    pub fn value(&self, sym: Symbol, entity: usize, hour: usize) -> f64 {
        self.values[&sym][entity][hour]
    }

    pub fn has(&self, sym: Symbol) -> bool {
        self.values.contains_key(&sym)
    }

    pub fn to_document(&self, sys: &IntegratedSystem) -> SolutionDocument {
        let series = self
            .values
            .iter()
            .map(|(sym, grid)| {
                let ids = sym.entity_kind().ids(sys);
                let by_id = ids
                    .into_iter()
                    .zip(grid)
                    .map(|(id, s)| (id.to_string(), s.clone()))
                    .collect();
                (sym.prefix().to_string(), by_id)
            })
            .collect();
        SolutionDocument {
            format_version: 1,
            system: sys.name.clone(),
            mode: self.mode,
            status: self.status,
            objective: self.objective,
            hours: self.hours,
            backend: self.stats.backend.clone(),
            series,
        }
    }

    pub fn from_document(
        doc: &SolutionDocument,
        sys: &IntegratedSystem,
    ) -> Result<Self, ExtractError> {
        let mut values = BTreeMap::new();
        for (prefix, by_id) in &doc.series {
            let sym = Symbol::from_prefix(prefix)
                .ok_or_else(|| ExtractError::Document(format!("unknown symbol `{prefix}`")))?;
            let grid = sym
                .entity_kind()
                .ids(sys)
                .into_iter()
                .map(|id| {
                    let s = by_id.get(id).ok_or_else(|| {
                        ExtractError::Document(format!("series `{prefix}.{id}` missing"))
                    })?;
                    if s.len() != doc.hours {
                        return Err(ExtractError::Document(format!(
                            "series `{prefix}.{id}` has {} entries, expected {}",
                            s.len(),
                            doc.hours
                        )));
                    }
                    Ok(s.clone())
                })
                .collect::<Result<Vec<_>, _>>()?;
            values.insert(sym, grid);
        }
        Ok(Self {
            mode: doc.mode,
            status: doc.status,
            objective: doc.objective,
            hours: doc.hours,
            stats: SolveStats {
                backend: doc.backend.clone(),
                wall_seconds: 0.0,
                gap: None,
            },
            values,
        })
    }

    /// Joins consecutive horizon windows into one schedule. Objectives add.
    pub fn concat(parts: &[ScheduleSolution]) -> Option<ScheduleSolution> {
        let first = parts.first()?;
        let mut out = first.clone();
        for part in &parts[1..] {
            if part.mode != out.mode || part.values.len() != out.values.len() {
                return None;
            }
            for (sym, grid) in out.values.iter_mut() {
                let other = part.values.get(sym)?;
                for (a, b) in grid.iter_mut().zip(other) {
                    a.extend_from_slice(b);
                }
            }
            out.hours += part.hours;
            out.objective += part.objective;
            out.stats.wall_seconds += part.stats.wall_seconds;
            out.stats.gap = match (out.stats.gap, part.stats.gap) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
            if part.status == SolveStatus::FeasibleLimit {
                out.status = SolveStatus::FeasibleLimit;
            }
        }
        Some(out)
    }
}

/// Structured solution file: series keyed by symbol prefix and entity id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDocument {
    pub format_version: u32,
    pub system: String,
    pub mode: FlowModel,
    pub status: SolveStatus,
    pub objective: f64,
    pub hours: usize,
    pub backend: String,
    pub series: BTreeMap<String, BTreeMap<String, Vec<f64>>>,
}

/// Reads every symbol of `art` out of `raw` and checks binaries and bounds.
pub fn extract_schedule(
    art: &FormulationArtifacts,
    raw: &RawSolution,
    _sys: &IntegratedSystem,
) -> Result<ScheduleSolution, ExtractError> {
    let vals = raw
        .values
        .as_ref()
        .ok_or(ExtractError::NoValues(raw.status))?;
    let mut values = BTreeMap::new();
    let mut problems = Vec::new();
    for sym in art.symbols() {
        let grid = art.grid(sym).expect("symbol listed by artifacts");
        let mut out = Vec::with_capacity(grid.len());
        for row in grid {
            let mut series = Vec::with_capacity(row.len());
            for &id in row {
                let spec = art.model.variable(id);
                let v = *vals
                    .get(&spec.name)
                    .ok_or_else(|| ExtractError::MissingVariable(spec.name.clone()))?;
                if sym == Symbol::Y && (v - v.round()).abs() > BINARY_TOLERANCE {
                    problems.push(format!("`{}` = {v} is not binary", spec.name));
                }
                if v < spec.lower - BOUND_TOLERANCE || v > spec.upper + BOUND_TOLERANCE {
                    problems.push(format!(
                        "`{}` = {v} outside [{}, {}]",
                        spec.name, spec.lower, spec.upper
                    ));
                }
                series.push(v);
            }
            out.push(series);
        }
        values.insert(sym, out);
    }
    if !problems.is_empty() {
        return Err(ExtractError::Invariant(problems));
    }
    Ok(ScheduleSolution {
        mode: art.flow_model,
        status: raw.status,
        objective: raw.objective,
        hours: art.hours,
        stats: raw.stats.clone(),
        values,
    })
}

impl EntityKind {
    pub fn count(self, sys: &IntegratedSystem) -> usize {
        self.ids(sys).len()
    }
}
