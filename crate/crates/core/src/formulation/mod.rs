//! Translation of an [`IntegratedSystem`] into the unidirectional LP or the
//! bidirectional MILP.
//!
//! Variable names follow `<symbol>_<entity>_t<hour>` with 1-based hours, e.g.
//! `pr_m4_t15` or `y_m6_m8_t15` for a pipeline whose id is `m6_m8`.

mod bigm;
mod gas;
mod points;
mod power;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelError, OptModel, VarId, VariableSpec};
use crate::network::IntegratedSystem;

pub use bigm::{derive_big_m, plane_deactivation, BigMConfig, BigMOverrides, PipelineBigM};
pub use gas::{
    build_bidirectional_gas_block, build_common_gas_block, build_unidirectional_gas_block,
};
pub use points::{
    expansion_point_set, expansion_points, reverse_expansion_points, weymouth_plane_coefficients,
    ExpansionPointSet, Plane,
};
pub use power::{build_objective, build_power_block};

#[derive(Debug, Error)]
pub enum FormulationError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("power network has no reference node")]
    NoReferenceNode,
    #[error("pipeline `{pipeline}` cannot carry forward flow: its pressure boxes admit no point with sender above receiver")]
    NoForwardFlow { pipeline: String },
    #[error("degenerate expansion point ({high}, {low}): sending pressure must exceed receiving pressure")]
    DegenerateExpansionPoint { high: f64, low: f64 },
    #[error("pipeline `{pipeline}` has no expansion points")]
    EmptyExpansionPoints { pipeline: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowModel {
    #[serde(rename = "uni")]
    Unidirectional,
    #[serde(rename = "bi")]
    Bidirectional,
}

impl fmt::Display for FlowModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlowModel::Unidirectional => "uni",
            FlowModel::Bidirectional => "bi",
        })
    }
}

/// Decision-variable families, keyed by the entity kind they are indexed by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Symbol {
    /// Generator output.
    P,
    /// Wind dispatch.
    W,
    /// Gas supply.
    G,
    /// Voltage angle per power node.
    Theta,
    /// Line flow.
    F,
    /// Gas node pressure.
    Pr,
    /// Net pipeline flow, positive along the declared orientation.
    Q,
    QIn,
    QOut,
    /// Linepack.
    H,
    QPlus,
    QMinus,
    /// Inflow of the reverse direction, entering at the declared receiver.
    QInRev,
    QOutRev,
    /// Direction binary: 1 along the declared orientation.
    Y,
    /// Pressure of the declared sender times `y`.
    PhiFrom,
    /// Pressure of the declared receiver times `y`.
    PhiTo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntityKind {
    Generator,
    WindFarm,
    Supplier,
    PowerNode,
    Line,
    GasNode,
    Pipeline,
}

impl Symbol {
    pub const ALL: [Symbol; 17] = [
        Symbol::P,
        Symbol::W,
        Symbol::G,
        Symbol::Theta,
        Symbol::F,
        Symbol::Pr,
        Symbol::Q,
        Symbol::QIn,
        Symbol::QOut,
        Symbol::H,
        Symbol::QPlus,
        Symbol::QMinus,
        Symbol::QInRev,
        Symbol::QOutRev,
        Symbol::Y,
        Symbol::PhiFrom,
        Symbol::PhiTo,
    ];

    /// Name prefix used for variables and in solution documents.
    pub fn prefix(self) -> &'static str {
        match self {
            Symbol::P => "p",
            Symbol::W => "w",
            Symbol::G => "g",
            Symbol::Theta => "theta",
            Symbol::F => "f",
            Symbol::Pr => "pr",
            Symbol::Q => "q",
            Symbol::QIn => "qin",
            Symbol::QOut => "qout",
            Symbol::H => "h",
            Symbol::QPlus => "qplus",
            Symbol::QMinus => "qminus",
            Symbol::QInRev => "qinrev",
            Symbol::QOutRev => "qoutrev",
            Symbol::Y => "y",
            Symbol::PhiFrom => "phifrom",
            Symbol::PhiTo => "phito",
        }
    }

    pub fn from_prefix(s: &str) -> Option<Symbol> {
        Symbol::ALL.into_iter().find(|sym| sym.prefix() == s)
    }

    pub fn entity_kind(self) -> EntityKind {
        match self {
            Symbol::P => EntityKind::Generator,
            Symbol::W => EntityKind::WindFarm,
            Symbol::G => EntityKind::Supplier,
            Symbol::Theta => EntityKind::PowerNode,
            Symbol::F => EntityKind::Line,
            Symbol::Pr => EntityKind::GasNode,
            _ => EntityKind::Pipeline,
        }
    }
}

impl EntityKind {
    pub fn ids(self, sys: &IntegratedSystem) -> Vec<&str> {
        let p = &sys.power;
        let g = &sys.gas;
        match self {
            EntityKind::Generator => p.generators.iter().map(|x| x.id.as_str()).collect(),
            EntityKind::WindFarm => p.wind.iter().map(|x| x.id.as_str()).collect(),
            EntityKind::Supplier => g.suppliers.iter().map(|x| x.id.as_str()).collect(),
            EntityKind::PowerNode => p.nodes.iter().map(|x| x.id.as_str()).collect(),
            EntityKind::Line => p.lines.iter().map(|x| x.id.as_str()).collect(),
            EntityKind::GasNode => g.nodes.iter().map(|x| x.id.as_str()).collect(),
            EntityKind::Pipeline => g.pipelines.iter().map(|x| x.id.as_str()).collect(),
        }
    }
}

/// What to require of the linepack at the last hour of the horizon.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum TerminalLinepack {
    /// `h_T >= H0` per pipeline.
    #[default]
    AtLeastInitial,
    /// `h_T >= target[z]` per pipeline.
    AtLeast(Vec<f64>),
    /// No terminal requirement (intermediate horizon windows).
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormulationConfig {
    /// Expansion points per pipeline and direction.
    pub points: usize,
    /// Pressure drop (bar) needed to carry a pipeline's maximum flow through
    /// the direction-gated flow bounds.
    pub pressure_resolution: f64,
    pub big_m: BigMOverrides,
    /// Generate the flow-direction tightening constraints.
    pub tightening: bool,
    pub terminal: TerminalLinepack,
}

impl Default for FormulationConfig {
    fn default() -> Self {
        Self {
            points: 5,
            pressure_resolution: 0.1,
            big_m: BigMOverrides::default(),
            tightening: true,
            terminal: TerminalLinepack::AtLeastInitial,
        }
    }
}

impl FormulationConfig {
    pub fn validate(&self) -> Result<(), FormulationError> {
        if self.points == 0 {
            return Err(FormulationError::InvalidConfig(
                "expansion point count must be at least 1".into(),
            ));
        }
        if !(self.pressure_resolution > 0.0 && self.pressure_resolution.is_finite()) {
            return Err(FormulationError::InvalidConfig(
                "pressure resolution must be positive".into(),
            ));
        }
        for (what, v) in [
            ("flow", self.big_m.flow),
            ("pressure", self.big_m.pressure),
            ("slope", self.big_m.slope),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(FormulationError::InvalidConfig(format!(
                        "big-M {what} override must be positive and finite"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Variable ids of one symbol, `[entity][hour]`.
pub type VarGrid = Vec<Vec<VarId>>;

/// A built model together with the index maps from symbols to variables.
#[derive(Debug, Clone)]
pub struct FormulationArtifacts {
    pub model: OptModel,
    pub flow_model: FlowModel,
    pub hours: usize,
    pub points: ExpansionPointSet,
    pub big_m: BigMConfig,
    vars: BTreeMap<Symbol, VarGrid>,
}

impl FormulationArtifacts {
    pub fn new(flow_model: FlowModel, hours: usize) -> Self {
        Self {
            model: OptModel::new(),
            flow_model,
            hours,
            points: ExpansionPointSet::default(),
            big_m: BigMConfig::default(),
            vars: BTreeMap::new(),
        }
    }

    pub fn grid(&self, sym: Symbol) -> Option<&VarGrid> {
        self.vars.get(&sym)
    }

    pub fn var(&self, sym: Symbol, entity: usize, hour: usize) -> Option<VarId> {
        self.vars.get(&sym)?.get(entity)?.get(hour).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.vars.keys().copied()
    }

    /// Creates one variable per entity and hour. `spec(entity, hour)` gives
    /// kind and bounds; the name is filled in from `ids`.
    pub(crate) fn add_grid(
        &mut self,
        sym: Symbol,
        ids: &[&str],
        mut spec: impl FnMut(usize, usize) -> VariableSpec,
    ) -> Result<(), FormulationError> {
        let mut grid = Vec::with_capacity(ids.len());
        for (e, id) in ids.iter().enumerate() {
            let mut row = Vec::with_capacity(self.hours);
            for t in 0..self.hours {
                let mut s = spec(e, t);
                s.name = format!("{}_{}_t{}", sym.prefix(), id, t + 1);
                row.push(self.model.add_variable(s)?);
            }
            grid.push(row);
        }
        self.vars.insert(sym, grid);
        Ok(())
    }

    pub(crate) fn at(&self, sym: Symbol, entity: usize, hour: usize) -> VarId {
        self.vars[&sym][entity][hour]
    }

    /// Fixes the direction binary of `pipeline` at `hour`
    /// (`true` = declared orientation).
    pub fn fix_direction(
        &mut self,
        pipeline: usize,
        hour: usize,
        forward: bool,
    ) -> Result<(), FormulationError> {
        let y = self.var(Symbol::Y, pipeline, hour).ok_or_else(|| {
            FormulationError::InvalidConfig(
                "only bidirectional models have direction binaries".into(),
            )
        })?;
        let v = if forward { 1.0 } else { 0.0 };
        self.model.set_bounds(y, v, v)?;
        Ok(())
    }

    /// Fixes every direction binary; `pattern[z][t]`.
    pub fn fix_directions(&mut self, pattern: &[Vec<bool>]) -> Result<(), FormulationError> {
        for (z, row) in pattern.iter().enumerate() {
            for (t, &fwd) in row.iter().enumerate() {
                self.fix_direction(z, t, fwd)?;
            }
        }
        Ok(())
    }
}

/// Builds the complete model of `system` for `flow_model`.
pub fn build(
    system: &IntegratedSystem,
    flow_model: FlowModel,
    config: &FormulationConfig,
) -> Result<FormulationArtifacts, FormulationError> {
    config.validate()?;
    let mut art = FormulationArtifacts::new(flow_model, system.hours);
    let points = expansion_point_set(system, config.points)?;
    let big_m = derive_big_m(system, config.pressure_resolution, config.big_m);
    build_power_block(system, &mut art)?;
    build_common_gas_block(system, &mut art)?;
    match flow_model {
        FlowModel::Unidirectional => {
            build_unidirectional_gas_block(system, &mut art, &points, &big_m, config)?
        }
        FlowModel::Bidirectional => {
            build_bidirectional_gas_block(system, &mut art, &points, &big_m, config)?
        }
    }
    build_objective(system, &mut art)?;
    art.points = points;
    art.big_m = big_m;
    Ok(art)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefixes_round_trip() {
        for s in Symbol::ALL {
            assert_eq!(Symbol::from_prefix(s.prefix()), Some(s));
        }
    }

    #[test]
    fn config_checks() {
        let mut c = FormulationConfig::default();
        assert!(c.validate().is_ok());
        c.points = 0;
        assert!(c.validate().is_err());
        c.points = 2;
        c.big_m.flow = Some(-1.0);
        assert!(c.validate().is_err());
    }
}
