//! Integrated power and gas system description.
//!
//! Systems are read from a versioned TOML document (see
//! `schema/system-v1.md` at the repository root). Loading resolves every
//! node reference to an index and checks series lengths; value-level rules
//! are reported separately by [`validate_system`] so a CLI can list all of
//! them at once.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;
pub const PRESSURE_UNIT: &str = "bar";
pub const POWER_UNIT: &str = "MW";
pub const GAS_UNIT: &str = "MWh";

/// Voltage angle bound on every power node, in radians.
pub const ANGLE_LIMIT: f64 = PI;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: unknown {kind} node `{node}`")]
    DanglingNode {
        path: String,
        kind: &'static str,
        node: String,
    },
    #[error("{path}: series has {found} entries, expected {expected}")]
    SeriesLength {
        path: String,
        expected: usize,
        found: usize,
    },
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> DataError {
    DataError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerNode {
    pub id: String,
    pub reference: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub id: String,
    pub from: usize,
    pub to: usize,
    /// Per-unit susceptance `B`.
    pub susceptance: f64,
    /// Thermal capacity in MW.
    pub capacity: f64,
}

/// Gas offtake of a gas-fired unit: `conversion` gas units per MWh produced.
#[derive(Debug, Clone, PartialEq)]
pub struct GasCoupling {
    pub node: usize,
    pub conversion: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub id: String,
    pub node: usize,
    pub capacity: f64,
    /// Marginal cost per MWh. Ignored for gas-fired units, whose cost enters
    /// through gas supply.
    pub cost: f64,
    pub gas: Option<GasCoupling>,
}

impl Generator {
    pub fn is_gas_fired(&self) -> bool {
        self.gas.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindFarm {
    pub id: String,
    pub node: usize,
    pub forecast: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElectricLoad {
    pub id: String,
    pub node: usize,
    pub demand: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PowerNetwork {
    pub nodes: Vec<PowerNode>,
    pub lines: Vec<Line>,
    pub generators: Vec<Generator>,
    pub wind: Vec<WindFarm>,
    pub loads: Vec<ElectricLoad>,
}

impl PowerNetwork {
    pub fn reference_node(&self) -> Option<usize> {
        self.nodes.iter().position(|n| n.reference)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GasNode {
    pub id: String,
    pub pressure_min: f64,
    pub pressure_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    pub id: String,
    /// Declared orientation `from -> to`; the unidirectional model's direction.
    pub from: usize,
    pub to: usize,
    /// Weymouth constant `K`.
    pub weymouth: f64,
    /// Linepack constant `S`: linepack per bar of average pressure.
    pub linepack: f64,
    pub initial_linepack: f64,
    /// Compression ratio; 1 means no compressor.
    pub compression: f64,
}

impl Pipeline {
    pub fn has_compressor(&self) -> bool {
        self.compression > 1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GasSupplier {
    pub id: String,
    pub node: usize,
    pub capacity: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GasLoad {
    pub id: String,
    pub node: usize,
    pub demand: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GasNetwork {
    pub nodes: Vec<GasNode>,
    pub pipelines: Vec<Pipeline>,
    pub suppliers: Vec<GasSupplier>,
    pub loads: Vec<GasLoad>,
}

/// Per-node entity index sets.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Coupling {
    pub generators_at: Vec<Vec<usize>>,
    pub wind_at: Vec<Vec<usize>>,
    pub electric_loads_at: Vec<Vec<usize>>,
    pub suppliers_at: Vec<Vec<usize>>,
    pub gas_fired_at: Vec<Vec<usize>>,
    pub gas_loads_at: Vec<Vec<usize>>,
}

impl Coupling {
    fn derive(power: &PowerNetwork, gas: &GasNetwork) -> Self {
        fn group(n: usize, nodes: impl Iterator<Item = Option<usize>>) -> Vec<Vec<usize>> {
            let mut sets = vec![Vec::new(); n];
            for (i, node) in nodes.enumerate() {
                if let Some(node) = node {
                    sets[node].push(i);
                }
            }
            sets
        }
        let np = power.nodes.len();
        let ng = gas.nodes.len();
        Self {
            generators_at: group(np, power.generators.iter().map(|g| Some(g.node))),
            wind_at: group(np, power.wind.iter().map(|w| Some(w.node))),
            electric_loads_at: group(np, power.loads.iter().map(|l| Some(l.node))),
            suppliers_at: group(ng, gas.suppliers.iter().map(|k| Some(k.node))),
            gas_fired_at: group(
                ng,
                power
                    .generators
                    .iter()
                    .map(|g| g.gas.as_ref().map(|c| c.node)),
            ),
            gas_loads_at: group(ng, gas.loads.iter().map(|d| Some(d.node))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratedSystem {
    pub name: String,
    pub hours: usize,
    pub power: PowerNetwork,
    pub gas: GasNetwork,
    pub coupling: Coupling,
}

impl IntegratedSystem {
    pub fn new(
        name: impl Into<String>,
        hours: usize,
        power: PowerNetwork,
        gas: GasNetwork,
    ) -> Self {
        let coupling = Coupling::derive(&power, &gas);
        Self {
            name: name.into(),
            hours,
            power,
            gas,
            coupling,
        }
    }

    pub fn total_electric_demand(&self) -> f64 {
        self.power.loads.iter().flat_map(|l| &l.demand).sum()
    }

    pub fn total_gas_demand(&self) -> f64 {
        self.gas.loads.iter().flat_map(|d| &d.demand).sum()
    }

    pub fn electric_demand_at(&self, node: usize, t: usize) -> f64 {
        self.coupling.electric_loads_at[node]
            .iter()
            .map(|&l| self.power.loads[l].demand[t])
            .sum()
    }

    pub fn gas_demand_at(&self, node: usize, t: usize) -> f64 {
        self.coupling.gas_loads_at[node]
            .iter()
            .map(|&d| self.gas.loads[d].demand[t])
            .sum()
    }

    /// Sub-horizon `hours` (0-based, half-open) with every series sliced.
    pub fn window(&self, hours: Range<usize>) -> Self {
        assert!(hours.start < hours.end && hours.end <= self.hours);
        let mut sys = self.clone();
        sys.hours = hours.len();
        for w in &mut sys.power.wind {
            w.forecast = w.forecast[hours.clone()].to_vec();
        }
        for l in &mut sys.power.loads {
            l.demand = l.demand[hours.clone()].to_vec();
        }
        for d in &mut sys.gas.loads {
            d.demand = d.demand[hours.clone()].to_vec();
        }
        sys
    }

    /// Copy with each pipeline's initial linepack replaced, in pipeline order.
    pub fn with_initial_linepack(&self, h0: &[f64]) -> Self {
        assert_eq!(h0.len(), self.gas.pipelines.len());
        let mut sys = self.clone();
        for (p, &h) in sys.gas.pipelines.iter_mut().zip(h0) {
            p.initial_linepack = h;
        }
        sys
    }

    pub fn gas_node_index(&self, id: &str) -> Option<usize> {
        self.gas.nodes.iter().position(|n| n.id == id)
    }

    pub fn pipeline_index(&self, id: &str) -> Option<usize> {
        self.gas.pipelines.iter().position(|p| p.id == id)
    }

    pub fn generator_index(&self, id: &str) -> Option<usize> {
        self.power.generators.iter().position(|g| g.id == id)
    }

    /// Largest linepack reachable in `pipeline` under its nodes' pressure caps.
    pub fn max_linepack(&self, pipeline: usize) -> f64 {
        let p = &self.gas.pipelines[pipeline];
        p.linepack * (self.gas.nodes[p.from].pressure_max + self.gas.nodes[p.to].pressure_max) / 2.0
    }
}

/// A broken invariant found by [`validate_system`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub entity: String,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.rule)
    }
}

fn is_valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-' || b == b'.')
}

/// Checks every value-level invariant; an empty list means the system is
/// usable by the formulation.
pub fn validate_system(sys: &IntegratedSystem) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |entity: String, rule: String| out.push(Violation { entity, rule });

    if sys.hours == 0 {
        push(
            "meta".into(),
            "horizon must contain at least one hour".into(),
        );
    }

    let check_ids = |kind: &str, ids: Vec<&str>, push: &mut dyn FnMut(String, String)| {
        let mut seen = HashMap::new();
        for id in ids {
            if !is_valid_id(id) {
                push(
                    format!("{kind} `{id}`"),
                    "id must be non-empty and use only [A-Za-z0-9_.-]".into(),
                );
            }
            if seen.insert(id, ()).is_some() {
                push(format!("{kind} `{id}`"), "duplicate id".into());
            }
        }
    };
    let p = &sys.power;
    let g = &sys.gas;
    check_ids(
        "power node",
        p.nodes.iter().map(|x| x.id.as_str()).collect(),
        &mut push,
    );
    check_ids(
        "line",
        p.lines.iter().map(|x| x.id.as_str()).collect(),
        &mut push,
    );
    check_ids(
        "generator",
        p.generators.iter().map(|x| x.id.as_str()).collect(),
        &mut push,
    );
    check_ids(
        "wind farm",
        p.wind.iter().map(|x| x.id.as_str()).collect(),
        &mut push,
    );
    check_ids(
        "electric load",
        p.loads.iter().map(|x| x.id.as_str()).collect(),
        &mut push,
    );
    check_ids(
        "gas node",
        g.nodes.iter().map(|x| x.id.as_str()).collect(),
        &mut push,
    );
    check_ids(
        "pipeline",
        g.pipelines.iter().map(|x| x.id.as_str()).collect(),
        &mut push,
    );
    check_ids(
        "supplier",
        g.suppliers.iter().map(|x| x.id.as_str()).collect(),
        &mut push,
    );
    check_ids(
        "gas load",
        g.loads.iter().map(|x| x.id.as_str()).collect(),
        &mut push,
    );

    let refs = p.nodes.iter().filter(|n| n.reference).count();
    if refs != 1 {
        push(
            "power.nodes".into(),
            format!("exactly one reference node required, found {refs}"),
        );
    }
    for l in &p.lines {
        let e = format!("line `{}`", l.id);
        if l.from == l.to {
            push(e.clone(), "endpoints must differ".into());
        }
        if !(l.capacity > 0.0 && l.capacity.is_finite()) {
            push(e.clone(), "capacity must be positive and finite".into());
        }
        if !(l.susceptance > 0.0 && l.susceptance.is_finite()) {
            push(e, "susceptance must be positive and finite".into());
        }
    }
    for gen in &p.generators {
        let e = format!("generator `{}`", gen.id);
        if !(gen.capacity >= 0.0 && gen.capacity.is_finite()) {
            push(e.clone(), "capacity must be non-negative and finite".into());
        }
        if !gen.cost.is_finite() {
            push(e.clone(), "cost must be finite".into());
        }
        if let Some(c) = &gen.gas {
            if !(c.conversion > 0.0 && c.conversion.is_finite()) {
                push(e, "gas conversion factor must be positive".into());
            }
        }
    }
    let series_ok = |s: &[f64]| s.iter().all(|x| x.is_finite() && *x >= 0.0);
    for w in &p.wind {
        if !series_ok(&w.forecast) {
            push(
                format!("wind farm `{}`", w.id),
                "forecast must be finite and non-negative".into(),
            );
        }
    }
    for l in &p.loads {
        if !series_ok(&l.demand) {
            push(
                format!("electric load `{}`", l.id),
                "demand must be finite and non-negative".into(),
            );
        }
    }

    for n in &g.nodes {
        let e = format!("gas node `{}`", n.id);
        if n.pressure_min.is_nan() || n.pressure_min < 0.0 {
            push(e.clone(), "minimum pressure must be non-negative".into());
        }
        if n.pressure_max.is_nan() || n.pressure_min > n.pressure_max {
            push(
                e.clone(),
                "minimum pressure exceeds maximum pressure".into(),
            );
        }
        if !n.pressure_max.is_finite() {
            push(e, "maximum pressure must be finite".into());
        }
    }
    for (i, pipe) in g.pipelines.iter().enumerate() {
        let e = format!("pipeline `{}`", pipe.id);
        if pipe.from == pipe.to {
            push(e.clone(), "endpoints must differ".into());
        }
        if !(pipe.weymouth > 0.0 && pipe.weymouth.is_finite()) {
            push(e.clone(), "Weymouth constant must be positive".into());
        }
        if !(pipe.linepack > 0.0 && pipe.linepack.is_finite()) {
            push(e.clone(), "linepack constant must be positive".into());
        }
        if !(pipe.compression >= 1.0 && pipe.compression.is_finite()) {
            push(e.clone(), "compression ratio must be at least 1".into());
        }
        if pipe.initial_linepack.is_nan() || pipe.initial_linepack < 0.0 {
            push(e.clone(), "initial linepack must be non-negative".into());
        } else if pipe.initial_linepack > sys.max_linepack(i) * (1.0 + 1e-12) {
            push(
                e,
                format!(
                    "initial linepack {} exceeds the maximum {} reachable at maximum end pressures",
                    pipe.initial_linepack,
                    sys.max_linepack(i)
                ),
            );
        }
    }
    for k in &g.suppliers {
        let e = format!("supplier `{}`", k.id);
        if !(k.capacity >= 0.0 && k.capacity.is_finite()) {
            push(e.clone(), "capacity must be non-negative and finite".into());
        }
        if !k.cost.is_finite() {
            push(e, "cost must be finite".into());
        }
    }
    for d in &g.loads {
        if !series_ok(&d.demand) {
            push(
                format!("gas load `{}`", d.id),
                "demand must be finite and non-negative".into(),
            );
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Document format

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub format_version: u32,
    pub meta: MetaDoc,
    pub power: PowerDoc,
    pub gas: GasDoc,
    pub series: SeriesDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaDoc {
    pub name: String,
    pub hours: usize,
    pub units: UnitsDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitsDoc {
    pub pressure: String,
    pub power: String,
    pub gas: String,
}

impl Default for UnitsDoc {
    fn default() -> Self {
        Self {
            pressure: PRESSURE_UNIT.into(),
            power: POWER_UNIT.into(),
            gas: GAS_UNIT.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerNodeDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub reference: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineDoc {
    pub id: String,
    pub from: String,
    pub to: String,
    pub susceptance: f64,
    pub capacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub id: String,
    pub node: String,
    pub capacity: f64,
    #[serde(default)]
    pub cost: f64,
    /// Present only for gas-fired units.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gas_node: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conversion: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SitedDoc {
    pub id: String,
    pub node: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct PowerDoc {
    pub nodes: Vec<PowerNodeDoc>,
    #[serde(default)]
    pub lines: Vec<LineDoc>,
    #[serde(default)]
    pub generators: Vec<GeneratorDoc>,
    #[serde(default)]
    pub wind: Vec<SitedDoc>,
    #[serde(default)]
    pub loads: Vec<SitedDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasNodeDoc {
    pub id: String,
    pub pressure_min: f64,
    pub pressure_max: f64,
}

fn unit_ratio() -> f64 {
    1.0
}

fn is_unit_ratio(x: &f64) -> bool {
    *x == 1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineDoc {
    pub id: String,
    pub from: String,
    pub to: String,
    pub weymouth: f64,
    pub linepack: f64,
    pub initial_linepack: f64,
    #[serde(default = "unit_ratio", skip_serializing_if = "is_unit_ratio")]
    pub compression: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupplierDoc {
    pub id: String,
    pub node: String,
    pub capacity: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GasDoc {
    pub nodes: Vec<GasNodeDoc>,
    #[serde(default)]
    pub pipelines: Vec<PipelineDoc>,
    #[serde(default)]
    pub suppliers: Vec<SupplierDoc>,
    #[serde(default)]
    pub loads: Vec<SitedDoc>,
}

/// Hourly series keyed by entity id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SeriesDoc {
    #[serde(default)]
    pub wind: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub electric_load: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub gas_load: BTreeMap<String, Vec<f64>>,
}

/// Parses and resolves a TOML system document.
pub fn load_system(document: &str) -> Result<IntegratedSystem, DataError> {
    let doc: SystemDocument = toml::from_str(document)?;
    IntegratedSystem::from_document(doc)
}

struct Index<'a> {
    kind: &'static str,
    ids: HashMap<&'a str, usize>,
}

impl<'a> Index<'a> {
    fn new(kind: &'static str, ids: impl Iterator<Item = &'a str>) -> Self {
        Self {
            kind,
            ids: ids.enumerate().map(|(i, id)| (id, i)).collect(),
        }
    }

    fn get(&self, path: String, id: &str) -> Result<usize, DataError> {
        self.ids
            .get(id)
            .copied()
            .ok_or_else(|| DataError::DanglingNode {
                path,
                kind: self.kind,
                node: id.to_string(),
            })
    }
}

fn take_series(
    map: &BTreeMap<String, Vec<f64>>,
    section: &str,
    id: &str,
    hours: usize,
) -> Result<Vec<f64>, DataError> {
    let path = format!("series.{section}.{id}");
    let s = map
        .get(id)
        .ok_or_else(|| schema(path.clone(), "missing series"))?;
    if s.len() != hours {
        return Err(DataError::SeriesLength {
            path,
            expected: hours,
            found: s.len(),
        });
    }
    Ok(s.clone())
}

fn orphan_series(
    map: &BTreeMap<String, Vec<f64>>,
    section: &str,
    owners: &[SitedDoc],
) -> Result<(), DataError> {
    match map.keys().find(|k| !owners.iter().any(|o| &o.id == *k)) {
        Some(k) => Err(schema(
            format!("series.{section}.{k}"),
            "series has no matching entity",
        )),
        None => Ok(()),
    }
}

impl IntegratedSystem {
    pub fn from_document(doc: SystemDocument) -> Result<Self, DataError> {
        if doc.format_version != FORMAT_VERSION {
            return Err(schema(
                "format_version",
                format!(
                    "unsupported version {} (expected {FORMAT_VERSION})",
                    doc.format_version
                ),
            ));
        }
        let units = &doc.meta.units;
        for (field, found, want) in [
            ("pressure", &units.pressure, PRESSURE_UNIT),
            ("power", &units.power, POWER_UNIT),
            ("gas", &units.gas, GAS_UNIT),
        ] {
            if found != want {
                return Err(schema(
                    format!("meta.units.{field}"),
                    format!("unit `{found}` not supported (expected `{want}`)"),
                ));
            }
        }
        let hours = doc.meta.hours;
        let pn = Index::new("power", doc.power.nodes.iter().map(|n| n.id.as_str()));
        let gn = Index::new("gas", doc.gas.nodes.iter().map(|n| n.id.as_str()));

        let lines = doc
            .power
            .lines
            .iter()
            .map(|l| {
                let path = format!("power.lines[{}]", l.id);
                Ok(Line {
                    id: l.id.clone(),
                    from: pn.get(format!("{path}.from"), &l.from)?,
                    to: pn.get(format!("{path}.to"), &l.to)?,
                    susceptance: l.susceptance,
                    capacity: l.capacity,
                })
            })
            .collect::<Result<_, DataError>>()?;
        let generators = doc
            .power
            .generators
            .iter()
            .map(|g| {
                let path = format!("power.generators[{}]", g.id);
                let gas = match (&g.gas_node, g.conversion) {
                    (Some(node), Some(conversion)) => Some(GasCoupling {
                        node: gn.get(format!("{path}.gas_node"), node)?,
                        conversion,
                    }),
                    (None, None) => None,
                    _ => {
                        return Err(schema(
                            path,
                            "gas_node and conversion must be given together",
                        ))
                    }
                };
                Ok(Generator {
                    id: g.id.clone(),
                    node: pn.get(format!("{path}.node"), &g.node)?,
                    capacity: g.capacity,
                    cost: g.cost,
                    gas,
                })
            })
            .collect::<Result<_, DataError>>()?;
        orphan_series(&doc.series.wind, "wind", &doc.power.wind)?;
        orphan_series(&doc.series.electric_load, "electric_load", &doc.power.loads)?;
        orphan_series(&doc.series.gas_load, "gas_load", &doc.gas.loads)?;
        let wind = doc
            .power
            .wind
            .iter()
            .map(|w| {
                Ok(WindFarm {
                    id: w.id.clone(),
                    node: pn.get(format!("power.wind[{}].node", w.id), &w.node)?,
                    forecast: take_series(&doc.series.wind, "wind", &w.id, hours)?,
                })
            })
            .collect::<Result<_, DataError>>()?;
        let loads = doc
            .power
            .loads
            .iter()
            .map(|l| {
                Ok(ElectricLoad {
                    id: l.id.clone(),
                    node: pn.get(format!("power.loads[{}].node", l.id), &l.node)?,
                    demand: take_series(&doc.series.electric_load, "electric_load", &l.id, hours)?,
                })
            })
            .collect::<Result<_, DataError>>()?;
        let power = PowerNetwork {
            nodes: doc
                .power
                .nodes
                .iter()
                .map(|n| PowerNode {
                    id: n.id.clone(),
                    reference: n.reference,
                })
                .collect(),
            lines,
            generators,
            wind,
            loads,
        };

        let pipelines = doc
            .gas
            .pipelines
            .iter()
            .map(|p| {
                let path = format!("gas.pipelines[{}]", p.id);
                Ok(Pipeline {
                    id: p.id.clone(),
                    from: gn.get(format!("{path}.from"), &p.from)?,
                    to: gn.get(format!("{path}.to"), &p.to)?,
                    weymouth: p.weymouth,
                    linepack: p.linepack,
                    initial_linepack: p.initial_linepack,
                    compression: p.compression,
                })
            })
            .collect::<Result<_, DataError>>()?;
        let suppliers = doc
            .gas
            .suppliers
            .iter()
            .map(|k| {
                Ok(GasSupplier {
                    id: k.id.clone(),
                    node: gn.get(format!("gas.suppliers[{}].node", k.id), &k.node)?,
                    capacity: k.capacity,
                    cost: k.cost,
                })
            })
            .collect::<Result<_, DataError>>()?;
        let gas_loads = doc
            .gas
            .loads
            .iter()
            .map(|d| {
                Ok(GasLoad {
                    id: d.id.clone(),
                    node: gn.get(format!("gas.loads[{}].node", d.id), &d.node)?,
                    demand: take_series(&doc.series.gas_load, "gas_load", &d.id, hours)?,
                })
            })
            .collect::<Result<_, DataError>>()?;
        let gas = GasNetwork {
            nodes: doc
                .gas
                .nodes
                .iter()
                .map(|n| GasNode {
                    id: n.id.clone(),
                    pressure_min: n.pressure_min,
                    pressure_max: n.pressure_max,
                })
                .collect(),
            pipelines,
            suppliers,
            loads: gas_loads,
        };
        Ok(IntegratedSystem::new(doc.meta.name, hours, power, gas))
    }

    pub fn to_document(&self) -> SystemDocument {
        let pid = |i: usize| self.power.nodes[i].id.clone();
        let gid = |i: usize| self.gas.nodes[i].id.clone();
        let p = &self.power;
        let g = &self.gas;
        SystemDocument {
            format_version: FORMAT_VERSION,
            meta: MetaDoc {
                name: self.name.clone(),
                hours: self.hours,
                units: UnitsDoc::default(),
            },
            power: PowerDoc {
                nodes: p
                    .nodes
                    .iter()
                    .map(|n| PowerNodeDoc {
                        id: n.id.clone(),
                        reference: n.reference,
                    })
                    .collect(),
                lines: p
                    .lines
                    .iter()
                    .map(|l| LineDoc {
                        id: l.id.clone(),
                        from: pid(l.from),
                        to: pid(l.to),
                        susceptance: l.susceptance,
                        capacity: l.capacity,
                    })
                    .collect(),
                generators: p
                    .generators
                    .iter()
                    .map(|x| GeneratorDoc {
                        id: x.id.clone(),
                        node: pid(x.node),
                        capacity: x.capacity,
                        cost: x.cost,
                        gas_node: x.gas.as_ref().map(|c| gid(c.node)),
                        conversion: x.gas.as_ref().map(|c| c.conversion),
                    })
                    .collect(),
                wind: p
                    .wind
                    .iter()
                    .map(|w| SitedDoc {
                        id: w.id.clone(),
                        node: pid(w.node),
                    })
                    .collect(),
                loads: p
                    .loads
                    .iter()
                    .map(|l| SitedDoc {
                        id: l.id.clone(),
                        node: pid(l.node),
                    })
                    .collect(),
            },
            gas: GasDoc {
                nodes: g
                    .nodes
                    .iter()
                    .map(|n| GasNodeDoc {
                        id: n.id.clone(),
                        pressure_min: n.pressure_min,
                        pressure_max: n.pressure_max,
                    })
                    .collect(),
                pipelines: g
                    .pipelines
                    .iter()
                    .map(|x| PipelineDoc {
                        id: x.id.clone(),
                        from: gid(x.from),
                        to: gid(x.to),
                        weymouth: x.weymouth,
                        linepack: x.linepack,
                        initial_linepack: x.initial_linepack,
                        compression: x.compression,
                    })
                    .collect(),
                suppliers: g
                    .suppliers
                    .iter()
                    .map(|k| SupplierDoc {
                        id: k.id.clone(),
                        node: gid(k.node),
                        capacity: k.capacity,
                        cost: k.cost,
                    })
                    .collect(),
                loads: g
                    .loads
                    .iter()
                    .map(|d| SitedDoc {
                        id: d.id.clone(),
                        node: gid(d.node),
                    })
                    .collect(),
            },
            series: SeriesDoc {
                wind: p
                    .wind
                    .iter()
                    .map(|w| (w.id.clone(), w.forecast.clone()))
                    .collect(),
                electric_load: p
                    .loads
                    .iter()
                    .map(|l| (l.id.clone(), l.demand.clone()))
                    .collect(),
                gas_load: g
                    .loads
                    .iter()
                    .map(|d| (d.id.clone(), d.demand.clone()))
                    .collect(),
            },
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_document()).expect("system documents always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINIMAL: &str = r#"
format_version = 1

[meta]
name = "minimal"
hours = 3
units = { pressure = "bar", power = "MW", gas = "MWh" }

[[power.nodes]]
id = "n1"
reference = true

[[power.nodes]]
id = "n2"

[[power.lines]]
id = "l12"
from = "n1"
to = "n2"
susceptance = 10.0
capacity = 100.0

[[power.generators]]
id = "coal"
node = "n1"
capacity = 50.0
cost = 40.0

[[power.generators]]
id = "ccgt"
node = "n2"
capacity = 80.0
gas_node = "m2"
conversion = 2.0

[[power.wind]]
id = "w1"
node = "n2"

[[power.loads]]
id = "d1"
node = "n2"

[[gas.nodes]]
id = "m1"
pressure_min = 30.0
pressure_max = 70.0

[[gas.nodes]]
id = "m2"
pressure_min = 20.0
pressure_max = 60.0

[[gas.pipelines]]
id = "m1_m2"
from = "m1"
to = "m2"
weymouth = 3.0
linepack = 2.0
initial_linepack = 90.0

[[gas.suppliers]]
id = "gs1"
node = "m1"
capacity = 200.0
cost = 15.0

[[gas.loads]]
id = "gd1"
node = "m2"

[series]
wind = { w1 = [5.0, 10.0, 0.0] }
electric_load = { d1 = [40.0, 60.0, 50.0] }
gas_load = { gd1 = [20.0, 20.0, 30.0] }
"#;

    #[test]
    fn loads_minimal_document() {
        let sys = load_system(MINIMAL).unwrap();
        assert_eq!(sys.hours, 3);
        assert_eq!(sys.power.nodes.len(), 2);
        assert_eq!(sys.gas.pipelines.len(), 1);
        assert_eq!(sys.coupling.gas_fired_at, vec![vec![], vec![1]]);
        assert_eq!(sys.coupling.suppliers_at, vec![vec![0], vec![]]);
        assert_eq!(sys.coupling.generators_at, vec![vec![0], vec![1]]);
        assert_eq!(sys.gas.pipelines[0].compression, 1.0);
        assert!(validate_system(&sys).is_empty());
        assert_eq!(sys.total_electric_demand(), 150.0);
        assert_eq!(sys.gas_demand_at(1, 2), 30.0);
    }

    #[test]
    fn dangling_gas_node_is_named() {
        let doc = MINIMAL.replace("gas_node = \"m2\"", "gas_node = \"m9\"");
        let err = load_system(&doc).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("m9"), "{msg}");
        assert!(msg.contains("power.generators[ccgt].gas_node"), "{msg}");
    }

    #[test]
    fn series_length_mismatch() {
        let doc = MINIMAL.replace("gd1 = [20.0, 20.0, 30.0]", "gd1 = [20.0, 20.0]");
        match load_system(&doc).unwrap_err() {
            DataError::SeriesLength {
                path,
                expected,
                found,
            } => {
                assert_eq!(path, "series.gas_load.gd1");
                assert_eq!((expected, found), (3, 2));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn unit_header_enforced() {
        let doc = MINIMAL.replace("pressure = \"bar\"", "pressure = \"psi\"");
        let err = load_system(&doc).unwrap_err().to_string();
        assert!(err.contains("meta.units.pressure"), "{err}");
    }

    #[test]
    fn unknown_field_rejected() {
        let doc = MINIMAL.replace("cost = 40.0", "cost = 40.0\ncolour = \"red\"");
        assert!(matches!(load_system(&doc), Err(DataError::Parse(_))));
    }

    #[test]
    fn wrong_version_rejected() {
        let doc = MINIMAL.replace("format_version = 1", "format_version = 2");
        assert!(load_system(&doc)
            .unwrap_err()
            .to_string()
            .contains("format_version"));
    }

    #[test]
    fn pressure_bounds_violation() {
        let mut sys = load_system(MINIMAL).unwrap();
        sys.gas.nodes[0].pressure_min = 80.0;
        let v = validate_system(&sys);
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].entity, "gas node `m1`");
    }

    #[test]
    fn unreachable_initial_linepack() {
        let mut sys = load_system(MINIMAL).unwrap();
        // S * (70 + 60) / 2 = 130
        assert_eq!(sys.max_linepack(0), 130.0);
        sys.gas.pipelines[0].initial_linepack = 130.0;
        assert!(validate_system(&sys).is_empty());
        sys.gas.pipelines[0].initial_linepack = 131.0;
        let v = validate_system(&sys);
        assert_eq!(v.len(), 1);
        assert!(v[0].rule.contains("initial linepack"));
    }

    #[test]
    fn reference_node_count() {
        let mut sys = load_system(MINIMAL).unwrap();
        sys.power.nodes[1].reference = true;
        assert_eq!(validate_system(&sys).len(), 1);
        sys.power.nodes.iter_mut().for_each(|n| n.reference = false);
        assert_eq!(validate_system(&sys).len(), 1);
    }

    #[test]
    fn windowing_slices_series() {
        let sys = load_system(MINIMAL).unwrap();
        let w = sys.window(1..3);
        assert_eq!(w.hours, 2);
        assert_eq!(w.power.loads[0].demand, vec![60.0, 50.0]);
        assert_eq!(w.power.wind[0].forecast, vec![10.0, 0.0]);
        let h = w.with_initial_linepack(&[100.0]);
        assert_eq!(h.gas.pipelines[0].initial_linepack, 100.0);
    }

    #[test]
    fn document_round_trip() {
        let sys = load_system(MINIMAL).unwrap();
        let again = load_system(&sys.to_toml_string()).unwrap();
        assert_eq!(sys, again);
    }
}
