//! Gas network constraints: supply and pressure limits, compressors, flow
//! averaging, linepack dynamics, nodal balance, tightening, and the outer
//! Weymouth approximation for both flow models.
//!
//! Pipelines with a compressor (ratio above one) get no Weymouth planes and
//! no tightening rows; only the compression limit and a non-negative flow
//! constrain them.

use crate::model::{ConstraintSense, LinearConstraint, VarId, VariableSpec};
use crate::network::IntegratedSystem;

use super::bigm::{plane_deactivation, BigMConfig};
use super::points::{ExpansionPointSet, Plane};
use super::{
    FlowModel, FormulationArtifacts, FormulationConfig, FormulationError, Symbol, TerminalLinepack,
};

use ConstraintSense::{Eq, Ge, Le};

fn row(
    art: &mut FormulationArtifacts,
    name: String,
    terms: Vec<(VarId, f64)>,
    sense: ConstraintSense,
    rhs: f64,
) -> Result<(), FormulationError> {
    art.model
        .add_constraint(LinearConstraint::new(name, terms, sense, rhs))?;
    Ok(())
}

fn pipeline_ids(sys: &IntegratedSystem) -> Vec<&str> {
    sys.gas.pipelines.iter().map(|p| p.id.as_str()).collect()
}

/// Supply capacity, pressure bounds, and `pr_to <= ratio * pr_from`
/// (compressor pipelines in both models, every pipeline in the
/// unidirectional model).
pub fn build_common_gas_block(
    sys: &IntegratedSystem,
    art: &mut FormulationArtifacts,
) -> Result<(), FormulationError> {
    let g = &sys.gas;
    let ids: Vec<&str> = g.suppliers.iter().map(|k| k.id.as_str()).collect();
    art.add_grid(Symbol::G, &ids, |k, _| {
        VariableSpec::continuous("", 0.0, g.suppliers[k].capacity)
    })?;
    let ids: Vec<&str> = g.nodes.iter().map(|m| m.id.as_str()).collect();
    art.add_grid(Symbol::Pr, &ids, |m, _| {
        VariableSpec::continuous("", g.nodes[m].pressure_min, g.nodes[m].pressure_max)
    })?;
    for t in 0..art.hours {
        for pipe in &g.pipelines {
            // The bidirectional block gates the uncompressed case by direction.
            if art.flow_model == FlowModel::Bidirectional && !pipe.has_compressor() {
                continue;
            }
            let terms = vec![
                (art.at(Symbol::Pr, pipe.to, t), 1.0),
                (art.at(Symbol::Pr, pipe.from, t), -pipe.compression),
            ];
            row(art, format!("comp_{}_t{}", pipe.id, t + 1), terms, Le, 0.0)?;
        }
    }
    Ok(())
}

fn check_points(
    sys: &IntegratedSystem,
    points: &ExpansionPointSet,
) -> Result<(), FormulationError> {
    for (z, pipe) in sys.gas.pipelines.iter().enumerate() {
        if !pipe.has_compressor() && points.forward.get(z).is_none_or(|p| p.is_empty()) {
            return Err(FormulationError::EmptyExpansionPoints {
                pipeline: pipe.id.clone(),
            });
        }
    }
    Ok(())
}

/// `h = S (pr_from + pr_to) / 2` and the terminal requirement.
fn linepack_level_rows(
    sys: &IntegratedSystem,
    art: &mut FormulationArtifacts,
    terminal: &TerminalLinepack,
) -> Result<(), FormulationError> {
    let last = art.hours - 1;
    for (z, pipe) in sys.gas.pipelines.iter().enumerate() {
        for t in 0..art.hours {
            let terms = vec![
                (art.at(Symbol::H, z, t), 1.0),
                (art.at(Symbol::Pr, pipe.from, t), -0.5 * pipe.linepack),
                (art.at(Symbol::Pr, pipe.to, t), -0.5 * pipe.linepack),
            ];
            row(art, format!("lpack_{}_t{}", pipe.id, t + 1), terms, Eq, 0.0)?;
        }
        let target = match terminal {
            TerminalLinepack::AtLeastInitial => Some(pipe.initial_linepack),
            TerminalLinepack::AtLeast(v) => Some(*v.get(z).ok_or_else(|| {
                FormulationError::InvalidConfig(
                    "terminal linepack target per pipeline required".into(),
                )
            })?),
            TerminalLinepack::Free => None,
        };
        if let Some(target) = target {
            let h = art.at(Symbol::H, z, last);
            row(
                art,
                format!("lpend_{}", pipe.id),
                vec![(h, 1.0)],
                Ge,
                target,
            )?;
        }
    }
    Ok(())
}

/// `h_t - h_{t-1} - sum(net inflows) = 0`, with `h_0 = H0` moved to the rhs.
fn linepack_balance_rows(
    sys: &IntegratedSystem,
    art: &mut FormulationArtifacts,
    flows: &[(Symbol, f64)],
) -> Result<(), FormulationError> {
    for (z, pipe) in sys.gas.pipelines.iter().enumerate() {
        for t in 0..art.hours {
            let mut terms = vec![(art.at(Symbol::H, z, t), 1.0)];
            let rhs = if t == 0 {
                pipe.initial_linepack
            } else {
                terms.push((art.at(Symbol::H, z, t - 1), -1.0));
                0.0
            };
            for &(sym, sign) in flows {
                terms.push((art.at(sym, z, t), -sign));
            }
            row(art, format!("lpbal_{}_t{}", pipe.id, t + 1), terms, Eq, rhs)?;
        }
    }
    Ok(())
}

/// Nodal gas balance. `at_from` / `at_to` list the pipeline symbols that
/// withdraw (-1) or inject (+1) gas at the declared sender / receiver.
fn gas_balance_rows(
    sys: &IntegratedSystem,
    art: &mut FormulationArtifacts,
    at_from: &[(Symbol, f64)],
    at_to: &[(Symbol, f64)],
) -> Result<(), FormulationError> {
    for t in 0..art.hours {
        for (m, node) in sys.gas.nodes.iter().enumerate() {
            let mut terms = Vec::new();
            for &k in &sys.coupling.suppliers_at[m] {
                terms.push((art.at(Symbol::G, k, t), 1.0));
            }
            for &i in &sys.coupling.gas_fired_at[m] {
                let eta = sys.power.generators[i]
                    .gas
                    .as_ref()
                    .map(|c| c.conversion)
                    .unwrap_or_default();
                terms.push((art.at(Symbol::P, i, t), -eta));
            }
            for (z, pipe) in sys.gas.pipelines.iter().enumerate() {
                let side = if pipe.from == m {
                    at_from
                } else if pipe.to == m {
                    at_to
                } else {
                    continue;
                };
                for &(sym, sign) in side {
                    terms.push((art.at(sym, z, t), sign));
                }
            }
            let demand = sys.gas_demand_at(m, t);
            row(
                art,
                format!("gbal_{}_t{}", node.id, t + 1),
                terms,
                Eq,
                demand,
            )?;
        }
    }
    Ok(())
}

/// Unidirectional model: flow fixed along the declared orientation.
pub fn build_unidirectional_gas_block(
    sys: &IntegratedSystem,
    art: &mut FormulationArtifacts,
    points: &ExpansionPointSet,
    big_m: &BigMConfig,
    config: &FormulationConfig,
) -> Result<(), FormulationError> {
    check_points(sys, points)?;
    let ids = pipeline_ids(sys);
    art.add_grid(Symbol::Q, &ids, |z, _| {
        VariableSpec::continuous("", 0.0, big_m.pipelines[z].flow)
    })?;
    art.add_grid(Symbol::QIn, &ids, |_, _| VariableSpec::non_negative(""))?;
    art.add_grid(Symbol::QOut, &ids, |_, _| VariableSpec::non_negative(""))?;
    art.add_grid(Symbol::H, &ids, |_, _| VariableSpec::non_negative(""))?;

    for (z, pipe) in sys.gas.pipelines.iter().enumerate() {
        let m = &big_m.pipelines[z];
        let planes = points.forward[z]
            .iter()
            .map(|&pt| Plane::at(pipe.weymouth, pt))
            .collect::<Result<Vec<_>, _>>()?;
        for t in 0..art.hours {
            let hr = t + 1;
            let (q, qin, qout) = (
                art.at(Symbol::Q, z, t),
                art.at(Symbol::QIn, z, t),
                art.at(Symbol::QOut, z, t),
            );
            let (pm, pu) = (
                art.at(Symbol::Pr, pipe.from, t),
                art.at(Symbol::Pr, pipe.to, t),
            );
            row(
                art,
                format!("qavg_{}_t{hr}", pipe.id),
                vec![(q, 1.0), (qin, -0.5), (qout, -0.5)],
                Eq,
                0.0,
            )?;
            if pipe.has_compressor() {
                continue;
            }
            if config.tightening {
                row(
                    art,
                    format!("pdir_{}_t{hr}", pipe.id),
                    vec![(pm, 1.0), (pu, -1.0)],
                    Ge,
                    0.0,
                )?;
                row(
                    art,
                    format!("qslope_{}_t{hr}", pipe.id),
                    vec![(q, 1.0), (pm, -m.slope), (pu, m.slope)],
                    Le,
                    0.0,
                )?;
            }
            for (v, plane) in planes.iter().enumerate() {
                row(
                    art,
                    format!("wey_{}_v{}_t{hr}", pipe.id, v + 1),
                    vec![(q, 1.0), (pm, -plane.c_high), (pu, plane.c_low)],
                    Le,
                    0.0,
                )?;
            }
        }
    }
    linepack_level_rows(sys, art, &config.terminal)?;
    linepack_balance_rows(sys, art, &[(Symbol::QIn, 1.0), (Symbol::QOut, -1.0)])?;
    gas_balance_rows(sys, art, &[(Symbol::QIn, -1.0)], &[(Symbol::QOut, 1.0)])
}

/// Bidirectional model: one direction binary per pipeline and hour.
pub fn build_bidirectional_gas_block(
    sys: &IntegratedSystem,
    art: &mut FormulationArtifacts,
    points: &ExpansionPointSet,
    big_m: &BigMConfig,
    config: &FormulationConfig,
) -> Result<(), FormulationError> {
    check_points(sys, points)?;
    let pipes = &sys.gas.pipelines;
    let nodes = &sys.gas.nodes;
    let ids = pipeline_ids(sys);
    art.add_grid(Symbol::Q, &ids, |z, _| {
        let f = big_m.pipelines[z].flow;
        let lower = if pipes[z].has_compressor() { 0.0 } else { -f };
        VariableSpec::continuous("", lower, f)
    })?;
    art.add_grid(Symbol::QPlus, &ids, |_, _| VariableSpec::non_negative(""))?;
    art.add_grid(Symbol::QMinus, &ids, |z, _| {
        // No reverse flow when the receiver can never exceed the sender.
        let reverse_possible =
            !pipes[z].has_compressor() && points.reverse.get(z).is_some_and(|r| !r.is_empty());
        if reverse_possible {
            VariableSpec::non_negative("")
        } else {
            VariableSpec::continuous("", 0.0, 0.0)
        }
    })?;
    art.add_grid(Symbol::QIn, &ids, |_, _| VariableSpec::non_negative(""))?;
    art.add_grid(Symbol::QOut, &ids, |_, _| VariableSpec::non_negative(""))?;
    art.add_grid(Symbol::QInRev, &ids, |_, _| VariableSpec::non_negative(""))?;
    art.add_grid(Symbol::QOutRev, &ids, |_, _| VariableSpec::non_negative(""))?;
    art.add_grid(Symbol::H, &ids, |_, _| VariableSpec::non_negative(""))?;
    art.add_grid(Symbol::Y, &ids, |_, _| VariableSpec::binary(""))?;

    // Products of pressure and direction only exist where tightening applies.
    let tightened: Vec<usize> = (0..pipes.len())
        .filter(|&z| config.tightening && !pipes[z].has_compressor())
        .collect();
    if !tightened.is_empty() {
        art.add_grid(Symbol::PhiFrom, &ids, |z, _| {
            let ub = if tightened.contains(&z) {
                f64::INFINITY
            } else {
                0.0
            };
            VariableSpec::continuous("", 0.0, ub)
        })?;
        art.add_grid(Symbol::PhiTo, &ids, |z, _| {
            let ub = if tightened.contains(&z) {
                f64::INFINITY
            } else {
                0.0
            };
            VariableSpec::continuous("", 0.0, ub)
        })?;
    }

    for (z, pipe) in pipes.iter().enumerate() {
        let m = big_m.pipelines[z];
        let (from, to) = (&nodes[pipe.from], &nodes[pipe.to]);
        let fwd = points.forward[z]
            .iter()
            .map(|&pt| {
                Plane::at(pipe.weymouth, pt).map(|pl| {
                    (
                        pl,
                        plane_deactivation(&pl, from.pressure_min, to.pressure_max, m.flow),
                    )
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let rev = points.reverse[z]
            .iter()
            .map(|&pt| {
                Plane::at(pipe.weymouth, pt).map(|pl| {
                    (
                        pl,
                        plane_deactivation(&pl, to.pressure_min, from.pressure_max, m.flow),
                    )
                })
            })
            .collect::<Result<Vec<_>, _>>()?;

        for t in 0..art.hours {
            let hr = t + 1;
            let id = &pipe.id;
            let v = |s: Symbol| art.at(s, z, t);
            let (q, qp, qm, y) = (
                v(Symbol::Q),
                v(Symbol::QPlus),
                v(Symbol::QMinus),
                v(Symbol::Y),
            );
            let (qin, qout, qinr, qoutr) = (
                v(Symbol::QIn),
                v(Symbol::QOut),
                v(Symbol::QInRev),
                v(Symbol::QOutRev),
            );
            let (pm, pu) = (
                art.at(Symbol::Pr, pipe.from, t),
                art.at(Symbol::Pr, pipe.to, t),
            );
            let phi = tightened
                .contains(&z)
                .then(|| (v(Symbol::PhiFrom), v(Symbol::PhiTo)));

            row(
                art,
                format!("qsplit_{id}_t{hr}"),
                vec![(q, 1.0), (qp, -1.0), (qm, 1.0)],
                Eq,
                0.0,
            )?;
            row(
                art,
                format!("qpcap_{id}_t{hr}"),
                vec![(qp, 1.0), (y, -m.flow)],
                Le,
                0.0,
            )?;
            row(
                art,
                format!("qmcap_{id}_t{hr}"),
                vec![(qm, 1.0), (y, m.flow)],
                Le,
                m.flow,
            )?;
            row(
                art,
                format!("qpavg_{id}_t{hr}"),
                vec![(qp, 1.0), (qin, -0.5), (qout, -0.5)],
                Eq,
                0.0,
            )?;
            row(
                art,
                format!("qmavg_{id}_t{hr}"),
                vec![(qm, 1.0), (qinr, -0.5), (qoutr, -0.5)],
                Eq,
                0.0,
            )?;
            if pipe.has_compressor() {
                continue;
            }

            // Without compression the receiver may not exceed the sender of
            // the chosen direction: pu <= pm + M (1 - y), pm <= pu + M y.
            let mp = m.pressure;
            row(
                art,
                format!("compf_{id}_t{hr}"),
                vec![(pu, 1.0), (pm, -1.0), (y, mp)],
                Le,
                mp,
            )?;
            row(
                art,
                format!("compr_{id}_t{hr}"),
                vec![(pm, 1.0), (pu, -1.0), (y, -mp)],
                Le,
                0.0,
            )?;

            if let Some((phm, phu)) = phi {
                row(
                    art,
                    format!("phdir_{id}_t{hr}"),
                    vec![(phm, 1.0), (phu, -1.0)],
                    Ge,
                    0.0,
                )?;
                row(
                    art,
                    format!("phrev_{id}_t{hr}"),
                    vec![(pu, 1.0), (pm, -1.0), (phu, -1.0), (phm, 1.0)],
                    Ge,
                    0.0,
                )?;
                for (tag, phi, pr) in [("from", phm, pm), ("to", phu, pu)] {
                    // -M y <= phi <= M y
                    row(
                        art,
                        format!("phyup_{tag}_{id}_t{hr}"),
                        vec![(phi, 1.0), (y, -mp)],
                        Le,
                        0.0,
                    )?;
                    row(
                        art,
                        format!("phylo_{tag}_{id}_t{hr}"),
                        vec![(phi, 1.0), (y, mp)],
                        Ge,
                        0.0,
                    )?;
                    // -M (1 - y) <= phi - pr <= M (1 - y)
                    row(
                        art,
                        format!("phpup_{tag}_{id}_t{hr}"),
                        vec![(phi, 1.0), (pr, -1.0), (y, mp)],
                        Le,
                        mp,
                    )?;
                    row(
                        art,
                        format!("phplo_{tag}_{id}_t{hr}"),
                        vec![(phi, 1.0), (pr, -1.0), (y, -mp)],
                        Ge,
                        -mp,
                    )?;
                }
                row(
                    art,
                    format!("qpslope_{id}_t{hr}"),
                    vec![(qp, 1.0), (phm, -m.slope), (phu, m.slope)],
                    Le,
                    0.0,
                )?;
                row(
                    art,
                    format!("qmslope_{id}_t{hr}"),
                    vec![
                        (qm, 1.0),
                        (pu, -m.slope),
                        (pm, m.slope),
                        (phu, m.slope),
                        (phm, -m.slope),
                    ],
                    Le,
                    0.0,
                )?;
            }

            // q+ <= plane(pm, pu) + Md (1 - y)
            for (vi, (pl, md)) in fwd.iter().enumerate() {
                row(
                    art,
                    format!("weyf_{id}_v{}_t{hr}", vi + 1),
                    vec![(qp, 1.0), (pm, -pl.c_high), (pu, pl.c_low), (y, *md)],
                    Le,
                    *md,
                )?;
            }
            // q- <= plane(pu, pm) + Md y
            for (vi, (pl, md)) in rev.iter().enumerate() {
                row(
                    art,
                    format!("weyr_{id}_v{}_t{hr}", vi + 1),
                    vec![(qm, 1.0), (pu, -pl.c_high), (pm, pl.c_low), (y, -*md)],
                    Le,
                    0.0,
                )?;
            }
        }
    }
    linepack_level_rows(sys, art, &config.terminal)?;
    linepack_balance_rows(
        sys,
        art,
        &[
            (Symbol::QIn, 1.0),
            (Symbol::QOut, -1.0),
            (Symbol::QInRev, 1.0),
            (Symbol::QOutRev, -1.0),
        ],
    )?;
    gas_balance_rows(
        sys,
        art,
        &[(Symbol::QIn, -1.0), (Symbol::QOutRev, 1.0)],
        &[(Symbol::QOut, 1.0), (Symbol::QInRev, -1.0)],
    )
}
