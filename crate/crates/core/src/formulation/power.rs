use crate::model::{ConstraintSense, LinearConstraint, VariableSpec};
use crate::network::{IntegratedSystem, ANGLE_LIMIT};

use super::{FormulationArtifacts, FormulationError, Symbol};

/// Total cost of non-gas-fired generation plus gas supply. Gas-fired units
/// are paid for through the gas they burn.
pub fn build_objective(
    sys: &IntegratedSystem,
    art: &mut FormulationArtifacts,
) -> Result<(), FormulationError> {
    for t in 0..art.hours {
        for (i, gen) in sys.power.generators.iter().enumerate() {
            if !gen.is_gas_fired() {
                let p = art.at(Symbol::P, i, t);
                art.model.add_objective_term(p, gen.cost)?;
            }
        }
        for (k, sup) in sys.gas.suppliers.iter().enumerate() {
            let g = art.at(Symbol::G, k, t);
            art.model.add_objective_term(g, sup.cost)?;
        }
    }
    Ok(())
}

/// Lossless DC power flow with capacity, wind and angle bounds and nodal
/// balance.
pub fn build_power_block(
    sys: &IntegratedSystem,
    art: &mut FormulationArtifacts,
) -> Result<(), FormulationError> {
    let p = &sys.power;
    let reference = p
        .reference_node()
        .ok_or(FormulationError::NoReferenceNode)?;

    let ids: Vec<&str> = p.generators.iter().map(|g| g.id.as_str()).collect();
    art.add_grid(Symbol::P, &ids, |i, _| {
        VariableSpec::continuous("", 0.0, p.generators[i].capacity)
    })?;
    let ids: Vec<&str> = p.wind.iter().map(|w| w.id.as_str()).collect();
    art.add_grid(Symbol::W, &ids, |j, t| {
        VariableSpec::continuous("", 0.0, p.wind[j].forecast[t])
    })?;
    let ids: Vec<&str> = p.nodes.iter().map(|n| n.id.as_str()).collect();
    art.add_grid(Symbol::Theta, &ids, |n, _| {
        if n == reference {
            VariableSpec::continuous("", 0.0, 0.0)
        } else {
            VariableSpec::continuous("", -ANGLE_LIMIT, ANGLE_LIMIT)
        }
    })?;
    let ids: Vec<&str> = p.lines.iter().map(|l| l.id.as_str()).collect();
    art.add_grid(Symbol::F, &ids, |l, _| {
        let cap = p.lines[l].capacity;
        VariableSpec::continuous("", -cap, cap)
    })?;

    for t in 0..art.hours {
        for (l, line) in p.lines.iter().enumerate() {
            // f = B (theta_from - theta_to)
            let terms = vec![
                (art.at(Symbol::F, l, t), 1.0),
                (art.at(Symbol::Theta, line.from, t), -line.susceptance),
                (art.at(Symbol::Theta, line.to, t), line.susceptance),
            ];
            let name = format!("dcflow_{}_t{}", line.id, t + 1);
            art.model.add_constraint(LinearConstraint::new(
                name,
                terms,
                ConstraintSense::Eq,
                0.0,
            ))?;
        }
        for (n, node) in p.nodes.iter().enumerate() {
            let mut terms = Vec::new();
            for &i in &sys.coupling.generators_at[n] {
                terms.push((art.at(Symbol::P, i, t), 1.0));
            }
            for &j in &sys.coupling.wind_at[n] {
                terms.push((art.at(Symbol::W, j, t), 1.0));
            }
            for (l, line) in p.lines.iter().enumerate() {
                if line.from == n {
                    terms.push((art.at(Symbol::F, l, t), -1.0));
                } else if line.to == n {
                    terms.push((art.at(Symbol::F, l, t), 1.0));
                }
            }
            let name = format!("pbal_{}_t{}", node.id, t + 1);
            let demand = sys.electric_demand_at(n, t);
            art.model.add_constraint(LinearConstraint::new(
                name,
                terms,
                ConstraintSense::Eq,
                demand,
            ))?;
        }
    }
    Ok(())
}
