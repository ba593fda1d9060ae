use crate::network::IntegratedSystem;

use super::points::Plane;

/// Big-M constants of one pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineBigM {
    /// Bound on the flow in either direction (gas units per hour).
    pub flow: f64,
    /// Bound on the pressure-times-direction products (bar).
    pub pressure: f64,
    /// Flow per bar of pressure difference allowed by the direction-gated
    /// flow bounds.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BigMConfig {
    pub pipelines: Vec<PipelineBigM>,
}

/// Global replacements for the derived constants.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BigMOverrides {
    pub flow: Option<f64>,
    pub pressure: Option<f64>,
    pub slope: Option<f64>,
}

/// Per-pipeline constants from the pressure boxes.
///
/// `flow = K * max(PRmax_from, PRmax_to)` bounds the exact Weymouth flow in
/// both directions and also every flow allowed by the corner tangent plane,
/// which is always among the expansion points. `pressure` is the larger
/// maximum pressure of the two ends. `slope = flow / pressure_resolution`, so
/// a pipeline needs at least `pressure_resolution` bar of pressure drop to
/// carry its maximum flow.
pub fn derive_big_m(
    system: &IntegratedSystem,
    pressure_resolution: f64,
    overrides: BigMOverrides,
) -> BigMConfig {
    let nodes = &system.gas.nodes;
    let pipelines = system
        .gas
        .pipelines
        .iter()
        .map(|p| {
            let pmax = nodes[p.from].pressure_max.max(nodes[p.to].pressure_max);
            let flow = overrides.flow.unwrap_or(p.weymouth * pmax);
            PipelineBigM {
                flow,
                pressure: overrides.pressure.unwrap_or(pmax),
                slope: overrides.slope.unwrap_or(flow / pressure_resolution),
            }
        })
        .collect();
    BigMConfig { pipelines }
}

/// Smallest constant that deactivates a direction-gated plane over the whole
/// pressure box: the plane's most negative value, or `flow` if larger.
///
/// `high_min` is the minimum pressure of the plane's sending node and
/// `low_max` the maximum pressure of its receiving node.
pub fn plane_deactivation(plane: &Plane, high_min: f64, low_max: f64, flow: f64) -> f64 {
    (plane.c_low * low_max - plane.c_high * high_min).max(flow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{GasNetwork, GasNode, Pipeline, PowerNetwork};

    fn system(pmax: (f64, f64), k: f64) -> IntegratedSystem {
        let node = |id: &str, hi: f64| GasNode {
            id: id.into(),
            pressure_min: 0.0,
            pressure_max: hi,
        };
        let gas = GasNetwork {
            nodes: vec![node("a", pmax.0), node("b", pmax.1)],
            pipelines: vec![Pipeline {
                id: "a_b".into(),
                from: 0,
                to: 1,
                weymouth: k,
                linepack: 1.0,
                initial_linepack: 0.0,
                compression: 1.0,
            }],
            ..Default::default()
        };
        IntegratedSystem::new("m", 1, PowerNetwork::default(), gas)
    }

    #[test]
    fn flow_bound_from_pressure_cap() {
        let m = derive_big_m(&system((80.0, 80.0), 1.0), 0.1, BigMOverrides::default());
        assert_eq!(m.pipelines[0].flow, 80.0);
        // K * sqrt(pm^2 - pu^2) <= K * pm over the whole box.
        for pm in [0.0_f64, 10.0, 55.5, 80.0] {
            for pu in [0.0, 5.0, 40.0] {
                if pm >= pu {
                    assert!((pm * pm - pu * pu).sqrt() <= m.pipelines[0].flow);
                }
            }
        }
    }

    #[test]
    fn pressure_bound_is_higher_cap() {
        let m = derive_big_m(&system((77.0, 60.0), 2.0), 0.1, BigMOverrides::default());
        assert_eq!(m.pipelines[0].pressure, 77.0);
        assert_eq!(m.pipelines[0].flow, 154.0);
        assert!((m.pipelines[0].slope - 1540.0).abs() < 1e-9);
    }

    #[test]
    fn overrides_win() {
        let o = BigMOverrides {
            flow: Some(5.0),
            pressure: None,
            slope: Some(7.0),
        };
        let m = derive_big_m(&system((80.0, 80.0), 1.0), 0.1, o);
        assert_eq!(m.pipelines[0].flow, 5.0);
        assert_eq!(m.pipelines[0].pressure, 80.0);
        assert_eq!(m.pipelines[0].slope, 7.0);
    }

    #[test]
    fn deactivation_covers_plane_minimum() {
        let plane = Plane::at(1.0, (50.0, 40.0)).unwrap();
        let m = plane_deactivation(&plane, 10.0, 60.0, 60.0);
        // plane + m >= 0 at the worst box corner
        assert!(plane.eval(10.0, 60.0) + m >= -1e-12);
        assert!(m > 60.0);
    }
}
