//! Pressure expansion points and the Weymouth tangent planes built on them.
//!
//! The flow function `K * sqrt(pm^2 - pu^2)` is concave and positively
//! homogeneous of degree one on the cone `pm >= pu >= 0`, so its tangent plane
//! at `(PR_m, PR_u)` is a linear function through the origin that touches the
//! surface along the whole ray through the point and over-estimates it
//! everywhere else on the cone. Only the ray direction of a point matters.

use crate::network::{GasNode, IntegratedSystem, Pipeline};

use super::FormulationError;

/// Coefficients `(c_high, c_low)` of the plane `q <= c_high * p_high - c_low * p_low`
/// tangent to `K * sqrt(p_high^2 - p_low^2)` at `(high, low)`.
pub fn weymouth_plane_coefficients(
    k: f64,
    high: f64,
    low: f64,
) -> Result<(f64, f64), FormulationError> {
    if !(high > low && low >= 0.0 && k > 0.0) || !high.is_finite() {
        return Err(FormulationError::DegenerateExpansionPoint { high, low });
    }
    let root = (high * high - low * low).sqrt();
    Ok((k * high / root, k * low / root))
}

/// A tangent plane for one flow direction of one pipeline: the directed flow
/// is bounded by `c_high * pr_high - c_low * pr_low`, where `high` is the
/// sending node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub point: (f64, f64),
    pub c_high: f64,
    pub c_low: f64,
}

impl Plane {
    pub fn at(k: f64, point: (f64, f64)) -> Result<Self, FormulationError> {
        let (c_high, c_low) = weymouth_plane_coefficients(k, point.0, point.1)?;
        Ok(Self {
            point,
            c_high,
            c_low,
        })
    }

    pub fn eval(&self, p_high: f64, p_low: f64) -> f64 {
        self.c_high * p_high - self.c_low * p_low
    }
}

/// Expansion points per pipeline, each `(PR_sender, PR_receiver)`.
///
/// `forward[z]` holds points for flow along the declared orientation,
/// `reverse[z]` the mirrored points for the opposite direction (empty when
/// the pressure boxes rule out reverse flow). Compressor pipelines carry no
/// points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpansionPointSet {
    pub forward: Vec<Vec<(f64, f64)>>,
    pub reverse: Vec<Vec<(f64, f64)>>,
}

/// `count` points on the segment from the flow-maximising corner
/// `(sender.max, receiver.min)` towards the centre of the pressure box,
/// at fractions `0, 1/count, ..., (count-1)/count` of the usable length.
///
/// The segment is cut where it would reach `PR_sender = PR_receiver`, so
/// every point keeps a positive Weymouth denominator. The fractions make the
/// set for `2 * count` a superset of the set for `count`.
fn ray_points(sender: &GasNode, receiver: &GasNode, count: usize) -> Option<Vec<(f64, f64)>> {
    let corner = (sender.pressure_max, receiver.pressure_min);
    if corner.0.is_nan() || corner.1.is_nan() || corner.0 <= corner.1 {
        return None;
    }
    let mid = (
        0.5 * (sender.pressure_min + sender.pressure_max),
        0.5 * (receiver.pressure_min + receiver.pressure_max),
    );
    // gap(s) = (corner.0 - corner.1) + s * ((mid.0 - mid.1) - (corner.0 - corner.1))
    let gap0 = corner.0 - corner.1;
    let gap1 = mid.0 - mid.1;
    let reach = if gap1 > 0.0 {
        1.0
    } else {
        gap0 / (gap0 - gap1)
    };
    Some(
        (0..count)
            .map(|i| {
                let s = reach * i as f64 / count as f64;
                (
                    corner.0 + s * (mid.0 - corner.0),
                    corner.1 + s * (mid.1 - corner.1),
                )
            })
            .collect(),
    )
}

/// Forward expansion points for `pipeline`.
pub fn expansion_points(
    pipeline: &Pipeline,
    count: usize,
    system: &IntegratedSystem,
) -> Result<Vec<(f64, f64)>, FormulationError> {
    if count == 0 {
        return Err(FormulationError::InvalidConfig(
            "expansion point count must be at least 1".into(),
        ));
    }
    let nodes = &system.gas.nodes;
    ray_points(&nodes[pipeline.from], &nodes[pipeline.to], count).ok_or_else(|| {
        FormulationError::NoForwardFlow {
            pipeline: pipeline.id.clone(),
        }
    })
}

/// Reverse-direction points: the forward construction with the two pressure
/// boxes swapped. `None` when the receiver can never exceed the sender.
pub fn reverse_expansion_points(
    pipeline: &Pipeline,
    count: usize,
    system: &IntegratedSystem,
) -> Option<Vec<(f64, f64)>> {
    let nodes = &system.gas.nodes;
    ray_points(&nodes[pipeline.to], &nodes[pipeline.from], count.max(1))
}

pub fn expansion_point_set(
    system: &IntegratedSystem,
    count: usize,
) -> Result<ExpansionPointSet, FormulationError> {
    let mut set = ExpansionPointSet::default();
    for pipe in &system.gas.pipelines {
        if pipe.has_compressor() {
            set.forward.push(Vec::new());
            set.reverse.push(Vec::new());
            continue;
        }
        set.forward.push(expansion_points(pipe, count, system)?);
        set.reverse
            .push(reverse_expansion_points(pipe, count, system).unwrap_or_default());
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{GasNetwork, PowerNetwork};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn plane_coefficients_at_two_one() {
        let (cm, cu) = weymouth_plane_coefficients(1.0, 2.0, 1.0).unwrap();
        assert!(close(cm, 2.0 / 3f64.sqrt(), 1e-15));
        assert!(close(cu, 1.0 / 3f64.sqrt(), 1e-15));
        assert!(close(cm, 1.1547, 1e-4) && close(cu, 0.5774, 1e-4));
        // Tangency at the expansion point itself.
        assert!(close(2.0 * cm - cu, 3f64.sqrt(), 1e-12));
    }

    #[test]
    fn plane_coefficients_with_zero_receiver() {
        assert_eq!(
            weymouth_plane_coefficients(1.0, 1.0, 0.0).unwrap(),
            (1.0, 0.0)
        );
    }

    #[test]
    fn degenerate_points_rejected() {
        for (h, l) in [(1.0, 1.0), (1.0, 2.0), (1.0, -0.5)] {
            let err = weymouth_plane_coefficients(1.0, h, l).unwrap_err();
            assert!(err.to_string().contains("degenerate expansion point"));
        }
    }

    fn box_system(from: (f64, f64), to: (f64, f64)) -> IntegratedSystem {
        let node = |id: &str, (lo, hi): (f64, f64)| GasNode {
            id: id.into(),
            pressure_min: lo,
            pressure_max: hi,
        };
        let gas = GasNetwork {
            nodes: vec![node("a", from), node("b", to)],
            pipelines: vec![Pipeline {
                id: "a_b".into(),
                from: 0,
                to: 1,
                weymouth: 1.0,
                linepack: 1.0,
                initial_linepack: 0.0,
                compression: 1.0,
            }],
            ..Default::default()
        };
        IntegratedSystem::new("box", 1, PowerNetwork::default(), gas)
    }

    #[test]
    fn single_point_in_box() {
        let sys = box_system((0.0, 100.0), (0.0, 100.0));
        let pts = expansion_points(&sys.gas.pipelines[0], 1, &sys).unwrap();
        assert_eq!(pts, vec![(100.0, 0.0)]);
    }

    #[test]
    fn five_distinct_points_with_positive_denominator() {
        let sys = box_system((0.0, 100.0), (0.0, 100.0));
        let pts = expansion_points(&sys.gas.pipelines[0], 5, &sys).unwrap();
        assert_eq!(pts.len(), 5);
        for (i, &(pm, pu)) in pts.iter().enumerate() {
            assert!(pm > pu && pu >= 0.0);
            assert!((0.0..=100.0).contains(&pm) && (0.0..=100.0).contains(&pu));
            for &other in &pts[..i] {
                assert_ne!(other, (pm, pu));
            }
        }
    }

    #[test]
    fn doubled_count_is_superset() {
        let sys = box_system((30.0, 70.0), (20.0, 60.0));
        let pipe = &sys.gas.pipelines[0];
        for n in [1, 2, 4] {
            let small = expansion_points(pipe, n, &sys).unwrap();
            let big = expansion_points(pipe, 2 * n, &sys).unwrap();
            for p in small {
                assert!(big
                    .iter()
                    .any(|q| close(q.0, p.0, 1e-12) && close(q.1, p.1, 1e-12)));
            }
        }
    }

    #[test]
    fn segment_stops_before_diagonal() {
        // Receiver box sits higher, so the box centre is above the diagonal.
        let sys = box_system((10.0, 50.0), (30.0, 80.0));
        let pts = expansion_points(&sys.gas.pipelines[0], 8, &sys).unwrap();
        assert!(pts.iter().all(|&(pm, pu)| pm > pu));
        let rev = reverse_expansion_points(&sys.gas.pipelines[0], 8, &sys).unwrap();
        assert_eq!(rev[0], (80.0, 10.0));
        assert!(rev.iter().all(|&(pu, pm)| pu > pm));
    }

    #[test]
    fn no_forward_flow_possible() {
        let sys = box_system((10.0, 20.0), (20.0, 40.0));
        let err = expansion_points(&sys.gas.pipelines[0], 3, &sys).unwrap_err();
        assert!(err.to_string().contains("cannot carry forward flow"));
        assert!(reverse_expansion_points(&sys.gas.pipelines[0], 3, &sys).is_some());
    }

    #[test]
    fn zero_count_rejected() {
        let sys = box_system((0.0, 100.0), (0.0, 100.0));
        assert!(expansion_points(&sys.gas.pipelines[0], 0, &sys).is_err());
    }
}
