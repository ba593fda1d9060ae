use serde::{Deserialize, Serialize};

use crate::formulation::Symbol;
use crate::network::IntegratedSystem;
use crate::solver::ScheduleSolution;

/// Weymouth denominators below this magnitude leave Δ undefined.
pub const DENOMINATOR_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaEntry {
    pub pipeline: usize,
    /// 0-based hour.
    pub hour: usize,
    /// Meaningful only when `defined`.
    pub value: f64,
    pub defined: bool,
}

/// Normalized Weymouth residuals of one schedule over its non-compressor
/// pipelines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxErrorReport {
    pub hours: usize,
    /// Pipeline indices covered, in system order.
    pub pipelines: Vec<usize>,
    /// Pipeline-major: entry `i * hours + t` belongs to `pipelines[i]`.
    pub delta: Vec<DeltaEntry>,
    pub xi: f64,
    pub undefined: usize,
}

impl ApproxErrorReport {
    pub fn get(&self, pipeline: usize, hour: usize) -> Option<&DeltaEntry> {
        let i = self.pipelines.iter().position(|&z| z == pipeline)?;
        self.delta.get(i * self.hours + hour)
    }
}

/// `|q^2 - D| / |D|` with `D = K^2 (p_s^2 - p_r^2)` taken from the sender's
/// side of the actual flow, or `None` when `|D| < DENOMINATOR_EPSILON`.
pub fn delta_value(k: f64, q: f64, p_from: f64, p_to: f64) -> Option<f64> {
    let (send, recv) = if q < 0.0 {
        (p_to, p_from)
    } else {
        (p_from, p_to)
    };
    let den = k * k * (send * send - recv * recv);
    if den.abs() < DENOMINATOR_EPSILON {
        return None;
    }
    Some((q * q - den).abs() / den.abs())
}

/// Computes Δ for every non-compressor pipeline and hour, and Ξ over them.
pub fn approximation_error_delta(
    schedule: &ScheduleSolution,
    sys: &IntegratedSystem,
) -> ApproxErrorReport {
    let pipelines: Vec<usize> = sys
        .gas
        .pipelines
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.has_compressor())
        .map(|(z, _)| z)
        .collect();
    let mut delta = Vec::with_capacity(pipelines.len() * schedule.hours);
    for &z in &pipelines {
        let pipe = &sys.gas.pipelines[z];
        for t in 0..schedule.hours {
            let q = schedule.value(Symbol::Q, z, t);
            let pm = schedule.value(Symbol::Pr, pipe.from, t);
            let pu = schedule.value(Symbol::Pr, pipe.to, t);
            let v = delta_value(pipe.weymouth, q, pm, pu);
            delta.push(DeltaEntry {
                pipeline: z,
                hour: t,
                value: v.unwrap_or(f64::NAN),
                defined: v.is_some(),
            });
        }
    }
    let mut report = ApproxErrorReport {
        hours: schedule.hours,
        pipelines,
        undefined: delta.iter().filter(|d| !d.defined).count(),
        delta,
        xi: 0.0,
    };
    report.xi = approximation_error_xi(&report);
    report
}

/// Root mean square of the defined Δ entries, divided by the full cell count.
pub fn approximation_error_xi(report: &ApproxErrorReport) -> f64 {
    let cells = report.delta.len();
    let defined: Vec<f64> = report
        .delta
        .iter()
        .filter(|d| d.defined)
        .map(|d| d.value)
        .collect();
    if defined.is_empty() {
        if cells > 0 {
            log::warn!("every Δ entry is undefined; reporting Ξ = 0");
        }
        return 0.0;
    }
    (defined.iter().map(|d| d * d).sum::<f64>() / cells as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(values: &[Option<f64>]) -> ApproxErrorReport {
        ApproxErrorReport {
            hours: values.len(),
            pipelines: vec![0],
            delta: values
                .iter()
                .enumerate()
                .map(|(t, v)| DeltaEntry {
                    pipeline: 0,
                    hour: t,
                    value: v.unwrap_or(f64::NAN),
                    defined: v.is_some(),
                })
                .collect(),
            xi: 0.0,
            undefined: values.iter().filter(|v| v.is_none()).count(),
        }
    }

    #[test]
    fn exact_weymouth_point_has_zero_delta() {
        assert!(delta_value(1.0, 1.0, 2f64.sqrt(), 1.0).unwrap() < 1e-15);
    }

    #[test]
    fn half_flow_delta() {
        let d = delta_value(1.0, 0.5, 2f64.sqrt(), 1.0).unwrap();
        assert!((d - 0.75).abs() < 1e-15);
    }

    #[test]
    fn equal_pressures_undefined() {
        assert_eq!(delta_value(1.0, 0.0, 50.0, 50.0), None);
    }

    #[test]
    fn constant_field_xi() {
        assert!((approximation_error_xi(&grid(&[Some(0.3); 7])) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn reported_magnitude_xi() {
        let r = ApproxErrorReport {
            hours: 24,
            pipelines: (0..12).collect(),
            delta: (0..12 * 24)
                .map(|i| DeltaEntry {
                    pipeline: i / 24,
                    hour: i % 24,
                    value: 0.640,
                    defined: true,
                })
                .collect(),
            xi: 0.0,
            undefined: 0,
        };
        assert!((approximation_error_xi(&r) - 0.640).abs() < 1e-12);
    }

    #[test]
    fn half_zero_half_one() {
        let r = grid(&[Some(0.0), Some(1.0), Some(0.0), Some(1.0)]);
        assert!((approximation_error_xi(&r) - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn undefined_entries_contribute_nothing() {
        let r = grid(&[Some(1.0), None]);
        assert!((approximation_error_xi(&r) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(approximation_error_xi(&grid(&[None, None])), 0.0);
    }

    proptest! {
        #[test]
        fn orientation_invariant(k in 0.1f64..5.0, q in -100.0f64..100.0, a in 0.0f64..80.0, b in 0.0f64..80.0) {
            let fwd = delta_value(k, q, a, b);
            let rev = delta_value(k, -q, b, a);
            match (fwd, rev) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0)),
                (None, None) => {}
                _ => prop_assert!(q == 0.0),
            }
        }

        #[test]
        fn xi_monotone(values in prop::collection::vec(0.0f64..3.0, 1..40), shrink in prop::collection::vec(0.0f64..1.0, 40)) {
            let before = grid(&values.iter().map(|&v| Some(v)).collect::<Vec<_>>());
            let after = grid(&values.iter().zip(&shrink).map(|(&v, &s)| Some(v * s)).collect::<Vec<_>>());
            prop_assert!(approximation_error_xi(&after) <= approximation_error_xi(&before) + 1e-15);
        }
    }
}
