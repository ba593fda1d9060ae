use serde::{Deserialize, Serialize};

use crate::formulation::{BigMConfig, Symbol};
use crate::network::IntegratedSystem;
use crate::solver::ScheduleSolution;

/// Worst observed value of one residual against its limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactnessCheck {
    pub name: String,
    pub worst: f64,
    pub limit: f64,
    /// Where `worst` occurs, e.g. `m1_m2 hour 3`.
    pub at: String,
}

impl ExactnessCheck {
    pub fn passed(&self) -> bool {
        self.worst <= self.limit
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactnessReport {
    pub checks: Vec<ExactnessCheck>,
}

impl ExactnessReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(ExactnessCheck::passed)
    }

    pub fn failures(&self) -> Vec<&ExactnessCheck> {
        self.checks.iter().filter(|c| !c.passed()).collect()
    }
}

struct Tracker {
    check: ExactnessCheck,
}

impl Tracker {
    fn new(name: &str, limit: f64) -> Self {
        Self {
            check: ExactnessCheck {
                name: name.to_string(),
                worst: 0.0,
                limit,
                at: String::new(),
            },
        }
    }

    /// Records `value` (already in units of the limit) if it is the worst so far.
    fn see(&mut self, value: f64, at: impl FnOnce() -> String) {
        if value > self.check.worst || value.is_nan() {
            self.check.worst = value;
            self.check.at = at();
        }
    }
}

/// Recomputes the model identities from a schedule alone.
///
/// `terminal` holds the required final linepack per pipeline; `None` skips
/// that check.
pub fn check_exactness(
    s: &ScheduleSolution,
    sys: &IntegratedSystem,
    big_m: &BigMConfig,
    terminal: Option<&[f64]>,
) -> ExactnessReport {
    let pipes = &sys.gas.pipelines;
    let v = |sym: Symbol, e: usize, t: usize| s.value(sym, e, t);
    let has = |sym| s.has(sym);

    let mut exclusive = Tracker::new("min(q+, q-) / M_flow", 1e-6);
    let mut phi = Tracker::new("|phi - pr*y|", 1e-6);
    let mut binary = Tracker::new("|y - round(y)|", 1e-6);
    let mut telescoping = Tracker::new("linepack telescoping residual", 1e-9);
    let mut definition = Tracker::new("linepack definition residual", 1e-9);
    let mut term = Tracker::new("terminal linepack shortfall", 1e-9);
    let gas_scale = sys.total_gas_demand().max(1.0);
    let power_scale = sys.total_electric_demand().max(1.0);
    let mut gas_bal = Tracker::new("gas balance residual / demand", 1e-9);
    let mut power_bal = Tracker::new("power balance residual / demand", 1e-9);

    for (z, pipe) in pipes.iter().enumerate() {
        let tag = |t: usize| format!("{} hour {}", pipe.id, t + 1);
        for t in 0..s.hours {
            if has(Symbol::QPlus) && has(Symbol::QMinus) {
                let m = v(Symbol::QPlus, z, t).min(v(Symbol::QMinus, z, t));
                exclusive.see(m / big_m.pipelines[z].flow, || tag(t));
            }
            if has(Symbol::Y) {
                let y = v(Symbol::Y, z, t);
                binary.see((y - y.round()).abs(), || tag(t));
                if has(Symbol::PhiFrom) && !pipe.has_compressor() {
                    for (sym, node) in [(Symbol::PhiFrom, pipe.from), (Symbol::PhiTo, pipe.to)] {
                        let r = (v(sym, z, t) - v(Symbol::Pr, node, t) * y).abs();
                        phi.see(r, || tag(t));
                    }
                }
            }
            let mut net = v(Symbol::QIn, z, t) - v(Symbol::QOut, z, t);
            if has(Symbol::QInRev) {
                net += v(Symbol::QInRev, z, t) - v(Symbol::QOutRev, z, t);
            }
            let prev = if t == 0 {
                pipe.initial_linepack
            } else {
                v(Symbol::H, z, t - 1)
            };
            telescoping.see((v(Symbol::H, z, t) - prev - net).abs(), || tag(t));
            let h_def =
                pipe.linepack * (v(Symbol::Pr, pipe.from, t) + v(Symbol::Pr, pipe.to, t)) / 2.0;
            definition.see((v(Symbol::H, z, t) - h_def).abs(), || tag(t));
        }
        if let (Some(target), Some(last)) = (terminal, s.hours.checked_sub(1)) {
            term.see(target[z] - v(Symbol::H, z, last), || tag(last));
        }
    }

    for t in 0..s.hours {
        for (m, node) in sys.gas.nodes.iter().enumerate() {
            let mut r: f64 = sys.coupling.suppliers_at[m]
                .iter()
                .map(|&k| v(Symbol::G, k, t))
                .sum();
            for &i in &sys.coupling.gas_fired_at[m] {
                let eta = sys.power.generators[i]
                    .gas
                    .as_ref()
                    .map_or(0.0, |c| c.conversion);
                r -= eta * v(Symbol::P, i, t);
            }
            for (z, pipe) in pipes.iter().enumerate() {
                if pipe.from == m {
                    r -= v(Symbol::QIn, z, t);
                    if has(Symbol::QOutRev) {
                        r += v(Symbol::QOutRev, z, t);
                    }
                }
                if pipe.to == m {
                    r += v(Symbol::QOut, z, t);
                    if has(Symbol::QInRev) {
                        r -= v(Symbol::QInRev, z, t);
                    }
                }
            }
            r -= sys.gas_demand_at(m, t);
            gas_bal.see(r.abs() / gas_scale, || {
                format!("{} hour {}", node.id, t + 1)
            });
        }
        for (n, node) in sys.power.nodes.iter().enumerate() {
            let mut r: f64 = sys.coupling.generators_at[n]
                .iter()
                .map(|&i| v(Symbol::P, i, t))
                .sum();
            r += sys.coupling.wind_at[n]
                .iter()
                .map(|&j| v(Symbol::W, j, t))
                .sum::<f64>();
            for (l, line) in sys.power.lines.iter().enumerate() {
                if line.from == n {
                    r -= v(Symbol::F, l, t);
                }
                if line.to == n {
                    r += v(Symbol::F, l, t);
                }
            }
            r -= sys.electric_demand_at(n, t);
            power_bal.see(r.abs() / power_scale, || {
                format!("{} hour {}", node.id, t + 1)
            });
        }
    }

    let mut checks = Vec::new();
    if s.has(Symbol::QPlus) {
        checks.push(exclusive.check);
    }
    if s.has(Symbol::Y) {
        checks.push(binary.check);
    }
    if s.has(Symbol::PhiFrom) {
        checks.push(phi.check);
    }
    checks.push(telescoping.check);
    checks.push(definition.check);
    if terminal.is_some() {
        checks.push(term.check);
    }
    checks.push(gas_bal.check);
    checks.push(power_bal.check);
    ExactnessReport { checks }
}
