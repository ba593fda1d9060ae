//! Solver-agnostic representation of linear and mixed-integer linear programs.
//!
//! Constraints are kept row-wise exactly as the formulation emits them; no
//! matrix is assembled until a backend or exporter asks for one. The
//! objective sense is always minimisation.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Dense index of a variable inside an [`OptModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

/// Dense index of a constraint inside an [`OptModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstraintId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariableSpec {
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub name: String,
}

impl VariableSpec {
    pub fn continuous(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Self {
            kind: VarKind::Continuous,
            lower,
            upper,
            name: name.into(),
        }
    }

    /// A continuous variable in `[0, +inf)`.
    pub fn non_negative(name: impl Into<String>) -> Self {
        Self::continuous(name, 0.0, f64::INFINITY)
    }

    pub fn free(name: impl Into<String>) -> Self {
        Self::continuous(name, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn binary(name: impl Into<String>) -> Self {
        Self {
            kind: VarKind::Binary,
            lower: 0.0,
            upper: 1.0,
            name: name.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for ConstraintSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintSense::Le => "<=",
            ConstraintSense::Eq => "=",
            ConstraintSense::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub terms: Vec<(VarId, f64)>,
    pub sense: ConstraintSense,
    pub rhs: f64,
    pub name: String,
}

impl LinearConstraint {
    pub fn new(
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        sense: ConstraintSense,
        rhs: f64,
    ) -> Self {
        Self {
            terms,
            sense,
            rhs,
            name: name.into(),
        }
    }

    /// Left-hand side evaluated at `values` (indexed by variable id).
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|(v, c)| c * values[v.0]).sum()
    }

    /// Amount by which `values` violates this row (zero when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.sense {
            ConstraintSense::Le => (lhs - self.rhs).max(0.0),
            ConstraintSense::Ge => (self.rhs - lhs).max(0.0),
            ConstraintSense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("inconsistent bounds for variable `{name}`: lower {lower} > upper {upper}")]
    InconsistentBounds {
        name: String,
        lower: f64,
        upper: f64,
    },
    #[error("binary variable `{0}` has bounds outside [0, 1]")]
    BinaryBounds(String),
    #[error("variable `{0}` has a NaN bound")]
    NanBound(String),
    #[error("constraint `{constraint}` references unknown variable id {id}")]
    UnknownVariable { constraint: String, id: usize },
    #[error("duplicate term for variable id {id} in constraint `{constraint}`")]
    DuplicateTerm { constraint: String, id: usize },
    #[error("non-finite coefficient or rhs in `{0}`")]
    NonFinite(String),
}

/// A minimisation problem over continuous and binary variables.
#[derive(Debug, Clone, Default)]
pub struct OptModel {
    variables: Vec<VariableSpec>,
    constraints: Vec<LinearConstraint>,
    objective: Vec<(VarId, f64)>,
}

impl OptModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, spec: VariableSpec) -> Result<VarId, ModelError> {
        if spec.lower.is_nan() || spec.upper.is_nan() {
            return Err(ModelError::NanBound(spec.name));
        }
        if spec.lower > spec.upper {
            return Err(ModelError::InconsistentBounds {
                name: spec.name,
                lower: spec.lower,
                upper: spec.upper,
            });
        }
        if spec.kind == VarKind::Binary && (spec.lower < 0.0 || spec.upper > 1.0) {
            return Err(ModelError::BinaryBounds(spec.name));
        }
        let id = VarId(self.variables.len());
        self.variables.push(spec);
        Ok(id)
    }

    pub fn add_constraint(&mut self, c: LinearConstraint) -> Result<ConstraintId, ModelError> {
        if !c.rhs.is_finite() {
            return Err(ModelError::NonFinite(c.name));
        }
        let mut seen = HashSet::with_capacity(c.terms.len());
        for &(v, coef) in &c.terms {
            if v.0 >= self.variables.len() {
                return Err(ModelError::UnknownVariable {
                    constraint: c.name,
                    id: v.0,
                });
            }
            if !coef.is_finite() {
                return Err(ModelError::NonFinite(c.name));
            }
            if !seen.insert(v) {
                return Err(ModelError::DuplicateTerm {
                    constraint: c.name,
                    id: v.0,
                });
            }
        }
        let id = ConstraintId(self.constraints.len());
        self.constraints.push(c);
        Ok(id)
    }

    /// Adds `coef * var` to the objective, merging with an existing term.
    pub fn add_objective_term(&mut self, var: VarId, coef: f64) -> Result<(), ModelError> {
        if var.0 >= self.variables.len() {
            return Err(ModelError::UnknownVariable {
                constraint: "objective".into(),
                id: var.0,
            });
        }
        if !coef.is_finite() {
            return Err(ModelError::NonFinite("objective".into()));
        }
        match self.objective.iter_mut().find(|(v, _)| *v == var) {
            Some(term) => term.1 += coef,
            None => self.objective.push((var, coef)),
        }
        Ok(())
    }

    /// Tightens the bounds of an existing variable to `[lower, upper]`.
    pub fn set_bounds(&mut self, var: VarId, lower: f64, upper: f64) -> Result<(), ModelError> {
        let spec = self
            .variables
            .get_mut(var.0)
            .ok_or_else(|| ModelError::UnknownVariable {
                constraint: "bounds".into(),
                id: var.0,
            })?;
        if lower > upper {
            return Err(ModelError::InconsistentBounds {
                name: spec.name.clone(),
                lower,
                upper,
            });
        }
        spec.lower = lower;
        spec.upper = upper;
        Ok(())
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn variable(&self, id: VarId) -> &VariableSpec {
        &self.variables[id.0]
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(VarId, f64)] {
        &self.objective
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.variables
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .count()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|(v, c)| c * values[v.0]).sum()
    }

    /// Largest bound or row violation of `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let bounds = self
            .variables
            .iter()
            .zip(values)
            .map(|(s, &x)| (s.lower - x).max(x - s.upper).max(0.0));
        let rows = self.constraints.iter().map(|c| c.violation(values));
        bounds.chain(rows).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_variable_gets_id_zero() {
        let mut m = OptModel::new();
        let id = m
            .add_variable(VariableSpec::continuous("x", 0.0, 10.0))
            .unwrap();
        assert_eq!(id, VarId(0));
    }

    #[test]
    fn ids_are_dense() {
        let mut m = OptModel::new();
        for i in 0..3 {
            m.add_variable(VariableSpec::non_negative(format!("x{i}")))
                .unwrap();
        }
        assert_eq!(m.add_variable(VariableSpec::binary("b")).unwrap(), VarId(3));
        assert_eq!(m.num_binaries(), 1);
    }

    #[test]
    fn inconsistent_bounds_rejected() {
        let mut m = OptModel::new();
        let err = m
            .add_variable(VariableSpec::continuous("x", 5.0, 2.0))
            .unwrap_err();
        assert!(err.to_string().contains("inconsistent bounds"));
        assert_eq!(m.num_variables(), 0);
    }

    #[test]
    fn binary_bounds_checked() {
        let mut m = OptModel::new();
        let mut spec = VariableSpec::binary("y");
        spec.upper = 2.0;
        assert_eq!(
            m.add_variable(spec),
            Err(ModelError::BinaryBounds("y".into()))
        );
    }

    fn two_vars() -> OptModel {
        let mut m = OptModel::new();
        m.add_variable(VariableSpec::non_negative("x0")).unwrap();
        m.add_variable(VariableSpec::non_negative("x1")).unwrap();
        m
    }

    #[test]
    fn constraint_ids() {
        let mut m = two_vars();
        let c = LinearConstraint::new(
            "c",
            vec![(VarId(0), 1.0), (VarId(1), 2.0)],
            ConstraintSense::Le,
            5.0,
        );
        assert_eq!(m.add_constraint(c).unwrap(), ConstraintId(0));
    }

    #[test]
    fn unknown_variable_rejected() {
        let mut m = two_vars();
        let c = LinearConstraint::new("c", vec![(VarId(99), 1.0)], ConstraintSense::Le, 5.0);
        assert!(matches!(
            m.add_constraint(c),
            Err(ModelError::UnknownVariable { id: 99, .. })
        ));
    }

    #[test]
    fn duplicate_term_rejected() {
        let mut m = two_vars();
        let c = LinearConstraint::new(
            "c",
            vec![(VarId(0), 1.0), (VarId(0), 2.0)],
            ConstraintSense::Le,
            5.0,
        );
        let err = m.add_constraint(c).unwrap_err();
        assert!(err.to_string().contains("duplicate term"));
        assert_eq!(m.num_constraints(), 0);
    }

    #[test]
    fn objective_terms_merge() {
        let mut m = two_vars();
        m.add_objective_term(VarId(1), 2.0).unwrap();
        m.add_objective_term(VarId(1), 3.0).unwrap();
        assert_eq!(m.objective(), &[(VarId(1), 5.0)]);
        assert_eq!(m.objective_value(&[1.0, 2.0]), 10.0);
    }

    #[test]
    fn violation_measures() {
        let mut m = two_vars();
        m.add_constraint(LinearConstraint::new(
            "c",
            vec![(VarId(0), 1.0), (VarId(1), 1.0)],
            ConstraintSense::Ge,
            4.0,
        ))
        .unwrap();
        assert_eq!(m.max_violation(&[1.0, 1.0]), 2.0);
        assert_eq!(m.max_violation(&[-0.5, 5.0]), 0.5);
        assert_eq!(m.max_violation(&[2.0, 2.0]), 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn ids_are_zero_to_n(n in 0usize..200) {
                let mut m = OptModel::new();
                let ids: Vec<_> = (0..n)
                    .map(|i| m.add_variable(VariableSpec::non_negative(format!("v{i}"))).unwrap().0)
                    .collect();
                prop_assert_eq!(ids, (0..n).collect::<Vec<_>>());
            }
        }
    }
}
