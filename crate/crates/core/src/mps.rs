//! Free-format MPS export.
//!
//! Binary columns are emitted between `MARKER INTORG/INTEND` pairs and also
//! carry `BV` bounds, which every mainstream reader (HiGHS, CBC, SCIP,
//! Gurobi, CPLEX) understands.

use std::collections::HashSet;
use std::fmt::Write as _;

use log::warn;

use crate::model::{ConstraintSense, OptModel, VarKind};

pub const OBJECTIVE_ROW: &str = "COST";

/// An exported MPS document plus the column names it uses, in variable-id
/// order. Names differ from the model only where they were synthesized.
#[derive(Debug, Clone)]
pub struct StandardForm {
    pub text: String,
    pub column_names: Vec<String>,
    pub warnings: Vec<String>,
}

fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && name != OBJECTIVE_ROW
        && !name.starts_with('$')
        && name.bytes().all(|b| b.is_ascii_graphic())
}

/// Returns one unique, whitespace-free name per item; `fallback(i)` is used
/// for empty, invalid, or duplicate names.
fn resolve_names<'a>(
    names: impl Iterator<Item = &'a str>,
    fallback: impl Fn(usize) -> String,
    what: &str,
    warnings: &mut Vec<String>,
) -> Vec<String> {
    let names: Vec<&str> = names.collect();
    let mut taken: HashSet<String> = names
        .iter()
        .filter(|n| is_valid_name(n))
        .map(|n| n.to_string())
        .collect();
    let mut used = HashSet::with_capacity(names.len());
    let mut out = Vec::with_capacity(names.len());
    for (i, name) in names.into_iter().enumerate() {
        if is_valid_name(name) && used.insert(name.to_string()) {
            out.push(name.to_string());
            continue;
        }
        let mut candidate = fallback(i);
        let mut bump = 0;
        while taken.contains(&candidate) {
            bump += 1;
            candidate = format!("{}_{bump}", fallback(i));
        }
        let msg = if name.is_empty() {
            format!("{what} {i} is unnamed; exported as `{candidate}`")
        } else {
            format!("{what} {i} name `{name}` is unusable in MPS; exported as `{candidate}`")
        };
        warn!("{msg}");
        warnings.push(msg);
        taken.insert(candidate.clone());
        used.insert(candidate.clone());
        out.push(candidate);
    }
    out
}

fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 {
        "0".to_string()
    } else if (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn export_standard_form(model: &OptModel) -> StandardForm {
    let mut warnings = Vec::new();
    let cols = resolve_names(
        model.variables().iter().map(|v| v.name.as_str()),
        |i| format!("x{i}"),
        "variable",
        &mut warnings,
    );
    let rows = resolve_names(
        model.constraints().iter().map(|c| c.name.as_str()),
        |i| format!("r{i}"),
        "constraint",
        &mut warnings,
    );

    // Column-wise view of the row-wise model.
    let mut entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.num_variables()];
    for (r, c) in model.constraints().iter().enumerate() {
        for &(v, coef) in &c.terms {
            if coef != 0.0 {
                entries[v.0].push((r, coef));
            }
        }
    }
    let mut cost = vec![0.0; model.num_variables()];
    for &(v, c) in model.objective() {
        cost[v.0] += c;
    }

    let mut out = String::new();
    writeln!(out, "NAME gasflex").unwrap();
    writeln!(out, "OBJSENSE").unwrap();
    writeln!(out, "    MIN").unwrap();
    writeln!(out, "ROWS").unwrap();
    writeln!(out, " N  {OBJECTIVE_ROW}").unwrap();
    for (c, name) in model.constraints().iter().zip(&rows) {
        let tag = match c.sense {
            ConstraintSense::Le => 'L',
            ConstraintSense::Eq => 'E',
            ConstraintSense::Ge => 'G',
        };
        writeln!(out, " {tag}  {name}").unwrap();
    }

    writeln!(out, "COLUMNS").unwrap();
    let mut in_int_block = false;
    let mut marker = 0;
    for (j, spec) in model.variables().iter().enumerate() {
        let is_int = spec.kind == VarKind::Binary;
        if is_int != in_int_block {
            let kind = if is_int { "'INTORG'" } else { "'INTEND'" };
            writeln!(out, "    MARKER{marker} 'MARKER' {kind}").unwrap();
            marker += 1;
            in_int_block = is_int;
        }
        let name = &cols[j];
        // Always write the objective entry so columns without rows survive.
        writeln!(out, "    {name} {OBJECTIVE_ROW} {}", num(cost[j])).unwrap();
        for &(r, coef) in &entries[j] {
            writeln!(out, "    {name} {} {}", rows[r], num(coef)).unwrap();
        }
    }
    if in_int_block {
        writeln!(out, "    MARKER{marker} 'MARKER' 'INTEND'").unwrap();
    }

    writeln!(out, "RHS").unwrap();
    for (c, name) in model.constraints().iter().zip(&rows) {
        if c.rhs != 0.0 {
            writeln!(out, "    RHS {name} {}", num(c.rhs)).unwrap();
        }
    }

    writeln!(out, "BOUNDS").unwrap();
    for (spec, name) in model.variables().iter().zip(&cols) {
        let (lo, up) = (spec.lower, spec.upper);
        if spec.kind == VarKind::Binary && lo == 0.0 && up == 1.0 {
            writeln!(out, " BV BND {name}").unwrap();
            continue;
        }
        if lo == up {
            writeln!(out, " FX BND {name} {}", num(lo)).unwrap();
            continue;
        }
        if lo == f64::NEG_INFINITY && up == f64::INFINITY {
            writeln!(out, " FR BND {name}").unwrap();
            continue;
        }
        if lo == f64::NEG_INFINITY {
            writeln!(out, " MI BND {name}").unwrap();
        } else if lo != 0.0 || up < 0.0 || spec.kind == VarKind::Binary {
            writeln!(out, " LO BND {name} {}", num(lo)).unwrap();
        }
        if up != f64::INFINITY {
            writeln!(out, " UP BND {name} {}", num(up)).unwrap();
        }
    }
    writeln!(out, "ENDATA").unwrap();

    StandardForm {
        text: out,
        column_names: cols,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LinearConstraint, VarId, VariableSpec};

    #[test]
    fn single_variable_document() {
        let mut m = OptModel::new();
        let x = m.add_variable(VariableSpec::free("x")).unwrap();
        m.add_constraint(LinearConstraint::new(
            "lb",
            vec![(x, 1.0)],
            ConstraintSense::Ge,
            1.0,
        ))
        .unwrap();
        m.add_objective_term(x, 1.0).unwrap();
        let doc = export_standard_form(&m);
        assert!(doc.warnings.is_empty());
        assert!(doc.text.contains(" G  lb"));
        assert!(doc.text.contains("    x COST 1"));
        assert!(doc.text.contains("    RHS lb 1"));
        assert!(doc.text.contains(" FR BND x"));
        assert!(doc.text.trim_end().ends_with("ENDATA"));
    }

    #[test]
    fn binary_gets_integrality_marker() {
        let mut m = OptModel::new();
        m.add_variable(VariableSpec::non_negative("x")).unwrap();
        m.add_variable(VariableSpec::binary("y_a_t1")).unwrap();
        let doc = export_standard_form(&m);
        assert!(doc.text.contains("'INTORG'"));
        assert!(doc.text.contains("'INTEND'"));
        assert!(doc.text.contains(" BV BND y_a_t1"));
        let org = doc.text.find("'INTORG'").unwrap();
        let col = doc.text.find("    y_a_t1 COST").unwrap();
        let end = doc.text.find("'INTEND'").unwrap();
        assert!(org < col && col < end);
    }

    #[test]
    fn unnamed_and_duplicate_names_are_synthesized() {
        let mut m = OptModel::new();
        m.add_variable(VariableSpec::non_negative("")).unwrap();
        m.add_variable(VariableSpec::non_negative("a")).unwrap();
        m.add_variable(VariableSpec::non_negative("a")).unwrap();
        m.add_variable(VariableSpec::non_negative("has space"))
            .unwrap();
        let doc = export_standard_form(&m);
        assert_eq!(doc.column_names, vec!["x0", "a", "x2", "x3"]);
        assert_eq!(doc.warnings.len(), 3);
    }

    #[test]
    fn synthesized_name_avoids_collision() {
        let mut m = OptModel::new();
        m.add_variable(VariableSpec::non_negative("")).unwrap();
        m.add_variable(VariableSpec::non_negative("x0")).unwrap();
        let doc = export_standard_form(&m);
        assert_eq!(doc.column_names, vec!["x0_1", "x0"]);
    }

    #[test]
    fn bound_records() {
        let mut m = OptModel::new();
        m.add_variable(VariableSpec::continuous("fx", 2.0, 2.0))
            .unwrap();
        m.add_variable(VariableSpec::continuous("neg", -3.0, -1.0))
            .unwrap();
        m.add_variable(VariableSpec::continuous("mi", f64::NEG_INFINITY, 4.0))
            .unwrap();
        m.add_variable(VariableSpec::continuous("plain", 0.0, f64::INFINITY))
            .unwrap();
        let doc = export_standard_form(&m);
        assert!(doc.text.contains(" FX BND fx 2"));
        assert!(doc.text.contains(" LO BND neg -3"));
        assert!(doc.text.contains(" UP BND neg -1"));
        assert!(doc.text.contains(" MI BND mi"));
        assert!(doc.text.contains(" UP BND mi 4"));
        assert!(!doc.text.contains("BND plain"));
        let _ = VarId(0);
    }

    #[test]
    fn number_formatting() {
        assert_eq!(num(0.0), "0");
        assert_eq!(num(1.5), "1.5");
        assert_eq!(num(1e-7), "1e-7");
        assert_eq!(num(2.5e20), "2.5e20");
        assert_eq!(num(-2.0).parse::<f64>().unwrap(), -2.0);
    }
}
