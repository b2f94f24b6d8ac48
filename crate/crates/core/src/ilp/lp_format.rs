//! CPLEX-style LP file writer, so models can be cross-checked with external
//! solvers.

use super::{IlpModel, Relation};
use std::fmt::Write;

/// Soft wrap point; expressions continue on the next line after a leading
/// space, which every LP reader accepts.
const WRAP_COL: usize = 230;

pub fn export_lp(model: &IlpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ {} variables, {} constraints",
        model.vars.len(),
        model.constraints.len()
    );

    out.push_str("Minimize\n");
    let mut dense = vec![0.0; model.vars.len()];
    for &(j, c) in &model.objective {
        dense[j] += c;
    }
    let obj_terms: Vec<(usize, f64)> =
        dense.iter().enumerate().filter(|&(_, &c)| c != 0.0).map(|(j, &c)| (j, c)).collect();
    let mut line = String::from(" obj:");
    if obj_terms.is_empty() {
        // A bare objective row; "0" keeps strict parsers satisfied.
        line.push_str(" 0");
        if let Some(v) = model.vars.first() {
            let _ = write!(line, " {}", v.name);
        }
    } else {
        write_terms(&mut line, &mut out, &obj_terms, model);
    }
    out.push_str(&line);
    out.push('\n');

    out.push_str("Subject To\n");
    for c in &model.constraints {
        if c.terms.is_empty() {
            let _ = writeln!(out, "\\ {}: constant row, rhs {}", c.name, c.rhs);
            continue;
        }
        let mut line = format!(" {}:", c.name);
        write_terms(&mut line, &mut out, &c.terms, model);
        let rel = match c.relation {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        };
        let _ = write!(line, " {} {}", rel, c.rhs);
        out.push_str(&line);
        out.push('\n');
    }

    let mut bounds = String::new();
    let mut binaries = String::new();
    let mut generals = String::new();
    for v in &model.vars {
        if v.integer && v.lower == 0.0 && v.upper == 1.0 {
            let _ = writeln!(binaries, " {}", v.name);
        } else {
            let _ = writeln!(bounds, " {} <= {} <= {}", v.lower, v.name, v.upper);
            if v.integer {
                let _ = writeln!(generals, " {}", v.name);
            }
        }
    }
    if !bounds.is_empty() {
        out.push_str("Bounds\n");
        out.push_str(&bounds);
    }
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        out.push_str(&binaries);
    }
    if !generals.is_empty() {
        out.push_str("Generals\n");
        out.push_str(&generals);
    }
    out.push_str("End\n");
    out
}

/// Append `± coeff name` terms to `line`, flushing to `out` at the wrap
/// column. Unit coefficients print as bare names.
fn write_terms(line: &mut String, out: &mut String, terms: &[(usize, f64)], model: &IlpModel) {
    for (k, &(j, c)) in terms.iter().enumerate() {
        if line.len() > WRAP_COL {
            out.push_str(line);
            out.push('\n');
            line.clear();
            line.push(' ');
        }
        let name = &model.vars[j].name;
        let mag = c.abs();
        let sign = if c < 0.0 { "-" } else { "+" };
        if k == 0 && c >= 0.0 {
            if mag == 1.0 {
                let _ = write!(line, " {name}");
            } else {
                let _ = write!(line, " {mag} {name}");
            }
        } else if mag == 1.0 {
            let _ = write!(line, " {sign} {name}");
        } else {
            let _ = write!(line, " {sign} {mag} {name}");
        }
    }
}
