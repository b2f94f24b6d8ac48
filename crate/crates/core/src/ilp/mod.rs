//! Bounded-integer linear programs: model representation, an exact
//! branch-and-bound solver, an exhaustive oracle for certifying it, and
//! LP-format export for third-party cross-checks.
//!
//! All variables carry finite bounds. The solver is deterministic: branching
//! picks the lowest-index fractional variable and explores the floor branch
//! first, so identical models yield identical solutions.

mod brute;
mod lp_format;
mod simplex;
mod solve;

pub use brute::{brute_force, brute_force_with_budget};
pub use lp_format::export_lp;
pub use solve::{solve, solve_with, SolveOptions};

use thiserror::Error;

/// Integrality tolerance: an LP value within this of an integer counts as
/// integral.
pub const INT_TOL: f64 = 1e-6;
/// Absolute tolerance for constraint satisfaction checks.
pub const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum IlpError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("exhaustive search budget exceeded")]
    SearchBudget,
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// One linear row: terms · x  (relation)  rhs.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub name: String,
    /// (variable index, coefficient), sorted by index, no duplicates or zeros.
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A minimization ILP over bounded variables.
#[derive(Debug, Clone, Default)]
pub struct IlpModel {
    pub vars: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Objective terms in insertion order; evaluation follows this order so
    /// independent solvers reproduce bitwise-identical objective values.
    pub objective: Vec<(usize, f64)>,
}

impl IlpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        integer: bool,
    ) -> usize {
        let name = name.into();
        debug_assert!(lower.is_finite() && upper.is_finite() && lower <= upper, "{name}");
        self.vars.push(Variable { name, lower, upper, integer });
        self.vars.len() - 1
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> usize {
        self.add_var(name, 0.0, 1.0, true)
    }

    pub fn add_integer(&mut self, name: impl Into<String>, lower: i64, upper: i64) -> usize {
        self.add_var(name, lower as f64, upper as f64, true)
    }

    /// Add a row; terms are sorted, merged, and stripped of zeros.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        mut terms: Vec<(usize, f64)>,
        relation: Relation,
        rhs: f64,
    ) {
        terms.sort_by_key(|&(j, _)| j);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for (j, c) in terms {
            match merged.last_mut() {
                Some((last, acc)) if *last == j => *acc += c,
                _ => merged.push((j, c)),
            }
        }
        merged.retain(|&(_, c)| c != 0.0);
        self.constraints.push(Constraint { name: name.into(), terms: merged, relation, rhs });
    }

    /// Accumulate a coefficient onto the objective.
    pub fn add_objective_term(&mut self, var: usize, coeff: f64) {
        if coeff != 0.0 {
            self.objective.push((var, coeff));
        }
    }

    /// Objective evaluated in stored term order (see field doc).
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        let mut total = 0.0;
        for &(j, c) in &self.objective {
            total += c * values[j];
        }
        total
    }

    /// Whether `values` satisfies every constraint within `tol` and every
    /// bound within `tol`.
    pub fn is_feasible(&self, values: &[f64], tol: f64) -> bool {
        if values.len() != self.vars.len() {
            return false;
        }
        for (v, x) in self.vars.iter().zip(values) {
            if *x < v.lower - tol || *x > v.upper + tol {
                return false;
            }
        }
        self.constraints.iter().all(|c| {
            let lhs: f64 = c.terms.iter().map(|&(j, a)| a * values[j]).sum();
            match c.relation {
                Relation::Le => lhs <= c.rhs + tol,
                Relation::Ge => lhs >= c.rhs - tol,
                Relation::Eq => (lhs - c.rhs).abs() <= tol,
            }
        })
    }

    pub fn validate(&self) -> Result<(), IlpError> {
        let mut names = std::collections::BTreeSet::new();
        for v in &self.vars {
            if !(v.lower.is_finite() && v.upper.is_finite()) {
                return Err(IlpError::InvalidModel(format!("variable {} has infinite bounds", v.name)));
            }
            if v.lower > v.upper {
                return Err(IlpError::InvalidModel(format!(
                    "variable {} has lower {} above upper {}",
                    v.name, v.lower, v.upper
                )));
            }
            if !names.insert(v.name.as_str()) {
                return Err(IlpError::InvalidModel(format!("duplicate variable name {}", v.name)));
            }
        }
        for c in &self.constraints {
            for &(j, coeff) in &c.terms {
                if j >= self.vars.len() {
                    return Err(IlpError::InvalidModel(format!(
                        "constraint {} references undeclared variable {j}",
                        c.name
                    )));
                }
                if !coeff.is_finite() {
                    return Err(IlpError::InvalidModel(format!(
                        "constraint {} has non-finite coefficient",
                        c.name
                    )));
                }
            }
            if !c.rhs.is_finite() {
                return Err(IlpError::InvalidModel(format!("constraint {} has non-finite rhs", c.name)));
            }
        }
        for &(j, coeff) in &self.objective {
            if j >= self.vars.len() {
                return Err(IlpError::InvalidModel(format!(
                    "objective references undeclared variable {j}"
                )));
            }
            if !coeff.is_finite() {
                return Err(IlpError::InvalidModel("objective has non-finite coefficient".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    TimedOut,
}

/// Result of `solve` or `brute_force`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Best point found: always present on Optimal, present on TimedOut when
    /// an incumbent exists, absent on Infeasible.
    pub values: Option<Vec<f64>>,
    pub objective: Option<f64>,
    /// Proven lower bound on the optimum; equals `objective` on Optimal.
    pub lower_bound: Option<f64>,
    /// Search nodes visited.
    pub nodes: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_constraint_canonicalizes_terms() {
        let mut m = IlpModel::new();
        let x = m.add_binary("x");
        let y = m.add_binary("y");
        m.add_constraint("c", vec![(y, 2.0), (x, 1.0), (y, -2.0), (x, 0.5)], Relation::Le, 1.0);
        assert_eq!(m.constraints[0].terms, vec![(x, 1.5)]);
    }

    #[test]
    fn objective_value_follows_term_order() {
        let mut m = IlpModel::new();
        let x = m.add_binary("x");
        let y = m.add_binary("y");
        m.add_objective_term(y, 0.1);
        m.add_objective_term(x, 0.2);
        m.add_objective_term(y, 0.3);
        let v = vec![1.0, 1.0];
        assert_eq!(m.objective_value(&v), 0.1 + 0.2 + 0.3);
    }

    #[test]
    fn validate_rejects_bad_models() {
        let mut m = IlpModel::new();
        m.add_var("x", 0.0, 1.0, true);
        m.constraints.push(Constraint {
            name: "c".into(),
            terms: vec![(7, 1.0)],
            relation: Relation::Le,
            rhs: 0.0,
        });
        assert!(matches!(m.validate(), Err(IlpError::InvalidModel(_))));

        let mut dup = IlpModel::new();
        dup.add_var("x", 0.0, 1.0, true);
        dup.add_var("x", 0.0, 1.0, true);
        assert!(matches!(dup.validate(), Err(IlpError::InvalidModel(_))));

        let mut inf = IlpModel::new();
        inf.vars.push(Variable { name: "x".into(), lower: 0.0, upper: f64::INFINITY, integer: false });
        assert!(matches!(inf.validate(), Err(IlpError::InvalidModel(_))));
    }

    #[test]
    fn is_feasible_checks_rows_and_bounds() {
        let mut m = IlpModel::new();
        let x = m.add_binary("x");
        let y = m.add_binary("y");
        m.add_constraint("c", vec![(x, 1.0), (y, 1.0)], Relation::Le, 1.0);
        assert!(m.is_feasible(&[1.0, 0.0], FEAS_TOL));
        assert!(!m.is_feasible(&[1.0, 1.0], FEAS_TOL));
        assert!(!m.is_feasible(&[2.0, 0.0], FEAS_TOL));
    }
}
