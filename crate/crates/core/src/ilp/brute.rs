//! Exhaustive enumeration oracle for certifying the branch-and-bound solver.
//!
//! Deliberately shares nothing with the LP machinery: plain depth-first
//! enumeration over integer domains with interval-arithmetic feasibility
//! pruning. Prunes only provably infeasible subtrees, so every feasible point
//! is visited and the reported optimum is the enumeration minimum. A node
//! budget guards against models too large to enumerate.

use super::{IlpError, IlpModel, Relation, SolveReport, SolveStatus, FEAS_TOL};

const DEFAULT_BUDGET: u64 = 1 << 26;

pub fn brute_force(model: &IlpModel) -> Result<SolveReport, IlpError> {
    brute_force_with_budget(model, DEFAULT_BUDGET)
}

struct Search<'a> {
    model: &'a IlpModel,
    lo: Vec<i64>,
    hi: Vec<i64>,
    /// Rows touching each variable, with the coefficient.
    cols: Vec<Vec<(usize, f64)>>,
    /// Current activity interval per row given fixed prefix + open domains.
    min_act: Vec<f64>,
    max_act: Vec<f64>,
    values: Vec<f64>,
    best: Option<(Vec<f64>, f64)>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn row_ok(&self, r: usize) -> bool {
        let c = &self.model.constraints[r];
        match c.relation {
            Relation::Le => self.min_act[r] <= c.rhs + FEAS_TOL,
            Relation::Ge => self.max_act[r] >= c.rhs - FEAS_TOL,
            Relation::Eq => {
                self.min_act[r] <= c.rhs + FEAS_TOL && self.max_act[r] >= c.rhs - FEAS_TOL
            }
        }
    }

    /// Shift row intervals for fixing variable `j` to `v`; sign = -1 undoes.
    fn shift(&mut self, j: usize, v: f64, sign: f64) {
        let lo = self.lo[j] as f64;
        let hi = self.hi[j] as f64;
        for &(r, a) in &self.cols[j] {
            if a > 0.0 {
                self.min_act[r] += sign * a * (v - lo);
                self.max_act[r] += sign * a * (v - hi);
            } else {
                self.min_act[r] += sign * a * (v - hi);
                self.max_act[r] += sign * a * (v - lo);
            }
        }
    }

    fn dfs(&mut self, j: usize) -> Result<(), IlpError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(IlpError::SearchBudget);
        }
        if j == self.values.len() {
            // Every row interval is now a point and was checked as the last
            // participating variable got fixed, so this leaf is feasible.
            let objective = self.model.objective_value(&self.values);
            match &self.best {
                Some((_, b)) if objective >= *b => {}
                _ => self.best = Some((self.values.clone(), objective)),
            }
            return Ok(());
        }
        // Descending domain order: on objective ties the largest assignment
        // found first wins.
        for v in (self.lo[j]..=self.hi[j]).rev() {
            let v = v as f64;
            self.values[j] = v;
            self.shift(j, v, 1.0);
            let viable = self.cols[j].iter().all(|&(r, _)| self.row_ok(r));
            if viable {
                self.dfs(j + 1)?;
            }
            self.shift(j, v, -1.0);
        }
        self.values[j] = self.lo[j] as f64;
        Ok(())
    }
}

pub fn brute_force_with_budget(model: &IlpModel, budget: u64) -> Result<SolveReport, IlpError> {
    model.validate()?;
    let nv = model.vars.len();
    let mut lo = Vec::with_capacity(nv);
    let mut hi = Vec::with_capacity(nv);
    for v in &model.vars {
        if !v.integer {
            return Err(IlpError::InvalidModel(format!(
                "exhaustive search requires integer variables, {} is continuous",
                v.name
            )));
        }
        let l = (v.lower - 1e-9).ceil() as i64;
        let h = (v.upper + 1e-9).floor() as i64;
        if l > h {
            return Ok(SolveReport {
                status: SolveStatus::Infeasible,
                values: None,
                objective: None,
                lower_bound: None,
                nodes: 0,
            });
        }
        lo.push(l);
        hi.push(h);
    }

    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nv];
    let mut min_act = vec![0.0; model.constraints.len()];
    let mut max_act = vec![0.0; model.constraints.len()];
    for (r, c) in model.constraints.iter().enumerate() {
        let mut mn = 0.0;
        let mut mx = 0.0;
        for &(j, a) in &c.terms {
            cols[j].push((r, a));
            if a > 0.0 {
                mn += a * lo[j] as f64;
                mx += a * hi[j] as f64;
            } else {
                mn += a * hi[j] as f64;
                mx += a * lo[j] as f64;
            }
        }
        min_act[r] = mn;
        max_act[r] = mx;
    }
    // Constant rows (all coefficients zero) never get re-checked during the
    // walk, so they must hold outright.
    for c in &model.constraints {
        if c.terms.is_empty() {
            let ok = match c.relation {
                Relation::Le => 0.0 <= c.rhs + FEAS_TOL,
                Relation::Ge => 0.0 >= c.rhs - FEAS_TOL,
                Relation::Eq => c.rhs.abs() <= FEAS_TOL,
            };
            if !ok {
                return Ok(SolveReport {
                    status: SolveStatus::Infeasible,
                    values: None,
                    objective: None,
                    lower_bound: None,
                    nodes: 0,
                });
            }
        }
    }

    let values: Vec<f64> = lo.iter().map(|&l| l as f64).collect();
    let mut search = Search {
        model,
        lo,
        hi,
        cols,
        min_act,
        max_act,
        values,
        best: None,
        nodes: 0,
        budget,
    };
    search.dfs(0)?;

    let nodes = search.nodes;
    match search.best {
        Some((values, objective)) => Ok(SolveReport {
            status: SolveStatus::Optimal,
            values: Some(values),
            objective: Some(objective),
            lower_bound: Some(objective),
            nodes,
        }),
        None => Ok(SolveReport {
            status: SolveStatus::Infeasible,
            values: None,
            objective: None,
            lower_bound: None,
            nodes,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tie_resolves_to_the_larger_first_variable() {
        let mut m = IlpModel::new();
        let x = m.add_binary("x");
        let y = m.add_binary("y");
        m.add_constraint("c", vec![(x, 1.0), (y, 1.0)], Relation::Le, 1.0);
        m.add_objective_term(x, -1.0);
        m.add_objective_term(y, -1.0);
        let r = brute_force(&m).unwrap();
        assert_eq!(r.objective.unwrap(), -1.0);
        assert_eq!(r.values.unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn infeasible_cover_detected() {
        let mut m = IlpModel::new();
        let x = m.add_binary("x");
        let y = m.add_binary("y");
        m.add_constraint("c", vec![(x, 1.0), (y, 1.0)], Relation::Ge, 3.0);
        assert_eq!(brute_force(&m).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn equality_rows_prune_early() {
        let mut m = IlpModel::new();
        let x = m.add_integer("x", 0, 5);
        let y = m.add_integer("y", 0, 5);
        m.add_constraint("c", vec![(x, 1.0), (y, 1.0)], Relation::Eq, 4.0);
        m.add_objective_term(x, 1.0);
        m.add_objective_term(y, 2.0);
        let r = brute_force(&m).unwrap();
        assert_eq!(r.values.unwrap(), vec![4.0, 0.0]);
        assert_eq!(r.objective.unwrap(), 4.0);
        // 36 raw points, but interval pruning kills most prefixes.
        assert!(r.nodes < 36);
    }

    #[test]
    fn continuous_variables_are_rejected() {
        let mut m = IlpModel::new();
        m.add_var("x", 0.0, 1.0, false);
        assert!(matches!(brute_force(&m), Err(IlpError::InvalidModel(_))));
    }

    #[test]
    fn budget_stops_runaway_enumeration() {
        let mut m = IlpModel::new();
        for j in 0..30 {
            m.add_binary(format!("x{j}"));
        }
        assert_eq!(brute_force_with_budget(&m, 10_000), Err(IlpError::SearchBudget));
    }

    #[test]
    fn constant_rows_checked_up_front() {
        let mut m = IlpModel::new();
        let x = m.add_binary("x");
        m.add_constraint("zero", vec![(x, 0.0)], Relation::Ge, 1.0);
        assert_eq!(brute_force(&m).unwrap().status, SolveStatus::Infeasible);
    }
}
