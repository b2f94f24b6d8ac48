//! Bounded-variable primal simplex over a dense tableau.
//!
//! Solves the continuous relaxation of an [`IlpModel`] under per-node bound
//! overrides. Two phases: artificial variables absorb initial infeasibility,
//! then the real objective is minimized. Entering column by Dantzig rule
//! (most negative reduced cost, lowest index on ties) with a permanent switch
//! to Bland's rule after a long degenerate streak, which guarantees
//! termination.

use super::{IlpError, IlpModel, Relation};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const FEAS_EPS: f64 = 1e-7;
const DEGENERATE_STREAK: u32 = 100;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { values: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    m: usize,
    ncols: usize,
    /// Row-major m × ncols coefficient matrix, kept as B⁻¹·A by pivoting.
    t: Vec<f64>,
    /// Transformed right-hand side B⁻¹·b.
    beta: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    /// For nonbasic columns: parked at upper bound rather than lower.
    at_upper: Vec<bool>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Tableau {
    fn nonbasic_value(&self, j: usize) -> f64 {
        if self.at_upper[j] {
            self.hi[j]
        } else {
            self.lo[j]
        }
    }

    /// Current basic values: xB = β − Σ_{j nonbasic} T_j · value(j).
    fn basic_values(&self) -> Vec<f64> {
        let mut xb = self.beta.clone();
        for j in 0..self.ncols {
            if self.in_basis[j] {
                continue;
            }
            let v = self.nonbasic_value(j);
            if v != 0.0 {
                for i in 0..self.m {
                    xb[i] -= self.t[i * self.ncols + j] * v;
                }
            }
        }
        xb
    }

    fn pivot(&mut self, r: usize, e: usize, leaving_to_upper: bool) {
        let n = self.ncols;
        let piv = self.t[r * n + e];
        for j in 0..n {
            self.t[r * n + j] /= piv;
        }
        self.beta[r] /= piv;
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * n + e];
            if f != 0.0 {
                for j in 0..n {
                    let v = self.t[r * n + j];
                    if v != 0.0 {
                        self.t[i * n + j] -= f * v;
                    }
                }
                self.beta[i] -= f * self.beta[r];
            }
        }
        let k = self.basis[r];
        self.in_basis[k] = false;
        self.at_upper[k] = leaving_to_upper;
        self.basis[r] = e;
        self.in_basis[e] = true;
    }
}

enum LoopEnd {
    Optimal,
    Unbounded,
}

fn optimize(tab: &mut Tableau, cost: &[f64]) -> Result<LoopEnd, IlpError> {
    let n = tab.ncols;
    let max_iters = 50_000 + 50 * (tab.m + n);
    let mut bland = false;
    let mut degenerate = 0u32;

    for _ in 0..max_iters {
        let xb = tab.basic_values();

        // Reduced costs d = c − c_B · T for every column.
        let mut d = cost.to_vec();
        for i in 0..tab.m {
            let cb = cost[tab.basis[i]];
            if cb != 0.0 {
                let row = &tab.t[i * n..(i + 1) * n];
                for (dj, &tij) in d.iter_mut().zip(row) {
                    *dj -= cb * tij;
                }
            }
        }

        // Entering column.
        let mut enter: Option<(usize, f64)> = None;
        for j in 0..n {
            if tab.in_basis[j] || tab.hi[j] - tab.lo[j] <= 0.0 {
                continue;
            }
            let improving = if tab.at_upper[j] { d[j] > COST_TOL } else { d[j] < -COST_TOL };
            if !improving {
                continue;
            }
            if bland {
                enter = Some((j, d[j]));
                break;
            }
            match enter {
                Some((_, best)) if d[j].abs() <= best.abs() => {}
                _ => enter = Some((j, d[j])),
            }
        }
        let Some((e, _)) = enter else {
            return Ok(LoopEnd::Optimal);
        };

        let dir = if tab.at_upper[e] { -1.0 } else { 1.0 };
        let t_max = tab.hi[e] - tab.lo[e];

        // Ratio test: how far can x_e move before a basic variable hits a
        // bound. Ties go to the lower basis column index.
        let mut best_t = t_max;
        let mut best_row: Option<usize> = None;
        let mut leaving_to_upper = false;
        for i in 0..tab.m {
            let alpha = tab.t[i * n + e] * dir;
            let k = tab.basis[i];
            let (limit, to_upper) = if alpha > PIVOT_TOL {
                ((xb[i] - tab.lo[k]).max(0.0) / alpha, false)
            } else if alpha < -PIVOT_TOL {
                if tab.hi[k].is_infinite() {
                    continue;
                }
                ((tab.hi[k] - xb[i]).max(0.0) / -alpha, true)
            } else {
                continue;
            };
            let replace = match best_row {
                None => limit < best_t - 1e-12,
                Some(r) => {
                    limit < best_t - 1e-12
                        || ((limit - best_t).abs() <= 1e-12 && k < tab.basis[r])
                }
            };
            if replace {
                best_t = limit;
                best_row = Some(i);
                leaving_to_upper = to_upper;
            }
        }

        match best_row {
            None => {
                if t_max.is_infinite() {
                    return Ok(LoopEnd::Unbounded);
                }
                // Bound flip: the entering column runs to its other bound
                // without displacing anyone.
                tab.at_upper[e] = !tab.at_upper[e];
                degenerate = 0;
            }
            Some(r) => {
                if best_t <= 1e-12 {
                    degenerate += 1;
                    if degenerate > DEGENERATE_STREAK {
                        bland = true;
                    }
                } else {
                    degenerate = 0;
                }
                tab.pivot(r, e, leaving_to_upper);
            }
        }
    }
    Err(IlpError::Numerical("simplex iteration limit".into()))
}

/// Solve the LP relaxation of `model` with variable bounds overridden by
/// `lower`/`upper`. Fixed variables are folded into the right-hand sides;
/// rows left with no free variable are checked and dropped.
pub(crate) fn solve_lp(
    model: &IlpModel,
    lower: &[f64],
    upper: &[f64],
) -> Result<LpOutcome, IlpError> {
    let nv = model.vars.len();
    debug_assert_eq!(lower.len(), nv);
    debug_assert_eq!(upper.len(), nv);
    for j in 0..nv {
        if lower[j] > upper[j] + 1e-12 {
            return Ok(LpOutcome::Infeasible);
        }
    }

    // Compress out fixed variables.
    let mut pos = vec![usize::MAX; nv];
    let mut free: Vec<usize> = Vec::new();
    for j in 0..nv {
        if lower[j] < upper[j] {
            pos[j] = free.len();
            free.push(j);
        }
    }
    let n_free = free.len();

    // Rows in ≤/= form over free columns.
    struct Row {
        terms: Vec<(usize, f64)>,
        rhs: f64,
        eq: bool,
    }
    let mut rows: Vec<Row> = Vec::new();
    for c in &model.constraints {
        let mut fixed_part = 0.0;
        let mut terms: Vec<(usize, f64)> = Vec::new();
        for &(j, a) in &c.terms {
            if pos[j] == usize::MAX {
                fixed_part += a * lower[j];
            } else {
                terms.push((pos[j], a));
            }
        }
        let rhs = c.rhs - fixed_part;
        if terms.is_empty() {
            let ok = match c.relation {
                Relation::Le => 0.0 <= rhs + FEAS_EPS,
                Relation::Ge => 0.0 >= rhs - FEAS_EPS,
                Relation::Eq => rhs.abs() <= FEAS_EPS,
            };
            if !ok {
                return Ok(LpOutcome::Infeasible);
            }
            continue;
        }
        match c.relation {
            Relation::Le => rows.push(Row { terms, rhs, eq: false }),
            Relation::Eq => rows.push(Row { terms, rhs, eq: true }),
            Relation::Ge => rows.push(Row {
                terms: terms.into_iter().map(|(j, a)| (j, -a)).collect(),
                rhs: -rhs,
                eq: false,
            }),
        }
    }
    let m = rows.len();

    // Columns: free structurals, slacks, then artificials where the initial
    // point (all structurals at lower bound) violates a row.
    let mut lo: Vec<f64> = free.iter().map(|&j| lower[j]).collect();
    let mut hi: Vec<f64> = free.iter().map(|&j| upper[j]).collect();
    for row in &rows {
        if row.eq {
            lo.push(0.0);
            hi.push(0.0);
        } else {
            lo.push(0.0);
            hi.push(f64::INFINITY);
        }
        let _ = row;
    }

    // Required slack value per row at the initial point.
    let mut needs_artificial: Vec<Option<f64>> = Vec::with_capacity(m);
    for row in &rows {
        let act: f64 = row.terms.iter().map(|&(j, a)| a * lower[free[j]]).sum();
        let r = row.rhs - act;
        let slack_ok = if row.eq { r.abs() <= 0.0 } else { r >= 0.0 };
        if slack_ok && !row.eq {
            needs_artificial.push(None);
        } else {
            // Equality rows always take an artificial so every row has a
            // basic column.
            needs_artificial.push(Some(r));
        }
    }
    let n_art = needs_artificial.iter().filter(|a| a.is_some()).count();
    let ncols = n_free + m + n_art;

    let mut tab = Tableau {
        m,
        ncols,
        t: vec![0.0; m * ncols],
        beta: vec![0.0; m],
        basis: vec![0; m],
        in_basis: vec![false; ncols],
        at_upper: vec![false; ncols],
        lo,
        hi,
    };
    tab.lo.resize(ncols, 0.0);
    tab.hi.resize(ncols, f64::INFINITY);

    let mut art_col = n_free + m;
    let mut art_start_positive = 0.0;
    for (i, row) in rows.iter().enumerate() {
        for &(j, a) in &row.terms {
            tab.t[i * ncols + j] = a;
        }
        tab.t[i * ncols + n_free + i] = 1.0; // slack
        tab.beta[i] = row.rhs;
        match needs_artificial[i] {
            None => {
                tab.basis[i] = n_free + i;
                tab.in_basis[n_free + i] = true;
            }
            Some(r) => {
                // Keep the starting basis an identity: a row whose required
                // slack is negative is negated so its artificial enters +1.
                if r < 0.0 {
                    for j in 0..ncols {
                        tab.t[i * ncols + j] = -tab.t[i * ncols + j];
                    }
                    tab.beta[i] = -tab.beta[i];
                }
                tab.t[i * ncols + art_col] = 1.0;
                tab.basis[i] = art_col;
                tab.in_basis[art_col] = true;
                art_start_positive += r.abs();
                art_col += 1;
            }
        }
    }

    // Phase 1: minimize total artificial value.
    if n_art > 0 && art_start_positive > 0.0 {
        let mut c1 = vec![0.0; ncols];
        for c in c1.iter_mut().take(ncols).skip(n_free + m) {
            *c = 1.0;
        }
        match optimize(&mut tab, &c1)? {
            LoopEnd::Unbounded => {
                return Err(IlpError::Numerical("phase-1 objective unbounded".into()))
            }
            LoopEnd::Optimal => {}
        }
        let xb = tab.basic_values();
        let mut infeas = 0.0;
        for j in n_free + m..ncols {
            infeas += if tab.in_basis[j] {
                let i = tab.basis.iter().position(|&b| b == j).unwrap();
                xb[i]
            } else {
                tab.nonbasic_value(j)
            };
        }
        if infeas > FEAS_EPS {
            return Ok(LpOutcome::Infeasible);
        }
    }
    // Pin artificials at zero for phase 2.
    for j in n_free + m..ncols {
        tab.lo[j] = 0.0;
        tab.hi[j] = 0.0;
        if !tab.in_basis[j] {
            tab.at_upper[j] = false;
        }
    }

    let mut c2 = vec![0.0; ncols];
    for &(j, c) in &model.objective {
        if pos[j] != usize::MAX {
            c2[pos[j]] += c;
        }
    }
    match optimize(&mut tab, &c2)? {
        LoopEnd::Unbounded => return Ok(LpOutcome::Unbounded),
        LoopEnd::Optimal => {}
    }

    // Extract the structural point.
    let xb = tab.basic_values();
    let mut compressed = vec![0.0; n_free];
    for (j, v) in compressed.iter_mut().enumerate() {
        if !tab.in_basis[j] {
            *v = tab.nonbasic_value(j);
        }
    }
    for i in 0..m {
        if tab.basis[i] < n_free {
            compressed[tab.basis[i]] = xb[i];
        }
    }
    let mut values = vec![0.0; nv];
    for j in 0..nv {
        values[j] = if pos[j] == usize::MAX {
            lower[j]
        } else {
            compressed[pos[j]].clamp(lower[j], upper[j])
        };
    }
    let objective = model.objective_value(&values);
    Ok(LpOutcome::Optimal { values, objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::Relation;

    fn bounds(model: &IlpModel) -> (Vec<f64>, Vec<f64>) {
        (
            model.vars.iter().map(|v| v.lower).collect(),
            model.vars.iter().map(|v| v.upper).collect(),
        )
    }

    #[test]
    fn picks_lowest_index_on_cost_ties() {
        let mut m = IlpModel::new();
        let x = m.add_binary("x");
        let y = m.add_binary("y");
        m.add_constraint("c", vec![(x, 1.0), (y, 1.0)], Relation::Le, 1.0);
        m.add_objective_term(x, -1.0);
        m.add_objective_term(y, -1.0);
        let (lo, hi) = bounds(&m);
        match solve_lp(&m, &lo, &hi).unwrap() {
            LpOutcome::Optimal { values, objective } => {
                assert!((objective + 1.0).abs() < 1e-9);
                assert!((values[0] - 1.0).abs() < 1e-9);
                assert!(values[1].abs() < 1e-9);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn equality_rows_start_from_artificials() {
        let mut m = IlpModel::new();
        let x = m.add_var("x", 0.0, 3.0, false);
        let y = m.add_var("y", 0.0, 3.0, false);
        m.add_constraint("c", vec![(x, 1.0), (y, 1.0)], Relation::Eq, 2.0);
        m.add_objective_term(x, 1.0);
        let (lo, hi) = bounds(&m);
        match solve_lp(&m, &lo, &hi).unwrap() {
            LpOutcome::Optimal { values, objective } => {
                assert!(objective.abs() < 1e-9);
                assert!((values[1] - 2.0).abs() < 1e-9);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn fractional_optimum_on_ge_row() {
        let mut m = IlpModel::new();
        let x = m.add_binary("x");
        m.add_constraint("c", vec![(x, 2.0)], Relation::Ge, 1.0);
        m.add_objective_term(x, 1.0);
        let (lo, hi) = bounds(&m);
        match solve_lp(&m, &lo, &hi).unwrap() {
            LpOutcome::Optimal { values, objective } => {
                assert!((objective - 0.5).abs() < 1e-9);
                assert!((values[0] - 0.5).abs() < 1e-9);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn reports_infeasible_rows() {
        let mut m = IlpModel::new();
        let x = m.add_binary("x");
        let y = m.add_binary("y");
        m.add_constraint("c", vec![(x, 1.0), (y, 1.0)], Relation::Ge, 3.0);
        let (lo, hi) = bounds(&m);
        assert_eq!(solve_lp(&m, &lo, &hi).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn reports_unbounded_direction() {
        let mut m = IlpModel::new();
        let x = m.add_var("x", 0.0, 1.0, false);
        m.add_objective_term(x, -1.0);
        // Override the stored bound with an infinite one.
        let lo = vec![0.0];
        let hi = vec![f64::INFINITY];
        assert_eq!(solve_lp(&m, &lo, &hi).unwrap(), LpOutcome::Unbounded);
        let _ = x;
    }

    #[test]
    fn folds_fixed_variables_into_rhs() {
        let mut m = IlpModel::new();
        let x = m.add_var("x", 0.0, 2.0, false);
        let y = m.add_var("y", 0.0, 2.0, false);
        m.add_constraint("c", vec![(x, 1.0), (y, 1.0)], Relation::Ge, 1.5);
        m.add_objective_term(x, 1.0);
        m.add_objective_term(y, 1.0);
        // Fix y = 1 by bounds; optimum is x = 0.5.
        let lo = vec![0.0, 1.0];
        let hi = vec![2.0, 1.0];
        match solve_lp(&m, &lo, &hi).unwrap() {
            LpOutcome::Optimal { values, objective } => {
                assert!((values[0] - 0.5).abs() < 1e-9);
                assert!((objective - 1.5).abs() < 1e-9);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn all_fixed_model_reduces_to_a_row_check() {
        let mut m = IlpModel::new();
        let x = m.add_var("x", 1.0, 1.0, true);
        m.add_constraint("c", vec![(x, 1.0)], Relation::Le, 0.0);
        let lo = vec![1.0];
        let hi = vec![1.0];
        assert_eq!(solve_lp(&m, &lo, &hi).unwrap(), LpOutcome::Infeasible);

        let mut ok = IlpModel::new();
        let y = ok.add_var("y", 1.0, 1.0, true);
        ok.add_constraint("c", vec![(y, 1.0)], Relation::Le, 2.0);
        ok.add_objective_term(y, 3.0);
        match solve_lp(&ok, &lo, &hi).unwrap() {
            LpOutcome::Optimal { values, objective } => {
                assert_eq!(values, vec![1.0]);
                assert_eq!(objective, 3.0);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_rows_still_terminate() {
        // Redundant copies of the same active row force degenerate pivots.
        let mut m = IlpModel::new();
        let x = m.add_var("x", 0.0, 4.0, false);
        let y = m.add_var("y", 0.0, 4.0, false);
        for i in 0..6 {
            m.add_constraint(format!("c{i}"), vec![(x, 1.0), (y, 1.0)], Relation::Le, 2.0);
        }
        m.add_constraint("g", vec![(x, 1.0)], Relation::Ge, 1.0);
        m.add_objective_term(x, -1.0);
        m.add_objective_term(y, -2.0);
        let (lo, hi) = bounds(&m);
        match solve_lp(&m, &lo, &hi).unwrap() {
            LpOutcome::Optimal { objective, values } => {
                // Best point is x=1, y=1 under x ≥ 1 and x+y ≤ 2.
                assert!((objective + 3.0).abs() < 1e-9);
                assert!((values[0] - 1.0).abs() < 1e-9);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }
}
