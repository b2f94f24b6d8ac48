//! Depth-first branch and bound over the LP relaxation.
//!
//! Each node tightens integer bounds to a fixpoint before touching the LP,
//! which collapses forced chains of variables without branching. Branching is
//! deterministic: lowest-index fractional variable, floor branch explored
//! first. A candidate only becomes the incumbent after exact re-verification
//! against every constraint, and its objective is recomputed from the integer
//! values so independent searches agree bitwise on ties.

use super::simplex::{solve_lp, LpOutcome};
use super::{IlpError, IlpModel, Relation, SolveReport, SolveStatus, FEAS_TOL, INT_TOL};
use std::time::{Duration, Instant};

/// Margin under the incumbent objective below which a relaxation bound
/// fathoms a subtree. Keeps floating-point noise in the LP from pruning a
/// genuinely better solution while still cutting alternate optima.
const PRUNE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub time_limit: Option<Duration>,
    /// Known feasible point used as the starting incumbent. Invalid seeds are
    /// ignored rather than rejected; seeding is purely an accelerator.
    pub initial_incumbent: Option<Vec<f64>>,
}

pub fn solve(model: &IlpModel, time_limit: Option<Duration>) -> Result<SolveReport, IlpError> {
    solve_with(model, &SolveOptions { time_limit, initial_incumbent: None })
}

struct Node {
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// Relaxation bound inherited from the parent, if one was solved.
    bound: Option<f64>,
}

pub fn solve_with(model: &IlpModel, opts: &SolveOptions) -> Result<SolveReport, IlpError> {
    model.validate()?;
    let deadline = opts.time_limit.map(|d| Instant::now() + d);
    let nv = model.vars.len();

    let mut root_lo: Vec<f64> = model.vars.iter().map(|v| v.lower).collect();
    let mut root_hi: Vec<f64> = model.vars.iter().map(|v| v.upper).collect();
    for (j, v) in model.vars.iter().enumerate() {
        if v.integer {
            root_lo[j] = (root_lo[j] - 1e-9).ceil();
            root_hi[j] = (root_hi[j] + 1e-9).floor();
        }
    }

    let mut incumbent: Option<(Vec<f64>, f64)> = seed_incumbent(model, opts);
    let mut stack = vec![Node { lo: root_lo, hi: root_hi, bound: None }];
    let mut nodes = 0u64;
    let mut timed_out = false;

    while let Some(mut node) = stack.pop() {
        if let Some(deadline) = deadline {
            if Instant::now() >= deadline {
                stack.push(node);
                timed_out = true;
                break;
            }
        }
        nodes += 1;

        if let (Some(b), Some((_, inc))) = (node.bound, &incumbent) {
            if b >= inc - PRUNE_SLACK {
                continue;
            }
        }
        if !propagate(model, &mut node.lo, &mut node.hi) {
            continue;
        }

        if node.lo.iter().zip(&node.hi).all(|(l, h)| l >= h) {
            // Fully fixed by propagation: no relaxation needed.
            let values = node.lo.clone();
            if model.is_feasible(&values, FEAS_TOL) {
                offer(model, &mut incumbent, values);
            }
            continue;
        }

        let (lp_values, lp_objective) = match solve_lp(model, &node.lo, &node.hi)? {
            LpOutcome::Infeasible => continue,
            LpOutcome::Unbounded => {
                return Err(IlpError::Numerical("relaxation unbounded despite finite bounds".into()))
            }
            LpOutcome::Optimal { values, objective } => (values, objective),
        };
        if let Some((_, inc)) = &incumbent {
            if lp_objective >= inc - PRUNE_SLACK {
                continue;
            }
        }

        let fractional = (0..nv).find(|&j| {
            model.vars[j].integer && (lp_values[j] - lp_values[j].round()).abs() > INT_TOL
        });
        match fractional {
            None => {
                let mut rounded = lp_values.clone();
                for (j, v) in model.vars.iter().enumerate() {
                    if v.integer {
                        rounded[j] = rounded[j].round().clamp(node.lo[j], node.hi[j]);
                    }
                }
                if model.is_feasible(&rounded, FEAS_TOL) {
                    offer(model, &mut incumbent, rounded);
                } else if let Some(j) = (0..nv)
                    .find(|&j| model.vars[j].integer && node.lo[j] < node.hi[j])
                {
                    // Near-integral relaxation whose rounding is infeasible:
                    // split the lowest unfixed variable to force progress.
                    let mut up = Node { lo: node.lo.clone(), hi: node.hi.clone(), bound: Some(lp_objective) };
                    up.lo[j] = node.lo[j] + 1.0;
                    let mut down = Node { lo: node.lo, hi: node.hi, bound: Some(lp_objective) };
                    down.hi[j] = down.lo[j];
                    stack.push(up);
                    stack.push(down);
                }
            }
            Some(j) => {
                let split = lp_values[j].floor();
                let mut up = Node { lo: node.lo.clone(), hi: node.hi.clone(), bound: Some(lp_objective) };
                up.lo[j] = split + 1.0;
                let mut down = Node { lo: node.lo, hi: node.hi, bound: Some(lp_objective) };
                down.hi[j] = split;
                // Floor branch pops first.
                stack.push(up);
                stack.push(down);
            }
        }
    }

    if timed_out {
        let lower_bound = stack.iter().try_fold(f64::INFINITY, |acc, n| n.bound.map(|b| acc.min(b)));
        return Ok(SolveReport {
            status: SolveStatus::TimedOut,
            objective: incumbent.as_ref().map(|(_, o)| *o),
            values: incumbent.map(|(v, _)| v),
            lower_bound,
            nodes,
        });
    }
    match incumbent {
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

/// Accept `values` as the new incumbent when strictly better; ties keep the
/// earlier find, so the deterministic search order decides.
fn offer(model: &IlpModel, incumbent: &mut Option<(Vec<f64>, f64)>, values: Vec<f64>) {
    let objective = model.objective_value(&values);
    match incumbent {
        Some((_, best)) if objective >= *best => {}
        _ => *incumbent = Some((values, objective)),
    }
}

fn seed_incumbent(model: &IlpModel, opts: &SolveOptions) -> Option<(Vec<f64>, f64)> {
    let seed = opts.initial_incumbent.as_ref()?;
    if seed.len() != model.vars.len() {
        return None;
    }
    let mut rounded = seed.clone();
    for (j, v) in model.vars.iter().enumerate() {
        if v.integer {
            if (rounded[j] - rounded[j].round()).abs() > INT_TOL {
                return None;
            }
            rounded[j] = rounded[j].round();
        }
    }
    if !model.is_feasible(&rounded, FEAS_TOL) {
        return None;
    }
    let objective = model.objective_value(&rounded);
    Some((rounded, objective))
}

/// Tighten integer bounds against every row until nothing moves. Returns
/// false when some variable's domain empties. Sound: never removes an
/// integer point satisfying the row system.
fn propagate(model: &IlpModel, lo: &mut [f64], hi: &mut [f64]) -> bool {
    loop {
        let mut changed = false;
        for c in &model.constraints {
            let feasible = match c.relation {
                Relation::Le => tighten_le(model, &c.terms, c.rhs, 1.0, lo, hi, &mut changed),
                Relation::Ge => tighten_le(model, &c.terms, -c.rhs, -1.0, lo, hi, &mut changed),
                Relation::Eq => {
                    tighten_le(model, &c.terms, c.rhs, 1.0, lo, hi, &mut changed)
                        && tighten_le(model, &c.terms, -c.rhs, -1.0, lo, hi, &mut changed)
                }
            };
            if !feasible {
                return false;
            }
        }
        if !changed {
            return true;
        }
    }
}

/// One directed pass over `sign·terms ≤ sign·rhs` in ≤ form.
fn tighten_le(
    model: &IlpModel,
    terms: &[(usize, f64)],
    rhs: f64,
    sign: f64,
    lo: &mut [f64],
    hi: &mut [f64],
    changed: &mut bool,
) -> bool {
    let mut min_act = 0.0;
    for &(j, raw) in terms {
        let a = raw * sign;
        min_act += if a > 0.0 { a * lo[j] } else { a * hi[j] };
    }
    if min_act > rhs + FEAS_TOL {
        return false;
    }
    for &(j, raw) in terms {
        let a = raw * sign;
        if !model.vars[j].integer || lo[j] >= hi[j] {
            continue;
        }
        let own_min = if a > 0.0 { a * lo[j] } else { a * hi[j] };
        let slack = rhs - (min_act - own_min);
        if a > 0.0 {
            let limit = (slack / a + 1e-9).floor();
            if limit < hi[j] {
                hi[j] = limit;
                *changed = true;
                if lo[j] > hi[j] {
                    return false;
                }
            }
        } else {
            let limit = (slack / a - 1e-9).ceil();
            if limit > lo[j] {
                lo[j] = limit;
                *changed = true;
                if lo[j] > hi[j] {
                    return false;
                }
            }
        }
    }
    true
}
