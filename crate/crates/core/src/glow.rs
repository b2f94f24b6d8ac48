//! GLOW: exact channel assignment by integer programming.
//!
//! Every feasible (link, trunk) pairing becomes a binary selection column;
//! wavelength, trunk-activation, and crossing indicators are chained to the
//! selections through integer comparator rows so the objective prices the
//! same five terms as the power report. The greedy router's solution seeds
//! the search as the starting incumbent, and infeasible models go through
//! the same placement revision loop CAT uses.

use crate::cat::cat_assign_on_plan;
use crate::ilp::{solve_with, IlpError, IlpModel, Relation, SolveOptions, SolveStatus};
use crate::ingest::{Config, ThermalProfile};
use crate::oil::DeviceModels;
use crate::placement::{
    compute_accesses, place_trunks_extended, trunk_crossings, AccessMatrix, PlacementError,
    TrunkPlan,
};
use crate::power::{compute_power, Assignment, PowerError, Routed};
use crate::preprocess::OpticalNetlist;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};
use thiserror::Error;

/// Relative tolerance when cross-checking the solver objective against the
/// independently priced report.
const OBJ_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GlowError {
    #[error("link {link_id} (net {net_id}) has no feasible trunk")]
    UnroutableLink { link_id: usize, net_id: u32 },
    #[error("no feasible assignment after {revisions} placement revisions")]
    Infeasible { revisions: usize },
    #[error("solve hit the time limit before proving optimality")]
    Timeout { partial: Option<Box<Routed>> },
    #[error("solver produced an inconsistent solution: {0}")]
    Internal(String),
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    Power(#[from] PowerError),
    #[error(transparent)]
    Ilp(#[from] IlpError),
}

/// Column indices grouped by role. Creation order is selections (link-major),
/// then per-(net, trunk) counters and wavelength indicators, then trunk
/// activations, then crossing indicators; bound propagation fixes everything
/// downstream of the selections, so branching effectively runs over S only.
#[derive(Debug, Clone)]
pub struct GlowVars {
    /// S_l_t per feasible (link id, trunk id).
    pub s: BTreeMap<(usize, usize), usize>,
    /// SUM_n_t per (net index, trunk id) with at least one feasible link:
    /// how many of the net's links the trunk carries.
    pub sum: BTreeMap<(usize, usize), usize>,
    /// LAM_n_t, same keys as `sum`: 1 iff the net lights a wavelength there.
    pub lam: BTreeMap<(usize, usize), usize>,
    /// W_t indexed by trunk id; every trunk gets one.
    pub w: Vec<usize>,
    /// W_h_v per geometric (horizontal, vertical) crossing pair.
    pub w_cross: BTreeMap<(usize, usize), usize>,
}

/// The assignment ILP for one placement, with the column map needed to read
/// a solution back out.
#[derive(Debug, Clone)]
pub struct GlowModel {
    pub model: IlpModel,
    pub vars: GlowVars,
    pub c_max: usize,
}

/// Assemble the assignment ILP.
///
/// Pairs failing timing, thermal, or detection never get a selection column,
/// so every surviving column is legal by construction and the rows only have
/// to coordinate exclusivity, capacity, and pricing. A link left with no
/// column at all can never route on this plan and is reported immediately.
pub fn build_ilp(
    onet: &OpticalNetlist,
    plan: &TrunkPlan,
    accesses: &AccessMatrix,
    thermal: &ThermalProfile,
    models: &DeviceModels,
    c_max: usize,
) -> Result<GlowModel, GlowError> {
    let n_trunks = plan.trunks.len();
    let pinmax = onet.pinmax() as i64;
    let mut m = IlpModel::new();
    let mut vars = GlowVars {
        s: BTreeMap::new(),
        sum: BTreeMap::new(),
        lam: BTreeMap::new(),
        w: Vec::with_capacity(n_trunks),
        w_cross: BTreeMap::new(),
    };

    for link in &onet.links {
        let mut any = false;
        for t in 0..n_trunks {
            if accesses.get(link.id, t).feasible() {
                vars.s.insert((link.id, t), m.add_binary(format!("S_{}_{}", link.id, t)));
                any = true;
            }
        }
        if !any {
            return Err(GlowError::UnroutableLink { link_id: link.id, net_id: link.net_id });
        }
    }

    // (net, trunk) pairs able to host at least one of the net's links.
    let mut pair_links: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for &(l, t) in vars.s.keys() {
        pair_links.entry((onet.links[l].net_index, t)).or_default().push(l);
    }
    for &(n, t) in pair_links.keys() {
        let id = onet.nets[n].net_id;
        vars.sum.insert((n, t), m.add_integer(format!("SUM_{id}_{t}"), 0, pinmax));
    }
    for &(n, t) in pair_links.keys() {
        let id = onet.nets[n].net_id;
        vars.lam.insert((n, t), m.add_binary(format!("LAM_{id}_{t}")));
    }
    for t in 0..n_trunks {
        vars.w.push(m.add_binary(format!("W_{t}")));
    }
    let crossings = trunk_crossings(plan);
    for &(h, v) in &crossings {
        vars.w_cross.insert((h, v), m.add_binary(format!("W_{h}_{v}")));
    }

    // Each link rides exactly one trunk.
    for link in &onet.links {
        let terms: Vec<(usize, f64)> = (0..n_trunks)
            .filter_map(|t| vars.s.get(&(link.id, t)).map(|&v| (v, 1.0)))
            .collect();
        m.add_constraint(format!("sel_{}", link.id), terms, Relation::Eq, 1.0);
    }

    // Distinct wavelengths per trunk stay within capacity.
    let mut lam_by_trunk: Vec<Vec<usize>> = vec![Vec::new(); n_trunks];
    for (&(_, t), &v) in &vars.lam {
        lam_by_trunk[t].push(v);
    }
    for (t, lams) in lam_by_trunk.iter().enumerate() {
        if !lams.is_empty() {
            let terms = lams.iter().map(|&v| (v, 1.0)).collect();
            m.add_constraint(format!("cap_{t}"), terms, Relation::Le, c_max as f64);
        }
    }

    for (&(n, t), links) in &pair_links {
        let id = onet.nets[n].net_id;
        let (sum_v, lam_v) = (vars.sum[&(n, t)], vars.lam[&(n, t)]);

        // SUM counts the net's links assigned to the trunk.
        let mut terms = vec![(sum_v, 1.0)];
        terms.extend(links.iter().map(|&l| (vars.s[&(l, t)], -1.0)));
        m.add_constraint(format!("sum_{id}_{t}"), terms, Relation::Eq, 0.0);

        // LAM = [SUM > 0] as two integer comparator rows: doubling both
        // sides keeps the strict side representable without fractions.
        m.add_constraint(
            format!("lam_lo_{id}_{t}"),
            vec![(sum_v, 2.0), (lam_v, -2.0 * pinmax as f64)],
            Relation::Le,
            1.0,
        );
        m.add_constraint(
            format!("lam_hi_{id}_{t}"),
            vec![(lam_v, 1.0), (sum_v, -2.0)],
            Relation::Le,
            0.0,
        );

        // Strengthening cuts, implied at integer points but not by the
        // relaxation: any single assigned link already forces the wavelength
        // on, and any lit wavelength forces its trunk on. Without these the
        // relaxation undercounts activation costs by factors of PINmax and
        // C_max, and the tree search degenerates into near-exhaustion.
        for &l in links {
            m.add_constraint(
                format!("lam_cut_{id}_{t}_{l}"),
                vec![(vars.s[&(l, t)], 1.0), (lam_v, -1.0)],
                Relation::Le,
                0.0,
            );
        }
        m.add_constraint(
            format!("w_cut_{id}_{t}"),
            vec![(lam_v, 1.0), (vars.w[t], -1.0)],
            Relation::Le,
            0.0,
        );
    }

    // W_t = [trunk's wavelength count > 0], same comparator shape. Trunks
    // with no candidate wavelengths keep the upper row, pinning W to 0.
    for (t, lams) in lam_by_trunk.iter().enumerate() {
        let w = vars.w[t];
        if !lams.is_empty() {
            let mut lo: Vec<(usize, f64)> = lams.iter().map(|&v| (v, 2.0)).collect();
            lo.push((w, -2.0 * c_max as f64));
            m.add_constraint(format!("w_lo_{t}"), lo, Relation::Le, 1.0);
        }
        let mut hi = vec![(w, 1.0)];
        hi.extend(lams.iter().map(|&v| (v, -2.0)));
        m.add_constraint(format!("w_hi_{t}"), hi, Relation::Le, 0.0);
    }

    // Crossing indicator is the conjunction of its two activations.
    for &(h, v) in &crossings {
        let wij = vars.w_cross[&(h, v)];
        let (wh, wv) = (vars.w[h], vars.w[v]);
        m.add_constraint(
            format!("cross_lo_{h}_{v}"),
            vec![(wij, 2.0), (wh, -1.0), (wv, -1.0)],
            Relation::Le,
            0.0,
        );
        m.add_constraint(
            format!("cross_hi_{h}_{v}"),
            vec![(wh, 1.0), (wv, 1.0), (wij, -1.0)],
            Relation::Le,
            1.0,
        );
    }

    // Objective: ring tuning + path loss per selection, one laser per lit
    // wavelength, base + thermal cost per active trunk, crossing penalty.
    for (&(l, t), &v) in &vars.s {
        let a = accesses.get(l, t);
        m.add_objective_term(v, a.p_ring + a.p_path);
    }
    for &v in vars.lam.values() {
        m.add_objective_term(v, models.p_channel);
    }
    for (t, trunk) in plan.trunks.iter().enumerate() {
        let coeff = models.p_trunk_base + models.k_trunk_thm * trunk.thermal_integral(thermal);
        m.add_objective_term(vars.w[t], coeff);
    }
    for &v in vars.w_cross.values() {
        m.add_objective_term(v, models.p_cross_unit);
    }

    Ok(GlowModel { model: m, vars, c_max })
}

/// Read a solved value vector back into an assignment, checking that every
/// indicator equals the state the comparator rows were supposed to force.
pub fn decode(
    gm: &GlowModel,
    values: &[f64],
    onet: &OpticalNetlist,
    n_trunks: usize,
) -> Result<Assignment, GlowError> {
    let bit = |idx: usize| values[idx] > 0.5;

    let mut link_trunk: Vec<Option<usize>> = vec![None; onet.links.len()];
    for (&(l, t), &v) in &gm.vars.s {
        if bit(v) {
            if link_trunk[l].is_some() {
                return Err(GlowError::Internal(format!("link {l} selected twice")));
            }
            link_trunk[l] = Some(t);
        }
    }
    if let Some(l) = link_trunk.iter().position(Option::is_none) {
        return Err(GlowError::Internal(format!("link {l} left unselected")));
    }
    let a = Assignment::from_links(link_trunk, onet, n_trunks);

    for (&(n, t), &sum_v) in &gm.vars.sum {
        let count = onet.links_of_net(n).filter(|l| a.link_trunk[l.id] == Some(t)).count();
        let sum_val = values[sum_v].round() as usize;
        if sum_val != count {
            return Err(GlowError::Internal(format!(
                "SUM for net {n} on trunk {t} is {sum_val}, expected {count}"
            )));
        }
        if bit(gm.vars.lam[&(n, t)]) != (count > 0) {
            return Err(GlowError::Internal(format!(
                "LAM for net {n} on trunk {t} contradicts its link count {count}"
            )));
        }
    }
    for (t, &w) in gm.vars.w.iter().enumerate() {
        if bit(w) != a.trunk_active[t] {
            return Err(GlowError::Internal(format!(
                "W for trunk {t} is {}, expected {}",
                bit(w) as u8,
                a.trunk_active[t] as u8
            )));
        }
    }
    for (&(h, v), &idx) in &gm.vars.w_cross {
        let expect = a.trunk_active[h] && a.trunk_active[v];
        if bit(idx) != expect {
            return Err(GlowError::Internal(format!(
                "crossing indicator for trunks {h}/{v} is {}, expected {}",
                bit(idx) as u8,
                expect as u8
            )));
        }
    }
    Ok(a)
}

/// Encode a complete assignment as a value vector usable as a starting
/// incumbent. Returns None when the assignment uses a pruned pair.
fn seed_values(gm: &GlowModel, a: &Assignment, onet: &OpticalNetlist) -> Option<Vec<f64>> {
    let mut values = vec![0.0; gm.model.vars.len()];
    for (l, t) in a.link_trunk.iter().enumerate() {
        values[*gm.vars.s.get(&(l, (*t)?))?] = 1.0;
    }
    for (&(n, t), &sum_v) in &gm.vars.sum {
        let count = onet.links_of_net(n).filter(|l| a.link_trunk[l.id] == Some(t)).count();
        values[sum_v] = count as f64;
        values[gm.vars.lam[&(n, t)]] = f64::from(count > 0);
    }
    for (t, &w) in gm.vars.w.iter().enumerate() {
        values[w] = f64::from(a.trunk_active[t]);
    }
    for (&(h, v), &idx) in &gm.vars.w_cross {
        values[idx] = f64::from(a.trunk_active[h] && a.trunk_active[v]);
    }
    Some(values)
}

/// Decode, price, and cross-check one solution vector.
fn price(
    gm: &GlowModel,
    values: &[f64],
    objective: Option<f64>,
    onet: &OpticalNetlist,
    plan: &TrunkPlan,
    accesses: &AccessMatrix,
    thermal: &ThermalProfile,
    cfg: &Config,
) -> Result<Routed, GlowError> {
    let assignment = decode(gm, values, onet, plan.trunks.len())?;
    let report =
        compute_power(&assignment, onet, plan, accesses, thermal, &cfg.models, cfg.c_max)?;
    if let Some(obj) = objective {
        if (obj - report.p_total).abs() > OBJ_TOL * report.p_total.abs().max(1.0) {
            return Err(GlowError::Internal(format!(
                "objective {obj} disagrees with priced total {}",
                report.p_total
            )));
        }
    }
    Ok(Routed { plan: plan.clone(), accesses: accesses.clone(), assignment, report })
}

/// One build/solve/decode pass over a fixed plan. The greedy solution, when
/// one exists, enters as the incumbent so the exact search starts with a
/// proven bound (and a timeout can still hand back something routable).
pub fn glow_route_on_plan(
    onet: &OpticalNetlist,
    plan: &TrunkPlan,
    accesses: &AccessMatrix,
    thermal: &ThermalProfile,
    cfg: &Config,
    time_limit: Option<Duration>,
) -> Result<Routed, GlowError> {
    let gm = build_ilp(onet, plan, accesses, thermal, &cfg.models, cfg.c_max)?;
    let seed = cat_assign_on_plan(onet, plan, accesses, cfg.c_max)
        .ok()
        .and_then(|a| seed_values(&gm, &a, onet));
    let opts = SolveOptions { time_limit, initial_incumbent: seed };
    let report = solve_with(&gm.model, &opts)?;
    match report.status {
        SolveStatus::Optimal => {
            let values = report
                .values
                .as_deref()
                .ok_or_else(|| GlowError::Internal("optimal status without values".into()))?;
            price(&gm, values, report.objective, onet, plan, accesses, thermal, cfg)
        }
        SolveStatus::Infeasible => Err(GlowError::Infeasible { revisions: 0 }),
        SolveStatus::TimedOut => {
            let partial = match report.values.as_deref() {
                Some(values) => Some(Box::new(price(
                    &gm,
                    values,
                    report.objective,
                    onet,
                    plan,
                    accesses,
                    thermal,
                    cfg,
                )?)),
                None => None,
            };
            Err(GlowError::Timeout { partial })
        }
    }
}

/// Full GLOW flow: solve on the given plan, revising placement while the
/// model stays unroutable or infeasible, under one overall time budget.
pub fn glow_route(
    onet: &OpticalNetlist,
    plan: &TrunkPlan,
    accesses: &AccessMatrix,
    thermal: &ThermalProfile,
    cfg: &Config,
    time_limit: Option<Duration>,
) -> Result<Routed, GlowError> {
    let deadline = time_limit.and_then(|d| Instant::now().checked_add(d));
    let mut last = GlowError::Infeasible { revisions: cfg.max_placement_revisions };
    for extra in 0..=cfg.max_placement_revisions {
        let revised = if extra == 0 {
            None
        } else {
            let p = place_trunks_extended(onet, thermal, plan.chip_w, plan.chip_h, cfg, extra)?;
            let a = compute_accesses(onet, &p, thermal, &cfg.models);
            Some((p, a))
        };
        let (cur_plan, cur_acc) = match &revised {
            None => (plan, accesses),
            Some((p, a)) => (p, a),
        };
        let remaining = deadline.map(|d| d.saturating_duration_since(Instant::now()));
        match glow_route_on_plan(onet, cur_plan, cur_acc, thermal, cfg, remaining) {
            Ok(r) => return Ok(r),
            Err(e @ (GlowError::Infeasible { .. } | GlowError::UnroutableLink { .. })) => {
                last = e;
            }
            Err(other) => return Err(other),
        }
    }
    match last {
        GlowError::Infeasible { .. } => {
            Err(GlowError::Infeasible { revisions: cfg.max_placement_revisions })
        }
        named => Err(named),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cat::cat_route;
    use crate::geom::{Orientation, Point};
    use crate::ilp::brute_force;
    use crate::placement::Trunk;
    use crate::preprocess::{Cluster, Link, OpticalNet};

    fn one_trunk_plan() -> TrunkPlan {
        TrunkPlan::from_trunks(
            vec![Trunk {
                id: 0,
                dir: Orientation::Horizontal,
                coord: 10.0,
                span: (0.0, 20.0),
                round: 0,
                slab: 0,
            }],
            20.0,
            20.0,
        )
    }

    fn onet_from_pairs(pairs: &[((f64, f64), (f64, f64))]) -> OpticalNetlist {
        let mut onet = OpticalNetlist::default();
        for (i, (d, s)) in pairs.iter().enumerate() {
            let dp = Point::new(d.0, d.1);
            let sp = Point::new(s.0, s.1);
            onet.nets.push(OpticalNet {
                net_id: i as u32,
                driver_cluster: 0,
                clusters: vec![
                    Cluster { pins: vec![0], median: dp },
                    Cluster { pins: vec![1], median: sp },
                ],
            });
            onet.links.push(Link {
                id: i,
                net_index: i,
                net_id: i as u32,
                driver_pos: dp,
                sink_pos: sp,
                hpwl: dp.manhattan(&sp),
                sink_cluster: 1,
            });
        }
        onet
    }

    #[test]
    fn tiny_model_has_the_expected_shape() {
        let onet = onet_from_pairs(&[((2.0, 10.0), (12.0, 10.0)), ((5.0, 10.0), (15.0, 10.0))]);
        let plan = one_trunk_plan();
        let thermal = ThermalProfile::uniform(20, 20, 1.0, 0.0);
        let models = DeviceModels::default();
        let accesses = compute_accesses(&onet, &plan, &thermal, &models);
        let gm = build_ilp(&onet, &plan, &accesses, &thermal, &models, 32).unwrap();

        assert_eq!(gm.vars.s.len(), 2);
        assert_eq!(gm.vars.sum.len(), 2);
        assert_eq!(gm.vars.lam.len(), 2);
        assert_eq!(gm.vars.w.len(), 1);
        assert!(gm.vars.w_cross.is_empty());
        assert_eq!(gm.model.vars.len(), 7);
        assert_eq!(gm.model.vars[gm.vars.s[&(0, 0)]].name, "S_0_0");
        assert_eq!(gm.model.vars[gm.vars.sum[&(1, 0)]].name, "SUM_1_0");
        assert_eq!(gm.model.vars[gm.vars.w[0]].name, "W_0");

        let exact = crate::ilp::solve(&gm.model, None).unwrap();
        let brute = brute_force(&gm.model).unwrap();
        assert_eq!(exact.status, SolveStatus::Optimal);
        assert_eq!(brute.status, SolveStatus::Optimal);
        let (a, b) = (exact.objective.unwrap(), brute.objective.unwrap());
        assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{a} vs {b}");

        let decoded = decode(&gm, exact.values.as_deref().unwrap(), &onet, 1).unwrap();
        assert_eq!(decoded.link_trunk, vec![Some(0), Some(0)]);
    }

    #[test]
    fn objective_matches_the_priced_report() {
        // Same instance the power module prices by hand; the solver must
        // land on the identical total.
        let onet = onet_from_pairs(&[((5.0, 10.0), (10.0, 10.0)), ((7.0, 10.0), (12.0, 10.0))]);
        let plan = one_trunk_plan();
        let thermal = ThermalProfile::uniform(20, 20, 1.0, 0.0);
        let cfg = Config::default();
        let accesses = compute_accesses(&onet, &plan, &thermal, &cfg.models);

        let routed = glow_route_on_plan(&onet, &plan, &accesses, &thermal, &cfg, None).unwrap();
        assert!((routed.report.p_total - 1.5767298178979601).abs() < 1e-12);

        let greedy = cat_route(&onet, &plan, &accesses, &thermal, &cfg).unwrap();
        assert_eq!(routed.assignment.link_trunk, greedy.assignment.link_trunk);
    }

    #[test]
    fn counters_and_indicators_settle_on_their_identities() {
        // One net, three sinks on the near trunk; a far trunk hosts nothing
        // and its activation must be pinned to zero by the upper row alone.
        let d = Point::new(2.0, 10.0);
        let sinks = [Point::new(6.0, 10.0), Point::new(10.0, 10.0), Point::new(14.0, 10.0)];
        let mut onet = OpticalNetlist::default();
        let mut clusters = vec![Cluster { pins: vec![0], median: d }];
        clusters.extend(sinks.iter().map(|s| Cluster { pins: vec![1], median: *s }));
        onet.nets.push(OpticalNet { net_id: 3, driver_cluster: 0, clusters });
        for (i, s) in sinks.iter().enumerate() {
            onet.links.push(Link {
                id: i,
                net_index: 0,
                net_id: 3,
                driver_pos: d,
                sink_pos: *s,
                hpwl: d.manhattan(s),
                sink_cluster: i + 1,
            });
        }
        let plan = TrunkPlan::from_trunks(
            vec![
                Trunk {
                    id: 0,
                    dir: Orientation::Horizontal,
                    coord: 10.0,
                    span: (0.0, 20.0),
                    round: 0,
                    slab: 0,
                },
                Trunk {
                    id: 1,
                    dir: Orientation::Horizontal,
                    coord: 19.0,
                    span: (0.0, 20.0),
                    round: 2,
                    slab: 0,
                },
            ],
            20.0,
            20.0,
        );
        let thermal = ThermalProfile::uniform(20, 20, 1.0, 0.0);
        let models = DeviceModels::default();
        let accesses = compute_accesses(&onet, &plan, &thermal, &models);
        let gm = build_ilp(&onet, &plan, &accesses, &thermal, &models, 32).unwrap();
        assert_eq!(gm.vars.sum.len(), 1, "the far trunk hosts no candidate pair");

        let report = crate::ilp::solve(&gm.model, None).unwrap();
        let values = report.values.unwrap();
        assert_eq!(values[gm.vars.sum[&(0, 0)]], 3.0);
        assert_eq!(values[gm.vars.lam[&(0, 0)]], 1.0);
        assert_eq!(values[gm.vars.w[0]], 1.0);
        assert_eq!(values[gm.vars.w[1]], 0.0);
    }

    /// Two equal-cost vertical options for the second net, except one of
    /// them crosses the first net's trunk.
    fn crossing_fixture() -> (OpticalNetlist, TrunkPlan) {
        let onet = onet_from_pairs(&[((5.0, 10.0), (15.0, 10.0)), ((22.0, 25.0), (22.0, 38.0))]);
        let plan = TrunkPlan::from_trunks(
            vec![
                Trunk {
                    id: 0,
                    dir: Orientation::Horizontal,
                    coord: 10.0,
                    span: (0.0, 40.0),
                    round: 0,
                    slab: 0,
                },
                Trunk {
                    id: 1,
                    dir: Orientation::Vertical,
                    coord: 20.0,
                    span: (0.0, 40.0),
                    round: 1,
                    slab: 0,
                },
                Trunk {
                    id: 2,
                    dir: Orientation::Vertical,
                    coord: 24.0,
                    span: (20.0, 40.0),
                    round: 3,
                    slab: 1,
                },
            ],
            40.0,
            40.0,
        );
        (onet, plan)
    }

    #[test]
    fn crossing_penalty_steers_the_trunk_choice() {
        let (onet, plan) = crossing_fixture();
        let thermal = ThermalProfile::uniform(40, 40, 1.0, 0.0);
        let cfg = Config::default();
        let accesses = compute_accesses(&onet, &plan, &thermal, &cfg.models);

        // The greedy pass walks trunks in creation order and parks net 1 on
        // the crossing trunk; the exact answer pays for the longer detour's
        // twin instead, which is symmetric and crossing-free.
        let greedy = cat_route(&onet, &plan, &accesses, &thermal, &cfg).unwrap();
        assert_eq!(greedy.assignment.link_trunk[1], Some(1));
        assert_eq!(greedy.report.p_cross, cfg.models.p_cross_unit);

        let exact = glow_route_on_plan(&onet, &plan, &accesses, &thermal, &cfg, None).unwrap();
        assert_eq!(exact.assignment.link_trunk[1], Some(2));
        assert_eq!(exact.report.p_cross, 0.0);
        let saved = greedy.report.p_total - exact.report.p_total;
        assert!((saved - cfg.models.p_cross_unit).abs() < 1e-12, "saved {saved}");
    }

    #[test]
    fn exact_search_agrees_with_enumeration_on_the_crossing_model() {
        let (onet, plan) = crossing_fixture();
        let thermal = ThermalProfile::uniform(40, 40, 1.0, 0.0);
        let models = DeviceModels::default();
        let accesses = compute_accesses(&onet, &plan, &thermal, &models);
        let gm = build_ilp(&onet, &plan, &accesses, &thermal, &models, 32).unwrap();

        let exact = crate::ilp::solve(&gm.model, None).unwrap();
        let brute = brute_force(&gm.model).unwrap();
        assert_eq!(exact.status, SolveStatus::Optimal);
        assert_eq!(brute.status, SolveStatus::Optimal);
        let (a, b) = (exact.objective.unwrap(), brute.objective.unwrap());
        assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn capacity_conflict_is_infeasible_not_unroutable() {
        let onet = onet_from_pairs(&[((2.0, 10.0), (12.0, 10.0)), ((5.0, 10.0), (15.0, 10.0))]);
        let plan = one_trunk_plan();
        let thermal = ThermalProfile::uniform(20, 20, 1.0, 0.0);
        let mut cfg = Config::default();
        cfg.c_max = 1;
        let accesses = compute_accesses(&onet, &plan, &thermal, &cfg.models);

        let gm = build_ilp(&onet, &plan, &accesses, &thermal, &cfg.models, cfg.c_max).unwrap();
        assert_eq!(brute_force(&gm.model).unwrap().status, SolveStatus::Infeasible);
        match glow_route_on_plan(&onet, &plan, &accesses, &thermal, &cfg, None) {
            Err(GlowError::Infeasible { .. }) => {}
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn revision_splits_a_capacity_conflict_across_new_trunks() {
        let onet = onet_from_pairs(&[((2.0, 10.0), (12.0, 10.0)), ((5.0, 10.0), (15.0, 10.0))]);
        let plan = one_trunk_plan();
        let thermal = ThermalProfile::uniform(20, 20, 1.0, 0.0);
        let mut cfg = Config::default();
        cfg.c_max = 1;
        cfg.max_placement_revisions = 3;
        let accesses = compute_accesses(&onet, &plan, &thermal, &cfg.models);

        let routed = glow_route(&onet, &plan, &accesses, &thermal, &cfg, None).unwrap();
        assert!(routed.assignment.is_complete());
        let (t0, t1) =
            (routed.assignment.link_trunk[0].unwrap(), routed.assignment.link_trunk[1].unwrap());
        assert_ne!(t0, t1, "one wavelength per trunk forces a split");
        assert_eq!(routed.report.channel_count, 2);
        assert_eq!(routed.report.trunk_count, 2);
    }

    #[test]
    fn hopeless_link_is_named_before_any_solve() {
        let onet = onet_from_pairs(&[((2.0, 10.0), (12.0, 10.0)), ((5.0, 10.0), (15.0, 10.0))]);
        let plan = one_trunk_plan();
        let mut thermal = ThermalProfile::uniform(20, 20, 1.0, 0.0);
        // Detector tile hot enough that ring tuning aliases everywhere.
        *thermal.at_tile_mut(15, 10) = 10.0;
        let models = DeviceModels::default();
        let accesses = compute_accesses(&onet, &plan, &thermal, &models);
        match build_ilp(&onet, &plan, &accesses, &thermal, &models, 32) {
            Err(GlowError::UnroutableLink { link_id: 1, net_id: 1 }) => {}
            other => panic!("expected link 1 to be reported, got {other:?}"),
        }
    }

    #[test]
    fn timeout_surfaces_the_greedy_incumbent() {
        let onet = onet_from_pairs(&[((5.0, 10.0), (10.0, 10.0)), ((7.0, 10.0), (12.0, 10.0))]);
        let plan = one_trunk_plan();
        let thermal = ThermalProfile::uniform(20, 20, 1.0, 0.0);
        let cfg = Config::default();
        let accesses = compute_accesses(&onet, &plan, &thermal, &cfg.models);

        let res =
            glow_route_on_plan(&onet, &plan, &accesses, &thermal, &cfg, Some(Duration::ZERO));
        match res {
            Err(GlowError::Timeout { partial: Some(routed) }) => {
                assert!(routed.assignment.is_complete());
                assert!((routed.report.p_total - 1.5767298178979601).abs() < 1e-12);
            }
            other => panic!("expected a timeout carrying the seed, got {other:?}"),
        }
    }

    #[test]
    fn decode_rejects_doctored_indicator_bits() {
        let onet = onet_from_pairs(&[((5.0, 10.0), (10.0, 10.0)), ((7.0, 10.0), (12.0, 10.0))]);
        let plan = one_trunk_plan();
        let thermal = ThermalProfile::uniform(20, 20, 1.0, 0.0);
        let models = DeviceModels::default();
        let accesses = compute_accesses(&onet, &plan, &thermal, &models);
        let gm = build_ilp(&onet, &plan, &accesses, &thermal, &models, 32).unwrap();
        let report = crate::ilp::solve(&gm.model, None).unwrap();
        let mut values = report.values.unwrap();
        values[gm.vars.w[0]] = 0.0;
        match decode(&gm, &values, &onet, 1) {
            Err(GlowError::Internal(msg)) => assert!(msg.contains("W for trunk 0"), "{msg}"),
            other => panic!("expected the flipped bit to be caught, got {other:?}"),
        }
    }
}
