//! CAT: greedy channel assignment ordered by thermal variation.
//!
//! The baseline router. Trunks are visited in creation order (round, then
//! slab); on each trunk the still-unassigned feasible links are sorted by
//! t_var ascending and taken until the trunk's distinct-net capacity is hit.
//! Links left over trigger a placement revision with one more round, up to
//! the configured limit.

use crate::ingest::{Config, ThermalProfile};
use crate::placement::{
    compute_accesses, place_trunks_extended, AccessMatrix, PlacementError, TrunkPlan,
};
use crate::power::{compute_power, Assignment, PowerError, Routed};
use crate::preprocess::OpticalNetlist;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CatError {
    #[error("{} link(s) still unassigned after {revisions} placement revisions: {link_ids:?}",
            link_ids.len())]
    Stranded { link_ids: Vec<usize>, revisions: usize },
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    Power(#[from] PowerError),
}

/// One greedy pass over a fixed plan. Returns the stranded link ids when any
/// link cannot be placed.
pub fn cat_assign_on_plan(
    onet: &OpticalNetlist,
    plan: &TrunkPlan,
    accesses: &AccessMatrix,
    c_max: usize,
) -> Result<Assignment, Vec<usize>> {
    let mut link_trunk: Vec<Option<usize>> = vec![None; onet.links.len()];

    let mut order: Vec<usize> = (0..plan.trunks.len()).collect();
    order.sort_by_key(|&t| (plan.trunks[t].round, plan.trunks[t].slab));

    for t in order {
        let mut feasible: Vec<(f64, usize)> = onet
            .links
            .iter()
            .filter(|l| link_trunk[l.id].is_none())
            .map(|l| accesses.get(l.id, t))
            .filter(|a| a.feasible())
            .map(|a| (a.t_var, a.link_id))
            .collect();
        feasible.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

        let mut nets: BTreeSet<usize> = BTreeSet::new();
        for (_, link_id) in feasible {
            let net = onet.links[link_id].net_index;
            if nets.contains(&net) {
                // Same net, same trunk: rides an already-lit channel.
                link_trunk[link_id] = Some(t);
            } else if nets.len() < c_max {
                nets.insert(net);
                link_trunk[link_id] = Some(t);
            } else {
                // Capacity reached; stopping here keeps the assigned set a
                // prefix of the t_var order.
                break;
            }
        }
    }

    let stranded: Vec<usize> =
        (0..link_trunk.len()).filter(|&i| link_trunk[i].is_none()).collect();
    if stranded.is_empty() {
        Ok(Assignment::from_links(link_trunk, onet, plan.trunks.len()))
    } else {
        Err(stranded)
    }
}

/// Full CAT flow: greedy assignment with placement revisions on failure.
pub fn cat_route(
    onet: &OpticalNetlist,
    plan: &TrunkPlan,
    accesses: &AccessMatrix,
    thermal: &ThermalProfile,
    cfg: &Config,
) -> Result<Routed, CatError> {
    let mut last_stranded = Vec::new();
    for extra in 0..=cfg.max_placement_revisions {
        let revised: Option<(TrunkPlan, AccessMatrix)> = if extra == 0 {
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
        match cat_assign_on_plan(onet, cur_plan, cur_acc, cfg.c_max) {
            Ok(assignment) => {
                let report = compute_power(
                    &assignment,
                    onet,
                    cur_plan,
                    cur_acc,
                    thermal,
                    &cfg.models,
                    cfg.c_max,
                )?;
                return Ok(Routed {
                    plan: cur_plan.clone(),
                    accesses: cur_acc.clone(),
                    assignment,
                    report,
                });
            }
            Err(stranded) => last_stranded = stranded,
        }
    }
    Err(CatError::Stranded { link_ids: last_stranded, revisions: cfg.max_placement_revisions })
}
