//! Post-routing legalization: ring converters contending the same spot on a
//! trunk are spread apart until every pairwise spacing reaches the minimum
//! ring pitch.
//!
//! Converters walk their trunk in ascending ideal position and each takes
//! the nearest offset (in pitch multiples, alternating sides) that clears
//! the already-settled ones while the link still meets timing, thermal, and
//! detection at the shifted geometry. A converter with no workable offset
//! sends its whole link to the cheapest other trunk with free capacity, and
//! both trunks settle again; a link that runs out of trunks is a hard
//! failure reported by id.

use crate::ingest::{Config, ThermalProfile};
use crate::oil::DeviceModels;
use crate::placement::{access_at, trunk_crossings, AccessMatrix, Trunk, TrunkPlan};
use crate::power::Assignment;
use crate::preprocess::OpticalNetlist;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

/// Spacing slack so converter pairs exactly at pitch stay legal.
const PITCH_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum PostrouteError {
    #[error("link {link_id} cannot be legalized on any trunk with free capacity")]
    Unplaceable { link_id: usize },
}

/// Legalization output: the (possibly re-routed) assignment plus the access
/// matrix rewritten with final converter positions.
#[derive(Debug, Clone)]
pub struct Legalized {
    pub assignment: Assignment,
    pub accesses: AccessMatrix,
    /// Converters that settled away from their ideal projection.
    pub moved: usize,
    /// Links pushed onto a different trunk because no offset worked.
    pub reassigned: usize,
}

/// Spread converters until every pair on every trunk sits at least
/// `cfg.min_ring_pitch` apart, preserving all routing constraints.
pub fn legalize(
    a: &Assignment,
    onet: &OpticalNetlist,
    plan: &TrunkPlan,
    accesses: &AccessMatrix,
    thermal: &ThermalProfile,
    cfg: &Config,
) -> Result<Legalized, PostrouteError> {
    let n_trunks = plan.trunks.len();
    let mut link_trunk = a.link_trunk.clone();
    let mut final_pos: Vec<Option<(f64, f64)>> = vec![None; onet.links.len()];
    let mut tried: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); onet.links.len()];
    let mut reassigned = 0usize;

    let mut queue: VecDeque<usize> = (0..n_trunks).collect();
    let mut queued = vec![true; n_trunks];
    while let Some(t) = queue.pop_front() {
        queued[t] = false;
        match settle_trunk(t, &link_trunk, onet, plan, accesses, thermal, cfg) {
            Ok(placed) => {
                for (l, mod_s, det_s) in placed {
                    final_pos[l] = Some((mod_s, det_s));
                }
            }
            Err(loser) => {
                // The loser leaves; this trunk settles again without it and
                // the target trunk gains a newcomer. Each link visits a
                // trunk at most once, so the loop is finite.
                tried[loser].insert(t);
                let derived = Assignment::from_links(link_trunk.clone(), onet, n_trunks);
                let target =
                    cheapest_fallback(loser, &tried[loser], &derived, onet, plan, accesses, thermal, cfg)
                        .ok_or(PostrouteError::Unplaceable { link_id: loser })?;
                link_trunk[loser] = Some(target);
                reassigned += 1;
                for tq in [t, target] {
                    if !queued[tq] {
                        queued[tq] = true;
                        queue.push_back(tq);
                    }
                }
            }
        }
    }

    let mut out = accesses.clone();
    let mut moved = 0usize;
    for (l, t) in link_trunk.iter().enumerate() {
        let Some(t) = *t else { continue };
        let (mod_s, det_s) = final_pos[l].expect("every assigned link has settled");
        let trunk = &plan.trunks[t];
        let ideal = accesses.get(l, t);
        if (mod_s - trunk.along(&ideal.mod_pos)).abs() > PITCH_EPS {
            moved += 1;
        }
        if (det_s - trunk.along(&ideal.det_pos)).abs() > PITCH_EPS {
            moved += 1;
        }
        *out.get_mut(l, t) =
            access_at(&onet.links[l], trunk, trunk.at(mod_s), trunk.at(det_s), thermal, &cfg.models);
    }
    let assignment = Assignment::from_links(link_trunk, onet, n_trunks);
    Ok(Legalized { assignment, accesses: out, moved, reassigned })
}

/// Settled converter positions for one link: (link id, mod, det) along the
/// trunk axis.
type PlacedLink = (usize, f64, f64);

/// Spread one trunk's converters; on failure returns the first link whose
/// converter ran out of offsets.
fn settle_trunk(
    t: usize,
    link_trunk: &[Option<usize>],
    onet: &OpticalNetlist,
    plan: &TrunkPlan,
    accesses: &AccessMatrix,
    thermal: &ThermalProfile,
    cfg: &Config,
) -> Result<Vec<PlacedLink>, usize> {
    let trunk = &plan.trunks[t];
    let pitch = cfg.min_ring_pitch;
    let members: Vec<usize> =
        (0..link_trunk.len()).filter(|&l| link_trunk[l] == Some(t)).collect();

    // Walk converters in ascending ideal position; ties resolve by link id
    // then end (modulator first) so the schedule is reproducible.
    let mut conv: Vec<(f64, usize, u8)> = Vec::with_capacity(members.len() * 2);
    for &l in &members {
        let acc = accesses.get(l, t);
        conv.push((trunk.along(&acc.mod_pos), l, 0));
        conv.push((trunk.along(&acc.det_pos), l, 1));
    }
    conv.sort_by(|a, b| {
        a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
    });

    let mut placed: Vec<f64> = Vec::new();
    let mut pos: BTreeMap<(usize, u8), f64> = BTreeMap::new();
    for &(ideal, l, end) in &conv {
        let found = offsets(ideal, trunk.span, pitch).find(|&cand| {
            clears(cand, &placed, pitch)
                && feasible_at(l, end, cand, &pos, trunk, onet, accesses, thermal, &cfg.models)
        });
        match found {
            Some(cand) => {
                pos.insert((l, end), cand);
                placed.push(cand);
            }
            None => return Err(l),
        }
    }
    Ok(members.iter().map(|&l| (l, pos[&(l, 0)], pos[&(l, 1)])).collect())
}

/// Candidate positions nearest-first: the ideal spot, then alternating
/// sides at growing pitch multiples, clipped to the trunk span.
fn offsets(ideal: f64, span: (f64, f64), pitch: f64) -> impl Iterator<Item = f64> {
    let max_k = ((span.1 - span.0) / pitch).ceil() as i64 + 1;
    std::iter::once(0)
        .chain((1..=max_k).flat_map(|k| [k, -k]))
        .map(move |k| ideal + k as f64 * pitch)
        .filter(move |&s| s >= span.0 - PITCH_EPS && s <= span.1 + PITCH_EPS)
}

fn clears(cand: f64, placed: &[f64], pitch: f64) -> bool {
    placed.iter().all(|&q| (q - cand).abs() >= pitch - PITCH_EPS)
}

/// Full link feasibility with one end at `cand`, the other at its latest
/// settled (or ideal) spot. The later of a link's two ends validates the
/// final pair, so nothing is left checked against a stale position.
#[allow(clippy::too_many_arguments)]
fn feasible_at(
    l: usize,
    end: u8,
    cand: f64,
    pos: &BTreeMap<(usize, u8), f64>,
    trunk: &Trunk,
    onet: &OpticalNetlist,
    accesses: &AccessMatrix,
    thermal: &ThermalProfile,
    models: &DeviceModels,
) -> bool {
    let acc = accesses.get(l, trunk.id);
    let cur_mod = pos.get(&(l, 0)).copied().unwrap_or_else(|| trunk.along(&acc.mod_pos));
    let cur_det = pos.get(&(l, 1)).copied().unwrap_or_else(|| trunk.along(&acc.det_pos));
    let (mod_s, det_s) = if end == 0 { (cand, cur_det) } else { (cur_mod, cand) };
    access_at(&onet.links[l], trunk, trunk.at(mod_s), trunk.at(det_s), thermal, models)
        .feasible()
}

/// Cheapest trunk (by marginal power) that can still take the link: access
/// feasible, wavelength capacity free, not yet tried. Ties keep the lowest
/// trunk id.
#[allow(clippy::too_many_arguments)]
fn cheapest_fallback(
    l: usize,
    tried: &BTreeSet<usize>,
    current: &Assignment,
    onet: &OpticalNetlist,
    plan: &TrunkPlan,
    accesses: &AccessMatrix,
    thermal: &ThermalProfile,
    cfg: &Config,
) -> Option<usize> {
    let models = &cfg.models;
    let net = onet.links[l].net_index;
    let crossings = trunk_crossings(plan);
    let mut best: Option<(f64, usize)> = None;
    for t in 0..plan.trunks.len() {
        if tried.contains(&t) {
            continue;
        }
        let acc = accesses.get(l, t);
        if !acc.feasible() {
            continue;
        }
        let lit = current.lambda.contains(&(net, t));
        if !lit && current.lambda.iter().filter(|&&(_, lt)| lt == t).count() >= cfg.c_max {
            continue;
        }
        let mut cost = acc.p_ring + acc.p_path;
        if !lit {
            cost += models.p_channel;
        }
        if !current.trunk_active[t] {
            cost += models.p_trunk_base
                + models.k_trunk_thm * plan.trunks[t].thermal_integral(thermal);
            cost += crossings
                .iter()
                .filter(|&&(h, v)| {
                    (h == t && current.trunk_active[v]) || (v == t && current.trunk_active[h])
                })
                .count() as f64
                * models.p_cross_unit;
        }
        if best.map_or(true, |(bc, _)| cost < bc) {
            best = Some((cost, t));
        }
    }
    best.map(|(_, t)| t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Orientation, Point};
    use crate::placement::compute_accesses;
    use crate::power::compute_power;
    use crate::preprocess::{Cluster, Link, OpticalNet};

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

    fn h_trunk(id: usize, y: f64, span: (f64, f64), round: usize) -> Trunk {
        Trunk { id, dir: Orientation::Horizontal, coord: y, span, round, slab: 0 }
    }

    fn pitches_hold(lg: &Legalized, plan: &TrunkPlan, pitch: f64) -> bool {
        for t in 0..plan.trunks.len() {
            let mut ss: Vec<f64> = Vec::new();
            for (l, lt) in lg.assignment.link_trunk.iter().enumerate() {
                if *lt == Some(t) {
                    let acc = lg.accesses.get(l, t);
                    ss.push(plan.trunks[t].along(&acc.mod_pos));
                    ss.push(plan.trunks[t].along(&acc.det_pos));
                }
            }
            ss.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if ss.windows(2).any(|w| w[1] - w[0] < pitch - PITCH_EPS) {
                return false;
            }
        }
        true
    }

    #[test]
    fn spaced_input_is_a_fixed_point() {
        let onet = onet_from_pairs(&[((2.0, 10.0), (12.0, 10.0)), ((5.0, 10.0), (15.0, 10.0))]);
        let plan =
            TrunkPlan::from_trunks(vec![h_trunk(0, 10.0, (0.0, 20.0), 0)], 20.0, 20.0);
        let thermal = ThermalProfile::uniform(20, 20, 1.0, 0.0);
        let cfg = Config::default();
        let accesses = compute_accesses(&onet, &plan, &thermal, &cfg.models);
        let a = Assignment::from_links(vec![Some(0), Some(0)], &onet, 1);

        let lg = legalize(&a, &onet, &plan, &accesses, &thermal, &cfg).unwrap();
        assert_eq!(lg.moved, 0);
        assert_eq!(lg.reassigned, 0);
        assert_eq!(lg.assignment.link_trunk, a.link_trunk);
        assert_eq!(lg.accesses, accesses);
    }

    #[test]
    fn shared_modulator_site_shifts_one_ring_by_a_pitch() {
        // Two nets driven from the same point: both modulators project to
        // s = 2.0 and the later link must step one pitch to the right.
        let onet = onet_from_pairs(&[((2.0, 10.0), (10.0, 10.0)), ((2.0, 10.0), (18.0, 10.0))]);
        let plan =
            TrunkPlan::from_trunks(vec![h_trunk(0, 10.0, (0.0, 20.0), 0)], 20.0, 20.0);
        let thermal = ThermalProfile::uniform(20, 20, 1.0, 0.0);
        let cfg = Config::default();
        let accesses = compute_accesses(&onet, &plan, &thermal, &cfg.models);
        let a = Assignment::from_links(vec![Some(0), Some(0)], &onet, 1);
        let before = compute_power(&a, &onet, &plan, &accesses, &thermal, &cfg.models, cfg.c_max)
            .unwrap();

        let lg = legalize(&a, &onet, &plan, &accesses, &thermal, &cfg).unwrap();
        assert_eq!(lg.moved, 1);
        assert_eq!(lg.reassigned, 0);
        assert!(pitches_hold(&lg, &plan, cfg.min_ring_pitch));

        let shifted = lg.accesses.get(1, 0);
        assert!((shifted.mod_pos.x - 2.04).abs() < 1e-9);
        let wl_o_delta = (shifted.wl_o - accesses.get(1, 0).wl_o).abs();
        assert!(wl_o_delta <= cfg.min_ring_pitch + 1e-9, "wl_o moved by {wl_o_delta}");

        // With unchanged tiles the only power term that can drift is the
        // path loss of the shifted link.
        let after = compute_power(
            &lg.assignment,
            &onet,
            &plan,
            &lg.accesses,
            &thermal,
            &cfg.models,
            cfg.c_max,
        )
        .unwrap();
        let path_delta = shifted.p_path - accesses.get(1, 0).p_path;
        assert!((after.p_total - before.p_total - path_delta).abs() < 1e-12);
    }

    #[test]
    fn timing_locked_link_falls_back_to_a_parallel_trunk() {
        // Link 1 has almost no timing slack, so no offset on the shared
        // trunk works; a second trunk through the same corridor takes it
        // with zero stubs.
        let onet = onet_from_pairs(&[((2.0, 10.0), (12.0, 10.0)), ((2.0, 10.0), (5.72, 10.0))]);
        let plan = TrunkPlan::from_trunks(
            vec![h_trunk(0, 10.0, (0.0, 40.0), 0), h_trunk(1, 10.0, (0.0, 20.0), 2)],
            40.0,
            40.0,
        );
        let thermal = ThermalProfile::uniform(40, 40, 1.0, 0.0);
        let cfg = Config::default();
        let accesses = compute_accesses(&onet, &plan, &thermal, &cfg.models);
        let a = Assignment::from_links(vec![Some(0), Some(0)], &onet, 2);

        let lg = legalize(&a, &onet, &plan, &accesses, &thermal, &cfg).unwrap();
        assert_eq!(lg.reassigned, 1);
        assert_eq!(lg.assignment.link_trunk, vec![Some(0), Some(1)]);
        assert!(pitches_hold(&lg, &plan, cfg.min_ring_pitch));
        // On its new trunk the link sits at its ideal projection again.
        let acc = lg.accesses.get(1, 1);
        assert_eq!(acc.wl_e, 0.0);
        assert!(acc.feasible());
    }

    #[test]
    fn exhausted_fallbacks_name_the_link() {
        // A pitch wider than any timing-legal detour, and the only other
        // trunk already carries a full house of wavelengths.
        let onet = onet_from_pairs(&[
            ((2.0, 10.0), (12.0, 10.0)),
            ((5.0, 10.0), (15.0, 10.0)),
            ((0.5, 10.5), (8.5, 10.5)),
            ((16.5, 10.5), (24.5, 10.5)),
        ]);
        let plan = TrunkPlan::from_trunks(
            vec![h_trunk(0, 10.0, (0.0, 40.0), 0), h_trunk(1, 10.5, (0.0, 40.0), 2)],
            40.0,
            40.0,
        );
        let thermal = ThermalProfile::uniform(40, 40, 1.0, 0.0);
        let mut cfg = Config::default();
        cfg.min_ring_pitch = 8.0;
        cfg.c_max = 2;
        let accesses = compute_accesses(&onet, &plan, &thermal, &cfg.models);
        let a = Assignment::from_links(vec![Some(0), Some(0), Some(1), Some(1)], &onet, 2);

        let err = legalize(&a, &onet, &plan, &accesses, &thermal, &cfg).unwrap_err();
        assert_eq!(err, PostrouteError::Unplaceable { link_id: 1 });
    }
}
