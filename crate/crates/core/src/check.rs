//! Independent route auditing.
//!
//! Everything here is re-derived from first principles: raw pin geometry,
//! stored converter positions, the thermal grid, and the device models.
//! None of the cached access fields (wl_e, feasibility flags, power terms)
//! are trusted, so a bug in the routers or the legalizer cannot hide behind
//! its own bookkeeping.

use crate::geom::{Orientation, Point};
use crate::ingest::ThermalProfile;
use crate::oil::DeviceModels;
use crate::placement::{AccessMatrix, Trunk, TrunkPlan};
use crate::power::Assignment;
use crate::preprocess::OpticalNetlist;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Geometry slack for "sits on the trunk" checks, mm.
const GEOM_EPS: f64 = 1e-9;
/// Delay slack mirroring the router's own rounding guard, ps.
const TIMING_SLACK_PS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Unassigned { link_id: usize },
    OffTrunk { link_id: usize, trunk_id: usize },
    Timing { link_id: usize, trunk_id: usize, delay_ps: f64, budget_ps: f64 },
    Thermal { link_id: usize, trunk_id: usize, t_var: f64 },
    Detection { link_id: usize, trunk_id: usize, p_laser: f64 },
    CapacityExceeded { trunk_id: usize, nets: usize, c_max: usize },
    LambdaMismatch { net_index: usize, trunk_id: usize },
    ActivationMismatch { trunk_id: usize },
    ChannelError { trunk_id: usize, detail: String },
    PitchViolation { trunk_id: usize, gap: f64, pitch: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Unassigned { link_id } => write!(f, "link {link_id} has no trunk"),
            Violation::OffTrunk { link_id, trunk_id } => {
                write!(f, "link {link_id} converter off trunk {trunk_id}")
            }
            Violation::Timing { link_id, trunk_id, delay_ps, budget_ps } => write!(
                f,
                "link {link_id} on trunk {trunk_id}: delay {delay_ps} ps over budget {budget_ps}"
            ),
            Violation::Thermal { link_id, trunk_id, t_var } => {
                write!(f, "link {link_id} on trunk {trunk_id}: {t_var} degC untunable")
            }
            Violation::Detection { link_id, trunk_id, p_laser } => write!(
                f,
                "link {link_id} on trunk {trunk_id}: laser demand {p_laser} mW over budget"
            ),
            Violation::CapacityExceeded { trunk_id, nets, c_max } => {
                write!(f, "trunk {trunk_id} carries {nets} nets over capacity {c_max}")
            }
            Violation::LambdaMismatch { net_index, trunk_id } => {
                write!(f, "wavelength set disagrees at (net {net_index}, trunk {trunk_id})")
            }
            Violation::ActivationMismatch { trunk_id } => {
                write!(f, "trunk {trunk_id} activation contradicts its wavelengths")
            }
            Violation::ChannelError { trunk_id, detail } => {
                write!(f, "channel table broken on trunk {trunk_id}: {detail}")
            }
            Violation::PitchViolation { trunk_id, gap, pitch } => {
                write!(f, "converters {gap} mm apart on trunk {trunk_id}, pitch {pitch}")
            }
        }
    }
}

fn along(trunk: &Trunk, p: &Point) -> f64 {
    match trunk.dir {
        Orientation::Horizontal => p.x,
        Orientation::Vertical => p.y,
    }
}

fn on_trunk(trunk: &Trunk, p: &Point) -> bool {
    let (run, fixed) = match trunk.dir {
        Orientation::Horizontal => (p.x, p.y),
        Orientation::Vertical => (p.y, p.x),
    };
    (fixed - trunk.coord).abs() <= GEOM_EPS
        && run >= trunk.span.0 - GEOM_EPS
        && run <= trunk.span.1 + GEOM_EPS
}

/// Audit one routed state. `min_pitch` is supplied after legalization to
/// additionally enforce converter spacing.
#[allow(clippy::too_many_arguments)]
pub fn check_route(
    a: &Assignment,
    onet: &OpticalNetlist,
    plan: &TrunkPlan,
    accesses: &AccessMatrix,
    thermal: &ThermalProfile,
    models: &DeviceModels,
    c_max: usize,
    min_pitch: Option<f64>,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let n_trunks = plan.trunks.len();

    // Per-link physics, from stored converter positions and raw geometry.
    for link in &onet.links {
        let t = match a.link_trunk.get(link.id).copied().flatten() {
            Some(t) if t < n_trunks => t,
            _ => {
                out.push(Violation::Unassigned { link_id: link.id });
                continue;
            }
        };
        let trunk = &plan.trunks[t];
        let acc = accesses.get(link.id, t);
        if !on_trunk(trunk, &acc.mod_pos) || !on_trunk(trunk, &acc.det_pos) {
            out.push(Violation::OffTrunk { link_id: link.id, trunk_id: t });
        }

        let wl_e = link.driver_pos.manhattan(&acc.mod_pos) + link.sink_pos.manhattan(&acc.det_pos);
        let wl_o = (along(trunk, &acc.mod_pos) - along(trunk, &acc.det_pos)).abs();
        let delay = models.tau_e * wl_e + models.tau_o * wl_o + models.tau_conv;
        let budget = models.tau_e * link.hpwl + TIMING_SLACK_PS;
        if delay > budget {
            out.push(Violation::Timing {
                link_id: link.id,
                trunk_id: t,
                delay_ps: delay,
                budget_ps: budget,
            });
        }

        let t_var = thermal
            .lookup(acc.mod_pos.x, acc.mod_pos.y)
            .max(thermal.lookup(acc.det_pos.x, acc.det_pos.y));
        // A ring drifts drift_sens degC^-1 nm per degree and must chase the
        // resonance across twice the drift; past the channel spacing it
        // locks onto the neighboring channel instead.
        let aliases = 2.0 * models.drift_sens * t_var > models.channel_spacing;
        if t_var > models.temp_threshold || aliases {
            out.push(Violation::Thermal { link_id: link.id, trunk_id: t, t_var });
        }

        let loss_db = models.loss_mod_db + models.alpha_wg * wl_o / 10.0;
        let p_path = models.p_det_sense * (10f64.powf(loss_db / 10.0) - 1.0);
        let p_laser = models.p_det_sense + p_path;
        if p_laser > models.p_laser_max {
            out.push(Violation::Detection { link_id: link.id, trunk_id: t, p_laser });
        }
    }

    // Wavelength bookkeeping, re-derived with local loops.
    let mut derived: BTreeSet<(usize, usize)> = BTreeSet::new();
    for link in &onet.links {
        if let Some(t) = a.link_trunk.get(link.id).copied().flatten() {
            if t < n_trunks {
                derived.insert((link.net_index, t));
            }
        }
    }
    for key in derived.symmetric_difference(&a.lambda) {
        out.push(Violation::LambdaMismatch { net_index: key.0, trunk_id: key.1 });
    }
    for t in 0..n_trunks {
        let nets = derived.iter().filter(|&&(_, dt)| dt == t).count();
        if nets > c_max {
            out.push(Violation::CapacityExceeded { trunk_id: t, nets, c_max });
        }
        let active = a.trunk_active.get(t).copied().unwrap_or(false);
        if active != (nets > 0) {
            out.push(Violation::ActivationMismatch { trunk_id: t });
        }
    }

    // Channel table: one entry per wavelength, indices 0..n in ascending
    // net id per trunk.
    let chan_keys: BTreeSet<(usize, usize)> = a.channels.keys().copied().collect();
    for &(n, t) in chan_keys.symmetric_difference(&a.lambda) {
        out.push(Violation::ChannelError {
            trunk_id: t,
            detail: format!("entry for net {n} does not match the wavelength set"),
        });
    }
    let mut per_trunk: BTreeMap<usize, Vec<(u32, usize)>> = BTreeMap::new();
    for (&(n, t), &ch) in &a.channels {
        let id = onet.nets.get(n).map_or(u32::MAX, |net| net.net_id);
        per_trunk.entry(t).or_default().push((id, ch));
    }
    for (t, mut rows) in per_trunk {
        rows.sort();
        for (rank, &(id, ch)) in rows.iter().enumerate() {
            if ch != rank {
                out.push(Violation::ChannelError {
                    trunk_id: t,
                    detail: format!("net id {id} holds channel {ch}, expected {rank}"),
                });
            }
            if ch >= c_max {
                out.push(Violation::ChannelError {
                    trunk_id: t,
                    detail: format!("channel {ch} outside capacity {c_max}"),
                });
            }
        }
    }

    if let Some(pitch) = min_pitch {
        for (t, trunk) in plan.trunks.iter().enumerate() {
            let mut ss: Vec<f64> = Vec::new();
            for link in &onet.links {
                if a.link_trunk.get(link.id).copied().flatten() == Some(t) {
                    let acc = accesses.get(link.id, t);
                    ss.push(along(trunk, &acc.mod_pos));
                    ss.push(along(trunk, &acc.det_pos));
                }
            }
            ss.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for w in ss.windows(2) {
                let gap = w[1] - w[0];
                if gap < pitch - GEOM_EPS {
                    out.push(Violation::PitchViolation { trunk_id: t, gap, pitch });
                }
            }
        }
    }

    out
}
