//! Laser/tuning power accounting for a channel assignment.
//!
//! Total power decomposes into five additive terms: crossing loss
//! compensation, trunk thermal tuning, ring thermal tuning, path loss, and
//! dynamic channel/trunk power. The exact ILP objective is built from the
//! same coefficients, so the solver's objective and this function agree to
//! rounding on decoded solutions.

use crate::ingest::ThermalProfile;
use crate::oil::DeviceModels;
use crate::placement::{trunk_crossings, AccessMatrix, TrunkPlan};
use crate::preprocess::OpticalNetlist;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PowerError {
    #[error("assignment invariant violated: {0}")]
    InvariantViolation(String),
}

/// Which link rides which trunk, plus the derived activation state.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Trunk carrying each link, indexed by link id.
    pub link_trunk: Vec<Option<usize>>,
    /// Active (net_index, trunk_id) wavelength allocations.
    pub lambda: BTreeSet<(usize, usize)>,
    /// Trunk on/off state, indexed by trunk id.
    pub trunk_active: Vec<bool>,
    /// Channel index per active (net_index, trunk_id), unique per trunk.
    pub channels: BTreeMap<(usize, usize), usize>,
}

impl Assignment {
    /// Derive activations and channel indices from the per-link choices.
    /// Channels are handed out per trunk in ascending net id.
    pub fn from_links(
        link_trunk: Vec<Option<usize>>,
        onet: &OpticalNetlist,
        n_trunks: usize,
    ) -> Self {
        let mut lambda = BTreeSet::new();
        for (link_id, t) in link_trunk.iter().enumerate() {
            if let Some(t) = t {
                lambda.insert((onet.links[link_id].net_index, *t));
            }
        }
        let mut trunk_active = vec![false; n_trunks];
        for &(_, t) in &lambda {
            trunk_active[t] = true;
        }
        let mut channels = BTreeMap::new();
        let mut by_trunk: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(n, t) in &lambda {
            by_trunk.entry(t).or_default().push(n);
        }
        for (t, mut nets) in by_trunk {
            nets.sort_by_key(|&n| onet.nets[n].net_id);
            for (ch, n) in nets.into_iter().enumerate() {
                channels.insert((n, t), ch);
            }
        }
        Assignment { link_trunk, lambda, trunk_active, channels }
    }

    pub fn empty(n_links: usize, n_trunks: usize) -> Self {
        Assignment {
            link_trunk: vec![None; n_links],
            lambda: BTreeSet::new(),
            trunk_active: vec![false; n_trunks],
            channels: BTreeMap::new(),
        }
    }

    pub fn assigned_count(&self) -> usize {
        self.link_trunk.iter().filter(|t| t.is_some()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.link_trunk.iter().all(|t| t.is_some())
    }
}

/// Everything a router hands back: the plan it ended up with (revisions may
/// have extended the one it was given), the matching access matrix, the
/// channel assignment, and its priced report.
#[derive(Debug, Clone)]
pub struct Routed {
    pub plan: TrunkPlan,
    pub accesses: AccessMatrix,
    pub assignment: Assignment,
    pub report: PowerReport,
}

/// The five power terms plus the summary metrics reported per routing run.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerReport {
    /// Active trunks (unused trunks are turned off and not counted).
    pub trunk_count: usize,
    /// Active (net, trunk) wavelength allocations.
    pub channel_count: usize,
    pub avg_channels_per_trunk: f64,
    pub total_trunk_length_mm: f64,
    pub p_cross: f64,
    pub p_trunk_thm: f64,
    pub p_ring_thm: f64,
    pub p_path: f64,
    pub p_dynamic: f64,
    pub p_total: f64,
}

/// Price an assignment. Fails when the derived activation state does not
/// match the stored one (both routers construct assignments through
/// [`Assignment::from_links`], so a mismatch means a real bug).
pub fn compute_power(
    a: &Assignment,
    onet: &OpticalNetlist,
    plan: &TrunkPlan,
    accesses: &AccessMatrix,
    thermal: &ThermalProfile,
    models: &DeviceModels,
    c_max: usize,
) -> Result<PowerReport, PowerError> {
    validate(a, onet, plan, c_max)?;

    let p_cross: f64 = trunk_crossings(plan)
        .iter()
        .filter(|&&(h, v)| a.trunk_active[h] && a.trunk_active[v])
        .count() as f64
        * models.p_cross_unit;

    let mut p_trunk_thm = 0.0;
    let mut total_len = 0.0;
    for t in &plan.trunks {
        if a.trunk_active[t.id] {
            p_trunk_thm += models.k_trunk_thm * t.thermal_integral(thermal);
            total_len += t.length();
        }
    }

    let mut p_ring_thm = 0.0;
    let mut p_path = 0.0;
    for (link_id, t) in a.link_trunk.iter().enumerate() {
        if let Some(t) = t {
            let acc = accesses.get(link_id, *t);
            p_ring_thm += acc.p_ring;
            p_path += acc.p_path;
        }
    }

    let n_active = a.trunk_active.iter().filter(|&&x| x).count();
    let p_dynamic = a.lambda.len() as f64 * models.p_channel + n_active as f64 * models.p_trunk_base;

    let p_total = p_cross + p_trunk_thm + p_ring_thm + p_path + p_dynamic;
    Ok(PowerReport {
        trunk_count: n_active,
        channel_count: a.lambda.len(),
        avg_channels_per_trunk: if n_active == 0 { 0.0 } else { a.lambda.len() as f64 / n_active as f64 },
        total_trunk_length_mm: total_len,
        p_cross,
        p_trunk_thm,
        p_ring_thm,
        p_path,
        p_dynamic,
        p_total,
    })
}

fn validate(
    a: &Assignment,
    onet: &OpticalNetlist,
    plan: &TrunkPlan,
    c_max: usize,
) -> Result<(), PowerError> {
    let n_trunks = plan.trunks.len();
    if a.link_trunk.len() != onet.links.len() {
        return Err(PowerError::InvariantViolation(format!(
            "{} link slots for {} links",
            a.link_trunk.len(),
            onet.links.len()
        )));
    }
    if a.trunk_active.len() != n_trunks {
        return Err(PowerError::InvariantViolation(format!(
            "{} trunk slots for {} trunks",
            a.trunk_active.len(),
            n_trunks
        )));
    }
    let mut derived_lambda = BTreeSet::new();
    for (link_id, t) in a.link_trunk.iter().enumerate() {
        if let Some(t) = t {
            if *t >= n_trunks {
                return Err(PowerError::InvariantViolation(format!(
                    "link {link_id} assigned to nonexistent trunk {t}"
                )));
            }
            derived_lambda.insert((onet.links[link_id].net_index, *t));
        }
    }
    if derived_lambda != a.lambda {
        return Err(PowerError::InvariantViolation(
            "lambda flags do not match link assignments".into(),
        ));
    }
    for &(_, t) in &a.lambda {
        if !a.trunk_active[t] {
            return Err(PowerError::InvariantViolation(format!(
                "trunk {t} carries a channel but is inactive"
            )));
        }
    }
    for (t, active) in a.trunk_active.iter().enumerate() {
        if *active && !a.lambda.iter().any(|&(_, lt)| lt == t) {
            return Err(PowerError::InvariantViolation(format!(
                "trunk {t} active without any channel"
            )));
        }
    }
    if a.channels.keys().cloned().collect::<BTreeSet<_>>() != a.lambda {
        return Err(PowerError::InvariantViolation(
            "channel table keys do not match lambda".into(),
        ));
    }
    let mut per_trunk: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (&(_, t), &ch) in &a.channels {
        if ch >= c_max {
            return Err(PowerError::InvariantViolation(format!(
                "channel index {ch} exceeds capacity {c_max} on trunk {t}"
            )));
        }
        if !per_trunk.entry(t).or_default().insert(ch) {
            return Err(PowerError::InvariantViolation(format!(
                "duplicate channel {ch} on trunk {t}"
            )));
        }
    }
    for (t, chs) in per_trunk {
        if chs.len() > c_max {
            return Err(PowerError::InvariantViolation(format!(
                "trunk {t} carries {} nets, capacity {c_max}",
                chs.len()
            )));
        }
    }
    Ok(())
}
