//! Trunk placement and per-(link, trunk) access geometry.
//!
//! Trunks are placed in alternating-direction rounds. Round `r` slices the
//! chip into `2^(r/2)` equal slabs perpendicular to the round's trunk
//! direction; each non-empty slab gets one trunk at the lower-median of its
//! member nets' median coordinates, spanning the slab. A trunk whose line
//! crosses a tile hotter than the threshold shifts to the nearest clear
//! tile-center coordinate, or is skipped when the whole slab is blocked.
//! Rounds stop once `trunks * C_max >= links`.

use crate::geom::{clamp, Orientation, Point};
use crate::ingest::{Config, ThermalProfile};
use crate::oil::{loss_to_power, ring_thermal_penalty, DeviceModels, RINGS_PER_LINK};
use crate::par;
use crate::preprocess::{geometric_median, Link, OpticalNetlist};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PlacementError {
    #[error("optical netlist has no links to place trunks for")]
    EmptyNetlist,
    #[error("no placeable trunk after {rounds} rounds (thermal blockage everywhere)")]
    NoTrunks { rounds: usize },
    #[error("thermal grid does not cover the chip")]
    ThermalCoverage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trunk {
    pub id: usize,
    pub dir: Orientation,
    /// Fixed coordinate: y for horizontal trunks, x for vertical, mm.
    pub coord: f64,
    /// Extent along the running axis, `span.0 <= span.1`, mm.
    pub span: (f64, f64),
    /// Placement round and slab that created this trunk.
    pub round: usize,
    pub slab: usize,
}

impl Trunk {
    pub fn length(&self) -> f64 {
        self.span.1 - self.span.0
    }

    /// Nearest point of the trunk to `p`: perpendicular projection clamped
    /// to the span.
    pub fn access_point(&self, p: &Point) -> Point {
        match self.dir {
            Orientation::Horizontal => Point::new(clamp(p.x, self.span.0, self.span.1), self.coord),
            Orientation::Vertical => Point::new(self.coord, clamp(p.y, self.span.0, self.span.1)),
        }
    }

    /// Running-axis coordinate of a point on (or projected onto) the trunk.
    pub fn along(&self, p: &Point) -> f64 {
        match self.dir {
            Orientation::Horizontal => p.x,
            Orientation::Vertical => p.y,
        }
    }

    /// Point on the trunk at running-axis coordinate `s`.
    pub fn at(&self, s: f64) -> Point {
        match self.dir {
            Orientation::Horizontal => Point::new(s, self.coord),
            Orientation::Vertical => Point::new(self.coord, s),
        }
    }

    pub fn blocked(&self, thermal: &ThermalProfile, threshold: f64) -> bool {
        thermal.max_along(self.dir, self.coord, self.span.0, self.span.1) > threshold
    }

    /// Integrated |dT| over the trunk length, degC*mm.
    pub fn thermal_integral(&self, thermal: &ThermalProfile) -> f64 {
        thermal.integral_along(self.dir, self.coord, self.span.0, self.span.1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrunkPlan {
    /// Horizontal trunks first (ids 0..n_horizontal), then vertical.
    pub trunks: Vec<Trunk>,
    pub n_horizontal: usize,
    pub rounds_used: usize,
    pub chip_w: f64,
    pub chip_h: f64,
}

impl TrunkPlan {
    /// Assemble a plan from bare trunks (fixtures and tests); ids are
    /// rewritten horizontal-first.
    pub fn from_trunks(mut trunks: Vec<Trunk>, chip_w: f64, chip_h: f64) -> Self {
        trunks.sort_by_key(|t| (t.dir == Orientation::Vertical, t.round, t.slab));
        for (i, t) in trunks.iter_mut().enumerate() {
            t.id = i;
        }
        let n_horizontal = trunks.iter().filter(|t| t.dir == Orientation::Horizontal).count();
        let rounds_used = trunks.iter().map(|t| t.round + 1).max().unwrap_or(0);
        TrunkPlan { trunks, n_horizontal, rounds_used, chip_w, chip_h }
    }
}

/// Place trunks for `onet` until the capacity rule is satisfied.
pub fn place_trunks(
    onet: &OpticalNetlist,
    thermal: &ThermalProfile,
    chip_w: f64,
    chip_h: f64,
    cfg: &Config,
) -> Result<TrunkPlan, PlacementError> {
    place_trunks_extended(onet, thermal, chip_w, chip_h, cfg, 0)
}

/// Same schedule as [`place_trunks`] but keeps going for `extra_rounds`
/// rounds past the capacity stopping point. Used by the routers' placement
/// revision loop; `extra_rounds = 0` reproduces `place_trunks` exactly.
pub fn place_trunks_extended(
    onet: &OpticalNetlist,
    thermal: &ThermalProfile,
    chip_w: f64,
    chip_h: f64,
    cfg: &Config,
    extra_rounds: usize,
) -> Result<TrunkPlan, PlacementError> {
    if onet.links.is_empty() {
        return Err(PlacementError::EmptyNetlist);
    }
    if !thermal.covers(chip_w, chip_h) {
        return Err(PlacementError::ThermalCoverage);
    }
    let link_count = onet.links.len();
    let net_medians: Vec<Point> =
        onet.nets.iter().map(|n| geometric_median(&n.clusters.iter().map(|c| c.median).collect::<Vec<_>>())).collect();

    // Past ~4 slabs per net further subdivision cannot expose new medians,
    // so the schedule is capped there; revisions beyond the cap add nothing.
    let slab_cap = (4 * onet.nets.len().max(2)).next_power_of_two();
    let round_cap = 2 * (slab_cap.trailing_zeros() as usize + 1);

    let mut placed: Vec<Trunk> = Vec::new();
    let mut rounds_done = 0usize;
    let mut met = false;
    let mut extra_done = 0usize;
    while rounds_done < round_cap {
        if met && extra_done >= extra_rounds {
            break;
        }
        round(
            rounds_done,
            &net_medians,
            thermal,
            chip_w,
            chip_h,
            cfg.models.temp_threshold,
            &mut placed,
        );
        rounds_done += 1;
        if met {
            extra_done += 1;
        } else if placed.len() * cfg.c_max >= link_count {
            met = true;
        }
    }

    if placed.is_empty() {
        return Err(PlacementError::NoTrunks { rounds: rounds_done });
    }
    let mut plan = TrunkPlan::from_trunks(placed, chip_w, chip_h);
    plan.rounds_used = rounds_done;
    Ok(plan)
}

fn round(
    r: usize,
    net_medians: &[Point],
    thermal: &ThermalProfile,
    chip_w: f64,
    chip_h: f64,
    threshold: f64,
    out: &mut Vec<Trunk>,
) {
    let dir = if r % 2 == 0 { Orientation::Horizontal } else { Orientation::Vertical };
    let slabs = 1usize << (r / 2);
    // Slabs slice the running axis; trunks span their slab.
    let (run_len, cross_len) = match dir {
        Orientation::Horizontal => (chip_w, chip_h),
        Orientation::Vertical => (chip_h, chip_w),
    };
    let slab_w = run_len / slabs as f64;
    for slab in 0..slabs {
        let lo = slab as f64 * slab_w;
        let hi = lo + slab_w;
        let members: Vec<Point> = net_medians
            .iter()
            .filter(|m| {
                let run = match dir {
                    Orientation::Horizontal => m.x,
                    Orientation::Vertical => m.y,
                };
                let idx = ((run / slab_w).floor() as isize).clamp(0, slabs as isize - 1) as usize;
                idx == slab
            })
            .copied()
            .collect();
        if members.is_empty() {
            continue;
        }
        let med = geometric_median(&members);
        let coord = match dir {
            Orientation::Horizontal => med.y,
            Orientation::Vertical => med.x,
        };
        let mut trunk = Trunk { id: 0, dir, coord, span: (lo, hi), round: r, slab };
        if trunk.blocked(thermal, threshold) {
            match nearest_clear_coord(&trunk, thermal, threshold, cross_len) {
                Some(c) => trunk.coord = c,
                None => continue,
            }
        }
        out.push(trunk);
    }
}

/// Tile-center coordinates ordered by distance from the preferred line
/// (ties: lower coordinate); first one whose whole span is cool enough.
fn nearest_clear_coord(
    trunk: &Trunk,
    thermal: &ThermalProfile,
    threshold: f64,
    cross_len: f64,
) -> Option<f64> {
    let (n, tile) = match trunk.dir {
        Orientation::Horizontal => (thermal.rows, thermal.tile_mm),
        Orientation::Vertical => (thermal.cols, thermal.tile_mm),
    };
    let mut candidates: Vec<f64> = (0..n)
        .map(|k| (k as f64 + 0.5) * tile)
        .filter(|&c| c >= 0.0 && c <= cross_len)
        .collect();
    candidates.sort_by(|a, b| {
        let da = (a - trunk.coord).abs();
        let db = (b - trunk.coord).abs();
        da.partial_cmp(&db).unwrap().then(a.partial_cmp(b).unwrap())
    });
    candidates
        .into_iter()
        .find(|&c| thermal.max_along(trunk.dir, c, trunk.span.0, trunk.span.1) <= threshold)
}

/// Access geometry and feasibility of one link on one trunk.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkAccess {
    pub link_id: usize,
    pub trunk_id: usize,
    /// Modulator (driver-side) converter position on the trunk.
    pub mod_pos: Point,
    /// Detector (sink-side) converter position on the trunk.
    pub det_pos: Point,
    /// Electrical stub length: driver to modulator plus detector to sink, mm.
    pub wl_e: f64,
    /// Optical travel along the trunk, mm.
    pub wl_o: f64,
    /// Largest |dT| under either converter, degC.
    pub t_var: f64,
    pub timing_ok: bool,
    /// Thermal and detection feasibility: converters under the temperature
    /// threshold, rings tunable without aliasing, laser budget sufficient.
    pub thermal_ok: bool,
    /// Ring tuning power for both converters, mW.
    pub p_ring: f64,
    /// Laser power spent on path loss, mW.
    pub p_path: f64,
}

impl LinkAccess {
    pub fn feasible(&self) -> bool {
        self.timing_ok && self.thermal_ok
    }
}

pub const TIMING_TOL_PS: f64 = 1e-9;

/// Geometry, delay, and feasibility of routing `link` over `trunk`.
pub fn link_access(
    link: &Link,
    trunk: &Trunk,
    thermal: &ThermalProfile,
    models: &DeviceModels,
) -> LinkAccess {
    let mod_pos = trunk.access_point(&link.driver_pos);
    let det_pos = trunk.access_point(&link.sink_pos);
    access_at(link, trunk, mod_pos, det_pos, thermal, models)
}

/// Same as [`link_access`] with explicit converter positions (used when
/// converters have been perturbed off their ideal projections).
pub fn access_at(
    link: &Link,
    trunk: &Trunk,
    mod_pos: Point,
    det_pos: Point,
    thermal: &ThermalProfile,
    models: &DeviceModels,
) -> LinkAccess {
    let wl_e = link.driver_pos.manhattan(&mod_pos) + link.sink_pos.manhattan(&det_pos);
    let wl_o = (trunk.along(&mod_pos) - trunk.along(&det_pos)).abs();
    let t_var = thermal.lookup(mod_pos.x, mod_pos.y).max(thermal.lookup(det_pos.x, det_pos.y));
    let delay = models.tau_e * wl_e + models.tau_o * wl_o + models.tau_conv;
    let timing_ok = delay <= models.tau_e * link.hpwl + TIMING_TOL_PS;
    let ring = ring_thermal_penalty(t_var, models);
    let loss_db = models.loss_mod_db + models.alpha_wg * wl_o / 10.0;
    let p_path = loss_to_power(loss_db, models).expect("loss is non-negative by construction");
    let thermal_ok = t_var <= models.temp_threshold
        && ring.feasible
        && models.p_det_sense + p_path <= models.p_laser_max;
    LinkAccess {
        link_id: link.id,
        trunk_id: trunk.id,
        mod_pos,
        det_pos,
        wl_e,
        wl_o,
        t_var,
        timing_ok,
        thermal_ok,
        p_ring: ring.p_ring * RINGS_PER_LINK as f64,
        p_path,
    }
}

/// Dense link-major matrix of every (link, trunk) access.
#[derive(Debug, Clone, PartialEq)]
pub struct AccessMatrix {
    pub n_trunks: usize,
    entries: Vec<LinkAccess>,
}

impl AccessMatrix {
    pub fn get(&self, link_id: usize, trunk_id: usize) -> &LinkAccess {
        &self.entries[link_id * self.n_trunks + trunk_id]
    }

    pub fn get_mut(&mut self, link_id: usize, trunk_id: usize) -> &mut LinkAccess {
        &mut self.entries[link_id * self.n_trunks + trunk_id]
    }

    pub fn row(&self, link_id: usize) -> &[LinkAccess] {
        &self.entries[link_id * self.n_trunks..(link_id + 1) * self.n_trunks]
    }
}

/// Evaluate the full access matrix; parallel over links when the `parallel`
/// feature is enabled. Both lanes produce identical results.
pub fn compute_accesses(
    onet: &OpticalNetlist,
    plan: &TrunkPlan,
    thermal: &ThermalProfile,
    models: &DeviceModels,
) -> AccessMatrix {
    let rows = par::map_collect(&onet.links, |link| {
        plan.trunks.iter().map(|t| link_access(link, t, thermal, models)).collect::<Vec<_>>()
    });
    AccessMatrix { n_trunks: plan.trunks.len(), entries: rows.into_iter().flatten().collect() }
}

/// Sequential lane of [`compute_accesses`], always available for
/// benchmarking against the parallel lane.
pub fn compute_accesses_seq(
    onet: &OpticalNetlist,
    plan: &TrunkPlan,
    thermal: &ThermalProfile,
    models: &DeviceModels,
) -> AccessMatrix {
    let rows = par::map_collect_seq(&onet.links, |link| {
        plan.trunks.iter().map(|t| link_access(link, t, thermal, models)).collect::<Vec<_>>()
    });
    AccessMatrix { n_trunks: plan.trunks.len(), entries: rows.into_iter().flatten().collect() }
}

/// All geometric crossings as (horizontal trunk id, vertical trunk id),
/// boundary contact included, ordered by (h, v).
pub fn trunk_crossings(plan: &TrunkPlan) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for h in &plan.trunks {
        if h.dir != Orientation::Horizontal {
            continue;
        }
        for v in &plan.trunks {
            if v.dir != Orientation::Vertical {
                continue;
            }
            if v.coord >= h.span.0 && v.coord <= h.span.1 && h.coord >= v.span.0 && h.coord <= v.span.1 {
                out.push((h.id, v.id));
            }
        }
    }
    out.sort_unstable();
    out
}
