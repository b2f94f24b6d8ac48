//! Seeded instance generators: netlists, thermal maps, and benchmark cases.
//!
//! Derived netlists follow a corridor discipline. The chip is split into
//! vertical bands at least [`BAND_MIN_MM`] wide and every net in a band keeps
//! its pin clusters on one shared horizontal corridor, with the driver's
//! x inside the band and enough of each link overlapping the band to absorb
//! the conversion penalty. The slab scheduler then places a trunk per band at
//! the members' median, which sits on the corridor by construction, so every
//! derived instance is routable once placement reaches the band depth.

use crate::geom::{Orientation, Point};
use crate::ingest::Config;
use crate::ingest::{Net, Netlist};
use crate::ingest::ThermalProfile;
use crate::par;
use crate::placement::{Trunk, TrunkPlan};
use crate::preprocess::{Cluster, Link, OpticalNet, OpticalNetlist};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Narrowest band that can host both one- and two-sided nets with slack to
/// spare: the trunk must overlap each link by enough length that the slower
/// electrical stubs plus the conversion time still beat the all-electrical
/// bound.
pub const BAND_MIN_MM: f64 = 16.0;

/// Trunk overlap required of every generated link, mm. Covers the conversion
/// penalty plus worst-case cross-axis stubs with a few picoseconds to spare.
const COVER_MM: f64 = 6.5;

/// Shortest generated link, mm. Long enough that cluster medians never merge.
const SPAN_MIN_MM: f64 = 7.5;

/// Longest generated link, mm.
const SPAN_MAX_MM: f64 = 13.0;

/// Cross-axis jitter applied to each net's corridor and to blob pins, mm.
const JITTER_MM: f64 = 0.1;

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("netlist must contain at least one net")]
    NoNets,
    #[error("chip {w} x {h} mm is too small to generate on; need at least {min_w} x {min_h}")]
    ChipTooSmall { w: f64, h: f64, min_w: f64, min_h: f64 },
    #[error("pin range [{min}, {max}] is invalid; need 2 <= min <= max")]
    PinRange { min: usize, max: usize },
    #[error("bad thermal parameter: {0}")]
    Thermal(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetlistParams {
    pub nets: usize,
    pub chip_w: f64,
    pub chip_h: f64,
    pub seed: u64,
    pub pins_min: usize,
    pub pins_max: usize,
}

impl Default for NetlistParams {
    fn default() -> Self {
        NetlistParams { nets: 35, chip_w: 64.0, chip_h: 64.0, seed: 0, pins_min: 2, pins_max: 6 }
    }
}

const MIN_CHIP_W: f64 = 16.0;
const MIN_CHIP_H: f64 = 6.0;

fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        lo
    } else {
        lo + rng.gen::<f64>() * (hi - lo)
    }
}

fn jitter(rng: &mut impl Rng) -> f64 {
    uniform(rng, -JITTER_MM, JITTER_MM)
}

/// Number of corridor bands for a chip: the largest power of two that keeps
/// bands at least [`BAND_MIN_MM`] wide, capped so the slab scheduler reaches
/// the band depth within the routers' revision budget.
pub fn band_count(chip_w: f64) -> usize {
    let mut b = 1usize;
    while b < 8 && chip_w / (2 * b) as f64 >= BAND_MIN_MM {
        b *= 2;
    }
    b
}

/// One net on a band corridor. `sides` is 1 for a driver with sinks to the
/// right only, 2 for sinks on both sides; cluster anchors are placed first
/// and any remaining pins join them as jittered blob members.
fn corridor_net(
    rng: &mut ChaCha8Rng,
    id: u32,
    band: (f64, f64),
    corridor_y: f64,
    chip_w: f64,
    npins: usize,
    want_two_sided: bool,
) -> Net {
    let (lo, hi) = band;
    let two_lo = (lo + COVER_MM).max(SPAN_MIN_MM + 0.5);
    let two_hi = (hi - COVER_MM).min(chip_w - SPAN_MIN_MM - 0.5);
    let two_sided = want_two_sided && npins >= 3 && two_hi >= two_lo;

    let (x_lo, x_hi) = if two_sided {
        (two_lo, two_hi)
    } else {
        (lo + 0.5, (hi - COVER_MM).min(chip_w - SPAN_MIN_MM - 0.5))
    };
    let x0 = uniform(rng, x_lo, x_hi);
    let y = corridor_y + jitter(rng);

    let mut anchors = vec![Point::new(x0, y)];
    let s_right = uniform(rng, SPAN_MIN_MM, SPAN_MAX_MM.min(chip_w - 0.5 - x0));
    anchors.push(Point::new(x0 + s_right, y));
    if two_sided {
        let s_left = uniform(rng, SPAN_MIN_MM, SPAN_MAX_MM.min(x0 - 0.5));
        anchors.push(Point::new(x0 - s_left, y));
    }

    // Anchor pins first (driver is pin 0), then blob members round-robin.
    let mut pins = anchors.clone();
    for extra in 0..npins.saturating_sub(anchors.len()) {
        let a = anchors[extra % anchors.len()];
        pins.push(Point::new(a.x + jitter(rng), a.y + jitter(rng)));
    }
    Net { id, driver: 0, pins }
}

/// Generate a corridor-structured netlist. Deterministic in the parameters:
/// the same `NetlistParams` always yields the same netlist.
pub fn derive_netlist(p: &NetlistParams) -> Result<Netlist, GenError> {
    if p.nets == 0 {
        return Err(GenError::NoNets);
    }
    if p.chip_w < MIN_CHIP_W || p.chip_h < MIN_CHIP_H {
        return Err(GenError::ChipTooSmall {
            w: p.chip_w,
            h: p.chip_h,
            min_w: MIN_CHIP_W,
            min_h: MIN_CHIP_H,
        });
    }
    if p.pins_min < 2 || p.pins_min > p.pins_max {
        return Err(GenError::PinRange { min: p.pins_min, max: p.pins_max });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let bands = band_count(p.chip_w);
    let band_w = p.chip_w / bands as f64;
    let corridor_y: Vec<f64> =
        (0..bands).map(|_| uniform(&mut rng, 1.0, p.chip_h - 1.0)).collect();

    let nets = (0..p.nets)
        .map(|i| {
            let b = i % bands;
            let band = (b as f64 * band_w, (b + 1) as f64 * band_w);
            let npins = rng.gen_range(p.pins_min..=p.pins_max);
            let two_sided = npins >= 3 && rng.gen_bool(0.5);
            corridor_net(&mut rng, i as u32, band, corridor_y[b], p.chip_w, npins, two_sided)
        })
        .collect();

    Ok(Netlist { chip_w: p.chip_w, chip_h: p.chip_h, nets })
}

/// The CK1 benchmark shape: 35 nets and 95 pins (25 three-pin nets with
/// sinks on both sides, 10 two-pin nets) on a 64 x 64 mm chip.
pub fn ck1_netlist(seed: u64) -> Netlist {
    let (chip_w, chip_h) = (64.0, 64.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bands = band_count(chip_w);
    let band_w = chip_w / bands as f64;
    let corridor_y: Vec<f64> = (0..bands).map(|_| uniform(&mut rng, 1.0, chip_h - 1.0)).collect();

    let nets = (0..35)
        .map(|i| {
            let b = i % bands;
            let band = (b as f64 * band_w, (b + 1) as f64 * band_w);
            let npins = if i < 25 { 3 } else { 2 };
            corridor_net(&mut rng, i as u32, band, corridor_y[b], chip_w, npins, npins == 3)
        })
        .collect();
    Netlist { chip_w, chip_h, nets }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalParams {
    pub hotspots: usize,
    pub peak: f64,
    pub sigma_mm: f64,
    pub cols: usize,
    pub rows: usize,
    pub tile_mm: f64,
    pub seed: u64,
}

impl Default for ThermalParams {
    fn default() -> Self {
        ThermalParams { hotspots: 3, peak: 2.5, sigma_mm: 4.0, cols: 64, rows: 64, tile_mm: 1.0, seed: 0 }
    }
}

/// Sum-of-Gaussians |dT| map: `hotspots` peaks of amplitude `peak` at seeded
/// positions, evaluated at tile centers and clipped to be non-negative.
/// Zero hotspots yields an all-zero map.
pub fn gen_thermal(p: &ThermalParams) -> Result<ThermalProfile, GenError> {
    if p.cols == 0 || p.rows == 0 {
        return Err(GenError::Thermal("grid must have at least one tile"));
    }
    if !(p.tile_mm > 0.0) || !p.tile_mm.is_finite() {
        return Err(GenError::Thermal("tile size must be positive"));
    }
    if !(p.peak > 0.0) || !p.peak.is_finite() {
        return Err(GenError::Thermal("peak must be positive"));
    }
    if !(p.sigma_mm > 0.0) || !p.sigma_mm.is_finite() {
        return Err(GenError::Thermal("sigma must be positive"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (w, h) = (p.cols as f64 * p.tile_mm, p.rows as f64 * p.tile_mm);
    let centers: Vec<(f64, f64)> =
        (0..p.hotspots).map(|_| (uniform(&mut rng, 0.0, w), uniform(&mut rng, 0.0, h))).collect();

    let inv_2s2 = 1.0 / (2.0 * p.sigma_mm * p.sigma_mm);
    let values = par::map_indexed(p.cols * p.rows, |i| {
        let (col, row) = (i % p.cols, i / p.cols);
        let x = (col as f64 + 0.5) * p.tile_mm;
        let y = (row as f64 + 0.5) * p.tile_mm;
        let v: f64 = centers
            .iter()
            .map(|&(cx, cy)| {
                let d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                p.peak * (-d2 * inv_2s2).exp()
            })
            .sum();
        v.max(0.0)
    });

    Ok(ThermalProfile { cols: p.cols, rows: p.rows, tile_mm: p.tile_mm, values })
}

/// A self-contained routing case: optical netlist, a fixed trunk plan, the
/// thermal map, and the config to route under.
#[derive(Debug, Clone)]
pub struct RouteCase {
    pub onet: OpticalNetlist,
    pub plan: TrunkPlan,
    pub thermal: ThermalProfile,
    pub cfg: Config,
}

fn push_two_pin_net(onet: &mut OpticalNetlist, driver: Point, sinks: &[Point]) {
    let net_index = onet.nets.len();
    let net_id = net_index as u32;
    let mut clusters = vec![Cluster { pins: vec![0], median: driver }];
    for (k, &s) in sinks.iter().enumerate() {
        clusters.push(Cluster { pins: vec![k + 1], median: s });
        onet.links.push(Link {
            id: onet.links.len(),
            net_index,
            net_id,
            driver_pos: driver,
            sink_pos: s,
            hpwl: driver.manhattan(&s),
            sink_cluster: k + 1,
        });
    }
    onet.nets.push(OpticalNet { net_id, driver_cluster: 0, clusters });
}

/// Small seeded case for cross-checking the exact solver against exhaustive
/// enumeration: at most 3 trunks, 3 nets, and 6 links, with every link
/// feasible on its host trunk and capacity for all nets, so the model always
/// has an optimum.
pub fn tiny_case(seed: u64) -> RouteCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chip = 20.0;

    let n_trunks = rng.gen_range(1..=3usize);
    let mut trunks = Vec::new();
    for k in 0..n_trunks {
        let dir = if k == 1 { Orientation::Vertical } else { Orientation::Horizontal };
        trunks.push(Trunk {
            id: 0,
            dir,
            coord: uniform(&mut rng, 4.0, 16.0),
            span: (0.0, chip),
            round: k,
            slab: 0,
        });
    }
    let hosts: Vec<(Orientation, f64)> = trunks.iter().map(|t| (t.dir, t.coord)).collect();
    let plan = TrunkPlan::from_trunks(trunks, chip, chip);

    let mut onet = OpticalNetlist::default();
    let n_nets = rng.gen_range(1..=3usize);
    for _ in 0..n_nets {
        let (dir, coord) = hosts[rng.gen_range(0..hosts.len())];
        let s1 = uniform(&mut rng, 6.5, 12.0);
        let a0 = uniform(&mut rng, 0.5, chip - 0.5 - s1);
        let run = |along: f64, off: f64| match dir {
            Orientation::Horizontal => Point::new(along, off),
            Orientation::Vertical => Point::new(off, along),
        };
        let driver = run(a0, coord + uniform(&mut rng, -0.25, 0.25));
        let mut sinks = vec![run(a0 + s1, coord + uniform(&mut rng, -0.25, 0.25))];
        if rng.gen_bool(0.5) {
            let off = coord + uniform(&mut rng, -0.25, 0.25);
            let s2 = if a0 >= 7.5 {
                -uniform(&mut rng, 6.5, (a0 - 0.5).min(12.0))
            } else {
                uniform(&mut rng, 6.5, chip - 0.5 - a0)
            };
            sinks.push(run(a0 + s2, off));
        }
        push_two_pin_net(&mut onet, driver, &sinks);
    }

    let cfg = Config { c_max: 4, ..Config::default() };
    let thermal = ThermalProfile::uniform(20, 20, 1.0, 0.0);
    RouteCase { onet, plan, thermal, cfg }
}

/// Seeded case with real channel-assignment pressure: a hot full-width trunk
/// the greedy router reaches first, two cool half-width alternatives, and a
/// vertical trunk whose crossings differ by choice. Five trunks, five
/// geometric crossings, and both routers always succeed on the fixed plan.
pub fn crossing_case(seed: u64) -> RouteCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chip = 40.0;

    let trunks = vec![
        Trunk { id: 0, dir: Orientation::Horizontal, coord: 20.0, span: (0.0, chip), round: 0, slab: 0 },
        Trunk { id: 0, dir: Orientation::Horizontal, coord: 22.0, span: (0.0, 20.0), round: 2, slab: 0 },
        Trunk { id: 0, dir: Orientation::Horizontal, coord: 22.0, span: (20.0, chip), round: 2, slab: 1 },
        Trunk { id: 0, dir: Orientation::Vertical, coord: 10.0, span: (0.0, chip), round: 1, slab: 0 },
        Trunk { id: 0, dir: Orientation::Vertical, coord: 30.0, span: (0.0, chip), round: 3, slab: 1 },
    ];
    let plan = TrunkPlan::from_trunks(trunks, chip, chip);

    let mut onet = OpticalNetlist::default();
    for side in 0..4 {
        let x0 = if side < 2 { uniform(&mut rng, 2.0, 4.0) } else { uniform(&mut rng, 22.0, 24.0) };
        let s = uniform(&mut rng, 10.0, 13.0);
        let y = 21.0 + uniform(&mut rng, -0.3, 0.3);
        push_two_pin_net(&mut onet, Point::new(x0, y), &[Point::new(x0 + s, y)]);
    }
    let xv = 10.0 + uniform(&mut rng, -0.2, 0.2);
    let y0 = uniform(&mut rng, 2.0, 4.0);
    let sv = uniform(&mut rng, 10.0, 13.0);
    push_two_pin_net(&mut onet, Point::new(xv, y0), &[Point::new(xv, y0 + sv)]);

    let mut thermal = ThermalProfile::uniform(40, 40, 1.0, 0.0);
    let t_hot = uniform(&mut rng, 2.4, 3.1);
    for col in 0..40 {
        *thermal.at_tile_mut(col, 20) = t_hot;
    }

    RouteCase { onet, plan, thermal, cfg: Config::default() }
}
