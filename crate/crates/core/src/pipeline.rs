//! End-to-end routing flow shared by the command-line driver and the tests:
//! parse, cluster, place, assign channels, legalize, and price.

use crate::cat::{cat_route, CatError};
use crate::glow::{build_ilp, glow_route, GlowError};
use crate::ilp::export_lp;
use crate::ingest::{parse_config, Config};
use crate::ingest::parse_netlist;
use crate::ingest::parse_thermal;
use crate::ingest::ParseError;
use crate::oil::{critical_length, OilError};
use crate::placement::{compute_accesses, place_trunks, PlacementError};
use crate::postroute::{legalize, PostrouteError};
use crate::power::{compute_power, PowerError, PowerReport, Routed};
use crate::preprocess::{build_optical_netlist, PreprocessError};
use std::time::Duration;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Cat,
    Glow,
}

impl std::str::FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cat" => Ok(Algo::Cat),
            "glow" => Ok(Algo::Glow),
            other => Err(format!("unknown algorithm `{other}`; expected `cat` or `glow`")),
        }
    }
}

/// Failure class; callers map this to a process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    /// Malformed or inconsistent inputs.
    Input,
    /// Inputs were fine but no legal routing was produced.
    Routing,
    /// The exact solver ran out of time.
    Timeout,
}

#[derive(Debug, Error)]
pub enum RouteError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("thermal grid covers {grid_w} x {grid_h} mm but the chip is {chip_w} x {chip_h} mm")]
    ThermalCoverage { grid_w: f64, grid_h: f64, chip_w: f64, chip_h: f64 },
    #[error("LP export only applies to the glow algorithm")]
    LpWithCat,
    #[error(transparent)]
    Oil(#[from] OilError),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    Cat(#[from] CatError),
    #[error(transparent)]
    Glow(#[from] GlowError),
    #[error(transparent)]
    Postroute(#[from] PostrouteError),
    #[error(transparent)]
    Power(#[from] PowerError),
}

impl RouteError {
    pub fn kind(&self) -> FailureKind {
        match self {
            RouteError::Parse(_)
            | RouteError::ThermalCoverage { .. }
            | RouteError::LpWithCat
            | RouteError::Oil(_)
            | RouteError::Preprocess(_) => FailureKind::Input,
            RouteError::Glow(GlowError::Timeout { .. }) => FailureKind::Timeout,
            _ => FailureKind::Routing,
        }
    }
}

/// Raw input texts for one routing run.
#[derive(Debug, Clone, Copy)]
pub struct RouteInputs<'a> {
    pub netlist: &'a str,
    pub thermal: &'a str,
    /// `None` runs with every knob at its default.
    pub config: Option<&'a str>,
}

#[derive(Debug, Clone)]
pub struct RouteOutcome {
    /// Final routed state after legalization; `None` when every net stayed
    /// electrical and there was nothing to route.
    pub routed: Option<Routed>,
    pub report: PowerReport,
    /// Ids of nets left fully electrical by clustering.
    pub residual_nets: Vec<u32>,
    /// Converters legalization nudged off their ideal positions.
    pub moved: usize,
    /// Links legalization moved to a different trunk.
    pub reassigned: usize,
    /// LP rendering of the solved model, when requested.
    pub lp: Option<String>,
}

fn zero_report() -> PowerReport {
    PowerReport {
        trunk_count: 0,
        channel_count: 0,
        avg_channels_per_trunk: 0.0,
        total_trunk_length_mm: 0.0,
        p_cross: 0.0,
        p_trunk_thm: 0.0,
        p_ring_thm: 0.0,
        p_path: 0.0,
        p_dynamic: 0.0,
        p_total: 0.0,
    }
}

/// Route a netlist end to end and return the priced result.
///
/// `want_lp` additionally renders the exact solver's model as an LP file and
/// is only valid with [`Algo::Glow`].
pub fn run_route(
    inputs: &RouteInputs,
    algo: Algo,
    time_limit: Option<Duration>,
    want_lp: bool,
) -> Result<RouteOutcome, RouteError> {
    if want_lp && algo == Algo::Cat {
        return Err(RouteError::LpWithCat);
    }

    let netlist = parse_netlist(inputs.netlist)?;
    let thermal = parse_thermal(inputs.thermal)?;
    let cfg = match inputs.config {
        Some(text) => parse_config(text)?,
        None => Config::default(),
    };
    cfg.models.validate()?;
    if !thermal.covers(netlist.chip_w, netlist.chip_h) {
        return Err(RouteError::ThermalCoverage {
            grid_w: thermal.cols as f64 * thermal.tile_mm,
            grid_h: thermal.rows as f64 * thermal.tile_mm,
            chip_w: netlist.chip_w,
            chip_h: netlist.chip_h,
        });
    }

    let l_crit = critical_length(&cfg.models)?;
    let (onet, residual_nets) = build_optical_netlist(&netlist, l_crit)?;
    if onet.links.is_empty() {
        return Ok(RouteOutcome {
            routed: None,
            report: zero_report(),
            residual_nets,
            moved: 0,
            reassigned: 0,
            lp: want_lp.then(|| export_lp(&crate::ilp::IlpModel::default())),
        });
    }

    let plan = place_trunks(&onet, &thermal, netlist.chip_w, netlist.chip_h, &cfg)?;
    let accesses = compute_accesses(&onet, &plan, &thermal, &cfg.models);
    let routed = match algo {
        Algo::Cat => cat_route(&onet, &plan, &accesses, &thermal, &cfg)?,
        Algo::Glow => glow_route(&onet, &plan, &accesses, &thermal, &cfg, time_limit)?,
    };

    let lp = if want_lp {
        let gm = build_ilp(
            &onet,
            &routed.plan,
            &routed.accesses,
            &thermal,
            &cfg.models,
            cfg.c_max,
        )?;
        Some(export_lp(&gm.model))
    } else {
        None
    };

    let lg = legalize(
        &routed.assignment,
        &onet,
        &routed.plan,
        &routed.accesses,
        &thermal,
        &cfg,
    )?;
    let report = compute_power(
        &lg.assignment,
        &onet,
        &routed.plan,
        &lg.accesses,
        &thermal,
        &cfg.models,
        cfg.c_max,
    )?;

    Ok(RouteOutcome {
        routed: Some(Routed {
            plan: routed.plan,
            accesses: lg.accesses,
            assignment: lg.assignment,
            report: report.clone(),
        }),
        report,
        residual_nets,
        moved: lg.moved,
        reassigned: lg.reassigned,
        lp,
    })
}
