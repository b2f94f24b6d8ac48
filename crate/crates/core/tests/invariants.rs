//! Randomized structural properties of the pipeline. Each block states a
//! rule the implementation must hold for arbitrary inputs; proptest shrinks
//! any counterexample it finds to a minimal reproduction.

use proptest::collection::vec;
use proptest::prelude::*;

use glow_core::cat::cat_route;
use glow_core::check::check_route;
use glow_core::gen::{derive_netlist, gen_thermal, tiny_case, NetlistParams, ThermalParams};
use glow_core::geom::{Orientation, Point};
use glow_core::glow::glow_route;
use glow_core::ilp::{brute_force, solve, IlpModel, Relation, SolveStatus, INT_TOL};
use glow_core::ingest::{
    parse_netlist, parse_thermal, write_netlist, write_thermal, Config, Net, Netlist,
    ThermalProfile,
};
use glow_core::oil::{critical_length, DeviceModels};
use glow_core::placement::{compute_accesses, link_access, place_trunks, Trunk};
use glow_core::postroute::legalize;
use glow_core::preprocess::{build_optical_netlist, Link};

/// Random bounded-integer models small enough for exhaustive certification:
/// up to 5 variables spanning at most 4 values each, up to 6 rows with
/// integer coefficients, so objectives and activities are exact in f64.
fn arb_model() -> impl Strategy<Value = IlpModel> {
    (1usize..=5).prop_flat_map(|nv| {
        let bounds = vec((-2i64..=2, 0i64..=3), nv);
        let objective = vec(-3i64..=3, nv);
        let rows = vec((vec(-3i64..=3, nv), 0usize..3, -6i64..=6), 0..=6);
        (bounds, objective, rows).prop_map(|(bounds, objective, rows)| {
            let mut m = IlpModel::new();
            for (i, &(lo, extent)) in bounds.iter().enumerate() {
                m.add_integer(format!("x{i}"), lo, lo + extent);
            }
            for (i, &c) in objective.iter().enumerate() {
                m.add_objective_term(i, c as f64);
            }
            for (r, (coeffs, rel, rhs)) in rows.into_iter().enumerate() {
                let terms: Vec<(usize, f64)> = coeffs
                    .into_iter()
                    .enumerate()
                    .filter(|&(_, c)| c != 0)
                    .map(|(j, c)| (j, c as f64))
                    .collect();
                if terms.is_empty() {
                    continue;
                }
                let rel = [Relation::Le, Relation::Eq, Relation::Ge][rel];
                m.add_constraint(format!("r{r}"), terms, rel, rhs as f64);
            }
            m
        })
    })
}

/// Nets with arbitrary pin clouds on a 64 mm chip, driver always pin 0.
fn arb_netlist() -> impl Strategy<Value = Netlist> {
    vec(vec((0.0f64..64.0, 0.0f64..64.0), 2..=10), 1..=6).prop_map(|nets| Netlist {
        chip_w: 64.0,
        chip_h: 64.0,
        nets: nets
            .into_iter()
            .enumerate()
            .map(|(i, pins)| Net {
                id: i as u32,
                driver: 0,
                pins: pins.into_iter().map(|(x, y)| Point::new(x, y)).collect(),
            })
            .collect(),
    })
}

fn arb_thermal() -> impl Strategy<Value = ThermalProfile> {
    (1usize..=8, 1usize..=8, 0.25f64..4.0).prop_flat_map(|(cols, rows, tile_mm)| {
        vec(0.0f64..20.0, cols * rows).prop_map(move |values| ThermalProfile {
            cols,
            rows,
            tile_mm,
            values,
        })
    })
}

proptest! {
    /// The tree-search solver and blind enumeration must agree on status and
    /// optimum for every model either can handle.
    #[test]
    fn solver_agrees_with_exhaustive_enumeration(model in arb_model()) {
        let fast = solve(&model, None).expect("model validates");
        let slow = brute_force(&model).expect("search space is tiny");
        prop_assert_eq!(fast.status, slow.status);
        if fast.status == SolveStatus::Optimal {
            let (a, b) = (fast.objective.unwrap(), slow.objective.unwrap());
            prop_assert!((a - b).abs() <= 1e-6, "solver {a} vs enumeration {b}");
            let values = fast.values.as_ref().unwrap();
            prop_assert!(model.is_feasible(values, 1e-6));
            for (v, x) in model.vars.iter().zip(values) {
                prop_assert!(v.integer && (x - x.round()).abs() <= INT_TOL);
            }
        }
    }

    /// Clustering may only emit optical links at or above the break-even
    /// length, and must hand every pin to exactly one cluster of its net.
    #[test]
    fn clustering_respects_the_break_even_floor(netlist in arb_netlist()) {
        let lc = critical_length(&DeviceModels::default()).unwrap();
        let (onet, residual) = build_optical_netlist(&netlist, lc).expect("valid netlist");
        for link in &onet.links {
            let span = (link.driver_pos.x - link.sink_pos.x).abs()
                + (link.driver_pos.y - link.sink_pos.y).abs();
            prop_assert!(span >= lc, "link {} spans {span} under {lc}", link.id);
            prop_assert!(link.hpwl >= lc);
        }
        for net in &onet.nets {
            prop_assert!(!net.clusters.is_empty());
            let source = netlist.nets.iter().find(|n| n.id == net.net_id).unwrap();
            let mut seen = vec![false; source.pins.len()];
            for cluster in &net.clusters {
                for &pin in &cluster.pins {
                    prop_assert!(!seen[pin], "pin {pin} in two clusters");
                    seen[pin] = true;
                }
            }
            prop_assert!(seen.iter().all(|&s| s), "a pin fell out of the clustering");
        }
        // Nets are either optical or residual, never both or neither.
        for net in &netlist.nets {
            let optical = onet.nets.iter().any(|n| n.net_id == net.id);
            prop_assert!(optical != residual.contains(&net.id));
        }
    }

    /// Converter placements stay on their trunk and the stored feasibility
    /// flag matches the timing rule recomputed from raw geometry.
    #[test]
    fn access_geometry_stays_on_the_trunk(
        horizontal in any::<bool>(),
        coord in 0.0f64..64.0,
        lo in 0.0f64..56.0,
        len in 1.0f64..8.0,
        (dx, dy) in (0.0f64..64.0, 0.0f64..64.0),
        (sx, sy) in (0.0f64..64.0, 0.0f64..64.0),
    ) {
        let models = DeviceModels::default();
        let trunk = Trunk {
            id: 0,
            dir: if horizontal { Orientation::Horizontal } else { Orientation::Vertical },
            coord,
            span: (lo, lo + len),
            round: 0,
            slab: 0,
        };
        let driver_pos = Point::new(dx, dy);
        let sink_pos = Point::new(sx, sy);
        let link = Link {
            id: 0,
            net_index: 0,
            net_id: 0,
            driver_pos,
            sink_pos,
            hpwl: driver_pos.manhattan(&sink_pos),
            sink_cluster: 1,
        };
        let thermal = ThermalProfile::uniform(64, 64, 1.0, 0.0);
        let a = link_access(&link, &trunk, &thermal, &models);

        for p in [a.mod_pos, a.det_pos] {
            let (fixed, along) = if horizontal { (p.y, p.x) } else { (p.x, p.y) };
            prop_assert_eq!(fixed, coord);
            prop_assert!(along >= lo && along <= lo + len);
        }
        prop_assert!(a.wl_e >= 0.0 && a.wl_o >= 0.0);
        prop_assert!(a.wl_o <= len + 1e-12);

        let wl_e = driver_pos.manhattan(&a.mod_pos) + sink_pos.manhattan(&a.det_pos);
        let wl_o = if horizontal {
            (a.mod_pos.x - a.det_pos.x).abs()
        } else {
            (a.mod_pos.y - a.det_pos.y).abs()
        };
        let delay = models.tau_e * wl_e + models.tau_o * wl_o + models.tau_conv;
        prop_assert_eq!(a.timing_ok, delay <= models.tau_e * link.hpwl + 1e-9);
    }

    /// Writing any netlist or thermal map and parsing it back is identity.
    #[test]
    fn file_formats_roundtrip(netlist in arb_netlist(), thermal in arb_thermal()) {
        prop_assert_eq!(parse_netlist(&write_netlist(&netlist)).unwrap(), netlist);
        prop_assert_eq!(parse_thermal(&write_thermal(&thermal)).unwrap(), thermal);
    }

    /// Derivation is a pure function of its parameters.
    #[test]
    fn derivation_is_deterministic(nets in 1usize..=24, seed in any::<u64>()) {
        let params = NetlistParams { nets, seed, ..NetlistParams::default() };
        let a = derive_netlist(&params).unwrap();
        let b = derive_netlist(&params).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.nets.len(), nets);
        let pins: usize = a.nets.iter().map(|n| n.pins.len()).sum();
        prop_assert!(pins >= 2 * nets && pins <= 6 * nets);
        for net in &a.nets {
            for p in &net.pins {
                prop_assert!(p.x >= 0.0 && p.x <= a.chip_w && p.y >= 0.0 && p.y <= a.chip_h);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Both routers produce checker-clean assignments on derived instances,
    /// before and after converter legalization.
    #[test]
    fn routed_assignments_survive_the_independent_checker(
        nets in 2usize..=10,
        seed in any::<u64>(),
        hotspots in 0usize..=3,
        peak in 0.0f64..1.0,
    ) {
        let cfg = Config::default();
        let netlist = derive_netlist(&NetlistParams { nets, seed, ..NetlistParams::default() })
            .unwrap();
        let thermal = gen_thermal(&ThermalParams {
            hotspots,
            peak,
            cols: 64,
            rows: 64,
            seed,
            ..ThermalParams::default()
        })
        .unwrap();
        let lc = critical_length(&cfg.models).unwrap();
        let (onet, _residual) = build_optical_netlist(&netlist, lc).unwrap();
        let plan = place_trunks(&onet, &thermal, 64.0, 64.0, &cfg).unwrap();
        let acc = compute_accesses(&onet, &plan, &thermal, &cfg.models);

        let cat = cat_route(&onet, &plan, &acc, &thermal, &cfg).expect("greedy routes");
        let glow = glow_route(&onet, &plan, &acc, &thermal, &cfg, None).expect("exact routes");
        for routed in [cat, glow] {
            let before = check_route(
                &routed.assignment, &onet, &routed.plan, &routed.accesses,
                &thermal, &cfg.models, cfg.c_max, None,
            );
            prop_assert!(before.is_empty(), "{:?}", before);
            let leg = legalize(
                &routed.assignment, &onet, &routed.plan, &routed.accesses, &thermal, &cfg,
            )
            .expect("legalization preserves routability");
            let after = check_route(
                &leg.assignment, &onet, &routed.plan, &leg.accesses,
                &thermal, &cfg.models, cfg.c_max, Some(cfg.min_ring_pitch),
            );
            prop_assert!(after.is_empty(), "{:?}", after);
        }
    }

    /// Power totals decompose exactly and repeat bitwise across runs.
    #[test]
    fn power_reports_decompose_exactly_and_repeat(seed in any::<u64>()) {
        let case = tiny_case(seed);
        let acc = compute_accesses(&case.onet, &case.plan, &case.thermal, &case.cfg.models);
        let first = glow_route(&case.onet, &case.plan, &acc, &case.thermal, &case.cfg, None)
            .expect("tiny cases route");
        let again = glow_route(&case.onet, &case.plan, &acc, &case.thermal, &case.cfg, None)
            .expect("tiny cases route");
        let r = &first.report;
        prop_assert_eq!(
            r.p_total,
            r.p_cross + r.p_trunk_thm + r.p_ring_thm + r.p_path + r.p_dynamic
        );
        prop_assert_eq!(r.p_total, again.report.p_total);
        prop_assert_eq!(&first.assignment, &again.assignment);
    }
}
