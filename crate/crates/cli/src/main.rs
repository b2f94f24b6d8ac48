//! Command-line driver: route netlists, derive synthetic netlists, and
//! generate thermal maps. Failures print a JSON error block on stderr and
//! exit 1 (routing), 2 (bad input), or 3 (solver timeout).

use clap::{Args, Parser, Subcommand, ValueEnum};
use glow_core::gen::{derive_netlist, gen_thermal, GenError, NetlistParams, ThermalParams};
use glow_core::ingest::{write_netlist, write_report, write_thermal};
use glow_core::pipeline::{run_route, Algo, FailureKind, RouteError, RouteInputs};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(name = "glow", version, about = "Photonic WDM trunk routing toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Route a netlist and write the power report.
    Route(RouteArgs),
    /// Generate a seeded corridor-structured netlist.
    Derive(DeriveArgs),
    /// Generate a seeded sum-of-Gaussians thermal map.
    GenThermal(GenThermalArgs),
}

#[derive(Copy, Clone, ValueEnum)]
enum AlgoArg {
    /// Greedy channel assignment in trunk creation order.
    Cat,
    /// Exact channel assignment by integer programming.
    Glow,
}

#[derive(Args)]
struct RouteArgs {
    /// Channel assignment algorithm.
    #[arg(long, value_enum)]
    algo: AlgoArg,
    /// Electrical netlist file.
    #[arg(long)]
    netlist: PathBuf,
    /// Thermal variation map file.
    #[arg(long)]
    thermal: PathBuf,
    /// Optional `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the solved model as an LP file (glow only).
    #[arg(long, value_name = "FILE")]
    export_lp: Option<PathBuf>,
    /// Exact solve time budget in seconds.
    #[arg(long, value_name = "SECONDS")]
    time_limit: Option<f64>,
}

#[derive(Args)]
struct DeriveArgs {
    /// Number of nets to generate.
    #[arg(long)]
    nets: usize,
    /// Chip width and height in mm.
    #[arg(long = "chip-mm", num_args = 2, value_names = ["W", "H"], default_values_t = [64.0, 64.0])]
    chip_mm: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fewest pins per net.
    #[arg(long, default_value_t = 2)]
    pins_min: usize,
    /// Most pins per net.
    #[arg(long, default_value_t = 6)]
    pins_max: usize,
    /// Netlist destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenThermalArgs {
    /// Number of Gaussian hotspots.
    #[arg(long, default_value_t = 3)]
    hotspots: usize,
    /// Hotspot amplitude, degrees C of |dT|.
    #[arg(long, default_value_t = 2.5)]
    peak: f64,
    /// Gaussian radius, mm.
    #[arg(long, default_value_t = 4.0)]
    sigma: f64,
    /// Grid size in tiles.
    #[arg(long, num_args = 2, value_names = ["COLS", "ROWS"], default_values_t = [64, 64])]
    grid: Vec<usize>,
    /// Tile edge, mm.
    #[arg(long, default_value_t = 1.0)]
    tile_mm: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Map destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    kind: FailureKind,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { kind: FailureKind::Input, message: message.into() }
    }

    fn exit_code(&self) -> u8 {
        match self.kind {
            FailureKind::Routing => 1,
            FailureKind::Input => 2,
            FailureKind::Timeout => 3,
        }
    }

    fn block(&self) -> String {
        let kind = match self.kind {
            FailureKind::Input => "input",
            FailureKind::Routing => "routing",
            FailureKind::Timeout => "timeout",
        };
        serde_json::json!({ "error": { "kind": kind, "message": self.message } }).to_string()
    }
}

impl From<RouteError> for Failure {
    fn from(e: RouteError) -> Self {
        Failure { kind: e.kind(), message: e.to_string() }
    }
}

impl From<GenError> for Failure {
    fn from(e: GenError) -> Self {
        Failure::input(e.to_string())
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_route(args: &RouteArgs) -> Result<(), Failure> {
    let netlist = read_input(&args.netlist)?;
    let thermal = read_input(&args.thermal)?;
    let config = args.config.as_deref().map(read_input).transpose()?;

    let time_limit = match args.time_limit {
        Some(s) if !(s.is_finite() && s >= 0.0) => {
            return Err(Failure::input(format!("time limit must be a non-negative number of seconds, got {s}")));
        }
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    let algo = match args.algo {
        AlgoArg::Cat => Algo::Cat,
        AlgoArg::Glow => Algo::Glow,
    };

    let inputs =
        RouteInputs { netlist: &netlist, thermal: &thermal, config: config.as_deref() };
    let outcome = run_route(&inputs, algo, time_limit, args.export_lp.is_some())?;

    if let (Some(path), Some(lp)) = (args.export_lp.as_deref(), outcome.lp.as_deref()) {
        emit(Some(path), lp)?;
    }
    emit(args.out.as_deref(), &write_report(&outcome.report))
}

fn cmd_derive(args: &DeriveArgs) -> Result<(), Failure> {
    let netlist = derive_netlist(&NetlistParams {
        nets: args.nets,
        chip_w: args.chip_mm[0],
        chip_h: args.chip_mm[1],
        seed: args.seed,
        pins_min: args.pins_min,
        pins_max: args.pins_max,
    })?;
    emit(args.out.as_deref(), &write_netlist(&netlist))
}

fn cmd_gen_thermal(args: &GenThermalArgs) -> Result<(), Failure> {
    let map = gen_thermal(&ThermalParams {
        hotspots: args.hotspots,
        peak: args.peak,
        sigma_mm: args.sigma,
        cols: args.grid[0],
        rows: args.grid[1],
        tile_mm: args.tile_mm,
        seed: args.seed,
    })?;
    emit(args.out.as_deref(), &write_thermal(&map))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Route(args) => cmd_route(args),
        Cmd::Derive(args) => cmd_derive(args),
        Cmd::GenThermal(args) => cmd_gen_thermal(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{}", failure.block());
            ExitCode::from(failure.exit_code())
        }
    }
}
