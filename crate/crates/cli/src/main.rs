//! ccinterp: coupled cluster single points and amplitude-interpolation
//! experiments along nuclear trajectories.
//!
//! Exit codes: 0 success, 2 usage/config error, 3 numerical failure.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use ccinterp_cli::config::{load_solver_config, parse_node_counts, ExperimentConfig};
use ccinterp_cli::error::{usage, CliResult};
use ccinterp_cli::experiments;

#[derive(Parser)]
#[command(
    name = "ccinterp",
    about = "CCSD amplitude interpolation along nuclear trajectories",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PointArgs {
    /// Geometry file (unit header + "SYMBOL x y z" lines)
    #[arg(long)]
    geometry: PathBuf,
    /// Basis set file
    #[arg(long)]
    basis: PathBuf,
    /// Solver config file ([scf]/[ccsd] sections)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Electron count override (default: neutral molecule)
    #[arg(long)]
    electrons: Option<usize>,
}

#[derive(Args)]
struct StudyArgs {
    /// Trajectory file (geometry block + mode lines)
    #[arg(long)]
    trajectory: PathBuf,
    /// Basis set file
    #[arg(long)]
    basis: PathBuf,
    /// Node counts: "2,4,6" or "2..12:2"
    #[arg(long, default_value = "2..12:2")]
    nodes: String,
    /// Test grid size (equidistant points of [0,1], endpoints included)
    #[arg(long, default_value_t = 50)]
    grid: usize,
    /// Output directory (snapshots, CSV tables, SVG plots)
    #[arg(long)]
    out: PathBuf,
    /// Solver config file
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Single-point restricted Hartree-Fock
    Scf(PointArgs),
    /// Single-point CCSD on top of RHF
    Ccsd {
        #[command(flatten)]
        point: PointArgs,
        /// Disable DIIS acceleration in the CCSD solver
        #[arg(long)]
        no_diis: bool,
    },
    /// Solve and persist snapshots at Chebyshev nodes for each node count
    Offline(StudyArgs),
    /// Exponential-error-decay study (E_MLE vs node count)
    Decay(StudyArgs),
    /// Warm-start study (CCSD iterations: interpolated vs MP2 guess)
    WarmStart(StudyArgs),
    /// Correlation energy reconstructed from interpolated amplitudes
    EnergyCurve(StudyArgs),
    /// Orbital-crossing demonstration (raw vs transformed interpolation)
    CrossingDemo(StudyArgs),
}

fn study_config(args: &StudyArgs) -> CliResult<ExperimentConfig> {
    let solver = load_solver_config(args.config.as_deref()).map_err(usage)?;
    let node_counts = parse_node_counts(&args.nodes).map_err(usage)?;
    let cfg = ExperimentConfig {
        trajectory_path: args.trajectory.clone(),
        basis_path: args.basis.clone(),
        node_counts,
        grid_size: args.grid,
        solver,
        out_dir: args.out.clone(),
    };
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Scf(args) => {
            let cfg = load_solver_config(args.config.as_deref()).map_err(usage)?;
            experiments::run_scf(&args.geometry, &args.basis, args.electrons, &cfg)
        }
        Command::Ccsd { point, no_diis } => {
            let cfg = load_solver_config(point.config.as_deref()).map_err(usage)?;
            experiments::run_ccsd(&point.geometry, &point.basis, point.electrons, &cfg, !no_diis)
        }
        Command::Offline(args) => {
            let cfg = study_config(&args)?;
            experiments::run_offline(&cfg).map(|_| ())
        }
        Command::Decay(args) => experiments::run_decay(&study_config(&args)?),
        Command::WarmStart(args) => experiments::run_warm_start(&study_config(&args)?),
        Command::EnergyCurve(args) => experiments::run_energy_curve(&study_config(&args)?),
        Command::CrossingDemo(args) => {
            experiments::run_crossing_demo(&study_config(&args)?).map(|_| ())
        }
    }
}

fn main() {
    // cap parallelism when requested
    if let Ok(threads) = std::env::var("CCINTERP_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        } else {
            eprintln!("warning: ignoring unparsable CCINTERP_THREADS='{threads}'");
        }
    }
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("{}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}
