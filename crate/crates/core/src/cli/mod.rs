//! Command-line front end.
//!
//! Exit codes: 0 success, 1 analytics/simulation mismatch, 2 optimizer did
//! not converge, 64 bad usage (including invalid configuration).

pub mod commands;
pub mod output;
pub mod scenario;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::optimizer::NgdConfig;
use crate::protocol::Mechanism;
use commands::{Axis, Context, Method, MobilitySpec, OptimizeSpec, Status, SweepSpec};
use scenario::{Scenario, TopologySpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "uavnoma", version, about = "Outage analysis, simulation and power allocation for UAV-relayed double-uplink NOMA")]
pub struct Cli {
    /// Scenario JSON; omitted keys take their default values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Monte Carlo trials per evaluation point.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long, global = true, value_delimiter = ',', default_value = "adm,d1,d2,d3,d4")]
    pub mechanisms: Vec<Mechanism>,
    /// Lattice points per axis for brute-force search and surfaces.
    #[arg(long, global = true, default_value_t = 101)]
    pub grid: usize,
    /// Redraw user positions from this seed.
    #[arg(long = "random-topology", global = true, value_name = "SEED")]
    pub random_topology: Option<u64>,
    /// Worker threads for Monte Carlo (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    #[value(name = "p_max")]
    PMax,
    Angle,
    Xi,
    #[value(name = "xi_db")]
    XiDb,
    Rate,
    Altitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Ngd,
    Bfs,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare closed-form outage probabilities against Monte Carlo.
    Validate {
        /// Scales both SINR thresholds on the analytic side only (negative control).
        #[arg(long, hide = true, default_value_t = 1.0)]
        tau_scale: f64,
    },
    /// Evaluate outage and throughput along one parameter axis.
    Sweep {
        #[arg(long, value_enum)]
        axis: AxisArg,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        points: usize,
        /// Transmit SNR in dB; sets both power budgets relative to the noise floor.
        #[arg(long, allow_negative_numbers = true)]
        snr_db: Option<f64>,
    },
    /// Optimize and evaluate along a random-waypoint UAV trajectory.
    Mobility {
        #[arg(long, default_value_t = 300)]
        steps: usize,
        /// Also run brute-force search at every location.
        #[arg(long)]
        bfs: bool,
    },
    /// Search the power split that maximizes throughput.
    Optimize {
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 1e-4)]
        eta: f64,
        #[arg(long, default_value_t = 0.0025)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// NGD starting point as `theta1,theta2`.
        #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.5, 0.5])]
        init: Vec<f64>,
        /// Also write the full throughput surface to this CSV.
        #[arg(long, value_name = "PATH")]
        surface: Option<PathBuf>,
    },
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::PMax => Axis::PMax,
            AxisArg::Angle => Axis::Angle,
            AxisArg::Xi => Axis::Xi,
            AxisArg::XiDb => Axis::XiDb,
            AxisArg::Rate => Axis::Rate,
            AxisArg::Altitude => Axis::Altitude,
        }
    }
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Ngd => Method::Ngd,
            MethodArg::Bfs => Method::Bfs,
            MethodArg::Both => Method::Both,
        }
    }
}

fn context(cli: &Cli) -> crate::Result<Context> {
    let mut scenario = match &cli.config {
        Some(p) => Scenario::load(p)?,
        None => Scenario::default(),
    };
    if let Some(seed) = cli.random_topology {
        scenario.topology = TopologySpec::random(seed);
        scenario.validate()?;
    }
    if cli.mechanisms.is_empty() {
        return Err(crate::Error::Config("no mechanisms selected".into()));
    }
    let mut mechanisms = cli.mechanisms.clone();
    mechanisms.sort();
    mechanisms.dedup();
    Ok(Context { scenario, seed: cli.seed, out: cli.out.clone(), workers: cli.workers, mechanisms, grid: cli.grid })
}

fn execute(cli: &Cli) -> crate::Result<Status> {
    let ctx = context(cli)?;
    match &cli.command {
        Command::Validate { tau_scale } => commands::validate(&ctx, cli.trials.unwrap_or(1_000_000), *tau_scale),
        Command::Sweep { axis, from, to, points, snr_db } => commands::sweep(
            &ctx,
            &SweepSpec { axis: (*axis).into(), from: *from, to: *to, points: *points, trials: cli.trials.unwrap_or(0), snr_db: *snr_db },
        ),
        Command::Mobility { steps, bfs } => {
            commands::mobility(&ctx, &MobilitySpec { steps: *steps, trials: cli.trials.unwrap_or(20_000), bfs: *bfs })
        }
        Command::Optimize { method, step, eta, tol, max_iter, init, surface } => {
            let ngd = NgdConfig { step: *step, eta: *eta, tol: *tol, max_iter: *max_iter, initial: (init[0], init[1]) };
            ngd.validate()?;
            commands::optimize(&ctx, &OptimizeSpec { method: (*method).into(), ngd, surface: surface.clone() })
        }
    }
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(Status::Ok) => EXIT_OK,
        Ok(Status::Mismatch) => EXIT_MISMATCH,
        Ok(Status::NotConverged) => EXIT_NOT_CONVERGED,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
