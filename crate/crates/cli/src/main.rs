//! Configuration-driven command line for the walk library.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 constraint-check
//! failure, 3 no real frequency where one was required.

mod config;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_config, Experiment, RepSource, RunConfig};
use runner::Outcome;

const CONFIG_HELP: &str = "\
CONFIG FILE KEYS (flat `key = value` lines, `#` starts a comment):
  experiment            check | evolve | dispersion | doubling | slope | sweep |
                        figure1 | figure-supplemental (required for `run`)
  epsilon               time step = lattice spacing (default 0.1)
  m                     mass (default 1)
  r                     Wilson parameter, any real (default 1)
  rho                   Wilson exponent, must be > 0; doubling needs rho < 1,
                        fast convergence needs rho > 0.5 (default 0.6)
  lambda                Wilson direction, 0 or 2; 1 is rejected by unitarity
                        (default 0)
  variant               wilson | massive-q0 (default wilson)
  rep                   pauli | file:<path> | random:<seed> (default pauli)
  sites                 lattice sites, >= 3 (default 128)
  steps                 evolution steps (default 200)
  grid_points           odd momentum-grid size (default 1001)
  model                 dirac | naive | lgt | dqw — for dispersion, doubling,
                        slope (default dqw)
  epsilons              comma list, strictly decreasing — for doubling, sweep
  out                   output directory (default out)
  tolerance             residual tolerance for check (default 1e-12)
  seed                  seed used by rep = random (default 0)
  initial               packet | delta — for evolve (default packet)
  packet_center_k       packet momentum (default: half the zone edge)
  packet_width_momenta  packet width in lattice-momentum units (default 10)
  branch                plus | minus (default plus)
  require_frequencies   true | false — dispersion fails with exit 3 where the
                        frequency relation has no real solution (default false)

FILE FORMATS:
  dispersion curves     two header lines (model,params), then k,F,f rows
  trajectories          step,site,re_c0..,im_c0..,prob rows
  check report          `name residual pass` lines
  representation file   2 or 3 square matrix blocks separated by blank lines,
                        entries re+imi, `#` comments allowed
";

#[derive(Parser)]
#[command(
    name = "dirac-walk",
    version,
    about = "Unitary quantum-walk discretization of the 1+1D Dirac equation",
    after_long_help = CONFIG_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Configuration file (flat key = value lines; see --help for the keys).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config's `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed override for `rep = random`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Verify all unitarity and algebra constraints (exit 2 on violation).
    Check(CommonArgs),
    /// Evolve an initial state and export the trajectory.
    Evolve(CommonArgs),
    /// Sample a dispersion curve over the Brillouin zone.
    Dispersion(CommonArgs),
    /// Count dispersion zeros and report the raising amplitude.
    Doubling(CommonArgs),
    /// Fit the initial slope of f² against the closed-form prediction.
    Slope(CommonArgs),
    /// Slope-convergence study across an epsilon sweep.
    Sweep(CommonArgs),
    /// Reproduce the four gapless-frequency curves (eps = 0.1, m = 1, r = 1).
    Figure1(CommonArgs),
    /// Same curves at the supplemental parameters (a = 1, m = 0.1, r = 1).
    FigureSupplemental(CommonArgs),
    /// Run whatever experiment the config file names.
    Run(CommonArgs),
}

impl Command {
    fn experiment(&self) -> Option<Experiment> {
        match self {
            Command::Check(_) => Some(Experiment::Check),
            Command::Evolve(_) => Some(Experiment::Evolve),
            Command::Dispersion(_) => Some(Experiment::Dispersion),
            Command::Doubling(_) => Some(Experiment::Doubling),
            Command::Slope(_) => Some(Experiment::Slope),
            Command::Sweep(_) => Some(Experiment::Sweep),
            Command::Figure1(_) => Some(Experiment::Figure1),
            Command::FigureSupplemental(_) => Some(Experiment::FigureSupplemental),
            Command::Run(_) => None,
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Check(a)
            | Command::Evolve(a)
            | Command::Dispersion(a)
            | Command::Doubling(a)
            | Command::Slope(a)
            | Command::Sweep(a)
            | Command::Figure1(a)
            | Command::FigureSupplemental(a)
            | Command::Run(a) => a,
        }
    }
}

fn build_config(cli: &Cli) -> dirac_walk::Result<RunConfig> {
    let args = cli.command.args();
    let mut config = match &args.config {
        Some(path) => parse_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(experiment) = cli.command.experiment() {
        config.experiment = Some(experiment);
    }
    if let Some(out) = &args.out {
        config.out_dir = out.clone();
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
        if let RepSource::RandomConjugated(_) = config.rep_source {
            config.rep_source = RepSource::RandomConjugated(seed);
        }
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(&cli) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match runner::run(&config) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(2),
        Err(e @ dirac_walk::Error::NoRealFrequency { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
