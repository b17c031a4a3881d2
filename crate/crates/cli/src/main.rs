//! `liouville-blocks`: build partial-secular generators from a JSON
//! scenario, check their number and parity symmetries, and write block,
//! steady-state, trajectory and Gaussian-moment reports.
//!
//! Exit codes: 0 success, 2 invalid config or construction failure (nothing
//! written), 3 numerical failure.

mod config;
mod report;
mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use liouville_blocks::blocks::{block_decompose, block_dim_fermionic};
use liouville_blocks::gaussian::block_dims_gaussian;

use crate::config::ConfigError;

const THREADS_ENV: &str = "LIOUVILLE_BLOCKS_THREADS";

#[derive(Parser)]
#[command(name = "liouville-blocks", version, about = "Block structure of partial-secular Liouvillians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the scenario and write the requested outputs.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Seed for `random_graded` systems.
        #[arg(long)]
        seed: Option<u64>,
        /// Max-norm tolerance for symmetry verdicts.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Print the number/parity commutator norms and the a-priori prediction.
    CheckSymmetry {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Print block dimensions for M fermionic modes and M bosonic modes in
    /// the Gaussian moment picture.
    BlockDims {
        #[arg(long)]
        modes: usize,
    },
}

enum Failure {
    Config(ConfigError),
    Numerical(String),
}

impl Failure {
    fn report(&self) -> ExitCode {
        match self {
            Failure::Config(e) => {
                eprintln!("error: invalid configuration: {e}");
                ExitCode::from(2)
            }
            Failure::Numerical(e) => {
                eprintln!("error: numerical failure: {e}");
                ExitCode::from(3)
            }
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<liouville_blocks::Error> for Failure {
    fn from(e: liouville_blocks::Error) -> Self {
        Failure::Numerical(e.to_string())
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| ConfigError::new(THREADS_ENV, format!("expected a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError::new(THREADS_ENV, e.to_string()))?;
    Ok(())
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(ConfigError::new("--tol", "must be a non-negative number").into());
    }
    Ok(())
}

fn load_scenario(path: &Path, seed: Option<u64>) -> Result<scenario::Scenario, Failure> {
    let cfg = config::load(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    Ok(scenario::build(&cfg, dir, seed)?)
}

fn run(config: &Path, out: &Path, seed: Option<u64>, tol: f64) -> Result<(), Failure> {
    check_tol(tol)?;
    let sc = load_scenario(config, seed)?;
    let output = report::compute(&sc, tol)?;
    let written = report::write_all(&output, out)
        .map_err(|e| Failure::Numerical(format!("cannot write to {}: {e}", out.display())))?;
    for w in &output.report.warnings {
        eprintln!("warning: {w}");
    }
    for name in written {
        println!("{}", out.join(name).display());
    }
    Ok(())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn check_symmetry(config: &Path, seed: Option<u64>, tol: f64) -> Result<(), Failure> {
    check_tol(tol)?;
    let sc = load_scenario(config, seed)?;
    let s = report::symmetry(&sc, tol)?;
    println!("system: {}", sc.system);
    println!(
        "number  ‖[N, L]‖_max = {:.3e}  {}",
        s.number_commutator_norm,
        verdict(s.number_symmetric)
    );
    println!(
        "parity  ‖[P, L]‖_max = {:.3e}  {}",
        s.parity_commutator_norm,
        verdict(s.parity_symmetric)
    );
    if let Some(c) = &s.conditions {
        println!(
            "conditions: single-quantum jumps {}, graded pairs {}, energies resolved {}",
            c.condition_one, c.condition_two, c.energies_resolved
        );
        for [w, wp] in &c.violations {
            println!("  mixed pair at (ω, ω') = ({w:.6}, {wp:.6})");
        }
    }
    let dec = block_decompose(&sc.generator);
    println!("off-block norm = {:.3e}", dec.offblock_norm());
    println!(
        "prediction: number symmetry {} ({})",
        if s.predicted_number_symmetric { "expected" } else { "not expected" },
        s.prediction_reason
    );
    println!(
        "verdict: {}",
        if s.prediction_matches { "consistent with prediction" } else { "differs from prediction" }
    );
    Ok(())
}

fn block_dims(modes: usize) -> Result<(), Failure> {
    if modes == 0 {
        return Err(ConfigError::new("--modes", "must be at least 1").into());
    }
    let m = modes as i32;
    println!("fermionic modes: {modes}");
    let mut total = 0;
    for d in -m..=m {
        let n = block_dim_fermionic(modes, d)?;
        total += n;
        println!("  d = {d:+}: {n}");
    }
    println!("  total: {total}");
    let (pair, number) = block_dims_gaussian(modes);
    println!("gaussian second moments: {modes} bosonic modes");
    println!("  delta = +2: {pair}");
    println!("  delta =  0: {number}");
    println!("  delta = -2: {pair}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Run {
            config,
            out,
            seed,
            tol,
        } => run(config, out, *seed, *tol),
        Command::CheckSymmetry { config, seed, tol } => check_symmetry(config, *seed, *tol),
        Command::BlockDims { modes } => block_dims(*modes),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
