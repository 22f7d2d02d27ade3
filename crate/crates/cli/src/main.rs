use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rlfm_cli::{load_config, run_sweep, validation_table, Mode};

#[derive(Parser)]
#[command(name = "rlfm", version, about = "Random linear features regression: theory, simulation and spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form errors over the grid
    Theory(Common),
    /// Monte Carlo errors next to the closed forms
    Simulate(Common),
    /// Spectral density of the kernel at each grid point
    Spectrum(Common),
    /// Simulate and report z-scores against the closed forms
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// Sweep config (flat key = value)
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overrides out_dir
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Base seed, overrides seed
    #[arg(long)]
    seed: Option<u64>,
}

fn run(cli: Cli) -> Result<ExitCode> {
    let (mode, args) = match cli.command {
        Command::Theory(a) => (Mode::Theory, a),
        Command::Simulate(a) => (Mode::Simulate, a),
        Command::Spectrum(a) => (Mode::Spectrum, a),
        Command::Validate(a) => (Mode::Validate, a),
    };
    let mut spec = load_config(&args.config)?;
    if let Some(m) = spec.mode {
        if m != mode {
            bail!("{} sets mode = {m} but the '{mode}' command was given", args.config.display());
        }
    }
    spec.mode = Some(mode);
    if let Some(out) = args.out {
        spec.out_dir = out;
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(n) = args.threads {
        if n == 0 {
            bail!("--threads must be >= 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting the worker pool")?;
    }

    let outcome = run_sweep(&spec, mode)?;
    for f in &outcome.files {
        eprintln!("wrote {}", f.display());
    }
    if mode == Mode::Validate {
        print!("{}", validation_table(&outcome.points));
        let failures = outcome.failures();
        let total: usize = outcome.points.iter().map(|p| p.z_scores().iter().flatten().count()).sum();
        println!("{} of {total} comparisons within |z| <= {}", total - failures, rlfm_cli::sweep::Z_LIMIT);
        if failures > 0 {
            return Ok(ExitCode::from(2));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
