//! Command-line driver: synthesize measurements, run reconstruction
//! sweeps, print the ill-posedness demonstration, and self-check the
//! numerical core.

mod check;
mod config;
mod demo;
mod reconstruct;
mod synth;

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "deautoconv",
    version,
    about = "Regularized inversion of kernel-weighted complex autoconvolution data"
)]
struct Cli {
    /// JSON run configuration (grid, kernel, pulse, noise, solver).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides output_dir from the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Noise seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for candidate-weight sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize a measurement directory from the configured pulse.
    Synth,
    /// Reconstruct a signal from a measurement directory.
    Reconstruct {
        /// Measurement directory (a_hat.csv, y_delta.csv, meta.json).
        measurement: Option<PathBuf>,
        /// Replay a recorded iteration trace through the stopping rule
        /// instead of solving.
        #[arg(long)]
        replay_trace: Option<PathBuf>,
    },
    /// Tabulate the local ill-posedness demonstration and the global
    /// sign ambiguity.
    DemoIllposed {
        /// Norm of every perturbation in the family.
        #[arg(long, default_value_t = 0.1)]
        r: f64,
        /// Comma-separated singularity exponents in (0, 0.5).
        #[arg(long, default_value = "0.3,0.4,0.45,0.49")]
        betas: String,
        /// Grid resolution of the demonstration.
        #[arg(long, default_value_t = 2001)]
        n_points: usize,
    },
    /// Run the built-in numerical self-checks (exit 0 iff all pass).
    Check,
}

fn main() -> Result<()> {
    let cli = Cli::parse();

    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        // A later global-pool initialization (e.g. in tests) is the only
        // way this errs; the sweep still runs, just on the default pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }

    match cli.cmd {
        Cmd::Synth => synth::run(cli.config.as_deref(), cli.out.as_deref(), cli.seed),
        Cmd::Reconstruct { measurement, replay_trace } => reconstruct::run(
            measurement.as_deref(),
            replay_trace.as_deref(),
            cli.config.as_deref(),
            cli.out.as_deref(),
        ),
        Cmd::DemoIllposed { r, betas, n_points } => {
            demo::run(r, &betas, n_points, cli.out.as_deref())
        }
        Cmd::Check => check::run(),
    }
}
