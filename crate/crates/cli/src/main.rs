//! `qspec` — audit quadrature rules on model manifolds, compute their
//! heat-kernel spectral ceilings, synthesize point configurations, and print
//! the dimensional exactness constants.

mod commands;
mod errors;
mod rulefile;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "qspec",
    about = "Spectral exactness audits and heat-kernel bounds for quadrature rules on the circle, flat tori, and the 2-sphere",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Audit which Laplacian eigenfunctions a rule integrates exactly.
    Audit {
        /// Rule file (text or JSON).
        rule_file: PathBuf,
        /// Eigenvalue scan cutoff (default: past the count ceiling).
        #[arg(long)]
        lambda_max: Option<f64>,
        /// Exactness tolerance (default 1e-10 · volume).
        #[arg(long)]
        tol: Option<f64>,
        /// Emit machine-readable JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate the Rayleigh spectral ceiling over a diffusion-time grid.
    Bound {
        /// Rule file (text or JSON); weights must sum to the volume.
        rule_file: PathBuf,
        /// Smallest diffusion time (default 1e-4 · vol^{2/d}).
        #[arg(long)]
        t_min: Option<f64>,
        /// Largest diffusion time (default vol^{2/d}).
        #[arg(long)]
        t_max: Option<f64>,
        /// Number of geometric grid samples.
        #[arg(long, default_value_t = 64)]
        t_num: usize,
        /// Audit scan cutoff for the lambda* cross-reference.
        #[arg(long)]
        lambda_max: Option<f64>,
        /// Write the sampled curve as CSV (t,bound).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Emit machine-readable JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Synthesize points by minimizing the Gaussian pairwise energy.
    Optimize {
        /// Manifold: circle, torus:d, or sphere2.
        #[arg(long)]
        manifold: String,
        /// Number of points.
        #[arg(long)]
        n: usize,
        /// Diffusion scale (default vol^{2/d} n^{-2/d} / 8).
        #[arg(long)]
        t: Option<f64>,
        /// Seed of the random initial configuration.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Iteration cap.
        #[arg(long)]
        max_iters: Option<usize>,
        /// Output rule file; the trace goes to <out>.trace.csv.
        #[arg(long)]
        out: PathBuf,
        /// Emit machine-readable JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Print the dimensional exactness constants and ceiling coefficients.
    Constants {
        /// Largest dimension to tabulate.
        #[arg(long, default_value_t = 8)]
        d_max: u32,
        /// Emit machine-readable JSON instead of text.
        #[arg(long)]
        json: bool,
    },
}

fn configure_threads() {
    if let Ok(raw) = std::env::var("QSPEC_THREADS") {
        if let Ok(threads) = raw.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn main() {
    configure_threads();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Audit {
            rule_file,
            lambda_max,
            tol,
            json,
        } => commands::cmd_audit(&rule_file, lambda_max, tol, json),
        Command::Bound {
            rule_file,
            t_min,
            t_max,
            t_num,
            lambda_max,
            out,
            json,
        } => commands::cmd_bound(
            &rule_file,
            t_min,
            t_max,
            t_num,
            lambda_max,
            out.as_deref(),
            json,
        ),
        Command::Optimize {
            manifold,
            n,
            t,
            seed,
            max_iters,
            out,
            json,
        } => commands::cmd_optimize(&manifold, n, t, seed, max_iters, &out, json),
        Command::Constants { d_max, json } => commands::cmd_constants(d_max, json),
    };
    if let Err(err) = result {
        eprintln!("{err}");
        std::process::exit(err.exit_code());
    }
}
