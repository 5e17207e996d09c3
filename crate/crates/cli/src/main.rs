use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use flmc_cli::commands::{self, Common};
use flmc_cli::CliError;

/// Fractional Langevin Monte Carlo experiments.
///
/// Exit status: 0 success, 1 invalid flags or configuration, 2 every replica
/// diverged, 3 i/o failure.
#[derive(Parser)]
#[command(name = "flmc", version)]
struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "FLMC_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Universal {
    /// Master seed; overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WithConfig {
    /// Experiment configuration (JSON).
    config: PathBuf,
    #[command(flatten)]
    universal: Universal,
}

#[derive(Subcommand)]
enum Command {
    /// Draw symmetric alpha-stable variates and check their characteristic
    /// function.
    SampleStable {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        universal: Universal,
    },
    /// Run replicas and write trajectories and the suboptimality curve.
    Optimize(WithConfig),
    /// As `optimize` at beta = 1, plus the distance to the Gibbs reference in
    /// one dimension.
    SamplePosterior(WithConfig),
    /// Distance between FLA and the fine-step reference across step sizes.
    WeakError(WithConfig),
    /// Evaluate the suboptimality bound and sweep it over (k, eta).
    Bounds(WithConfig),
    /// Exponent plan for the objective's Hölder exponent.
    Plan(WithConfig),
    /// Probe the objective's certified constants.
    Verify(WithConfig),
}

fn common(u: Universal) -> Common {
    Common {
        seed: u.seed,
        out: u.out,
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::SampleStable {
            alpha,
            scale,
            n,
            universal,
        } => commands::sample_stable(alpha, scale, n, &common(universal)),
        Command::Optimize(c) => commands::optimize(&c.config, &common(c.universal)),
        Command::SamplePosterior(c) => commands::sample_posterior(&c.config, &common(c.universal)),
        Command::WeakError(c) => commands::weak_error(&c.config, &common(c.universal)),
        Command::Bounds(c) => commands::bounds(&c.config, &common(c.universal)),
        Command::Plan(c) => commands::plan(&c.config, &common(c.universal)),
        Command::Verify(c) => commands::verify(&c.config, &common(c.universal)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("{}", CliError::Validation(vec!["--threads must be at least 1".into()]));
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("could not start the thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprint!("error: {e}");
            if !matches!(e, CliError::Validation(_)) {
                eprintln!();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
