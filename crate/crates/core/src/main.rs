use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wadams::cli::{run, Command, Exit, RunConfig};

#[derive(Parser)]
#[command(name = "wadams", version, about = "Weighted Adams inequality toolkit on R^4")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// JSON run config; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Relative quadrature tolerance.
    #[arg(long = "quad-tol", global = true)]
    quad_tol: Option<f64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Structural, A2 and D-condition certificates for the weight.
    CheckWeight,
    /// Extremal-family sweep around the sharp exponent.
    Dichotomy,
    /// Mountain-pass solve with verification.
    Solve,
    /// Pointwise radial bound on a random corpus.
    RadialLemma,
    /// Norms and the Adams functional of given functions.
    Norms,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::CheckWeight => Command::CheckWeight,
        Cmd::Dichotomy => Command::Dichotomy,
        Cmd::Solve => Command::Solve,
        Cmd::RadialLemma => Command::RadialLemma,
        Cmd::Norms => Command::Norms,
    };
    let mut config = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                return ExitCode::from(Exit::ConfigInvalid.code() as u8);
            }
        },
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(t) = cli.quad_tol {
        config.quad.rel_tol = t;
    }
    if let Some(o) = cli.out {
        config.out = Some(o);
    }
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("thread pool: {e}");
            return ExitCode::from(Exit::ConfigInvalid.code() as u8);
        }
    }
    let outcome = run(command, &config);
    println!("{}: {} ({})", command.name(), outcome.exit, outcome.summary);
    for f in &outcome.files {
        println!("  wrote {}", f.display());
    }
    ExitCode::from(outcome.exit.code() as u8)
}
