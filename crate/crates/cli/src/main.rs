//! `vds`: generate sampling schemes, reconstruct, verify and benchmark from a
//! TOML experiment config.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vds::experiment::{
    cmd_benchmark, cmd_density, cmd_reconstruct, cmd_scheme, cmd_verify, ExperimentConfig,
    Overrides,
};
use vds::VdsError;

#[derive(Parser)]
#[command(name = "vds", version, about = "Variable density sampling toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the target density, row norms and K.
    Density,
    /// Draw one realization of every configured scheme.
    Scheme,
    /// Reconstruct the phantom from every scheme.
    Reconstruct,
    /// Run the invariant suites.
    Verify,
    /// Monte Carlo PSNR table.
    Benchmark,
}

fn exit_code(e: &VdsError) -> u8 {
    match e {
        VdsError::NotConverged { .. } => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<(), VdsError> {
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| VdsError::Config(format!("thread pool: {e}")))?;
    }
    let path = cli
        .config
        .ok_or_else(|| VdsError::Config("--config <path> is required".into()))?;
    let overrides = Overrides {
        seed: cli.seed,
        out: cli.out,
    };
    let cfg = ExperimentConfig::load(&path)?.with_overrides(&overrides);
    match cli.command {
        Command::Density => report(cmd_density(&cfg)?),
        Command::Scheme => report(cmd_scheme(&cfg)?),
        Command::Reconstruct => report(cmd_reconstruct(&cfg)?),
        Command::Verify => {
            let (path, passed) = cmd_verify(&cfg)?;
            println!("{}", path.display());
            if !passed {
                eprintln!("some checks failed, see {}", path.display());
            }
        }
        Command::Benchmark => {
            let path = cmd_benchmark(&cfg)?;
            print!("{}", std::fs::read_to_string(&path)?);
        }
    }
    Ok(())
}

fn report(files: Vec<PathBuf>) {
    for f in files {
        println!("{}", f.display());
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
