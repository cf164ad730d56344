use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use stateop::{run, Command, Format, RunConfig, Status};
use stateop_core::jc::Tolerances;
use stateop_core::state_ops::DEFAULT_ENUMERATION_BOUND;

/// Check state operators on effect algebras, MV-algebras and matrix models.
#[derive(Parser)]
#[command(name = "stateop", version)]
struct Cli {
    /// Subcommand to run.
    #[arg(value_enum)]
    command: Command,
    /// Effect-algebra or MV-algebra table (JSON).
    #[arg(long)]
    algebra: Option<PathBuf>,
    /// Element map given as `{"tau": [...]}`.
    #[arg(long)]
    tau: Option<PathBuf>,
    /// Hermitian matrix, map on Hermitian matrices, or stochastic matrix.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Projection-valued measure as a list of matrices.
    #[arg(long)]
    pvm: Option<PathBuf>,
    /// Effect used by `luders` and `ks-check`.
    #[arg(long)]
    effect: Option<PathBuf>,
    /// Probability weights, optionally with blocks.
    #[arg(long)]
    prob: Option<PathBuf>,
    /// Partition of the sample space into blocks.
    #[arg(long)]
    blocks: Option<PathBuf>,
    /// Fuzzy event used by `mvce`.
    #[arg(long)]
    event: Option<PathBuf>,
    /// Largest algebra `enumerate` accepts.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BOUND)]
    bound: usize,
    #[arg(long, default_value_t = 1e-9)]
    eps_eq: f64,
    #[arg(long, default_value_t = 1e-9)]
    eps_psd: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !(cli.eps_eq > 0.0 && cli.eps_psd > 0.0) {
        eprintln!("stateop: tolerances must be positive");
        return ExitCode::from(2);
    }
    let config = RunConfig {
        command: cli.command,
        algebra: cli.algebra,
        tau: cli.tau,
        matrix: cli.matrix,
        pvm: cli.pvm,
        effect: cli.effect,
        prob: cli.prob,
        blocks: cli.blocks,
        event: cli.event,
        bound: cli.bound,
        tolerances: Tolerances {
            eps_eq: cli.eps_eq,
            eps_psd: cli.eps_psd,
        },
        seed: cli.seed,
        format: cli.format,
    };
    match run(&config) {
        Ok(output) => {
            print!("{}", output.render(config.format));
            match output.status() {
                Status::Fail => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(err) => {
            eprintln!("stateop: {err}");
            ExitCode::from(2)
        }
    }
}
