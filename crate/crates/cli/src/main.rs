use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use exprk::config::{self, Need};
use exprk::emit;
use exprk::pipeline;
use exprk::CliError;

#[derive(Parser)]
#[command(name = "exprk", version, about = "Exponential integrator experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config file (TOML)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory; overrides EXPRK_OUT_DIR
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads for the study runner
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Base seed filling in omitted config seeds
    #[arg(long, global = true, value_name = "INT", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Print phi_k values against the quadrature oracle
    Phi(PhiArgs),
    /// Run a step-size convergence study
    Converge,
    /// Run a split-defect decay study
    Defect,
    /// Integrate once and write the state
    Solve,
}

#[derive(Args)]
struct PhiArgs {
    /// Order k of the phi function
    #[arg(long)]
    k: usize,

    /// Single argument; omit for a sweep
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["z_min", "z_max", "count"])]
    z: Option<f64>,

    /// Sweep start
    #[arg(long, allow_hyphen_values = true, default_value_t = -10.0)]
    z_min: f64,

    /// Sweep end
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    z_max: f64,

    /// Sweep points
    #[arg(long, default_value_t = 11)]
    count: usize,
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        // a second build_global in one process is harmless, keep the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    match &cli.command {
        Command::Phi(args) => pipeline::run_phi(args.k, args.z, args.z_min, args.z_max, args.count),
        Command::Converge => {
            let resolved = load(cli, Need::Converge)?;
            let dir = out_dir(cli, &resolved);
            pipeline::run_converge(&resolved, &dir)
        }
        Command::Defect => {
            let resolved = load(cli, Need::Defect)?;
            let dir = out_dir(cli, &resolved);
            pipeline::run_defect(&resolved, &dir)
        }
        Command::Solve => {
            let resolved = load(cli, Need::Solve)?;
            let dir = out_dir(cli, &resolved);
            pipeline::run_solve(&resolved, &dir)
        }
    }
}

fn load(cli: &Cli, need: Need) -> Result<config::Resolved, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("missing required --config <PATH>".into()))?;
    let (file, hash) = config::load(path)?;
    config::resolve(&file, &hash, cli.seed, need)
}

fn out_dir(cli: &Cli, resolved: &config::Resolved) -> PathBuf {
    let config_dir = resolved
        .echo
        .output
        .as_ref()
        .and_then(|o| o.dir.as_deref());
    emit::resolve_out_dir(cli.out.as_deref(), config_dir)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
