use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dicke_vqe_cli::{load_config, run, CliError, Command};

#[derive(Parser)]
#[command(name = "dicke-vqe", version, about = "Polaron-ansatz VQE experiments for the Dicke model")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Experiment config (INI).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides `[run] seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also write the encoded Hamiltonian of the first sweep point.
    #[arg(long, global = true)]
    dump_hamiltonian: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Noiseless VQE over the g/ω and depth grid.
    Sweep,
    /// Shot-based SPSA under scaled noise.
    NoisyVqe,
    /// Joint Wigner tomography of the groundstate.
    Wigner,
    /// Encoded Hamiltonian, circuit and state artifacts.
    Dump,
    /// Exact references and polaron baseline.
    Exact,
}

fn main_inner(cli: &Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => dicke_vqe_cli::ExperimentConfig::parse("")?,
    };
    let cfg = match cli.seed {
        Some(s) => cfg.with_seed(s),
        None => cfg,
    };
    let command = match cli.command {
        Cmd::Sweep => Command::Sweep,
        Cmd::NoisyVqe => Command::NoisyVqe,
        Cmd::Wigner => Command::Wigner,
        Cmd::Dump => Command::Dump,
        Cmd::Exact => Command::Exact,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be ≥ 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Config(e.to_string()))?;
    let files = pool.install(|| run(command, &cfg, &cli.out, cli.dump_hamiltonian))?;
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match main_inner(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
