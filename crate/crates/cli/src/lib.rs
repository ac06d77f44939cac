//! Command-line front end: config parsing, sweep runners and CSV emitters.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::ExperimentConfig;
pub use error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Sweep,
    NoisyVqe,
    Wigner,
    Dump,
    Exact,
}

/// Runs `command` and writes its artifacts into `out`; returns the files
/// written, in order.
pub fn run(command: Command, cfg: &ExperimentConfig, out: &Path, dump_hamiltonian: bool) -> Result<Vec<PathBuf>, CliError> {
    let (hash, seed) = (cfg.hash.as_str(), cfg.seed);
    let mut written = Vec::new();
    match command {
        Command::Sweep => {
            let t = commands::sweep(cfg)?;
            written.push(t.write(out, &format!("{}_sweep.csv", cfg.name), hash, seed)?);
        }
        Command::NoisyVqe => {
            let runs = commands::noisy_runs(cfg)?;
            let (all, bands) = commands::noisy_tables(&runs);
            written.push(all.write(out, &format!("{}_noisy_vqe.csv", cfg.name), hash, seed)?);
            written.push(bands.write(out, &format!("{}_noisy_bands.csv", cfg.name), hash, seed)?);
        }
        Command::Wigner => {
            let w = commands::wigner(cfg)?;
            for (d, t) in &w.fields {
                written.push(t.write(out, &format!("{}_wigner_d{d}.csv", cfg.name), hash, seed)?);
            }
            written.push(w.errors.write(out, &format!("{}_wigner_error.csv", cfg.name), hash, seed)?);
        }
        Command::Exact => {
            let t = commands::exact(cfg)?;
            written.push(t.write(out, &format!("{}_exact.csv", cfg.name), hash, seed)?);
        }
        Command::Dump => {
            let d = commands::dump(cfg)?;
            fs::create_dir_all(out)?;
            for (file, bytes) in [
                ("hamiltonian.txt", d.hamiltonian.into_bytes()),
                ("circuit.txt", d.circuit.into_bytes()),
                ("state.bin", d.state),
            ] {
                let p = out.join(file);
                fs::write(&p, bytes)?;
                written.push(p);
            }
            return Ok(written);
        }
    }
    if dump_hamiltonian {
        written.push(commands::write_hamiltonian(cfg, out)?);
    }
    Ok(written)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    ExperimentConfig::parse(&text)
}
