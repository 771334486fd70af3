//! `bqec` command line: codeword table, metric sweeps and the channel
//! commutation check.

pub mod codewords;
pub mod commute;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;
pub mod sweep;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ErrorKind, FileConfig, Format, Measure, SweepConfig};
pub use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "bqec", version, about = "Bosonic qubit code numerics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the codeword squeezing values and compare with the reference table.
    Codewords(Options),
    /// Sweep KL cost, Petz or optimal fidelity over a log grid of rates.
    Sweep(Options),
    /// Check that loss and dephasing commute on a random state.
    CommuteCheck(Options),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// JSON file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated subset of kl, petz, opt.
    #[arg(long, value_delimiter = ',')]
    pub measure: Option<Vec<Measure>>,
    #[arg(long)]
    pub error: Option<ErrorKind>,
    #[arg(long)]
    pub gamma_min: Option<f64>,
    #[arg(long)]
    pub gamma_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Fock-space truncation.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated subset of csv, json, svg.
    #[arg(long, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
    /// Allow rates outside the first-order validity windows.
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated state labels (sweep only).
    #[arg(long, value_delimiter = ',')]
    pub states: Option<Vec<String>>,
    /// Loss rate for commute-check.
    #[arg(long)]
    pub gamma_loss: Option<f64>,
    /// Dephasing rate for commute-check.
    #[arg(long)]
    pub gamma_dephasing: Option<f64>,
    /// Highest Kraus index for commute-check.
    #[arg(long)]
    pub j: Option<usize>,
}

impl Options {
    fn flags(&self) -> FileConfig {
        FileConfig {
            measure: self.measure.clone(),
            error: self.error,
            gamma_min: self.gamma_min,
            gamma_max: self.gamma_max,
            points: self.points,
            dim: self.dim,
            out: self.out.clone(),
            format: self.format.clone(),
            force: self.force.then_some(true),
            seed: self.seed,
            states: self.states.clone(),
            gamma_loss: self.gamma_loss,
            gamma_dephasing: self.gamma_dephasing,
            j: self.j,
        }
    }

    /// Flags over file over defaults.
    pub fn merged(&self) -> Result<FileConfig, CliError> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Ok(file.overlay(self.flags()))
    }
}

pub fn run_codewords(opts: &Options) -> Result<(), CliError> {
    let cfg = opts.merged()?;
    let report = codewords::codewords(cfg.dim.unwrap_or(bqec_core::states::DEFAULT_DIM))?;
    print!("{}", report.render());
    if report.all_match() {
        Ok(())
    } else {
        Err(CliError::Solver(format!(
            "solved squeezing differs from the table by more than {}",
            codewords::TABLE_TOL
        )))
    }
}

pub fn run_sweep(opts: &Options) -> Result<(), CliError> {
    let cfg = SweepConfig::resolve(opts.merged()?)?;
    log::info!("sweep {:?} over {} points at dim {}", cfg.measures, cfg.points, cfg.dim);
    let result = sweep::run_sweep(&cfg)?;
    for path in output::write_outputs(&result, &cfg.formats, &cfg.output_dir)? {
        println!("wrote {}", path.display());
    }
    println!(
        "rows {}, max TP residual {:.3e}",
        result.rows.len(),
        result.metadata.max_tp_residual
    );
    let gate = &result.gate;
    match gate.max_change {
        Some(change) => println!(
            "convergence gate at dim {}: max change {:.3e}{} {}",
            gate.dim,
            change,
            gate.worst.as_deref().map(|w| format!(" ({w})")).unwrap_or_default(),
            if gate.passed { "ok" } else { "FAILED" }
        ),
        None => println!("convergence gate at dim {}: FAILED", gate.dim),
    }
    if let Some(note) = &gate.note {
        println!("  {note}");
    }
    for f in &result.failures {
        eprintln!(
            "point failed: {} {} gamma={:e}: {}",
            f.measure, f.state, f.gamma, f.message
        );
    }
    if !result.failures.is_empty() {
        return Err(CliError::Solver(format!(
            "{} sweep points failed",
            result.failures.len()
        )));
    }
    if !gate.passed {
        return Err(CliError::Gate(format!(
            "dim {} -> {} changed a value by {}",
            cfg.dim,
            gate.dim,
            gate.max_change
                .map(|c| format!("{c:.3e}"))
                .unwrap_or_else(|| "n/a".into())
        )));
    }
    Ok(())
}

pub fn run_commute_check(opts: &Options) -> Result<(), CliError> {
    let cfg = opts.merged()?;
    let report = commute::commute_check(
        cfg.gamma_loss.unwrap_or(commute::DEFAULT_GAMMA),
        cfg.gamma_dephasing.unwrap_or(commute::DEFAULT_GAMMA),
        cfg.j.unwrap_or(commute::DEFAULT_J),
        cfg.dim.unwrap_or(commute::DEFAULT_DIM),
        cfg.seed.unwrap_or(0),
    )?;
    print!("{}", report.render());
    if report.passed {
        Ok(())
    } else if !report.converged {
        Err(CliError::Gate(format!(
            "J = {} leaves trace defect {:.3e}",
            report.j, report.trace_defect
        )))
    } else {
        Err(CliError::Gate(format!(
            "distance {:.3e} exceeds {:e}",
            report.distance,
            commute::PASS_DISTANCE
        )))
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Codewords(o) => run_codewords(o),
        Command::Sweep(o) => run_sweep(o),
        Command::CommuteCheck(o) => run_commute_check(o),
    }
}
