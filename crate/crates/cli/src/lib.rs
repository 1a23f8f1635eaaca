//! Batch front end for building, verifying and simulating observer chains.
//!
//! Exit codes: 0 success, 1 failed verification, 2 usage or config schema,
//! 3 construction, 4 I/O.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

pub mod config;
pub mod error;
pub mod pipeline;

use config::ExperimentConfig;
pub use error::CliError;
use pipeline::{
    emit_json, simulate, summarize, sweep_row, verify, write_csv, write_sweep_csv, Instance, Summary, SweepParam,
    VerificationReport, REPORT_VERSION,
};
use qchain_core::sim::ConsensusReport;

#[derive(Debug, Parser)]
#[command(name = "qchain", version, about = "Build, verify and simulate distributed coherent observer chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Experiment config (JSON).
    pub config: PathBuf,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct the realization and print its summary.
    Build {
        #[command(flatten)]
        common: Common,
        /// Print the canonical form of the config instead of the summary.
        #[arg(long)]
        emit_config: bool,
    },
    /// Run the full check suite.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Multiplies every check tolerance.
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
    },
    /// Simulate and report time-averaged consensus.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Directory for timeseries.csv and report.json.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Keep every k-th sample in the CSV.
        #[arg(long, default_value_t = 1)]
        csv_stride: usize,
    },
    /// Vary one gain and tabulate the certificate and consensus error.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `mu_1`, `mu_2`, ...
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
    },
}

#[derive(Debug, Serialize)]
struct BuildReport<'a> {
    report_version: u32,
    command: &'static str,
    config: &'a ExperimentConfig,
    summary: Summary,
}

#[derive(Debug, Serialize)]
struct VerifyReport<'a> {
    report_version: u32,
    command: &'static str,
    config: &'a ExperimentConfig,
    seed: u64,
    tolerance_scale: f64,
    verification: &'a VerificationReport,
}

#[derive(Debug, Serialize)]
pub struct RunReport<'a> {
    pub report_version: u32,
    pub command: &'static str,
    pub config: &'a ExperimentConfig,
    pub seed: u64,
    pub summary: Summary,
    pub verification: VerificationReport,
    pub consensus: ConsensusReport,
    pub sample_dt: f64,
    pub timeseries_csv: Option<PathBuf>,
}

fn load(common: &Common) -> Result<(ExperimentConfig, u64), CliError> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    let seed = cfg.seed;
    Ok((cfg, seed))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Build { common, emit_config } => {
            let (cfg, _) = load(&common)?;
            let inst = Instance::build(&cfg)?;
            if emit_config {
                return emit_json(&cfg, common.out.as_deref());
            }
            let report = BuildReport { report_version: REPORT_VERSION, command: "build", config: &cfg, summary: summarize(&inst) };
            emit_json(&report, common.out.as_deref())
        }
        Command::Verify { common, tolerance_scale } => {
            if !(tolerance_scale > 0.0 && tolerance_scale.is_finite()) {
                return Err(CliError::Usage(format!("--tolerance-scale must be positive, got {tolerance_scale}")));
            }
            let (cfg, seed) = load(&common)?;
            let inst = Instance::build(&cfg)?;
            let verification = verify(&inst, seed, tolerance_scale);
            for c in &verification.checks {
                log::info!("{:<20} {} residual {:.3e} tol {:.1e}", c.name, if c.passed { "ok" } else { "FAIL" }, c.residual, c.tolerance);
            }
            let report = VerifyReport {
                report_version: REPORT_VERSION,
                command: "verify",
                config: &cfg,
                seed,
                tolerance_scale,
                verification: &verification,
            };
            emit_json(&report, common.out.as_deref())?;
            if verification.passed {
                Ok(())
            } else {
                Err(CliError::Verification { failed: verification.failed() })
            }
        }
        Command::Simulate { common, csv, csv_stride } => {
            if csv_stride == 0 {
                return Err(CliError::Usage("--csv-stride must be at least 1".into()));
            }
            let (cfg, seed) = load(&common)?;
            let inst = Instance::build(&cfg)?;
            let (consensus, ts) = simulate(&inst)?;
            let csv_path = match &csv {
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
                    let path = dir.join("timeseries.csv");
                    write_csv(&ts, &path, csv_stride)?;
                    Some(path)
                }
                None => None,
            };
            let passed = consensus.passed;
            let report = RunReport {
                report_version: REPORT_VERSION,
                command: "simulate",
                config: &cfg,
                seed,
                summary: summarize(&inst),
                verification: verify(&inst, seed, 1.0),
                consensus,
                sample_dt: inst.sample_dt(),
                timeseries_csv: csv_path,
            };
            let out = common.out.clone().or_else(|| csv.as_ref().map(|d| d.join("report.json")));
            emit_json(&report, out.as_deref())?;
            if passed {
                Ok(())
            } else {
                Err(CliError::Verification { failed: vec!["consensus".into()] })
            }
        }
        Command::Sweep { common, param, values } => {
            let (cfg, _) = load(&common)?;
            let param = SweepParam::parse(&param, cfg.n()?)?;
            if values.is_empty() {
                return Err(CliError::Usage("--values needs at least one value".into()));
            }
            let rows = values
                .par_iter()
                .map(|v| sweep_row(&cfg, param, *v))
                .collect::<Result<Vec<_>, _>>()?;
            match &common.out {
                Some(path) => {
                    let mut f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
                    write_sweep_csv(&rows, &mut f)
                }
                None => write_sweep_csv(&rows, &mut std::io::stdout().lock()),
            }
        }
    }
}
