//! `ypl verify | simulate | report`.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for
//! configuration, usage and I/O errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::config::{Overrides, RunConfig};
use crate::parallel::{init_threads, Rayon};
use crate::report::{
    metadata_path, read_report, to_json_string, write_json, write_residual_csv, write_scan_csv, write_summary, RunMetadata, RunReport,
    SuiteOutcome, SCHEMA,
};
use crate::suites::{scan, scan_spec, Suite};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ypl", version, about = "Residual checks and simulations for generalized Yang Poisson models")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every command; they override the config file.
#[derive(Debug, Args)]
pub struct Common {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Sign case: pp, mm, pm or mp.
    #[arg(long, global = true)]
    pub case: Option<String>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Sample points per sweep.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Tolerance of the algebra and Jacobi sweeps.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// JSON report path.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// CSV output path.
    #[arg(long, global = true, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification suites.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Single rotation angle for the flows suite.
        #[arg(long)]
        angle: Option<f64>,
        /// JSON report path (same as --json).
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Period–energy scan of the deformed oscillator.
    Simulate {
        #[arg(long)]
        omega: Option<f64>,
        /// Comma-separated initial amplitudes.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        amplitudes: Option<Vec<f64>>,
        /// CSV path (same as --csv).
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Summarize a saved JSON report.
    Report {
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
    },
}

impl Cli {
    pub fn overrides(&self) -> Overrides {
        let c = &self.common;
        let mut o = Overrides {
            case: c.case.clone(),
            alpha: c.alpha,
            beta: c.beta,
            samples: c.samples,
            seed: c.seed,
            tol: c.tol,
            out: c.json.clone(),
            csv: c.csv.clone(),
            ..Default::default()
        };
        match &self.command {
            Command::Verify { angle, out, .. } => {
                o.angle = *angle;
                if out.is_some() {
                    o.out = out.clone();
                }
            }
            Command::Simulate { omega, amplitudes, out } => {
                o.omega = *omega;
                o.amplitudes = amplitudes.clone();
                if out.is_some() {
                    o.csv = out.clone();
                }
            }
            Command::Report { .. } => {}
        }
        o
    }
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(&cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

/// Runs a parsed command, writing the summary to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    if let Command::Report { input } = &cli.command {
        return report(input, cli.common.csv.as_deref(), out);
    }
    let (cfg, mut warnings) = RunConfig::load(cli.common.config.as_deref(), &cli.overrides())?;
    let threads = init_threads().map_err(anyhow::Error::msg)?;
    let start = Instant::now();
    let (command, suites, outcome) = match &cli.command {
        Command::Verify { suite, .. } => {
            warnings.extend(suite.warnings(&cfg));
            let names = suite.expand().iter().map(|s| s.name().to_string()).collect();
            ("verify", names, suite.run(&cfg, &Rayon))
        }
        Command::Simulate { .. } => ("simulate", vec!["scan".to_string()], simulate(&cfg)?),
        Command::Report { .. } => unreachable!(),
    };
    let elapsed = start.elapsed().as_secs_f64();
    let report = RunReport {
        schema: SCHEMA.into(),
        command: command.into(),
        suites,
        pass: outcome.pass(),
        warnings,
        config: config_echo(&cfg)?,
        outcome,
    };
    write_summary(out, &report)?;
    if let Some(path) = &cfg.output.json {
        write_json(path, &report)?;
        write_json(&metadata_path(path), &metadata(elapsed, threads))?;
    }
    if let Some(path) = &cfg.output.csv {
        match &cli.command {
            Command::Simulate { .. } => write_scan_csv(path, &report.outcome.scan)?,
            _ => write_residual_csv(path, &report.outcome)?,
        }
    }
    Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
}

fn simulate(cfg: &RunConfig) -> Result<SuiteOutcome> {
    let case = cfg.case()?;
    let rows = scan(&scan_spec(cfg, vec![case]));
    let errors = rows.iter().filter_map(|r| r.error.as_ref().map(|e| format!("scan: {} amplitude {}: {e}", r.case, r.amplitude))).collect();
    Ok(SuiteOutcome { scan: rows, errors, ..Default::default() })
}

/// The configuration as echoed in the report; output paths are left out so
/// that reports written to different files compare equal.
pub fn config_echo(cfg: &RunConfig) -> Result<serde_json::Value> {
    let mut v = serde_json::to_value(cfg)?;
    if let Some(m) = v.as_object_mut() {
        m.remove("output");
    }
    Ok(v)
}

fn metadata(elapsed_s: f64, threads: usize) -> RunMetadata {
    RunMetadata {
        schema: SCHEMA.into(),
        created_unix_s: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        elapsed_s,
        threads,
        version: env!("CARGO_PKG_VERSION").into(),
    }
}

/// Prints the summary of a saved report and optionally exports its rows.
fn report(input: &Path, csv: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    let r = read_report(input)?;
    write_summary(out, &r)?;
    if let Some(path) = csv {
        if r.outcome.scan.is_empty() {
            write_residual_csv(path, &r.outcome)?;
        } else {
            write_scan_csv(path, &r.outcome.scan)?;
        }
    }
    Ok(if r.pass { EXIT_PASS } else { EXIT_FAIL })
}

/// Serialized report exactly as `--json` writes it.
pub fn report_json(report: &RunReport) -> Result<String> {
    to_json_string(report).context("serializing report")
}
