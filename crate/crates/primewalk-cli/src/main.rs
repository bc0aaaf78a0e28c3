use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use primewalk_cli::experiments::{chowla_csv, chowla_rows, spectrum};
use primewalk_cli::verify::{run_suite, SUITES};
use primewalk_cli::{ExperimentConfig, UsageError};

/// Divisibility-graph experiments. Values come from the defaults, then the
/// `--config` file, then flags.
#[derive(Debug, Parser)]
#[command(name = "primewalk", version)]
struct Cli {
    /// `key=value` file; keys match the flag names.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long = "N", global = true)]
    n: Option<String>,
    #[arg(long = "H0", global = true)]
    h0: Option<String>,
    #[arg(long = "H", global = true)]
    h: Option<String>,
    #[arg(long = "K", global = true)]
    big_k: Option<String>,
    #[arg(long, global = true)]
    ell: Option<String>,
    #[arg(long, global = true)]
    k: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Suite for `verify`.
    #[arg(long, global = true)]
    suite: Option<String>,
    /// Comma-separated increasing points, e.g. `1e3,1e4,1e5`.
    #[arg(long, global = true)]
    schedule: Option<String>,
    /// Window parameter for the windowed Chowla sum.
    #[arg(long, global = true)]
    w: Option<String>,
    #[arg(long, global = true)]
    iters: Option<String>,
    #[arg(long, global = true)]
    tol: Option<String>,
    /// `true` to apply the ω/Y_ℓ mask before probing.
    #[arg(long, global = true)]
    mask: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// CSV of (x, log_chowla_sum) over the schedule.
    Chowla,
    /// JSON summary of the masked spectral-radius probe.
    Spectrum,
    /// Runs an invariant suite; exits 1 on any failure.
    Verify,
}

impl Cli {
    fn config(&self) -> Result<ExperimentConfig, UsageError> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let flags = [
            ("N", &self.n),
            ("H0", &self.h0),
            ("H", &self.h),
            ("K", &self.big_k),
            ("ell", &self.ell),
            ("k", &self.k),
            ("seed", &self.seed),
            ("out", &self.out),
            ("suite", &self.suite),
            ("schedule", &self.schedule),
            ("w", &self.w),
            ("iters", &self.iters),
            ("tol", &self.tol),
            ("mask", &self.mask),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}

fn emit(cfg: &ExperimentConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {path}")),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

/// Runs the command; `Ok(false)` means a verification failed.
fn run(cli: &Cli) -> Result<bool> {
    let cfg = cli.config()?;
    match cli.cmd {
        Cmd::Chowla => {
            let rows = chowla_rows(&cfg)?;
            emit(&cfg, &chowla_csv(&cfg, &rows))?;
            Ok(true)
        }
        Cmd::Spectrum => {
            let report = spectrum(&cfg)?;
            emit(&cfg, &(serde_json::to_string_pretty(&report)? + "\n"))?;
            Ok(true)
        }
        Cmd::Verify => {
            let Some(name) = cfg.suite.as_deref() else {
                return Err(UsageError(format!("verify needs --suite, one of: {}", SUITES.join(", "))).into());
            };
            let report = run_suite(name, &cfg)?;
            emit(&cfg, &(serde_json::to_string_pretty(&report)? + "\n"))?;
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("FAIL {}: {}", c.name, c.detail);
            }
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("usage error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
