//! Batch front end: `energy`, `scan`, `verify` and `oracle`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bogoliubov::config::RunConfig;
use bogoliubov::oracle::run_oracle;
use bogoliubov::report::{compute_energy, csv_header, csv_row, to_json, FailedRow, Record};
use bogoliubov::verify::run_verify;
use bogoliubov::Error;

#[derive(Parser)]
#[command(
    version,
    about = "Energy expansion of the dilute Bose gas on the unit torus"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; overrides the paths in the config. Stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; all cores by default. Results do not depend on it.
    #[arg(long, global = true, env = "BOGOLIUBOV_THREADS")]
    threads: Option<usize>,
    /// Write zero wall-times so identical configs give identical files.
    #[arg(long, global = true)]
    deterministic: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full energy report for a single N, as JSON.
    Energy,
    /// One CSV row per N of `N_list`.
    Scan,
    /// Named invariant checks with margins, as JSON; exit 1 on any failure.
    Verify,
    /// Closed forms against the truncated Fock-space reference, as JSON.
    Oracle,
}

/// Error classes map to exit codes: 2 for configuration, 1 for the rest.
enum Failure {
    Config(String),
    Run(String),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BetaOutOfRange(_)
            | Error::RejectedConfig(_)
            | Error::InvalidParameter(_)
            | Error::CutoffTooSmall(_) => Failure::Config(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::Run(format!("{}: {e}", p.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Run(e.to_string())),
    }
}

fn record<T: serde::Serialize>(cfg: &RunConfig, deterministic: bool, result: T) -> String {
    to_json(&Record {
        config_hash: cfg.hash(),
        config: cfg.clone(),
        deterministic,
        result,
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Failure::Config("--config <path> is required".into()))?;
    let cfg = RunConfig::load(path)?;
    for w in cfg.validate()? {
        eprintln!("warning: {w}");
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Run(e.to_string()))?;
    }
    let det = cli.deterministic;
    let json_out = cli.out.clone().or_else(|| cfg.output.json.clone());
    match cli.cmd {
        Cmd::Energy => {
            let report = compute_energy(&cfg, cfg.single_n()?, det)?;
            emit(json_out.as_deref(), &record(&cfg, det, report))
        }
        Cmd::Scan => {
            let ns = cfg.scan_ns()?;
            let mut text = format!("# config_hash {}\n{}\n", cfg.hash(), csv_header());
            let mut failures = Vec::new();
            for n in ns {
                match compute_energy(&cfg, n, det) {
                    Ok(r) => {
                        text.push_str(&csv_row(&r));
                        text.push('\n');
                    }
                    Err(e) => {
                        eprintln!("N = {n}: {e}");
                        failures.push(FailedRow {
                            n,
                            error: e.to_string(),
                        });
                    }
                }
            }
            let csv_out = cli.out.clone().or_else(|| cfg.output.csv.clone());
            emit(csv_out.as_deref(), &text)?;
            if let (Some(p), false) = (cfg.output.json.as_deref(), failures.is_empty()) {
                emit(Some(p), &record(&cfg, det, &failures))?;
            }
            Ok(())
        }
        Cmd::Verify => {
            let report = run_verify(&cfg)?;
            emit(json_out.as_deref(), &record(&cfg, det, &report))?;
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!(
                    "FAIL {}: value {:e} threshold {:e} {}",
                    c.name, c.value, c.threshold, c.detail
                );
            }
            if report.pass() {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        Cmd::Oracle => {
            let spec = cfg
                .oracle
                .clone()
                .ok_or_else(|| Failure::Config("oracle needs an [oracle] block".into()))?;
            let report = run_oracle(&spec)?;
            emit(json_out.as_deref(), &record(&cfg, det, &report))?;
            if report.pass() {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Checks) => ExitCode::from(1),
    }
}
