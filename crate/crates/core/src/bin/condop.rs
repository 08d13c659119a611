//! `condop`: run scenario files and gallery demos.
//!
//! Exit codes: 0 success, 2 invalid input, 3 audit failure (`audit`),
//! 4 oracle flag under `--strict-oracle`, 1 for I/O trouble on output.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use condop::gallery::LaplaceConfig;
use condop::report::Report;
use condop::scenario::{run_demo, Demo, DemoParams, RunOptions, Scenario};
use condop::Error;

#[derive(Parser)]
#[command(
    name = "condop",
    version,
    about = "Conditional-type operator laboratory"
)]
struct Cli {
    /// Oracle seed; overrides CONDOP_SEED and the scenario's own seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for report files; reports go to stdout when absent.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Exit with code 4 when an oracle value is an unconfirmed bound.
    #[arg(long, global = true)]
    strict_oracle: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the analyses listed in a scenario.
    Classify { scenario: PathBuf },
    /// Like `classify`, but exit 3 when any asserted implication fails.
    Audit { scenario: PathBuf },
    /// Run a dyadic scenario across levels and write a CSV summary.
    Sweep {
        scenario: PathBuf,
        /// Level range `A..B` (inclusive); defaults to the scenario's.
        #[arg(long, value_parser = parse_levels)]
        levels: Option<(u32, u32)>,
    },
    /// Check projection hypotheses and recover the hidden structure.
    Recognize { scenario: PathBuf },
    /// Run a gallery demo.
    Demo {
        name: DemoName,
        /// Decay rate `a` of `e^{-at}` (laplace).
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Comma-separated probe points (laplace).
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
        x: Vec<f64>,
        #[arg(long, default_value_t = 40.0)]
        truncation: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Grid size, node count or group order.
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoName {
    Product,
    Kernel,
    Laplace,
    Convolution,
}

fn parse_levels(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once("..").ok_or("expected A..B")?;
    let a = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

enum Failure {
    Input(Error),
    Output(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<Option<u64>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("CONDOP_SEED") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            Failure::Input(Error::validation(
                "CONDOP_SEED",
                format!("not an integer: {v}"),
            ))
        }),
        Err(_) => Ok(None),
    }
}

/// Writes each `(name, text)` under `dir`, or prints the first to stdout.
fn emit(out: Option<&Path>, files: &[(String, String)]) -> Result<(), Failure> {
    match out {
        None => {
            if let Some((_, text)) = files.first() {
                print!("{text}");
            }
        }
        Some(dir) => {
            fs::create_dir_all(dir)
                .map_err(|e| Failure::Output(format!("{}: {e}", dir.display())))?;
            for (name, text) in files {
                let path = dir.join(name);
                fs::write(&path, text)
                    .map_err(|e| Failure::Output(format!("{}: {e}", path.display())))?;
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn report_file(report: &Report) -> Vec<(String, String)> {
    vec![("report.json".into(), report.to_json())]
}

fn run(cli: Cli) -> Result<i32, Failure> {
    let opts = RunOptions {
        seed: resolve_seed(cli.seed)?,
        strict_oracle: cli.strict_oracle,
    };
    let out = cli.out.as_deref();
    match cli.command {
        Command::Classify { scenario } => {
            let outcome = Scenario::load(&scenario)?.run(&opts)?;
            emit(out, &report_file(&outcome.report))?;
            Ok(outcome.exit_code(false))
        }
        Command::Audit { scenario } => {
            let outcome = Scenario::load(&scenario)?.run(&opts)?;
            emit(out, &report_file(&outcome.report))?;
            for f in &outcome.audit_failures {
                eprintln!("audit failure: {f}");
            }
            Ok(outcome.exit_code(true))
        }
        Command::Recognize { scenario } => {
            let mut s = Scenario::load(&scenario)?;
            s.analyses = vec!["recognize".into()];
            let outcome = s.run(&opts)?;
            emit(out, &report_file(&outcome.report))?;
            Ok(outcome.exit_code(false))
        }
        Command::Sweep { scenario, levels } => {
            let sweep = Scenario::load(&scenario)?.run_sweep(levels, &opts)?;
            let mut files = report_file(&sweep.outcome.report);
            files.push(("sweep.csv".into(), sweep.csv.clone()));
            for (level, report) in &sweep.levels {
                files.push((format!("level_{level:02}.json"), report.to_json()));
            }
            if out.is_none() {
                print!("{}", sweep.csv);
            } else {
                emit(out, &files)?;
            }
            Ok(sweep.outcome.exit_code(false))
        }
        Command::Demo {
            name,
            a,
            x,
            truncation,
            step,
            n,
        } => {
            let demo = match name {
                DemoName::Product => Demo::Product,
                DemoName::Kernel => Demo::Kernel,
                DemoName::Laplace => Demo::Laplace,
                DemoName::Convolution => Demo::Convolution,
            };
            let params = DemoParams {
                a,
                probes: x,
                laplace: LaplaceConfig { truncation, step },
                n,
            };
            let report = run_demo(demo, &params, opts.seed.unwrap_or(0))?;
            emit(out, &report_file(&report))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Output(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
