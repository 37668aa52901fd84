//! `driftlab` — run, sweep and verify drift-diffusion experiments.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid config or
//! input, 3 runtime fault.

use clap::{Args, Parser, Subcommand};
use driftlab_core::error::Error;
use driftlab_core::lab::config::{LabConfig, RunSpec, SweepSpec};
use driftlab_core::lab::report::render_report;
use driftlab_core::lab::sweep::{read_series_csv, run_cell, run_sweep, CellOutcome};
use driftlab_core::lab::verify::{run_suite, Suite};
use driftlab_core::selfsim::decay_fit_physical;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "driftlab", version, about = "Numerical laboratory for u_t + (b u^{k+1})_x = u_xx")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    /// Seed for corpus generation and sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker pool width for sweeps.
    #[arg(long)]
    jobs: Option<usize>,
    /// Override the number of grid cells.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Override the domain half-width.
    #[arg(long = "domain-L", alias = "domain-l")]
    domain_l: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single cell described by a config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a (p, k) sweep described by a config file.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a module property suite (lorentz | heat | solver | selfsim |
    /// drifts | all).
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fit the sup-norm decay exponent of a diagnostics series.
    FitDecay {
        series: PathBuf,
        #[arg(long)]
        t_lo: Option<f64>,
        #[arg(long)]
        t_hi: Option<f64>,
    },
    /// Render a sweep or cell directory as a table.
    Report { dir: PathBuf },
}

fn apply_overrides(spec: &mut RunSpec, ov: &Overrides) {
    if let Some(seed) = ov.seed {
        spec.seed = seed;
    }
    if let Some(n) = ov.grid_n {
        spec.grid_n = n;
    }
    if let Some(l) = ov.domain_l {
        spec.grid_l = l;
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Run { config, overrides } => {
            let cfg = LabConfig::from_file(&config)?;
            let mut spec = RunSpec::from_config(&cfg)?;
            apply_overrides(&mut spec, &overrides);
            let out = overrides.out.unwrap_or_else(|| PathBuf::from("run_out"));
            let cell = run_cell(&spec, &out)?;
            println!(
                "classification {}  outcome {}  t_final {}  steps {}",
                cell.report.classification.name(),
                cell.outcome.name(),
                cell.report.t_final,
                cell.report.steps
            );
            if let Some(e) = cell.decay_exponent {
                println!("decay_exponent {e}");
            }
            println!("artifacts in {}", out.display());
            Ok(0)
        }
        Command::Sweep { config, overrides } => {
            let cfg = LabConfig::from_file(&config)?;
            let mut sweep = SweepSpec::from_config(&cfg)?;
            if let Some(jobs) = overrides.jobs {
                sweep.jobs = jobs.max(1);
            }
            if let Some(seed) = overrides.seed {
                sweep.seed = seed;
            }
            apply_overrides(&mut sweep.template, &overrides);
            let out = overrides.out.unwrap_or_else(|| PathBuf::from("sweep_out"));
            let cells = run_sweep(&sweep, &out)?;
            let inconclusive = cells
                .iter()
                .filter(|c| matches!(c.outcome, CellOutcome::Inconclusive(_)))
                .count();
            println!("{}", render_report(&out)?);
            println!(
                "{} cells, {} inconclusive; index at {}",
                cells.len(),
                inconclusive,
                out.join("index.csv").display()
            );
            Ok(0)
        }
        Command::Verify { suite, seed } => {
            let suite = Suite::parse(&suite)
                .ok_or_else(|| Error::Config(format!("unknown suite `{suite}`")))?;
            let started = std::time::Instant::now();
            let results = run_suite(suite, seed.unwrap_or(12))?;
            let mut failures = 0;
            println!("suite,check,pass,detail");
            for r in &results {
                if !r.passed {
                    failures += 1;
                }
                println!("{},{},{},{}", r.suite, r.name, r.passed, r.detail.replace(',', ";"));
            }
            println!(
                "# {} checks, {} failed",
                results.len(),
                failures
            );
            // soft budget, reported out of band so stdout stays byte-stable
            eprintln!("# suite finished in {:.1}s (soft budget 600s)", started.elapsed().as_secs_f64());
            Ok(if failures > 0 { 1 } else { 0 })
        }
        Command::FitDecay { series, t_lo, t_hi } => {
            let rows = read_series_csv(&series)?;
            let last_t = rows.last().map(|r| r.t).unwrap_or(0.0);
            let lo = t_lo.unwrap_or(last_t / 10.0);
            let hi = t_hi.unwrap_or(last_t);
            let exponent = decay_fit_physical(&rows, lo, hi)?;
            println!("decay_exponent = {exponent}");
            println!("window = [{lo}, {hi}]");
            Ok(0)
        }
        Command::Report { dir } => {
            print!("{}", render_report(&dir)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
