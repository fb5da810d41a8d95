use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{ensure, Result};
use clap::{Parser, Subcommand};
use serde_json::json;
use su11::optimize::{default_scaling_grid, optimize_phases, optimize_r1, scaling_exponent, SqueezeSearch};
use su11::sensitivity::snr;
use su11::validation::{run_all, ValidationOptions};
use su11::{evaluate, evaluate_with_spa};
use su11_cli::{
    load_config, run_sweep, with_jobs, write_figure, write_json, EvaluateConfig, OptimizeConfig, OptimizeTarget,
    SweepSpec, DEFAULT_MAX_GRID, SCHEMA_VERSION, VERSION,
};

#[derive(Parser)]
#[command(
    name = "su11",
    version,
    about = "Absorbance sensitivity of seeded two-amplifier interferometers"
)]
struct Cli {
    /// Worker threads. Defaults to the number of available cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Reserved. Every computation is deterministic and ignores it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detector statistics and absorbance variance for one configuration.
    Evaluate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Cartesian sweep written as CSV, with a JSON sidecar next to it.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Largest allowed number of grid points.
        #[arg(long, env = "SU11_MAX_GRID", default_value_t = DEFAULT_MAX_GRID)]
        max_grid: u64,
    },
    /// Dataset behind a named figure.
    Figure {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Phase, squeezing or scaling optimisation.
    Optimize {
        #[arg(long)]
        config: PathBuf,
    },
    /// Runs the acceptance criteria and writes a JSON report.
    Validate {
        #[arg(long)]
        out: PathBuf,
        /// Use a closed form with one perturbed coefficient; the convergence check must fail.
        #[arg(long)]
        mutate: bool,
    },
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn evaluate_cmd(config: PathBuf) -> Result<()> {
    let c: EvaluateConfig = load_config(&config)?;
    let report = match c.spa {
        Some(spa) => evaluate_with_spa(&c.interferometer, &spa)?,
        None => evaluate(&c.interferometer)?,
    };
    let mut out = json!({ "schema_version": SCHEMA_VERSION, "version": VERSION, "report": report });
    if let Some(eps) = c.eps_m {
        out["snr"] = json!(snr(eps, &report));
    }
    print_json(&out)
}

fn optimize_cmd(config: PathBuf) -> Result<()> {
    let c: OptimizeConfig = load_config(&config)?;
    let result = match c.target {
        OptimizeTarget::Phases { interferometer, search } => {
            serde_json::to_value(optimize_phases(&interferometer, search.unwrap_or_default())?)?
        }
        OptimizeTarget::R1 {
            m,
            n_s,
            r2,
            eta_in,
            eta_ex,
        } => serde_json::to_value(optimize_r1(&SqueezeSearch::new(m, n_s, r2, eta_in, eta_ex))?)?,
        OptimizeTarget::Scaling {
            m,
            strategy,
            eta_in,
            ns_grid,
        } => {
            let grid = ns_grid.unwrap_or_else(default_scaling_grid);
            serde_json::to_value(scaling_exponent(m, strategy, eta_in, &grid)?)?
        }
    };
    print_json(&json!({ "schema_version": SCHEMA_VERSION, "version": VERSION, "result": result }))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let _ = cli.seed;
    let jobs = cli.jobs;
    match cli.command {
        Command::Evaluate { config } => with_jobs(jobs, || evaluate_cmd(config))??,
        Command::Sweep { config, out, max_grid } => {
            ensure!(
                out.extension().is_none_or(|e| e != "json"),
                "--out must not end in .json; the sidecar takes that name"
            );
            let spec: SweepSpec = load_config(&config)?;
            let summary = with_jobs(jobs, || run_sweep(&spec, &out, max_grid))??;
            print_json(&serde_json::to_value(summary)?)?;
        }
        Command::Figure { name, out } => {
            for path in with_jobs(jobs, || write_figure(&name, &out))?? {
                println!("{}", path.display());
            }
        }
        Command::Optimize { config } => with_jobs(jobs, || optimize_cmd(config))??,
        Command::Validate { out, mutate } => {
            let start = Instant::now();
            let options = ValidationOptions {
                mutate_closed_form: mutate,
            };
            let report = with_jobs(jobs, || run_all(&options))?;
            for c in &report.criteria {
                println!("{}", c.line());
            }
            let passed = report.criteria.iter().filter(|c| c.passed).count();
            println!("{passed} of {} criteria passed", report.criteria.len());
            write_json(
                &out,
                &json!({
                    "schema_version": SCHEMA_VERSION,
                    "tool": "su11",
                    "version": VERSION,
                    "report": report,
                    "runtime_seconds": start.elapsed().as_secs_f64(),
                }),
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
