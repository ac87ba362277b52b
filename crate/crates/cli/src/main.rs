use clap::{Args, Parser, Subcommand};
use filtstab_cli::config::ExperimentConfig;
use filtstab_cli::error::Result;
use filtstab_cli::presets::preset_spec;
use filtstab_cli::runner::{constants_block, run_experiment};
use filtstab_core::Model;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "filtstab", version, about = "Filter stability experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run a built-in experiment (example1, counterexample, example4).
    Preset {
        name: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Print the decay constants of a model as JSON.
    Constants { model: PathBuf },
}

#[derive(Args)]
struct RunOpts {
    /// Override the configured trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the configured time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Override the configured base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Exit nonzero when any check verdict fails.
    #[arg(long)]
    strict: bool,
    /// Output directory for report.json and CSV series.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    init_thread_pool();
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// FILTSTAB_THREADS caps the worker pool; unset means one worker per core.
fn init_thread_pool() {
    if let Ok(raw) = std::env::var("FILTSTAB_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring FILTSTAB_THREADS={raw:?} (want a positive integer)"),
        }
    }
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Constants { model } => {
            let model = Model::from_json_file(&model)?;
            let block = constants_block(&model)?;
            println!("{}", serde_json::to_string_pretty(&block)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { config, opts } => {
            let (config, base) = ExperimentConfig::from_file(&config)?;
            let mut spec = config.resolve(base.as_deref())?;
            spec.apply_overrides(opts.trials, opts.dt, opts.seed);
            run_and_report(spec, &opts)
        }
        Command::Preset { name, opts } => {
            let mut spec = preset_spec(&name)?;
            spec.apply_overrides(opts.trials, opts.dt, opts.seed);
            run_and_report(spec, &opts)
        }
    }
}

fn run_and_report(
    spec: filtstab_cli::config::ExperimentSpec,
    opts: &RunOpts,
) -> Result<ExitCode> {
    let report = run_experiment(&spec)?;
    let paths = report.write_outputs(&opts.out)?;
    for check in &report.checks {
        match &check.error {
            Some(msg) => println!("{}: FAIL ({msg})", check.check),
            None if check.passed => println!("{}: pass", check.check),
            None => println!("{}: FAIL", check.check),
        }
    }
    println!("report: {}", paths[0].display());
    if opts.strict && !report.all_passed() {
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}
