//! `oppnet`: run a scenario, sweep a parameter across routers and seeds, or
//! fit a quadratic trend to a sweep column.
//!
//! Exit codes: 0 success, 2 usage error, 3 invalid configuration or input,
//! 4 runtime or output failure.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oppnet::batch::{fit_trend, parse_override, run_single, run_sweep, BatchError, SweepPlan};
use oppnet::settings::RouterKind;

const EXIT_CONFIG: u8 = 3;
const EXIT_RUNTIME: u8 = 4;

#[derive(Parser)]
#[command(name = "oppnet", version, about = "Opportunistic network simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and print its message statistics.
    Run(RunArgs),
    /// Sweep one settings key over a range for each router and seed.
    Sweep(SweepArgs),
    /// Fit a quadratic trend line to two CSV columns.
    Fit(FitArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Settings file.
    config: PathBuf,
    /// Override a setting, applied after the file (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// World seed; defaults to MovementModel.rngSeed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write the tab-separated event log here.
    #[arg(long)]
    event_log: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Settings file.
    config: PathBuf,
    /// Dotted settings key to sweep, e.g. VHFInterface.transmitRange.
    #[arg(long)]
    param: String,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long)]
    step: f64,
    /// Router to include (repeatable); both when omitted.
    #[arg(long = "router", value_parser = parse_router)]
    routers: Vec<RouterKind>,
    /// Comma-separated world seeds.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    seeds: Vec<u64>,
    /// Output directory for the CSV files.
    #[arg(long)]
    out: PathBuf,
    /// Override a setting for every run (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct FitArgs {
    /// Sweep CSV with a header row.
    csv: PathBuf,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    /// Output CSV of the sampled fitted curve.
    #[arg(long)]
    out: PathBuf,
}

fn parse_router(s: &str) -> Result<RouterKind, String> {
    s.parse()
}

#[derive(Debug)]
enum Failure {
    Batch(BatchError),
    Output(PathBuf, io::Error),
}

impl From<BatchError> for Failure {
    fn from(e: BatchError) -> Self {
        Failure::Batch(e)
    }
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Output(path.clone(), e))
}

fn overrides(set: &[String]) -> Result<Vec<(String, String)>, Failure> {
    Ok(set.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>, _>>()?)
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let overrides = overrides(&args.set)?;
    let mut log = args.event_log.as_ref().map(create).transpose()?;
    let outcome = run_single(
        &args.config,
        &overrides,
        args.seed,
        log.as_mut().map(|w| w as &mut dyn Write),
    )?;
    if let (Some(w), Some(p)) = (log.as_mut(), &args.event_log) {
        w.flush().map_err(|e| Failure::Output(p.clone(), e))?;
    }
    match &args.report {
        Some(p) => fs::write(p, &outcome.text).map_err(|e| Failure::Output(p.clone(), e))?,
        None => print!("{}", outcome.text),
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let routers = if args.routers.is_empty() {
        vec![RouterKind::MaxProp, RouterKind::Epidemic]
    } else {
        args.routers
    };
    let plan = SweepPlan {
        config: args.config,
        overrides: overrides(&args.set)?,
        param: args.param,
        from: args.from,
        to: args.to,
        step: args.step,
        routers,
        seeds: args.seeds,
        out_dir: args.out,
        jobs: args.jobs,
    };
    let result = run_sweep(&plan)?;
    for f in &result.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn fit(args: FitArgs) -> Result<(), Failure> {
    let t = fit_trend(&args.csv, &args.x, &args.y, &args.out)?;
    let [a, b, c] = t.coefficients;
    println!("a = {a}");
    println!("b = {b}");
    println!("c = {c}");
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Fit(a) => fit(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Batch(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { EXIT_CONFIG } else { EXIT_RUNTIME })
        }
        Err(Failure::Output(p, e)) => {
            eprintln!("error: writing {}: {e}", p.display());
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
