//! Single runs, parameter sweeps over routers and seeds, and trend fitting
//! of sweep CSVs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::metrics::{
    full_precision, mean, polyfit2, polyval2, render_report, sample_std, sweep_csv_header, sweep_csv_row, FitError,
    MessageStatsReport, MetricsAccumulator, STAT_COLUMNS,
};
use crate::settings::{build_scenario, parse_settings, ParseError, RouterKind, Scenario, ScenarioError};
use crate::sim::{Environment, EventLogWriter, SinkError, World, WorldError};

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("reading {path}: {source}")]
    Input {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("writing {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error("override `{0}` is not of the form key=value")]
    Override(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("simulation: {0}")]
    Sink(#[from] SinkError),
    #[error("invalid sweep plan: {0}")]
    Plan(String),
    #[error("run {router} {param}={value} seed {seed} failed: {source}")]
    Run {
        router: RouterKind,
        param: String,
        value: String,
        seed: u64,
        #[source]
        source: Box<BatchError>,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: column `{column}` not found")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}: row {row}: `{value}` is not a number")]
    BadCell { path: PathBuf, row: usize, value: String },
    #[error("{path}: {source}")]
    Fit {
        path: PathBuf,
        #[source]
        source: FitError,
    },
}

impl BatchError {
    /// True for problems with the inputs rather than with running or
    /// writing results.
    pub fn is_config_error(&self) -> bool {
        match self {
            BatchError::Input { .. }
            | BatchError::Parse { .. }
            | BatchError::Override(_)
            | BatchError::Scenario(_)
            | BatchError::World(_)
            | BatchError::Plan(_)
            | BatchError::MissingColumn { .. }
            | BatchError::BadCell { .. }
            | BatchError::Fit { .. } => true,
            BatchError::Csv { source, .. } => !source.is_io_error(),
            BatchError::Run { source, .. } => source.is_config_error(),
            BatchError::Output { .. } | BatchError::Sink(_) => false,
        }
    }
}

/// Splits `key=value`.
pub fn parse_override(text: &str) -> Result<(String, String), BatchError> {
    match text.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(BatchError::Override(text.to_string())),
    }
}

/// Parses a settings file, applies overrides in order, validates, and loads
/// the map files it references (relative to the settings file).
pub fn load_scenario(config: &Path, overrides: &[(String, String)]) -> Result<(Scenario, Environment), BatchError> {
    let text = fs::read_to_string(config).map_err(|source| BatchError::Input {
        path: config.to_path_buf(),
        source,
    })?;
    let mut table = parse_settings(&text).map_err(|source| BatchError::Parse {
        path: config.to_path_buf(),
        source,
    })?;
    for w in table.warnings() {
        log::warn!("{}: {w}", config.display());
    }
    for (k, v) in overrides {
        table.set(k.clone(), v.clone());
    }
    let scenario = build_scenario(&table)?;
    let base = config.parent().unwrap_or(Path::new("."));
    let env = Environment::load(&scenario, base)?;
    Ok((scenario, env))
}

/// Runs one simulation to its end time, optionally writing the event log.
pub fn simulate(
    scenario: &Scenario,
    env: Environment,
    seed: u64,
    event_log: Option<&mut dyn Write>,
) -> Result<MessageStatsReport, BatchError> {
    let mut world = World::new(scenario, env, seed)?;
    let mut acc = MetricsAccumulator::new();
    match event_log {
        Some(out) => {
            let mut log = EventLogWriter::new(out, world.host_names(), scenario.generator.prefix.clone());
            world.run(&mut (&mut acc, &mut log))?;
            log.flush().map_err(SinkError::Io)?;
        }
        None => world.run(&mut acc)?,
    }
    Ok(acc.finalize(world.time()))
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub seed: u64,
    pub report: MessageStatsReport,
    /// Rendered report text.
    pub text: String,
}

/// One run of a settings file. Without `seed` the file's own seed is used.
pub fn run_single(
    config: &Path,
    overrides: &[(String, String)],
    seed: Option<u64>,
    event_log: Option<&mut dyn Write>,
) -> Result<RunOutcome, BatchError> {
    let (scenario, env) = load_scenario(config, overrides)?;
    let seed = seed.unwrap_or(scenario.rng_seed);
    let report = simulate(&scenario, env, seed, event_log)?;
    let text = render_report(&report);
    Ok(RunOutcome { seed, report, text })
}

#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub config: PathBuf,
    pub overrides: Vec<(String, String)>,
    /// Dotted settings key being swept.
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub step: f64,
    pub routers: Vec<RouterKind>,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl SweepPlan {
    pub fn validate(&self) -> Result<(), BatchError> {
        let bad = |m: &str| Err(BatchError::Plan(m.to_string()));
        if !(self.step > 0.0) || !self.step.is_finite() {
            return bad("step must be > 0");
        }
        if !self.from.is_finite() || !self.to.is_finite() || self.from > self.to {
            return bad("from must not exceed to");
        }
        if self.routers.is_empty() {
            return bad("at least one router is required");
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required");
        }
        if self.param.trim().is_empty() {
            return bad("the swept key is empty");
        }
        if self.jobs == Some(0) {
            return bad("jobs must be at least 1");
        }
        Ok(())
    }

    /// Swept values from `from` to `to` inclusive.
    pub fn values(&self) -> Vec<f64> {
        let span = ((self.to - self.from) / self.step + 1e-9).floor() as usize;
        (0..=span).map(|i| self.from + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone)]
pub struct SweepRun {
    pub router: RouterKind,
    pub value: f64,
    pub seed: u64,
    pub report: MessageStatsReport,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Plan order: router, then value, then seed.
    pub runs: Vec<SweepRun>,
    pub files: Vec<PathBuf>,
}

impl SweepResult {
    pub fn for_router(&self, router: RouterKind) -> impl Iterator<Item = &SweepRun> {
        self.runs.iter().filter(move |r| r.router == router)
    }
}

/// Runs every (router, value, seed) combination and writes one CSV per
/// router, a combined CSV and, with several seeds, per-router summaries.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepResult, BatchError> {
    plan.validate()?;
    let values = plan.values();
    let mut jobs = Vec::new();
    for &router in &plan.routers {
        for &value in &values {
            for &seed in &plan.seeds {
                jobs.push((router, value, seed));
            }
        }
    }
    let run_one = |&(router, value, seed): &(RouterKind, f64, u64)| -> Result<SweepRun, BatchError> {
        let mut overrides = plan.overrides.clone();
        overrides.push(("Group.router".to_string(), router.settings_name().to_string()));
        overrides.push((plan.param.clone(), full_precision(value)));
        let wrap = |e: BatchError| BatchError::Run {
            router,
            param: plan.param.clone(),
            value: full_precision(value),
            seed,
            source: Box::new(e),
        };
        let (scenario, env) = load_scenario(&plan.config, &overrides).map_err(wrap)?;
        let report = simulate(&scenario, env, seed, None).map_err(wrap)?;
        log::info!("{router} {}={} seed {seed}: delivered {}", plan.param, value, report.delivered);
        Ok(SweepRun { router, value, seed, report })
    };
    let results: Vec<Result<SweepRun, BatchError>> = match plan.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| BatchError::Plan(e.to_string()))?
            .install(|| jobs.par_iter().map(run_one).collect()),
        None => jobs.par_iter().map(run_one).collect(),
    };
    let runs = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let files = write_sweep_csvs(&plan.out_dir, &plan.routers, &plan.seeds, &runs)?;
    Ok(SweepResult { runs, files })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, BatchError> {
    csv::Writer::from_path(path).map_err(|source| BatchError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

fn write_rows(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), BatchError> {
    let mut w = csv_writer(path)?;
    let csv_err = |source| BatchError::Csv {
        path: path.to_path_buf(),
        source,
    };
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush().map_err(|source| BatchError::Output {
        path: path.to_path_buf(),
        source,
    })
}

/// Header of a per-router summary CSV.
pub fn summary_csv_header() -> Vec<String> {
    let mut h = vec!["range".to_string(), "runs".to_string()];
    for c in STAT_COLUMNS {
        h.push(format!("{c}_mean"));
        h.push(format!("{c}_std"));
    }
    h
}

fn write_sweep_csvs(
    dir: &Path,
    routers: &[RouterKind],
    seeds: &[u64],
    runs: &[SweepRun],
) -> Result<Vec<PathBuf>, BatchError> {
    fs::create_dir_all(dir).map_err(|source| BatchError::Output {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut files = Vec::new();
    let mut combined = Vec::new();
    for &router in routers {
        let mine: Vec<&SweepRun> = runs.iter().filter(|r| r.router == router).collect();
        let rows: Vec<Vec<String>> = mine
            .iter()
            .enumerate()
            .map(|(i, r)| sweep_csv_row(i + 1, r.value, &r.report, r.seed))
            .collect();
        for row in &rows {
            let mut c = vec![router.label().to_string()];
            c.extend(row.iter().cloned());
            combined.push(c);
        }
        let path = dir.join(format!("{}.csv", router.label()));
        write_rows(&path, &sweep_csv_header(), &rows)?;
        files.push(path);

        if seeds.len() > 1 {
            let mut summary = Vec::new();
            for group in mine.chunk_by(|a, b| a.value == b.value) {
                let mut row = vec![full_precision(group[0].value), group.len().to_string()];
                for k in 0..STAT_COLUMNS.len() {
                    let xs: Vec<f64> = group.iter().map(|r| r.report.stat_values()[k]).collect();
                    row.push(full_precision(mean(&xs)));
                    row.push(full_precision(sample_std(&xs)));
                }
                summary.push(row);
            }
            let path = dir.join(format!("{}_summary.csv", router.label()));
            write_rows(&path, &summary_csv_header(), &summary)?;
            files.push(path);
        }
    }
    let mut header = vec!["router".to_string()];
    header.extend(sweep_csv_header());
    let path = dir.join("combined.csv");
    write_rows(&path, &header, &combined)?;
    files.push(path);
    Ok(files)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendFit {
    /// `a + b*x + c*x^2`.
    pub coefficients: [f64; 3],
    pub points: usize,
}

/// Number of evenly spaced samples written for the fitted curve.
pub const FIT_SAMPLES: usize = 101;

/// Fits `y` against `x` from a CSV with headers and writes the sampled
/// curve to `out`. Rows whose cells are NaN are skipped.
pub fn fit_trend(csv_path: &Path, x: &str, y: &str, out: &Path) -> Result<TrendFit, BatchError> {
    let csv_err = |source| BatchError::Csv {
        path: csv_path.to_path_buf(),
        source,
    };
    let mut rdr = csv::Reader::from_path(csv_path).map_err(csv_err)?;
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| BatchError::MissingColumn {
            path: csv_path.to_path_buf(),
            column: name.to_string(),
        })
    };
    let (xi, yi) = (col(x)?, col(y)?);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let num = |i: usize| -> Result<f64, BatchError> {
            let cell = rec.get(i).unwrap_or("");
            cell.trim().parse::<f64>().map_err(|_| BatchError::BadCell {
                path: csv_path.to_path_buf(),
                row: row + 1,
                value: cell.to_string(),
            })
        };
        let (vx, vy) = (num(xi)?, num(yi)?);
        if vx.is_finite() && vy.is_finite() {
            xs.push(vx);
            ys.push(vy);
        }
    }
    let coefficients = polyfit2(&xs, &ys).map_err(|source| BatchError::Fit {
        path: csv_path.to_path_buf(),
        source,
    })?;
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let rows: Vec<Vec<String>> = (0..FIT_SAMPLES)
        .map(|i| {
            let t = lo + (hi - lo) * i as f64 / (FIT_SAMPLES - 1) as f64;
            vec![full_precision(t), full_precision(polyval2(&coefficients, t))]
        })
        .collect();
    write_rows(out, &[x.to_string(), format!("{y}_fit")], &rows)?;
    Ok(TrendFit {
        coefficients,
        points: xs.len(),
    })
}
