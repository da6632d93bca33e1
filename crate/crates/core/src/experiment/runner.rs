//! Batched experiment execution: one engine run per seed, trace CSVs,
//! per-run summaries, and an aggregate summary.
//!
//! Seeds run concurrently; outputs are written atomically (temp file +
//! rename) so partially completed batches stay usable, and per-seed results
//! are deterministic regardless of scheduling.

use super::config::ExperimentConfig;
use crate::engine::{self, Trace};
use crate::error::Error;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error as ThisError;

/// Tolerance at which the Fejér monitor audits every completed run.
pub const FEJER_TOL: f64 = 1e-9;

/// Errors that abort the whole experiment (individual engine failures do
/// not; they are recorded in the affected run's summary).
#[derive(Debug, ThisError)]
pub enum ExperimentError {
    #[error("configuration invalid:\n{}", format_config_errors(.0))]
    Config(Vec<super::config::ConfigError>),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

fn format_config_errors(errors: &[super::config::ConfigError]) -> String {
    errors.iter().map(|e| format!("  - {e}")).collect::<Vec<_>>().join("\n")
}

/// Outcome of one seeded run, written as `summary_seed<seed>.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub stop_reason: String,
    pub iterations: u64,
    pub final_x: Vec<f64>,
    pub final_residuals: [f64; 3],
    pub final_dist_f: Option<f64>,
    /// Whether the per-step Fejér bound held for every known fixed point;
    /// absent when the fixed-point set is unknown or the trace is too short.
    pub fejer_passed: Option<bool>,
    pub schedule_strict_ok: bool,
    pub schedule_warnings: Vec<String>,
    pub run_warnings: Vec<String>,
    pub error: Option<String>,
    pub wall_time_ms: f64,
    pub trace_path: String,
}

/// Batch-level tallies, written as `aggregate.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateSummary {
    pub problem: String,
    pub schedule: String,
    pub mode: String,
    pub strategy: String,
    pub runs: usize,
    /// Runs stopped by residual tolerance or stagnation.
    pub converged: usize,
    pub failed: usize,
    pub all_monitors_passed: bool,
    /// The process exit contract: every run converged and every enabled
    /// monitor passed.
    pub exit_ok: bool,
    pub seeds: Vec<u64>,
    pub per_seed: Vec<SeedEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedEntry {
    pub seed: u64,
    pub stop_reason: String,
    pub iterations: u64,
    pub errored: bool,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub per_run: Vec<RunSummary>,
    pub aggregate: AggregateSummary,
    pub out_dir: PathBuf,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ExperimentError> {
    let tmp = path.with_extension("tmp");
    let io_err = |source| ExperimentError::Io { path: path.to_path_buf(), source };
    fs::write(&tmp, bytes).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)?;
    Ok(())
}

/// Execute every seed of the experiment, writing artifacts under the
/// config's output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, ExperimentError> {
    let problem = config.problem.build()?;
    let schedule = config.schedule.build(problem.dim())?;
    // Strict mode turns hypothesis violations into hard errors here; in
    // non-strict mode the warnings are attached to every run summary.
    let validation = schedule.validate(config.run.stop.max_iter, config.run.strict)?;

    fs::create_dir_all(&config.output.dir)
        .map_err(|source| ExperimentError::Io { path: config.output.dir.clone(), source })?;

    let mut per_run: Vec<RunSummary> = Vec::with_capacity(config.run.seeds.len());
    std::thread::scope(|scope| -> Result<(), ExperimentError> {
        let mut handles = Vec::new();
        for &seed in &config.run.seeds {
            let problem = &problem;
            let schedule = &schedule;
            let validation = &validation;
            handles.push(scope.spawn(move || one_run(config, problem, schedule, validation, seed)));
        }
        for handle in handles {
            per_run.push(handle.join().expect("run thread panicked")?);
        }
        Ok(())
    })?;

    let converged = per_run
        .iter()
        .filter(|r| r.stop_reason == "residual_tol" || r.stop_reason == "stagnation")
        .count();
    let failed = per_run.iter().filter(|r| r.error.is_some()).count();
    let all_monitors_passed = per_run.iter().all(|r| r.fejer_passed.unwrap_or(true));
    let exit_ok = converged == per_run.len() && failed == 0 && all_monitors_passed;
    let aggregate = AggregateSummary {
        problem: problem.label.clone(),
        schedule: schedule.label().to_string(),
        mode: config.run.mode.to_string(),
        strategy: config.run.strategy.to_string(),
        runs: per_run.len(),
        converged,
        failed,
        all_monitors_passed,
        exit_ok,
        seeds: config.run.seeds.clone(),
        per_seed: per_run
            .iter()
            .map(|r| SeedEntry {
                seed: r.seed,
                stop_reason: r.stop_reason.clone(),
                iterations: r.iterations,
                errored: r.error.is_some(),
            })
            .collect(),
    };
    let agg_path = config.output.dir.join("aggregate.json");
    write_atomic(&agg_path, &to_json(&aggregate))?;

    Ok(ExperimentOutcome { per_run, aggregate, out_dir: config.output.dir.clone() })
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("summaries serialize");
    bytes.push(b'\n');
    bytes
}

fn one_run(
    config: &ExperimentConfig,
    problem: &crate::catalog::Problem,
    schedule: &crate::schedules::Schedule,
    validation: &crate::schedules::ValidationReport,
    seed: u64,
) -> Result<RunSummary, ExperimentError> {
    let settings = config.run.settings_for_seed(seed);
    let started = Instant::now();
    let (trace, error): (Trace, Option<Error>) =
        match engine::run(problem, &config.problem.x1, schedule, &settings) {
            Ok(trace) => (trace, None),
            Err(failure) => (failure.trace, Some(failure.error)),
        };
    let wall_time_ms = started.elapsed().as_secs_f64() * 1e3;

    let trace_name = format!("trace_seed{seed}.csv");
    let trace_path = config.output.dir.join(&trace_name);
    write_atomic(&trace_path, trace.to_csv().as_bytes())?;

    let fejer_passed = match (&problem.fixed_points, trace.len()) {
        (Some(fixed), n) if n >= 2 => {
            let mut ok = true;
            for p in &fixed.points {
                ok &= engine::fejer_check(&trace, p, None, FEJER_TOL)?.passed;
            }
            Some(ok)
        }
        _ => None,
    };

    let summary = summarize(
        seed,
        &trace,
        error.as_ref(),
        fejer_passed,
        validation,
        wall_time_ms,
        &trace_name,
    );
    let summary_path = config.output.dir.join(format!("summary_seed{seed}.json"));
    write_atomic(&summary_path, &to_json(&summary))?;

    if config.output.plots {
        let plot_path = config.output.dir.join(format!("residual_seed{seed}.svg"));
        write_atomic(&plot_path, residual_plot(&trace).as_bytes())?;
    }
    Ok(summary)
}

fn summarize(
    seed: u64,
    trace: &Trace,
    error: Option<&Error>,
    fejer_passed: Option<bool>,
    validation: &crate::schedules::ValidationReport,
    wall_time_ms: f64,
    trace_name: &str,
) -> RunSummary {
    let last = trace.final_record();
    RunSummary {
        seed,
        stop_reason: trace.meta.stop_reason.to_string(),
        iterations: trace.len() as u64,
        final_x: last.map(|r| r.x.coords().to_vec()).unwrap_or_default(),
        final_residuals: last.map(|r| r.residuals).unwrap_or([f64::NAN; 3]),
        final_dist_f: last.and_then(|r| r.dist_f),
        fejer_passed,
        schedule_strict_ok: validation.strict_ok,
        schedule_warnings: validation.warnings.clone(),
        run_warnings: trace.meta.warnings.clone(),
        error: error.map(|e| e.to_string()),
        wall_time_ms,
        trace_path: trace_name.to_string(),
    }
}

/// A small static SVG of log10(max residual) against the iteration index.
fn residual_plot(trace: &Trace) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 50.0;

    let series: Vec<(f64, f64)> = trace
        .records
        .iter()
        .map(|r| {
            let worst = r.residuals.iter().cloned().fold(0.0, f64::max);
            (r.n as f64, worst.max(1e-300).log10())
        })
        .collect();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (_, v) in &series {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    if !lo.is_finite() || lo == hi {
        lo -= 1.0;
        hi += 1.0;
    }
    let n_max = series.last().map(|(n, _)| *n).unwrap_or(1.0).max(1.0);
    let pts: Vec<String> = series
        .iter()
        .map(|(n, v)| {
            let x = PAD + (n - 1.0) / (n_max - 1.0).max(1.0) * (W - 2.0 * PAD);
            let y = H - PAD - (v - lo) / (hi - lo) * (H - 2.0 * PAD);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w} {h}\">\n",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<line x1=\"{pad}\" y1=\"{axy}\" x2=\"{axe}\" y2=\"{axy}\" stroke=\"black\"/>\n",
            "<line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{axy}\" stroke=\"black\"/>\n",
            "<text x=\"{xmid}\" y=\"{xlab}\" text-anchor=\"middle\" font-size=\"13\">iteration n (1..{nmax})</text>\n",
            "<text x=\"14\" y=\"{ymid}\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 14 {ymid})\">log10 max residual [{lo:.2}, {hi:.2}]</text>\n",
            "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"{pts}\"/>\n",
            "</svg>\n"
        ),
        w = W,
        h = H,
        pad = PAD,
        axy = H - PAD,
        axe = W - PAD,
        xmid = W / 2.0,
        xlab = H - 14.0,
        ymid = H / 2.0,
        nmax = n_max as u64,
        lo = lo,
        hi = hi,
        pts = pts.join(" "),
    )
}
