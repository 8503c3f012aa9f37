//! Single runs, preset runs and seed sweeps, with their file outputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use lyapunov_clamp::{compute_metrics, simulate, Metrics, Trace};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{parse_config, ConfigError, RunConfig};
use crate::plot::render_svg;
use crate::preset::Preset;
use crate::summary::{evaluate, SpanComparison, Summary, TOOL_NAME, TOOL_VERSION};
use crate::trace_csv::{trace_to_string, TraceCsvError};

/// Upper bound on the number of seeds one sweep may request.
pub const MAX_SWEEP_SEEDS: usize = 100_000;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    TraceCsv(#[from] TraceCsvError),

    #[error("simulation: {0}")]
    Simulation(#[from] lyapunov_clamp::Error),

    #[error(transparent)]
    Seeds(#[from] SeedListError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_owned(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub plot: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { plot: true }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trace: Trace,
    pub summary: Summary,
}

fn simulate_config(cfg: &RunConfig) -> Result<(Trace, Option<Metrics>), RunError> {
    let (setup, mut base) = cfg.build()?;
    let trace = simulate(&setup, &mut base)?;
    let metrics = if trace.records.is_empty() {
        None
    } else {
        Some(compute_metrics(&trace, cfg.t_settle)?)
    };
    Ok((trace, metrics))
}

/// Runs `cfg` in memory. For V2 presets the V1 counterpart is also run with
/// the same seed so the summary can report both control spans.
pub fn execute(cfg: &RunConfig, preset: Option<Preset>) -> Result<RunOutcome, RunError> {
    let (trace, metrics) = simulate_config(cfg)?;
    let checks = evaluate(&trace.termination, metrics.as_ref(), &cfg.criteria);
    let passed = checks.iter().all(|c| c.passed);

    let comparison = match (preset.and_then(Preset::v1_counterpart), metrics.as_ref()) {
        (Some(counterpart), Some(m)) => {
            let (_, other) = simulate_config(&counterpart.config(cfg.seed))?;
            other.map(|o| SpanComparison {
                counterpart,
                counterpart_u_min: o.u_min,
                counterpart_u_max: o.u_max,
                counterpart_max_abs_u: o.max_abs_u,
                u_min: m.u_min,
                u_max: m.u_max,
                max_abs_u: m.max_abs_u,
                exceeds_counterpart: m.max_abs_u > o.max_abs_u,
            })
        }
        _ => None,
    };

    let summary = Summary {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        preset,
        termination: trace.termination.clone(),
        passed,
        checks,
        metrics,
        comparison,
        config: cfg.clone(),
    };
    Ok(RunOutcome { trace, summary })
}

pub fn write_outputs(
    outcome: &RunOutcome,
    out_dir: &Path,
    opts: RunOptions,
) -> Result<(), RunError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let cfg = &outcome.summary.config;

    let path = out_dir.join(&cfg.output.trace);
    fs::write(&path, trace_to_string(&outcome.trace.records)).map_err(io_err(&path))?;

    let path = out_dir.join(&cfg.output.summary);
    fs::write(&path, outcome.summary.to_json()).map_err(io_err(&path))?;

    if opts.plot {
        let title = match outcome.summary.preset {
            Some(p) => format!("{p} (seed {})", cfg.seed),
            None => format!("{} run (seed {})", cfg.stabilizer.variant.name(), cfg.seed),
        };
        let path = out_dir.join(&cfg.output.plot);
        fs::write(&path, render_svg(&outcome.trace.records, &title)).map_err(io_err(&path))?;
    }
    Ok(())
}

pub fn run_config(cfg: &RunConfig, out_dir: &Path, opts: RunOptions) -> Result<Summary, RunError> {
    let outcome = execute(cfg, None)?;
    write_outputs(&outcome, out_dir, opts)?;
    Ok(outcome.summary)
}

pub fn run_config_file(path: &Path, out_dir: &Path, opts: RunOptions) -> Result<Summary, RunError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let cfg = parse_config(&text)?;
    run_config(&cfg, out_dir, opts)
}

pub fn run_preset(
    preset: Preset,
    seed: u64,
    out_dir: &Path,
    opts: RunOptions,
) -> Result<Summary, RunError> {
    let outcome = execute(&preset.config(seed), Some(preset))?;
    write_outputs(&outcome, out_dir, opts)?;
    Ok(outcome.summary)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeedListError {
    #[error("empty seed list")]
    Empty,
    #[error("invalid seed {0:?}")]
    Invalid(String),
    #[error("descending seed range {0}..{1}")]
    Descending(u64, u64),
    #[error("duplicate seed {0}")]
    Duplicate(u64),
    #[error("too many seeds (limit {MAX_SWEEP_SEEDS})")]
    TooMany,
}

/// Parses `a..b` (inclusive), `a,b,c`, or a comma-separated mix of both.
pub fn parse_seeds(spec: &str) -> Result<Vec<u64>, SeedListError> {
    let num = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| SeedListError::Invalid(s.trim().to_owned()))
    };
    let mut seeds = Vec::new();
    let mut seen = BTreeSet::new();
    let mut push = |seed: u64, seeds: &mut Vec<u64>| {
        if !seen.insert(seed) {
            return Err(SeedListError::Duplicate(seed));
        }
        if seeds.len() == MAX_SWEEP_SEEDS {
            return Err(SeedListError::TooMany);
        }
        seeds.push(seed);
        Ok(())
    };

    for item in spec.split(',') {
        let item = item.trim();
        if item.is_empty() {
            if spec.trim().is_empty() {
                return Err(SeedListError::Empty);
            }
            return Err(SeedListError::Invalid(item.to_owned()));
        }
        match item.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(SeedListError::Descending(a, b));
                }
                if b - a >= MAX_SWEEP_SEEDS as u64 {
                    return Err(SeedListError::TooMany);
                }
                for seed in a..=b {
                    push(seed, &mut seeds)?;
                }
            }
            None => push(num(item)?, &mut seeds)?,
        }
    }
    Ok(seeds)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        };
        Some(Stats {
            min: v[0],
            median,
            max: v[n - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Metrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub tool: String,
    pub version: String,
    pub preset: Preset,
    pub seeds: Vec<u64>,
    pub all_passed: bool,
    pub runs: Vec<SeedResult>,
    pub aggregate: BTreeMap<String, Stats>,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report always serializes");
        s.push('\n');
        s
    }
}

fn aggregate(runs: &[SeedResult]) -> BTreeMap<String, Stats> {
    let metrics: Vec<&Metrics> = runs.iter().filter_map(|r| r.metrics.as_ref()).collect();
    type Field = (&'static str, fn(&Metrics) -> f64);
    let fields: [Field; 9] = [
        ("max_abs_e_after", |m| m.max_abs_e_after),
        ("u_min", |m| m.u_min),
        ("u_max", |m| m.u_max),
        ("max_abs_u", |m| m.max_abs_u),
        ("ub_min", |m| m.ub_min),
        ("ub_max", |m| m.ub_max),
        ("override_fraction", |m| m.override_fraction),
        ("decrease_violations", |m| m.decrease_violations as f64),
        ("chattering_index", |m| m.chattering_index),
    ];
    fields
        .iter()
        .filter_map(|(name, get)| {
            let values: Vec<f64> = metrics.iter().map(|m| get(m)).collect();
            Stats::of(&values).map(|s| (name.to_string(), s))
        })
        .collect()
}

pub fn seed_dir(out_dir: &Path, seed: u64) -> PathBuf {
    out_dir.join(format!("seed-{seed}"))
}

/// Runs every seed (in parallel), writes each run under `seed-<n>/` and the
/// aggregate report to `aggregate.json`.
pub fn sweep(
    preset: Preset,
    seeds: &[u64],
    out_dir: &Path,
    opts: RunOptions,
) -> Result<SweepReport, RunError> {
    if seeds.is_empty() {
        return Err(SeedListError::Empty.into());
    }
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;

    let runs: Vec<SeedResult> = seeds
        .par_iter()
        .map(
            |&seed| match run_preset(preset, seed, &seed_dir(out_dir, seed), opts) {
                Ok(summary) => SeedResult {
                    seed,
                    passed: summary.passed,
                    metrics: summary.metrics,
                    error: None,
                },
                Err(e) => SeedResult {
                    seed,
                    passed: false,
                    metrics: None,
                    error: Some(e.to_string()),
                },
            },
        )
        .collect();

    let report = SweepReport {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        preset,
        seeds: seeds.to_vec(),
        all_passed: runs.iter().all(|r| r.passed),
        aggregate: aggregate(&runs),
        runs,
    };
    let path = out_dir.join("aggregate.json");
    fs::write(&path, report.to_json()).map_err(io_err(&path))?;
    Ok(report)
}
