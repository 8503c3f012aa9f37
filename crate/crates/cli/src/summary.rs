//! Summary JSON and pass/fail checks for a single run.

use lyapunov_clamp::{Metrics, Termination};
use serde::{Deserialize, Serialize};

use crate::config::{Criteria, RunConfig};
use crate::preset::Preset;

pub const TOOL_NAME: &str = "simulate";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: String,
    pub passed: bool,
}

/// Control span of a V2 run next to its V1 counterpart with the same seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanComparison {
    pub counterpart: Preset,
    pub counterpart_u_min: f64,
    pub counterpart_u_max: f64,
    pub counterpart_max_abs_u: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub max_abs_u: f64,
    pub exceeds_counterpart: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub tool: String,
    pub version: String,
    pub preset: Option<Preset>,
    pub termination: Termination,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub metrics: Option<Metrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<SpanComparison>,
    /// Effective configuration with every default resolved.
    pub config: RunConfig,
}

impl Summary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary always serializes");
        s.push('\n');
        s
    }
}

/// Completion and zero decrease violations always apply; `criteria` adds
/// optional bounds.
pub fn evaluate(
    termination: &Termination,
    metrics: Option<&Metrics>,
    criteria: &Criteria,
) -> Vec<Check> {
    let completed = *termination == Termination::Completed;
    let mut checks = vec![Check {
        name: "completed".into(),
        value: if completed { 1.0 } else { 0.0 },
        bound: "== 1".into(),
        passed: completed,
    }];

    let mut bound =
        |name: &str, value: Option<f64>, bound: String, ok: fn(f64, f64) -> bool, limit: f64| {
            checks.push(Check {
                name: name.into(),
                value: value.unwrap_or(f64::NAN),
                bound,
                passed: value.is_some_and(|v| ok(v, limit)),
            });
        };

    bound(
        "decrease_violations",
        metrics.map(|m| m.decrease_violations as f64),
        "== 0".into(),
        |v, l| v == l,
        0.0,
    );
    if let Some(limit) = criteria.max_abs_e {
        bound(
            "max_abs_e_after",
            metrics.map(|m| m.max_abs_e_after),
            format!("<= {limit}"),
            |v, l| v <= l,
            limit,
        );
    }
    if let Some(limit) = criteria.min_max_abs_u {
        bound(
            "max_abs_u",
            metrics.map(|m| m.max_abs_u),
            format!(">= {limit}"),
            |v, l| v >= l,
            limit,
        );
    }
    if let Some(limit) = criteria.max_max_abs_u {
        bound(
            "max_abs_u",
            metrics.map(|m| m.max_abs_u),
            format!("<= {limit}"),
            |v, l| v <= l,
            limit,
        );
    }
    checks
}
