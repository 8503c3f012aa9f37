//! Closed-loop simulation with a full per-step log.
//!
//! Each step samples the reference, measures `e`/`s` on the pre-update state,
//! draws `u_b`, clamps it, advances the plant with the clamped control held
//! constant, and records everything, including whether the Lyapunov decrease
//! condition held for that step.

use serde::{Deserialize, Serialize};

use crate::dynamics::{Integrator, PlantModel, State};
use crate::error::{Error, Result};
use crate::signals::{BaseLaw, ReferenceKind};
use crate::stabilizer::{
    stabilize, surface_terms, v1_decrease_margin, v2_decrease_margin, StabilizerConfig, Variant,
    DECREASE_TOLERANCE,
};

#[derive(Debug, Clone)]
pub struct SimulationSetup {
    pub plant: PlantModel,
    pub reference: ReferenceKind,
    pub stabilizer: StabilizerConfig,
    pub integrator: Integrator,
    pub dt: f64,
    pub horizon: f64,
    pub x0: State,
}

impl SimulationSetup {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(
                "dt",
                format!("must be positive, got {}", self.dt),
            ));
        }
        if !(self.horizon.is_finite() && self.horizon >= self.dt) {
            return Err(Error::invalid(
                "horizon",
                format!("must be at least dt ({}), got {}", self.dt, self.horizon),
            ));
        }
        if self.stabilizer.dt() != self.dt {
            return Err(Error::invalid(
                "dt",
                format!(
                    "stabilizer window {} differs from the simulation step {}",
                    self.stabilizer.dt(),
                    self.dt
                ),
            ));
        }
        if !self.x0.is_finite() {
            return Err(Error::invalid("x0", "initial state must be finite"));
        }
        self.reference.validate()
    }

    /// `⌊horizon / dt⌋`, tolerant of `horizon / dt` landing a few ulps under
    /// an integer.
    pub fn step_count(&self) -> usize {
        ((self.horizon / self.dt) * (1.0 + 1e-12)).floor() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
    pub y_r: f64,
    pub y_r_dot: f64,
    pub y_r_ddot: f64,
    pub e: f64,
    /// Surface value; recorded as 0 for V1 runs.
    pub s: f64,
    pub u_b: f64,
    pub threshold: f64,
    pub u: f64,
    pub overridden: bool,
    pub v1: f64,
    pub v2: f64,
    pub decrease_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    Aborted { step: usize, reason: String },
}

#[derive(Debug, Clone)]
pub struct Trace {
    pub setup: SimulationSetup,
    pub records: Vec<StepRecord>,
    pub termination: Termination,
}

impl Trace {
    pub fn is_completed(&self) -> bool {
        self.termination == Termination::Completed
    }
}

/// Runs the closed loop for `⌊horizon / dt⌋` steps.
///
/// Configuration errors are returned as `Err`. Divergence of the plant is not
/// an error: the trace stops at the offending step with
/// [`Termination::Aborted`].
pub fn simulate(setup: &SimulationSetup, base: &mut BaseLaw) -> Result<Trace> {
    setup.validate()?;

    let n = setup.step_count();
    let cfg = &setup.stabilizer;
    let variant = cfg.variant();
    let b = setup.plant.gain_b();
    let mut records = Vec::with_capacity(n);
    let mut state = setup.x0;
    let mut termination = Termination::Completed;

    for step in 0..n {
        let t = step as f64 * setup.dt;
        let r = setup.reference.eval(t);
        let terms = surface_terms(state, &r, cfg.k(), &setup.plant);

        let u_b = base.sample(t, terms.e, terms.e_dot);
        let decision = stabilize(state, &r, u_b, cfg)?;

        let next = match setup
            .integrator
            .step(state, decision.u, &setup.plant, setup.dt)
        {
            Ok(next) => next,
            Err(err) => {
                termination = Termination::Aborted {
                    step,
                    reason: err.to_string(),
                };
                break;
            }
        };

        let (s, decrease_ok) = match variant {
            Variant::V1 => {
                let ok = terms.e == 0.0
                    || v1_decrease_margin(terms.e, r.y_r_dot, next.x2) <= DECREASE_TOLERANCE;
                (0.0, ok)
            }
            Variant::V2 => {
                let ok = v2_decrease_margin(terms.s, terms.n, b, decision.u) <= DECREASE_TOLERANCE;
                (terms.s, ok)
            }
        };

        records.push(StepRecord {
            t,
            x1: state.x1,
            x2: state.x2,
            y_r: r.y_r,
            y_r_dot: r.y_r_dot,
            y_r_ddot: r.y_r_ddot,
            e: terms.e,
            s,
            u_b,
            threshold: decision.threshold,
            u: decision.u,
            overridden: decision.overridden,
            v1: 0.5 * terms.e * terms.e,
            v2: 0.5 * s * s,
            decrease_ok,
        });
        state = next;
    }

    Ok(Trace {
        setup: setup.clone(),
        records,
        termination,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub steps: usize,
    pub t_settle: f64,
    /// `max |e|` over records with `t >= t_settle`.
    pub max_abs_e_after: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub max_abs_u: f64,
    pub ub_min: f64,
    pub ub_max: f64,
    pub override_fraction: f64,
    pub decrease_violations: usize,
    /// Total variation of `u` per second of horizon.
    pub chattering_index: f64,
}

pub fn compute_metrics(trace: &Trace, t_settle: f64) -> Result<Metrics> {
    let records = &trace.records;
    if records.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let horizon = trace.setup.horizon;
    if !(t_settle >= 0.0 && t_settle < horizon) {
        return Err(Error::invalid(
            "t_settle",
            format!("must lie in [0, {horizon}), got {t_settle}"),
        ));
    }

    let max_abs_e_after = records
        .iter()
        .filter(|r| r.t >= t_settle)
        .map(|r| r.e.abs())
        .fold(0.0, f64::max);
    let (u_min, u_max) = min_max(records.iter().map(|r| r.u));
    let (ub_min, ub_max) = min_max(records.iter().map(|r| r.u_b));
    let overridden = records.iter().filter(|r| r.overridden).count();
    let decrease_violations = records.iter().filter(|r| !r.decrease_ok).count();
    let variation: f64 = records.windows(2).map(|w| (w[1].u - w[0].u).abs()).sum();

    Ok(Metrics {
        steps: records.len(),
        t_settle,
        max_abs_e_after,
        u_min,
        u_max,
        max_abs_u: u_min.abs().max(u_max.abs()),
        ub_min,
        ub_max,
        override_fraction: overridden as f64 / records.len() as f64,
        decrease_violations,
        chattering_index: variation / horizon,
    })
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}
