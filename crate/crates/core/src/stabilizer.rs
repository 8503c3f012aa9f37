//! The clamp: a dynamic threshold plus a max/min selection that turns any
//! base control into one along which the chosen Lyapunov function does not
//! increase.
//!
//! For `V1 = e²/2` the derivative over one sampling period is
//! `V̇1 = γ e (M/γ - u)` with `γ = b Δt` and, in sampled form,
//! `M = ẏ_r - x2 - f Δt`. For `V2 = s²/2` with `s = k e + ė` it is
//! `V̇2 = b s (N/b - u)` with `N = k ė + ÿ_r - f`. In both cases the derivative
//! is non-positive exactly when `u` lies on the far side of the threshold from
//! the sign of the driver (`e` or `s`), which is what [`clamp`] enforces.

use serde::{Deserialize, Serialize};

use crate::dynamics::{PlantModel, State};
use crate::error::{Error, Result};
use crate::signals::ReferenceSample;

/// Surface gain used when none is configured. With the 0.01 s sampling
/// period this puts `k Δt = 1.5`; the sampled surface loop is stable for
/// `k Δt < 2`.
pub const DEFAULT_SURFACE_GAIN: f64 = 150.0;

/// Slack allowed on the per-step decrease checks to absorb rounding.
pub const DECREASE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `V1 = e²/2`
    V1,
    /// `V2 = s²/2`, `s = k e + ė`
    V2,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::V1 => "v1",
            Variant::V2 => "v2",
        }
    }
}

/// Immutable clamp configuration. `dt` is the window `t - t'` and must equal
/// the simulation step; `model` is the controller's copy of `f` and `b`.
#[derive(Debug, Clone)]
pub struct StabilizerConfig {
    variant: Variant,
    k: f64,
    dt: f64,
    model: PlantModel,
}

impl StabilizerConfig {
    pub fn new(variant: Variant, k: f64, dt: f64, model: PlantModel) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid(
                "dt",
                format!("must be positive and finite, got {dt}"),
            ));
        }
        if !k.is_finite() {
            return Err(Error::invalid("k", "must be finite"));
        }
        if variant == Variant::V2 && k <= 0.0 {
            return Err(Error::invalid(
                "k",
                format!("must be positive for V2, got {k}"),
            ));
        }
        Ok(StabilizerConfig {
            variant,
            k,
            dt,
            model,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn model(&self) -> &PlantModel {
        &self.model
    }
}

/// Outcome of one clamp evaluation. `u` is always exactly `u_b` or exactly
/// `threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampDecision {
    pub threshold: f64,
    pub sign_driver: f64,
    pub u: f64,
    pub overridden: bool,
}

/// Error, error rate, surface value and the `N` bracket at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceTerms {
    pub e: f64,
    pub e_dot: f64,
    pub s: f64,
    pub n: f64,
}

pub fn surface_terms(
    state: State,
    r: &ReferenceSample,
    k: f64,
    model: &PlantModel,
) -> SurfaceTerms {
    let e = r.y_r - state.x1;
    let e_dot = r.y_r_dot - state.x2;
    let f = model.drift(state.x1, state.x2);
    SurfaceTerms {
        e,
        e_dot,
        s: k * e + e_dot,
        n: k * e_dot + r.y_r_ddot - f,
    }
}

/// `M/γ = (ẏ_r - x2 - f Δt) / (b Δt)`: the control that makes the predicted
/// velocity error `ẏ_r - x2(t + Δt)` vanish.
pub fn v1_threshold(state: State, r: &ReferenceSample, cfg: &StabilizerConfig) -> Result<f64> {
    let gamma = cfg.model.gain_b() * cfg.dt;
    if gamma == 0.0 {
        return Err(Error::DegenerateGain("b·dt"));
    }
    let f = cfg.model.drift(state.x1, state.x2);
    let m = r.y_r_dot - state.x2 - f * cfg.dt;
    Ok(m / gamma)
}

/// `(N/b, s)`.
pub fn v2_threshold(
    state: State,
    r: &ReferenceSample,
    cfg: &StabilizerConfig,
) -> Result<(f64, f64)> {
    let b = cfg.model.gain_b();
    if b == 0.0 {
        return Err(Error::DegenerateGain("b"));
    }
    let terms = surface_terms(state, r, cfg.k, &cfg.model);
    Ok((terms.n / b, terms.s))
}

/// `max(threshold, u_b)` for a positive driver, `min` for a negative one,
/// `u_b` untouched when the driver is zero.
#[inline]
pub fn clamp(u_b: f64, threshold: f64, sign_driver: f64) -> ClampDecision {
    let u = if sign_driver > 0.0 {
        threshold.max(u_b)
    } else if sign_driver < 0.0 {
        threshold.min(u_b)
    } else {
        u_b
    };
    ClampDecision {
        threshold,
        sign_driver,
        u,
        overridden: u != u_b,
    }
}

/// Threshold for the configured variant followed by [`clamp`].
///
/// The driver is `e` (V1) or `s` (V2), negated when `b < 0` so that the
/// selected side still makes `b · driver · (threshold - u)` non-positive.
///
/// V1 tie-break: when `e` is exactly zero the driver becomes the one-step
/// predicted error `e + (ẏ_r - x2) Δt`, so a loop that starts exactly on the
/// reference still reacts to a moving one. V2 passes `u_b` through at `s = 0`.
pub fn stabilize(
    state: State,
    r: &ReferenceSample,
    u_b: f64,
    cfg: &StabilizerConfig,
) -> Result<ClampDecision> {
    let orientation = cfg.model.gain_b().signum();
    let (threshold, driver) = match cfg.variant {
        Variant::V1 => {
            let threshold = v1_threshold(state, r, cfg)?;
            let e = r.y_r - state.x1;
            let driver = if e == 0.0 {
                e + (r.y_r_dot - state.x2) * cfg.dt
            } else {
                e
            };
            (threshold, driver)
        }
        Variant::V2 => v2_threshold(state, r, cfg)?,
    };
    Ok(clamp(u_b, threshold, orientation * driver))
}

/// `e · (ẏ_r - x2_next)`; non-positive when `V1` decreases over the step.
#[inline]
pub fn v1_decrease_margin(e: f64, y_r_dot: f64, x2_next: f64) -> f64 {
    e * (y_r_dot - x2_next)
}

/// `s · (N - b u)`, i.e. `V̇2`; non-positive when `V2` decreases.
#[inline]
pub fn v2_decrease_margin(s: f64, n: f64, b: f64, u: f64) -> f64 {
    s * (n - b * u)
}
