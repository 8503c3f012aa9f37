//! Second-order plant `ẋ1 = x2, ẋ2 = f(x1, x2) + b u, y = x1` and the
//! fixed-step integrators that advance it under a zero-order-hold control.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Plant state at a sampling instant. `x1` is the output `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub x1: f64,
    pub x2: f64,
}

impl State {
    pub const ORIGIN: State = State { x1: 0.0, x2: 0.0 };

    pub const fn new(x1: f64, x2: f64) -> Self {
        State { x1, x2 }
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    fn checked(self) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonFiniteState {
                x1: self.x1,
                x2: self.x2,
            })
        }
    }
}

/// `f = -a1 x1 - a2 x2`.
#[inline]
pub fn linear_drift(x1: f64, x2: f64, a1: f64, a2: f64) -> f64 {
    -a1 * x1 - a2 * x2
}

pub type DriftFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// The unforced acceleration `f(x1, x2)`.
#[derive(Clone)]
pub enum Drift {
    Linear { a1: f64, a2: f64 },
    Custom(Arc<DriftFn>),
}

impl Drift {
    #[inline]
    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        match self {
            Drift::Linear { a1, a2 } => linear_drift(x1, x2, *a1, *a2),
            Drift::Custom(f) => f(x1, x2),
        }
    }
}

impl fmt::Debug for Drift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Drift::Linear { a1, a2 } => f
                .debug_struct("Linear")
                .field("a1", a1)
                .field("a2", a2)
                .finish(),
            Drift::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Drift function plus the input gain `b`. The gain is never zero: both
/// clamp thresholds divide by it.
#[derive(Debug, Clone)]
pub struct PlantModel {
    drift: Drift,
    gain_b: f64,
}

impl PlantModel {
    /// The linear plant `ẋ2 = -a1 x1 - a2 x2 + b u`.
    pub fn linear(a1: f64, a2: f64, b: f64) -> Result<Self> {
        if !a1.is_finite() {
            return Err(Error::invalid("a1", "must be finite"));
        }
        if !a2.is_finite() {
            return Err(Error::invalid("a2", "must be finite"));
        }
        Self::new(Drift::Linear { a1, a2 }, b)
    }

    pub fn custom<F>(drift: F, b: f64) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(Drift::Custom(Arc::new(drift)), b)
    }

    pub fn new(drift: Drift, b: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(Error::invalid("b", "must be finite"));
        }
        if b == 0.0 {
            return Err(Error::DegenerateGain("b"));
        }
        Ok(PlantModel { drift, gain_b: b })
    }

    #[inline]
    pub fn drift(&self, x1: f64, x2: f64) -> f64 {
        self.drift.eval(x1, x2)
    }

    pub fn drift_fn(&self) -> &Drift {
        &self.drift
    }

    #[inline]
    pub fn gain_b(&self) -> f64 {
        self.gain_b
    }

    /// `(a1, a2)` for the linear plant, `None` for a custom drift.
    pub fn linear_params(&self) -> Option<(f64, f64)> {
        match self.drift {
            Drift::Linear { a1, a2 } => Some((a1, a2)),
            Drift::Custom(_) => None,
        }
    }
}

/// `(ẋ1, ẋ2) = (x2, f(x1, x2) + b u)`.
#[inline]
pub fn plant_derivatives(state: State, u: f64, model: &PlantModel) -> (f64, f64) {
    let accel = model.drift(state.x1, state.x2) + model.gain_b() * u;
    (state.x2, accel)
}

/// Explicit forward Euler with `u` held over the step.
pub fn euler_step(state: State, u: f64, model: &PlantModel, dt: f64) -> Result<State> {
    let (v, a) = plant_derivatives(state, u, model);
    State::new(state.x1 + v * dt, state.x2 + a * dt).checked()
}

/// Semi-implicit (symplectic) Euler: the velocity update is identical to
/// [`euler_step`], the position then advances with the updated velocity.
pub fn semi_implicit_euler_step(
    state: State,
    u: f64,
    model: &PlantModel,
    dt: f64,
) -> Result<State> {
    let (_, a) = plant_derivatives(state, u, model);
    let x2 = state.x2 + a * dt;
    State::new(state.x1 + x2 * dt, x2).checked()
}

/// Classic fourth-order Runge-Kutta with `u` held over the step.
pub fn rk4_step(state: State, u: f64, model: &PlantModel, dt: f64) -> Result<State> {
    let at = |s: State| plant_derivatives(s, u, model);
    let half = 0.5 * dt;

    let k1 = at(state);
    let k2 = at(State::new(state.x1 + half * k1.0, state.x2 + half * k1.1));
    let k3 = at(State::new(state.x1 + half * k2.0, state.x2 + half * k2.1));
    let k4 = at(State::new(state.x1 + dt * k3.0, state.x2 + dt * k3.1));

    let sixth = dt / 6.0;
    State::new(
        state.x1 + sixth * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        state.x2 + sixth * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    )
    .checked()
}

/// Fixed-step scheme used by the closed loop.
///
/// Both Euler variants share the velocity update `x2 + (f + b u) dt`, so the
/// clamp's one-step velocity prediction is exact for either. RK4 is for
/// sensitivity studies only; the per-step decrease check is not expected to
/// hold under it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    ForwardEuler,
    #[default]
    SemiImplicitEuler,
    Rk4,
}

impl Integrator {
    pub fn step(self, state: State, u: f64, model: &PlantModel, dt: f64) -> Result<State> {
        match self {
            Integrator::ForwardEuler => euler_step(state, u, model, dt),
            Integrator::SemiImplicitEuler => semi_implicit_euler_step(state, u, model, dt),
            Integrator::Rk4 => rk4_step(state, u, model, dt),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Integrator::ForwardEuler => "forward_euler",
            Integrator::SemiImplicitEuler => "semi_implicit_euler",
            Integrator::Rk4 => "rk4",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_plant() -> PlantModel {
        PlantModel::linear(3.0, 2.0, 1.0).unwrap()
    }

    #[test]
    fn linear_drift_values() {
        assert_eq!(linear_drift(0.0, 0.0, 3.0, 2.0), 0.0);
        assert!((linear_drift(0.5, -0.2, 3.0, 2.0) - (-1.1)).abs() < 1e-15);
        assert_eq!(linear_drift(1.0, 0.0, 3.0, 2.0), -3.0);
    }

    #[test]
    fn derivatives() {
        let m = paper_plant();
        assert_eq!(plant_derivatives(State::ORIGIN, 0.0, &m), (0.0, 0.0));
        assert_eq!(plant_derivatives(State::ORIGIN, 1.0, &m), (0.0, 1.0));
        let (v, a) = plant_derivatives(State::new(0.5, -0.2), 2.0, &m);
        assert_eq!(v, -0.2);
        assert!((a - 0.9).abs() < 1e-15);
    }

    #[test]
    fn forward_euler_examples() {
        let m = paper_plant();
        let s = euler_step(State::ORIGIN, 1.0, &m, 0.01).unwrap();
        assert_eq!(s, State::new(0.0, 0.01));

        let s = euler_step(State::new(1.0, 0.0), 0.0, &m, 0.01).unwrap();
        assert_eq!(s.x1, 1.0);
        assert!((s.x2 - (-0.03)).abs() < 1e-15);

        let s = euler_step(State::new(0.5, -0.2), 0.0, &m, 0.01).unwrap();
        assert!((s.x1 - 0.498).abs() < 1e-15);
        assert!((s.x2 - (-0.211)).abs() < 1e-15);
    }

    #[test]
    fn semi_implicit_uses_updated_velocity() {
        let m = paper_plant();
        let s = semi_implicit_euler_step(State::new(0.5, -0.2), 0.0, &m, 0.01).unwrap();
        assert!((s.x2 - (-0.211)).abs() < 1e-15);
        assert!((s.x1 - (0.5 - 0.211 * 0.01)).abs() < 1e-15);
    }

    #[test]
    fn zero_dynamics_are_fixed() {
        let m = PlantModel::linear(4.2, 0.7, -3.0).unwrap();
        for integrator in [
            Integrator::ForwardEuler,
            Integrator::SemiImplicitEuler,
            Integrator::Rk4,
        ] {
            assert_eq!(
                integrator.step(State::ORIGIN, 0.0, &m, 0.01).unwrap(),
                State::ORIGIN
            );
        }
    }

    #[test]
    fn rk4_matches_free_oscillator() {
        // ẍ = -x from (1, 0): x(t) = cos t
        let m = PlantModel::linear(1.0, 0.0, 1.0).unwrap();
        let dt = 0.01;
        let mut s = State::new(1.0, 0.0);
        for _ in 0..100 {
            s = rk4_step(s, 0.0, &m, dt).unwrap();
        }
        assert!((s.x1 - 1f64.cos()).abs() < 1e-9);
        assert!((s.x2 + 1f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn non_finite_results_are_rejected() {
        let m = paper_plant();
        let err = euler_step(State::new(f64::MAX, f64::MAX), 0.0, &m, 10.0).unwrap_err();
        assert!(matches!(err, Error::NonFiniteState { .. }));
        assert!(euler_step(State::ORIGIN, f64::NAN, &m, 0.01).is_err());
    }

    #[test]
    fn zero_gain_is_rejected() {
        assert_eq!(
            PlantModel::linear(3.0, 2.0, 0.0).unwrap_err(),
            Error::DegenerateGain("b")
        );
        assert!(PlantModel::linear(f64::NAN, 2.0, 1.0).is_err());
    }

    #[test]
    fn custom_drift() {
        let m = PlantModel::custom(|x1, x2| -x1.sin() - 0.1 * x2, 2.0).unwrap();
        let (_, a) = plant_derivatives(State::new(0.3, 1.0), 0.5, &m);
        assert!((a - (-(0.3f64).sin() - 0.1 + 1.0)).abs() < 1e-15);
        assert!(m.linear_params().is_none());
    }
}
