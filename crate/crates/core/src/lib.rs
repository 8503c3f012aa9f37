//! Lyapunov clamp controllers for second-order plants.
//!
//! A clamp wraps an arbitrary base control law `u_b` (a PID loop, a
//! feedforward term, or plain noise) and overrides it with a dynamically
//! computed threshold whenever `u_b` would let a Lyapunov function grow.
//! Two variants are provided:
//!
//! * [`Variant::V1`] works on `V1 = e²/2` with `e = y_r - x1` and pivots on
//!   the control that makes the predicted velocity error vanish after one
//!   sampling period.
//! * [`Variant::V2`] works on `V2 = s²/2` with the surface `s = k e + ė` and
//!   pivots on the control that makes `ṡ = 0`.
//!
//! The [`harness`] module closes the loop around a [`PlantModel`], logs every
//! step and checks the per-step decrease condition as it goes.
//!
//! ```
//! use lyapunov_clamp::{
//!     simulate, BaseLaw, Integrator, PlantModel, ReferenceKind, SimulationSetup,
//!     StabilizerConfig, State, Variant,
//! };
//!
//! let plant = PlantModel::linear(3.0, 2.0, 1.0).unwrap();
//! let stabilizer = StabilizerConfig::new(Variant::V1, 150.0, 0.01, plant.clone()).unwrap();
//! let setup = SimulationSetup {
//!     plant,
//!     reference: ReferenceKind::Sinusoid { amplitude: 1.0, angular_frequency: 1.0 },
//!     stabilizer,
//!     integrator: Integrator::SemiImplicitEuler,
//!     dt: 0.01,
//!     horizon: 10.0,
//!     x0: State::new(0.0, 0.0),
//! };
//! let mut base = BaseLaw::noise(-500.0, 500.0, 1).unwrap();
//! let trace = simulate(&setup, &mut base).unwrap();
//! assert!(trace.is_completed());
//! assert_eq!(trace.records.len(), 1000);
//! ```

pub mod dynamics;
mod error;
pub mod harness;
pub mod signals;
pub mod stabilizer;

pub use dynamics::{
    euler_step, linear_drift, plant_derivatives, rk4_step, semi_implicit_euler_step, Drift,
    Integrator, PlantModel, State,
};
pub use error::{Error, Result};
pub use harness::{
    compute_metrics, simulate, Metrics, SimulationSetup, StepRecord, Termination, Trace,
};
pub use signals::{reference_eval, BaseLaw, NoiseLaw, PidLaw, ReferenceKind, ReferenceSample};
pub use stabilizer::{
    clamp, stabilize, v1_threshold, v2_threshold, ClampDecision, StabilizerConfig, Variant,
};
