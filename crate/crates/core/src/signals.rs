//! Reference trajectories and base control laws.

use rand_core::Rng;
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Desired output and its first two derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSample {
    pub y_r: f64,
    pub y_r_dot: f64,
    pub y_r_ddot: f64,
}

impl ReferenceSample {
    pub const fn new(y_r: f64, y_r_dot: f64, y_r_ddot: f64) -> Self {
        ReferenceSample {
            y_r,
            y_r_dot,
            y_r_ddot,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceKind {
    /// `A sin(ω t)`
    Sinusoid {
        amplitude: f64,
        angular_frequency: f64,
    },
    /// Constant level. Its derivatives are zero everywhere, `t = 0` included.
    Step { level: f64 },
}

impl ReferenceKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ReferenceKind::Sinusoid {
                amplitude,
                angular_frequency,
            } => {
                if !amplitude.is_finite() {
                    return Err(Error::invalid("amplitude", "must be finite"));
                }
                if !angular_frequency.is_finite() {
                    return Err(Error::invalid("angular_frequency", "must be finite"));
                }
            }
            ReferenceKind::Step { level } => {
                if !level.is_finite() {
                    return Err(Error::invalid("level", "must be finite"));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, t: f64) -> ReferenceSample {
        reference_eval(self, t)
    }
}

pub fn reference_eval(kind: &ReferenceKind, t: f64) -> ReferenceSample {
    match *kind {
        ReferenceKind::Sinusoid {
            amplitude: a,
            angular_frequency: w,
        } => {
            let (sin, cos) = (w * t).sin_cos();
            ReferenceSample::new(a * sin, a * w * cos, -a * w * w * sin)
        }
        ReferenceKind::Step { level } => ReferenceSample::new(level, 0.0, 0.0),
    }
}

/// Stream constant recommended by the PCG reference implementation.
const PCG_STREAM: u128 = 0x0a02_bdbf_7bb3_c0a7_ac28_fa16_a64a_bf96;

/// Uniform noise on `[lo, hi)`, drawn from a PCG64 (XSL-RR 128/64) generator
/// whose initial state is the user seed.
#[derive(Debug, Clone)]
pub struct NoiseLaw {
    lo: f64,
    hi: f64,
    rng: Pcg64,
}

impl NoiseLaw {
    pub fn new(lo: f64, hi: f64, seed: u64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid("lo/hi", "noise bounds must be finite"));
        }
        if lo >= hi {
            return Err(Error::invalid(
                "lo",
                format!("lo ({lo}) must be below hi ({hi})"),
            ));
        }
        if !(hi - lo).is_finite() {
            return Err(Error::invalid("lo/hi", "noise span overflows"));
        }
        Ok(NoiseLaw {
            lo,
            hi,
            rng: Pcg64::new(u128::from(seed), PCG_STREAM),
        })
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn next_sample(&mut self) -> f64 {
        // top 53 bits -> [0, 1)
        let unit = (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let x = self.lo + (self.hi - self.lo) * unit;
        // lo + span * unit can round up to hi for wide spans
        x.min(self.hi)
    }
}

/// `kp e + ki ∫e dt + kd ė`, with the integral accumulated by the rectangle
/// rule before the output is formed.
#[derive(Debug, Clone, PartialEq)]
pub struct PidLaw {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    dt: f64,
    integral: f64,
}

impl PidLaw {
    pub fn new(kp: f64, ki: f64, kd: f64, dt: f64) -> Result<Self> {
        for (name, v) in [("kp", kp), ("ki", ki), ("kd", kd)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid("dt", "must be positive"));
        }
        Ok(PidLaw {
            kp,
            ki,
            kd,
            dt,
            integral: 0.0,
        })
    }

    pub fn integral(&self) -> f64 {
        self.integral
    }

    fn update(&mut self, e: f64, e_dot: f64) -> f64 {
        let next = self.integral + e * self.dt;
        if next.is_finite() {
            self.integral = next;
        }
        self.kp * e + self.ki * self.integral + self.kd * e_dot
    }
}

/// The base control `u_b` being stabilized. Stateful laws (noise, PID) must
/// not be shared between concurrent simulations.
#[derive(Debug, Clone)]
pub enum BaseLaw {
    Noise(NoiseLaw),
    Constant(f64),
    Zero,
    Pid(PidLaw),
}

impl BaseLaw {
    pub fn noise(lo: f64, hi: f64, seed: u64) -> Result<Self> {
        NoiseLaw::new(lo, hi, seed).map(BaseLaw::Noise)
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::invalid("value", "must be finite"));
        }
        Ok(BaseLaw::Constant(c))
    }

    pub fn pid(kp: f64, ki: f64, kd: f64, dt: f64) -> Result<Self> {
        PidLaw::new(kp, ki, kd, dt).map(BaseLaw::Pid)
    }

    /// Next base control. `t` is unused by the built-in laws but kept so the
    /// call site matches a time-varying law.
    pub fn sample(&mut self, _t: f64, e: f64, e_dot: f64) -> f64 {
        match self {
            BaseLaw::Noise(n) => n.next_sample(),
            BaseLaw::Constant(c) => *c,
            BaseLaw::Zero => 0.0,
            BaseLaw::Pid(p) => p.update(e, e_dot),
        }
    }
}

pub fn base_sample(law: &mut BaseLaw, t: f64, e: f64, e_dot: f64) -> f64 {
    law.sample(t, e, e_dot)
}
