//! The four reference experiments.
//!
//! All share the linear plant `a1 = 3, a2 = 2, b = 1`, uniform noise on
//! `[-500, 500]` as the base law, `Δt = 0.01 s`, a 60 s horizon and a start
//! at rest. They differ in variant and reference:
//!
//! | preset | variant | reference |
//! |--------|---------|-----------|
//! | test1  | V1      | `sin t`   |
//! | test2  | V1      | step 1    |
//! | test3  | V2      | `sin t`   |
//! | test4  | V2      | step 1    |

use std::fmt;
use std::str::FromStr;

use lyapunov_clamp::stabilizer::DEFAULT_SURFACE_GAIN;
use lyapunov_clamp::{Integrator, ReferenceKind, Variant};
use serde::{Deserialize, Serialize};

use crate::config::{
    BaseSpec, Criteria, InitialState, OutputSection, PlantSection, RunConfig, StabilizerSection,
};

/// Tracking band after the settling window.
pub const TRACKING_BAND: f64 = 0.2;
/// Bounds on `max |u|` for test1: above the base-law bound, within twice the
/// reported ±1000.
pub const TEST1_CONTROL_RANGE: (f64, f64) = (500.0, 2000.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Test1,
    Test2,
    Test3,
    Test4,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownPreset(pub String);

impl fmt::Display for UnknownPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown preset {:?} (expected test1, test2, test3 or test4)",
            self.0
        )
    }
}

impl std::error::Error for UnknownPreset {}

impl FromStr for Preset {
    type Err = UnknownPreset;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "test1" => Ok(Preset::Test1),
            "test2" => Ok(Preset::Test2),
            "test3" => Ok(Preset::Test3),
            "test4" => Ok(Preset::Test4),
            _ => Err(UnknownPreset(s.to_owned())),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Test1, Preset::Test2, Preset::Test3, Preset::Test4];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Test1 => "test1",
            Preset::Test2 => "test2",
            Preset::Test3 => "test3",
            Preset::Test4 => "test4",
        }
    }

    pub fn variant(self) -> Variant {
        match self {
            Preset::Test1 | Preset::Test2 => Variant::V1,
            Preset::Test3 | Preset::Test4 => Variant::V2,
        }
    }

    pub fn reference(self) -> ReferenceKind {
        match self {
            Preset::Test1 | Preset::Test3 => ReferenceKind::Sinusoid {
                amplitude: 1.0,
                angular_frequency: 1.0,
            },
            Preset::Test2 | Preset::Test4 => ReferenceKind::Step { level: 1.0 },
        }
    }

    pub fn criteria(self) -> Criteria {
        let mut c = Criteria {
            max_abs_e: Some(TRACKING_BAND),
            ..Criteria::default()
        };
        if self == Preset::Test1 {
            c.min_max_abs_u = Some(TEST1_CONTROL_RANGE.0);
            c.max_max_abs_u = Some(TEST1_CONTROL_RANGE.1);
        }
        c
    }

    /// The V1 preset with the same reference, used to compare control spans.
    pub fn v1_counterpart(self) -> Option<Preset> {
        match self {
            Preset::Test3 => Some(Preset::Test1),
            Preset::Test4 => Some(Preset::Test2),
            _ => None,
        }
    }

    pub fn config(self, seed: u64) -> RunConfig {
        RunConfig {
            seed,
            horizon: 60.0,
            t_settle: 5.0,
            integrator: Integrator::SemiImplicitEuler,
            plant: PlantSection {
                a1: 3.0,
                a2: 2.0,
                b: 1.0,
            },
            reference: self.reference(),
            base: BaseSpec::Noise {
                lo: -500.0,
                hi: 500.0,
            },
            stabilizer: StabilizerSection {
                variant: self.variant(),
                k: DEFAULT_SURFACE_GAIN,
                dt: 0.01,
            },
            x0: InitialState::default(),
            criteria: self.criteria(),
            output: OutputSection::default(),
        }
    }
}
