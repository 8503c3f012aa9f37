//! Acceptance gate. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::fs;
use std::process::ExitCode;

use clamp_cli::{execute, run_preset, Preset, RunOptions};
use lyapunov_clamp::stabilizer::DECREASE_TOLERANCE;
use lyapunov_clamp::{
    clamp, simulate, v1_threshold, BaseLaw, Integrator, Metrics, PlantModel, ReferenceKind,
    ReferenceSample, SimulationSetup, StabilizerConfig, State, Trace, Variant,
};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

const SEEDS: [u64; 3] = [1, 2, 3];
const TRACKING_BAND: f64 = 0.2;
const T_SETTLE: f64 = 5.0;
const CONTROL_RANGE: (f64, f64) = (500.0, 2000.0);
const CAMPAIGN_RUNS: usize = 100;
const CLAMP_TRIPLES: usize = 100_000;
const ORACLE_CASES: usize = 1_000;
const ORACLE_REL_TOL: f64 = 1e-6;

type Outcome = Result<String, String>;

fn preset_run(preset: Preset, seed: u64) -> (Trace, Metrics) {
    let outcome = execute(&preset.config(seed), Some(preset)).expect("preset runs");
    let metrics = outcome.summary.metrics.expect("non-empty trace");
    (outcome.trace, metrics)
}

/// `max |e|` over `t ∈ [5, 60]`, recomputed from the records.
fn settled_error(trace: &Trace) -> f64 {
    trace
        .records
        .iter()
        .filter(|r| r.t >= T_SETTLE && r.t <= 60.0)
        .map(|r| r.e.abs())
        .fold(0.0, f64::max)
}

fn max_abs_u(trace: &Trace) -> f64 {
    trace.records.iter().map(|r| r.u.abs()).fold(0.0, f64::max)
}

fn ac1_test1_tracking() -> Outcome {
    let mut notes = Vec::new();
    for seed in SEEDS {
        let (trace, m) = preset_run(Preset::Test1, seed);
        let e = settled_error(&trace);
        notes.push(format!("seed {seed}: max|e|={e:.4}"));
        if e > TRACKING_BAND || m.max_abs_e_after != e {
            return Err(notes.join(", "));
        }
    }
    Ok(notes.join(", "))
}

fn ac2_test1_control_magnitude() -> Outcome {
    let mut notes = Vec::new();
    for seed in SEEDS {
        let (trace, m) = preset_run(Preset::Test1, seed);
        let u = max_abs_u(&trace);
        notes.push(format!("seed {seed}: u∈[{:.1}, {:.1}]", m.u_min, m.u_max));
        if !(CONTROL_RANGE.0..=CONTROL_RANGE.1).contains(&u) {
            return Err(notes.join(", "));
        }
    }
    Ok(notes.join(", "))
}

fn stable_step_preset(preset: Preset) -> Outcome {
    let mut notes = Vec::new();
    for seed in SEEDS {
        let (trace, m) = preset_run(preset, seed);
        let e = settled_error(&trace);
        notes.push(format!(
            "seed {seed}: completed={} violations={} max|e|={e:.4}",
            trace.is_completed(),
            m.decrease_violations
        ));
        if !trace.is_completed() || m.decrease_violations != 0 || e > TRACKING_BAND {
            return Err(notes.join(", "));
        }
    }
    Ok(notes.join(", "))
}

fn ac3_test2_stable() -> Outcome {
    stable_step_preset(Preset::Test2)
}

fn ac4_test3_tracking_and_span() -> Outcome {
    let mut notes = Vec::new();
    for seed in SEEDS {
        let (trace3, m3) = preset_run(Preset::Test3, seed);
        let (trace1, _) = preset_run(Preset::Test1, seed);
        let e = settled_error(&trace3);
        let (u3, u1) = (max_abs_u(&trace3), max_abs_u(&trace1));
        notes.push(format!(
            "seed {seed}: max|e|={e:.4} u∈[{:.1}, {:.1}] max|u| {u3:.1} vs test1 {u1:.1}",
            m3.u_min, m3.u_max
        ));
        if e > TRACKING_BAND || u3 <= u1 {
            return Err(notes.join(", "));
        }
    }
    Ok(notes.join(", "))
}

fn ac5_test4_stable() -> Outcome {
    stable_step_preset(Preset::Test4)
}

struct CampaignCase {
    setup: SimulationSetup,
    seed: u64,
}

fn campaign(variant: Variant, rng: &mut StdRng) -> Vec<CampaignCase> {
    (0..CAMPAIGN_RUNS)
        .map(|_| {
            let a1 = rng.random_range(0.5..=5.0);
            let a2 = rng.random_range(0.5..=5.0);
            let b = [0.5, 1.0, 2.0][rng.random_range(0..3)];
            let k = [1.0, 5.0, 20.0][rng.random_range(0..3)];
            let reference = if rng.random_bool(0.5) {
                ReferenceKind::Sinusoid {
                    amplitude: 1.0,
                    angular_frequency: 1.0,
                }
            } else {
                ReferenceKind::Step { level: 1.0 }
            };
            let integrator = if rng.random_bool(0.5) {
                Integrator::SemiImplicitEuler
            } else {
                Integrator::ForwardEuler
            };
            let plant = PlantModel::linear(a1, a2, b).unwrap();
            CampaignCase {
                setup: SimulationSetup {
                    stabilizer: StabilizerConfig::new(variant, k, 0.01, plant.clone()).unwrap(),
                    plant,
                    reference,
                    integrator,
                    dt: 0.01,
                    horizon: 3.0,
                    x0: State::ORIGIN,
                },
                seed: rng.random(),
            }
        })
        .collect()
}

fn run_case(case: &CampaignCase) -> Result<Trace, String> {
    let mut base = BaseLaw::noise(-500.0, 500.0, case.seed).unwrap();
    let trace = simulate(&case.setup, &mut base).map_err(|e| e.to_string())?;
    if !trace.is_completed() {
        return Err(format!(
            "seed {} aborted: {:?}",
            case.seed, trace.termination
        ));
    }
    Ok(trace)
}

fn ac6_v1_per_step_decrease() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xac6);
    let mut checked = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for case in campaign(Variant::V1, &mut rng) {
        let trace = run_case(&case)?;
        // x2_next of step k is the recorded x2 of step k + 1
        for w in trace.records.windows(2) {
            let (now, next) = (&w[0], &w[1]);
            if now.e != 0.0 {
                let margin = now.e * (now.y_r_dot - next.x2);
                worst = worst.max(margin);
                checked += 1;
                if margin > DECREASE_TOLERANCE {
                    return Err(format!("seed {}: t={} margin {margin:e}", case.seed, now.t));
                }
            }
        }
        if trace.records.iter().any(|r| !r.decrease_ok) {
            return Err(format!("seed {}: harness flagged a violation", case.seed));
        }
    }
    Ok(format!(
        "{checked} steps, worst e·(ẏ_r - x2_next) = {worst:e}"
    ))
}

fn ac7_v2_per_step_decrease() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xac7);
    let mut checked = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for case in campaign(Variant::V2, &mut rng) {
        let trace = run_case(&case)?;
        let k = case.setup.stabilizer.k();
        let plant = &case.setup.plant;
        let b = plant.gain_b();
        for r in &trace.records {
            let e_dot = r.y_r_dot - r.x2;
            let s = k * r.e + e_dot;
            let n = k * e_dot + r.y_r_ddot - plant.drift(r.x1, r.x2);
            let margin = s * (n - b * r.u);
            worst = worst.max(margin);
            checked += 1;
            if margin > DECREASE_TOLERANCE || !r.decrease_ok {
                return Err(format!("seed {}: t={} margin {margin:e}", case.seed, r.t));
            }
        }
    }
    Ok(format!("{checked} steps, worst s·(N - b u) = {worst:e}"))
}

fn ac8_clamp_algebra() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xac8);
    for i in 0..CLAMP_TRIPLES {
        let u_b = rng.random_range(-1e4..1e4);
        // every tenth triple shares u_b and threshold, every 17th has a zero driver
        let threshold = if i % 10 == 0 {
            u_b
        } else {
            rng.random_range(-1e4..1e4)
        };
        let driver = if i % 17 == 0 {
            0.0
        } else {
            rng.random_range(-10.0..10.0)
        };
        let d = clamp(u_b, threshold, driver);
        let expected = if driver > 0.0 {
            u_b.max(threshold)
        } else if driver < 0.0 {
            u_b.min(threshold)
        } else {
            u_b
        };
        let member = d.u.to_bits() == u_b.to_bits() || d.u.to_bits() == threshold.to_bits();
        if !member || d.u.to_bits() != expected.to_bits() {
            return Err(format!(
                "u_b={u_b} threshold={threshold} driver={driver} -> {}",
                d.u
            ));
        }
    }
    Ok(format!("{CLAMP_TRIPLES} triples"))
}

fn ac9_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let opts = RunOptions { plot: false };
    run_preset(Preset::Test1, 42, &a, opts).map_err(|e| e.to_string())?;
    run_preset(Preset::Test1, 42, &b, opts).map_err(|e| e.to_string())?;
    let ca = fs::read(a.join("trace.csv")).map_err(|e| e.to_string())?;
    let cb = fs::read(b.join("trace.csv")).map_err(|e| e.to_string())?;
    if ca == cb {
        Ok(format!("{} identical bytes", ca.len()))
    } else {
        Err("trace CSVs differ".into())
    }
}

/// Root of the predicted velocity error `ẏ_r - x2 - (f + b u) Δt` by bisection
/// on `[-1e6, 1e6]`; the error is monotone in `u` for `b ≠ 0`.
fn bisection_root(state: State, r: &ReferenceSample, plant: &PlantModel, dt: f64) -> f64 {
    let f = plant.drift(state.x1, state.x2);
    let b = plant.gain_b();
    let g = |u: f64| r.y_r_dot - state.x2 - (f + b * u) * dt;
    let (mut lo, mut hi) = (-1e6_f64, 1e6_f64);
    let rising = g(hi) > g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if (g(mid) > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn ac10_threshold_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xac10);
    let mut worst = 0.0f64;
    for _ in 0..ORACLE_CASES {
        let plant = PlantModel::linear(
            rng.random_range(0.5..5.0),
            rng.random_range(0.5..5.0),
            [0.5, 1.0, 2.0, -1.0][rng.random_range(0..4)],
        )
        .unwrap();
        let dt = [0.01, 0.001, 0.05][rng.random_range(0..3)];
        let cfg = StabilizerConfig::new(Variant::V1, 1.0, dt, plant.clone()).unwrap();
        let state = State::new(rng.random_range(-5.0..5.0), rng.random_range(-20.0..20.0));
        let r = ReferenceSample::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        );
        let fast = v1_threshold(state, &r, &cfg).map_err(|e| e.to_string())?;
        let oracle = bisection_root(state, &r, &plant, dt);
        let rel = (fast - oracle).abs() / fast.abs().max(oracle.abs()).max(1e-3);
        worst = worst.max(rel);
        if rel > ORACLE_REL_TOL {
            return Err(format!(
                "threshold {fast} vs bisection {oracle} (rel {rel:e})"
            ));
        }
    }
    Ok(format!(
        "{ORACLE_CASES} cases, worst relative gap {worst:e}"
    ))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        (
            "AC1 test1 tracking band |e| <= 0.2 after 5 s",
            ac1_test1_tracking,
        ),
        (
            "AC2 test1 max|u| in [500, 2000]",
            ac2_test1_control_magnitude,
        ),
        (
            "AC3 test2 completes, no violations, |e| <= 0.2",
            ac3_test2_stable,
        ),
        (
            "AC4 test3 |e| <= 0.2 and max|u| above test1",
            ac4_test3_tracking_and_span,
        ),
        (
            "AC5 test4 completes, no violations, |e| <= 0.2",
            ac5_test4_stable,
        ),
        (
            "AC6 V1 per-step decrease, randomized campaign",
            ac6_v1_per_step_decrease,
        ),
        (
            "AC7 V2 per-step decrease, randomized campaign",
            ac7_v2_per_step_decrease,
        ),
        ("AC8 clamp algebra over 1e5 triples", ac8_clamp_algebra),
        ("AC9 test1 seed 42 CSV is byte-identical", ac9_determinism),
        (
            "AC10 V1 threshold equals bisection root",
            ac10_threshold_oracle,
        ),
    ];

    let mut failures = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
