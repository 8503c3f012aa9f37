use clamp_cli::trace_csv::{parse_trace, trace_to_string};
use clamp_cli::{execute, Preset};
use lyapunov_clamp::StepRecord;
use proptest::prelude::*;

fn bits(r: &StepRecord) -> [u64; 13] {
    [
        r.t,
        r.x1,
        r.x2,
        r.y_r,
        r.y_r_dot,
        r.y_r_ddot,
        r.e,
        r.s,
        r.u_b,
        r.threshold,
        r.u,
        r.v1,
        r.v2,
    ]
    .map(f64::to_bits)
}

fn any_real() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
        Just(f64::MAX),
    ]
}

prop_compose! {
    fn any_record()(
        reals in prop::collection::vec(any_real(), 13),
        overridden in any::<bool>(),
        decrease_ok in any::<bool>(),
    ) -> StepRecord {
        StepRecord {
            t: reals[0], x1: reals[1], x2: reals[2], y_r: reals[3], y_r_dot: reals[4],
            y_r_ddot: reals[5], e: reals[6], s: reals[7], u_b: reals[8], threshold: reals[9],
            u: reals[10], overridden, v1: reals[11], v2: reals[12], decrease_ok,
        }
    }
}

proptest! {
    #[test]
    fn csv_recovers_every_bit(records in prop::collection::vec(any_record(), 0..20)) {
        let parsed = parse_trace(trace_to_string(&records).as_bytes()).unwrap();
        prop_assert_eq!(parsed.len(), records.len());
        for (a, b) in records.iter().zip(&parsed) {
            prop_assert_eq!(bits(a), bits(b));
            prop_assert_eq!((a.overridden, a.decrease_ok), (b.overridden, b.decrease_ok));
        }
    }

    #[test]
    fn parser_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..512)) {
        let _ = parse_trace(bytes.as_slice());
    }
}

#[test]
fn simulated_trace_round_trips() {
    let outcome = execute(&Preset::Test3.config(5), Some(Preset::Test3)).unwrap();
    let text = trace_to_string(&outcome.trace.records);
    let parsed = parse_trace(text.as_bytes()).unwrap();
    assert_eq!(parsed, outcome.trace.records);
    assert_eq!(trace_to_string(&parsed), text);
}
