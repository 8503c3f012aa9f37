//! Trace CSV parser. Accepted input must re-serialize to a canonical form that
//! is a fixed point of parse + write.
#![no_main]
use clamp_cli::trace_csv::{parse_trace, trace_to_string};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(records) = parse_trace(data) else {
        return;
    };
    let canonical = trace_to_string(&records);
    let reparsed = parse_trace(canonical.as_bytes()).expect("canonical trace parses");
    assert_eq!(reparsed.len(), records.len());
    assert_eq!(trace_to_string(&reparsed), canonical);
});
