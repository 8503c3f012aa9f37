//! Trace CSV: one header row, then one row per step. Reals are written with
//! 17 significant digits so every stored value survives a round trip.

use std::io::{Read, Write};

use lyapunov_clamp::StepRecord;
use thiserror::Error;

pub const COLUMNS: [&str; 15] = [
    "t",
    "x1",
    "x2",
    "y_r",
    "y_r_dot",
    "y_r_ddot",
    "e",
    "s",
    "u_b",
    "threshold",
    "u",
    "overridden",
    "V1",
    "V2",
    "decrease_ok",
];

#[derive(Debug, Error)]
pub enum TraceCsvError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("missing header row")]
    MissingHeader,

    #[error("unexpected header: expected {expected:?}, found {found:?}")]
    Header {
        expected: Vec<&'static str>,
        found: Vec<String>,
    },

    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount {
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("line {line}, column `{column}`: cannot parse {value:?}")]
    Value {
        line: u64,
        column: &'static str,
        value: String,
    },
}

#[inline]
fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trace<W: Write>(out: W, records: &[StepRecord]) -> Result<(), TraceCsvError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record([
            real(r.t),
            real(r.x1),
            real(r.x2),
            real(r.y_r),
            real(r.y_r_dot),
            real(r.y_r_ddot),
            real(r.e),
            real(r.s),
            real(r.u_b),
            real(r.threshold),
            real(r.u),
            r.overridden.to_string(),
            real(r.v1),
            real(r.v2),
            r.decrease_ok.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn trace_to_string(records: &[StepRecord]) -> String {
    let mut buf = Vec::with_capacity(records.len() * 300);
    write_trace(&mut buf, records).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("trace CSV is ASCII")
}

/// Parses a trace CSV. The header must match [`COLUMNS`] exactly.
pub fn parse_trace<R: Read>(input: R) -> Result<Vec<StepRecord>, TraceCsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut rows = reader.records();

    let header = rows.next().ok_or(TraceCsvError::MissingHeader)??;
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(TraceCsvError::Header {
            expected: COLUMNS.to_vec(),
            found: header.iter().map(str::to_owned).collect(),
        });
    }

    let mut records = Vec::new();
    for row in rows {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != COLUMNS.len() {
            return Err(TraceCsvError::FieldCount {
                line,
                expected: COLUMNS.len(),
                found: row.len(),
            });
        }
        let real = |i: usize| -> Result<f64, TraceCsvError> {
            row[i]
                .trim()
                .parse::<f64>()
                .map_err(|_| TraceCsvError::Value {
                    line,
                    column: COLUMNS[i],
                    value: row[i].to_owned(),
                })
        };
        let flag = |i: usize| -> Result<bool, TraceCsvError> {
            row[i]
                .trim()
                .parse::<bool>()
                .map_err(|_| TraceCsvError::Value {
                    line,
                    column: COLUMNS[i],
                    value: row[i].to_owned(),
                })
        };
        records.push(StepRecord {
            t: real(0)?,
            x1: real(1)?,
            x2: real(2)?,
            y_r: real(3)?,
            y_r_dot: real(4)?,
            y_r_ddot: real(5)?,
            e: real(6)?,
            s: real(7)?,
            u_b: real(8)?,
            threshold: real(9)?,
            u: real(10)?,
            overridden: flag(11)?,
            v1: real(12)?,
            v2: real(13)?,
            decrease_ok: flag(14)?,
        });
    }
    Ok(records)
}
