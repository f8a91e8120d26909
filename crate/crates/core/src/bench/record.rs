use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::attention::AttentionKind;
use crate::{Error, Result};

/// Exact CSV header. Column order never changes.
pub const CSV_HEADER: &str = "kernel,b,c,h,w,k,reps,wall_ns_median,peak_bytes,flops_est";

/// One benchmark measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub kernel: AttentionKind,
    pub b: usize,
    pub c: usize,
    pub h: usize,
    pub w: usize,
    pub k: usize,
    pub reps: usize,
    pub wall_ns_median: u64,
    pub peak_bytes: u64,
    pub flops_est: u64,
}

pub fn write_csv<W: Write>(out: W, records: &[BenchRecord]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    writer.write_record(CSV_HEADER.split(','))?;
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

/// Parses records, reporting the 1-based line of the first malformed row.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers().map_err(|e| parse_error(&e, 1))?.clone();
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected header '{CSV_HEADER}'"),
        });
    }
    let mut records = Vec::new();
    for (i, row) in reader.deserialize::<BenchRecord>().enumerate() {
        records.push(row.map_err(|e| parse_error(&e, i + 2))?);
    }
    Ok(records)
}

fn parse_error(e: &csv::Error, fallback_line: usize) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(fallback_line);
    let msg = match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
        _ => e.to_string(),
    };
    Error::Parse { line, msg }
}
