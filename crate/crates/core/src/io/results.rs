use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mma::AccumMode;
use crate::reduction::Method;

/// One docking run as a CSV row. Column order is the field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub seed: u64,
    pub method: Method,
    pub accum_mode: AccumMode,
    pub instance: String,
    pub best_energy: f64,
    pub evaluations: u64,
    pub converged: bool,
    pub block_syncs: u64,
    pub atomic_adds: u64,
    pub mma_ops: u64,
}

const HEADER: [&str; 10] = [
    "seed",
    "method",
    "accum_mode",
    "instance",
    "best_energy",
    "evaluations",
    "converged",
    "block_syncs",
    "atomic_adds",
    "mma_ops",
];

/// RFC 4180 CSV with a header row, emitted even when `rows` is empty.
pub fn write_results(rows: &[ResultRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn parse_results(text: &str) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}
