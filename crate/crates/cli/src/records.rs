//! Benchmark samples and their CSV form.
//!
//! The CSV starts with a `# seed=<u64>` line followed by a header row.
//! Reals are written in scientific notation with 17 significant digits,
//! which round-trips every `f64` exactly.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use crate::bench::Algorithm;
use crate::error::{CliError, Result};

/// One synthesis call.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub theta: f64,
    pub eps: f64,
    pub algorithm: Algorithm,
    /// Denominator exponent at which the search succeeded.
    pub f: u32,
    pub n_r: usize,
    pub distance: f64,
    pub wall_time_ms: f64,
}

const HEADER: [&str; 7] = ["theta", "eps", "algorithm", "f", "n_r", "distance", "wall_time_ms"];

/// 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(mut out: W, seed: u64, records: &[BenchRecord]) -> Result<()> {
    writeln!(out, "# seed={seed}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record([
            format_real(r.theta),
            format_real(r.eps),
            r.algorithm.to_string(),
            r.f.to_string(),
            r.n_r.to_string(),
            format_real(r.distance),
            format_real(r.wall_time_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let s = rec
        .get(i)
        .ok_or_else(|| CliError::input(format!("missing column {}", HEADER[i])))?;
    s.trim()
        .parse()
        .map_err(|e| CliError::input(format!("column {}: {e}", HEADER[i])))
}

/// Returns the seed and the records.
pub fn read_csv<R: Read>(input: R) -> Result<(u64, Vec<BenchRecord>)> {
    let mut reader = BufReader::new(input);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let seed = first
        .trim()
        .strip_prefix("# seed=")
        .ok_or_else(|| CliError::input("CSV must start with '# seed=<u64>'"))?
        .parse()
        .map_err(|e| CliError::input(format!("seed: {e}")))?;
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    if headers.iter().ne(HEADER) {
        return Err(CliError::input(format!("unexpected header {headers:?}")));
    }
    let mut records = Vec::new();
    for row in r.records() {
        let row = row?;
        records.push(BenchRecord {
            theta: field(&row, 0)?,
            eps: field(&row, 1)?,
            algorithm: field(&row, 2)?,
            f: field(&row, 3)?,
            n_r: field(&row, 4)?,
            distance: field(&row, 5)?,
            wall_time_ms: field(&row, 6)?,
        });
    }
    Ok((seed, records))
}
