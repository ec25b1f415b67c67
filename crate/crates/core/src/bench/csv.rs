//! Trace CSV: a `# config=<hash> seed=<seed>` line, the header
//! `k,fx,min_g,unorm,kkt,elapsed_s`, then one row per recorded iteration with
//! floats in `{:.16e}` form (17 significant digits).

use std::io::Write;

use crate::solvers::TraceRecord;
use crate::{Error, Result};

pub const HEADER: &str = "k,fx,min_g,unorm,kkt,elapsed_s";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRecord {
    pub k: usize,
    pub fx: f64,
    pub min_g: f64,
    pub unorm: f64,
    pub kkt: f64,
    pub elapsed_s: f64,
}

impl From<&TraceRecord> for CsvRecord {
    fn from(r: &TraceRecord) -> Self {
        Self { k: r.k, fx: r.fx, min_g: r.min_g, unorm: r.unorm, kkt: r.kkt, elapsed_s: r.elapsed_s }
    }
}

/// Writes every `stride`-th record and always the last one.
pub fn write_trace_csv<W: Write>(mut w: W, hash: &str, seed: u64, records: &[CsvRecord], stride: usize) -> std::io::Result<()> {
    writeln!(w, "# config={hash} seed={seed}")?;
    writeln!(w, "{HEADER}")?;
    let stride = stride.max(1);
    for (idx, r) in records.iter().enumerate() {
        if idx % stride != 0 && idx + 1 != records.len() {
            continue;
        }
        writeln!(w, "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.6e}", r.k, r.fx, r.min_g, r.unorm, r.kkt, r.elapsed_s)?;
    }
    Ok(())
}

/// Parses a trace CSV back into its header fields and records.
pub fn read_trace_csv(text: &str) -> Result<(String, u64, Vec<CsvRecord>)> {
    let bad = |m: &str| Error::InvalidParameter(format!("malformed trace: {m}"));
    let mut lines = text.lines();
    let first = lines.next().ok_or_else(|| bad("empty"))?;
    let rest = first.strip_prefix("# config=").ok_or_else(|| bad("missing config line"))?;
    let (hash, seed) = rest.split_once(" seed=").ok_or_else(|| bad("missing seed"))?;
    let seed: u64 = seed.trim().parse().map_err(|_| bad("seed"))?;
    if lines.next() != Some(HEADER) {
        return Err(bad("column header"));
    }
    let mut records = Vec::new();
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(bad(line));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(s));
        records.push(CsvRecord {
            k: f[0].parse().map_err(|_| bad(f[0]))?,
            fx: num(f[1])?,
            min_g: num(f[2])?,
            unorm: num(f[3])?,
            kkt: num(f[4])?,
            elapsed_s: num(f[5])?,
        });
    }
    Ok((hash.to_string(), seed, records))
}

/// The numeric columns of a trace CSV without the wall-clock column.
pub fn numeric_columns(text: &str) -> String {
    text.lines()
        .map(|l| match l.rsplit_once(',') {
            Some((head, _)) if !l.starts_with('#') => head,
            _ => l,
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_lossless() {
        let recs = vec![
            CsvRecord { k: 0, fx: 1.0 / 3.0, min_g: -2e-300, unorm: 0.0, kkt: f64::NAN, elapsed_s: 0.5 },
            CsvRecord { k: 1, fx: std::f64::consts::PI, min_g: 1e10, unorm: 1.0e-17, kkt: 4.0, elapsed_s: 1.0 },
        ];
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, "abc", 7, &recs, 1).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let (hash, seed, back) = read_trace_csv(&text).unwrap();
        assert_eq!((hash.as_str(), seed), ("abc", 7));
        assert_eq!(back[1], recs[1]);
        assert_eq!(back[0].fx, recs[0].fx);
        assert!(back[0].kkt.is_nan());
    }

    #[test]
    fn stride_keeps_last_record() {
        let recs: Vec<CsvRecord> = (0..5)
            .map(|k| CsvRecord { k, fx: 0.0, min_g: 0.0, unorm: 0.0, kkt: 0.0, elapsed_s: 0.0 })
            .collect();
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, "h", 0, &recs, 3).unwrap();
        let (_, _, back) = read_trace_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.iter().map(|r| r.k).collect::<Vec<_>>(), vec![0, 3, 4]);
    }
}
