//! CSV and JSON emitters with atomic file replacement.
//!
//! Numbers are written with 17 significant digits; an empty CSV cell (or a
//! JSON `null`) marks a value that is undefined at that point.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::sweep::{Feature, FeatureKind, ScanAxis, SweepRow};

/// Header of `sweep` tables after the scan coordinate.
pub const SWEEP_COLUMNS: [&str; 14] = [
    "delta_a",
    "delta_b",
    "n_a",
    "n_b",
    "g2_a",
    "g2_b",
    "n_a_analytic",
    "n_b_analytic",
    "g2_a_analytic",
    "g2_b_analytic",
    "trace_error",
    "hermiticity",
    "min_eigenvalue",
    "flags",
];

pub const RECT_COLUMNS: [&str; 4] = ["R_numeric", "R_analytic", "N_k", "N_minus_k"];

pub const G2TAU_COLUMNS: [&str; 3] = ["tau", "g2_numeric", "g2_analytic"];

pub const FEATURE_COLUMNS: [&str; 3] = ["coordinate", "value", "kind"];

pub fn number(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn cell(v: Option<f64>) -> String {
    v.map(number).unwrap_or_default()
}

type CsvResult = Result<Vec<u8>, csv::Error>;

fn finish(w: csv::Writer<Vec<u8>>) -> CsvResult {
    w.into_inner().map_err(|e| csv::Error::from(io::Error::other(e.to_string())))
}

pub fn sweep_csv(axis: ScanAxis, rows: &[SweepRow]) -> CsvResult {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(std::iter::once(axis.name()).chain(SWEEP_COLUMNS))?;
    for r in rows {
        let d = r.diagnostics;
        let mut rec = vec![number(r.coordinate), number(r.delta_a), number(r.delta_b)];
        for v in [
            r.n_a,
            r.n_b,
            r.g2_a,
            r.g2_b,
            r.n_a_analytic,
            r.n_b_analytic,
            r.g2_a_analytic,
            r.g2_b_analytic,
            d.map(|d| d.trace_error),
            d.map(|d| d.hermiticity),
            d.map(|d| d.min_eigenvalue),
        ] {
            rec.push(cell(v));
        }
        rec.push(r.flags_text());
        w.write_record(&rec)?;
    }
    finish(w)
}

pub fn rect_csv(axis: ScanAxis, rows: &[SweepRow]) -> CsvResult {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(std::iter::once(axis.name()).chain(RECT_COLUMNS))?;
    for r in rows {
        w.write_record([
            number(r.coordinate),
            cell(r.r_numeric),
            cell(r.r_analytic),
            cell(r.n_total_k),
            cell(r.n_total_minus_k),
        ])?;
    }
    finish(w)
}

pub fn g2tau_csv(taus: &[f64], numeric: &[f64], analytic: Option<&[f64]>) -> CsvResult {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(G2TAU_COLUMNS)?;
    for (i, (&t, &g)) in taus.iter().zip(numeric).enumerate() {
        w.write_record([number(t), number(g), cell(analytic.map(|a| a[i]))])?;
    }
    finish(w)
}

pub fn features_csv(features: &[Feature]) -> CsvResult {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(FEATURE_COLUMNS)?;
    for f in features {
        let kind = match f.kind {
            FeatureKind::Min => "min",
            FeatureKind::Max => "max",
        };
        w.write_record([number(f.coordinate), number(f.value), kind.to_string()])?;
    }
    finish(w)
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

/// Write `bytes` to `path` through a temporary file in the same directory,
/// or to stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> io::Result<()> {
    let Some(path) = path else {
        let mut out = io::stdout().lock();
        out.write_all(bytes)?;
        return out.flush();
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
