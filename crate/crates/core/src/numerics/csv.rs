//! CSV dumps of sampled functions.

use super::{Grid1D, PositionWavefunction};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt::Write as _;

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// `q,re,im` rows for a 1D grid function.
pub fn write_1d(f: &PositionWavefunction) -> String {
    let mut out = String::from("q,re,im\n");
    for (q, z) in f.grid().points().into_iter().zip(f.samples()) {
        let _ = writeln!(out, "{},{},{}", fmt(q), fmt(z.re), fmt(z.im));
    }
    out
}

/// `q,p,re,im` rows, `q` outer and `p` inner.
pub fn write_2d(qs: &[f64], ps: &[f64], values: &[Complex64]) -> Result<String> {
    if values.len() != qs.len() * ps.len() {
        return Err(Error::DimensionMismatch {
            expected: qs.len() * ps.len(),
            got: values.len(),
        });
    }
    let mut out = String::from("q,p,re,im\n");
    for (i, q) in qs.iter().enumerate() {
        for (j, p) in ps.iter().enumerate() {
            let z = values[i * ps.len() + j];
            let _ = writeln!(out, "{},{},{},{}", fmt(*q), fmt(*p), fmt(z.re), fmt(z.im));
        }
    }
    Ok(out)
}

/// Parses `q,re,im` rows; returns `(q, value)` pairs in file order.
pub fn read_1d(text: &str) -> Result<Vec<(f64, Complex64)>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == "q,re,im" => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header q,re,im, found {:?}",
                other.unwrap_or("")
            )))
        }
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 3 {
                return Err(Error::Parse(format!("row {}: expected 3 columns", i + 1)));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: {e}", i + 1)))
            };
            Ok((num(cols[0])?, Complex64::new(num(cols[1])?, num(cols[2])?)))
        })
        .collect()
}

/// Rebuilds a grid function from `q,re,im` rows; the nodes must be uniform
/// and follow the [`Grid1D`] layout.
pub fn read_wavefunction(text: &str) -> Result<PositionWavefunction> {
    let rows = read_1d(text)?;
    if rows.len() < 2 {
        return Err(Error::Parse("need at least two rows".into()));
    }
    let n = rows.len();
    let h = rows[1].0 - rows[0].0;
    let half_width = 0.5 * h * n as f64;
    let grid = Grid1D::new(rows[0].0 + half_width, half_width, n)?;
    for (k, (q, _)) in rows.iter().enumerate() {
        if (q - grid.point(k)).abs() > 1e-9 * half_width {
            return Err(Error::Parse(format!(
                "row {}: node {q} is off the uniform grid",
                k + 1
            )));
        }
    }
    PositionWavefunction::new(grid, rows.into_iter().map(|(_, z)| z).collect())
}
