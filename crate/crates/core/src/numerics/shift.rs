//! Bandlimited (Fourier) translation and interpolation on periodic grids.
//!
//! The Nyquist mode is treated symmetrically (as a cosine) so that real
//! samples stay real under interpolation and the shift kernel is real.

use super::{Grid1D, PositionWavefunction};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn forward(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

pub(crate) fn inverse(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// Translate `f` by `s`: returns samples of `q -> f(q - s)` under bandlimited
/// periodic interpolation.
///
/// Shifts that are integer multiples of the spacing reduce to an index
/// rotation and are bit-identical to it.
pub fn fractional_shift(f: &PositionWavefunction, s: f64) -> Result<PositionWavefunction> {
    let grid = *f.grid();
    if !s.is_finite() || s.abs() >= grid.half_width() {
        return Err(Error::DomainTooSmall {
            shift: s,
            half_width: grid.half_width(),
        });
    }
    if s == 0.0 {
        return Ok(f.clone());
    }
    let n = grid.len();
    let cells = s / grid.spacing();
    let whole = cells.round();
    if (cells - whole).abs() < 1e-12 {
        let m = whole as i64;
        let src = f.samples();
        let out = (0..n)
            .map(|k| src[((k as i64 - m).rem_euclid(n as i64)) as usize])
            .collect();
        return PositionWavefunction::new(grid, out);
    }
    let mut buf = f.samples().to_vec();
    forward(n).process(&mut buf);
    let freqs = grid.frequencies();
    let scale = 1.0 / n as f64;
    for (j, c) in buf.iter_mut().enumerate() {
        let mult = if j == n / 2 {
            Complex64::new((freqs[j] * s).cos(), 0.0)
        } else {
            Complex64::from_polar(1.0, -freqs[j] * s)
        };
        *c *= mult * scale;
    }
    inverse(n).process(&mut buf);
    PositionWavefunction::new(grid, buf)
}

/// Periodic interpolation kernel `D(u)` with `D(k h) = δ_k0`; the matrix of
/// translation by `s` is `D(x_k - x_l - s)`.
pub fn bandlimited_kernel(grid: &Grid1D, u: f64) -> f64 {
    let n = grid.len();
    let dw = PI / grid.half_width();
    let mut acc = 1.0 + (0.5 * n as f64 * dw * u).cos();
    for j in 1..n / 2 {
        acc += 2.0 * (j as f64 * dw * u).cos();
    }
    acc / n as f64
}

/// Bandlimited interpolation of `N` periodic samples onto the grid of spacing
/// `h/2` with the same origin (`2N` samples; even outputs equal the inputs).
pub fn interpolate_double(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    forward(n).process(&mut buf);
    let mut wide = vec![Complex64::new(0.0, 0.0); 2 * n];
    wide[..n / 2].copy_from_slice(&buf[..n / 2]);
    wide[n / 2 + 1 + n..].copy_from_slice(&buf[n / 2 + 1..]);
    wide[n / 2] = buf[n / 2] * 0.5;
    wide[3 * n / 2] = buf[n / 2] * 0.5;
    inverse(2 * n).process(&mut wide);
    let scale = 1.0 / n as f64;
    wide.iter_mut().for_each(|z| *z *= scale);
    wide
}
