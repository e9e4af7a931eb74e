//! Shared numerics: periodic grids, bandlimited shifts, quadrature, Hermite
//! functions and operator-norm estimation.

pub mod csv;
mod hermite;
mod norm;
mod quad;
pub(crate) mod shift;
pub mod sum;

pub use hermite::{hermite_fn, hermite_values, MAX_HERMITE_ORDER};
pub use norm::{compress, operator_norm, operator_norm_with, PowerIteration};
pub use quad::{gauss_laguerre, quad_2d, GaussLaguerre, Window2D};
pub use shift::{bandlimited_kernel, fractional_shift, interpolate_double};

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Uniform periodic grid `center - L + k h`, `k = 0..N`, with `h = 2L / N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    center: f64,
    half_width: f64,
    count: usize,
}

impl Grid1D {
    pub fn new(center: f64, half_width: f64, count: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half-width must be positive, got {half_width}"
            )));
        }
        if !center.is_finite() {
            return Err(Error::InvalidGrid("center must be finite".into()));
        }
        if count < 8 || !count.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "point count must be a power of two >= 8, got {count}"
            )));
        }
        Ok(Self {
            center,
            half_width,
            count,
        })
    }

    /// Grid centered at the origin.
    pub fn centered(half_width: f64, count: usize) -> Result<Self> {
        Self::new(0.0, half_width, count)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.count as f64
    }

    #[inline]
    pub fn point(&self, k: usize) -> f64 {
        self.center - self.half_width + k as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.point(k)).collect()
    }

    /// Angular frequencies in FFT order.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.count as i64;
        let dw = PI / self.half_width;
        (0..n)
            .map(|j| {
                let j = if j < n / 2 { j } else { j - n };
                j as f64 * dw
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.center.abs() <= 1e-14 * self.half_width
    }

    /// Index of `-x_k` on a symmetric grid (periodic wrap at `-L`).
    #[inline]
    pub fn reflect_index(&self, k: usize) -> usize {
        (self.count - k) % self.count
    }

    /// True when the window length `2L` is an integer multiple of `2π`.
    pub fn is_commensurate(&self) -> bool {
        let periods = self.half_width / PI;
        (periods - periods.round()).abs() < 1e-9 && periods.round() >= 1.0
    }
}

impl Default for Grid1D {
    /// `L = 12`, `N = 256` centered at the origin.
    fn default() -> Self {
        Self {
            center: 0.0,
            half_width: 12.0,
            count: 256,
        }
    }
}

/// Orbit parameter `mu`, deformation parameter `theta = 1/mu`, and the number
/// of degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizationParams {
    pub mu: f64,
    pub theta: f64,
    pub n: usize,
}

impl QuantizationParams {
    pub fn from_mu(mu: f64) -> Result<Self> {
        if !mu.is_finite() || mu == 0.0 {
            return Err(Error::InvalidParams(format!(
                "mu must be finite and non-zero, got {mu}"
            )));
        }
        Ok(Self {
            mu,
            theta: 1.0 / mu,
            n: 1,
        })
    }

    pub fn from_theta(theta: f64) -> Result<Self> {
        if !theta.is_finite() || theta == 0.0 {
            return Err(Error::InvalidParams(format!(
                "theta must be finite and non-zero, got {theta}"
            )));
        }
        Ok(Self {
            mu: 1.0 / theta,
            theta,
            n: 1,
        })
    }

    pub fn with_dof(mut self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams(
                "need at least one degree of freedom".into(),
            ));
        }
        self.n = n;
        Ok(self)
    }

    pub fn require_one_dof(&self, op: &'static str) -> Result<()> {
        if self.n == 1 {
            Ok(())
        } else {
            Err(Error::RequiresOneDof(op))
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() || self.mu == 0.0 {
            return Err(Error::InvalidParams(
                "mu must be finite and non-zero".into(),
            ));
        }
        if (self.mu * self.theta - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "mu * theta = {} (must be 1)",
                self.mu * self.theta
            )));
        }
        Ok(())
    }
}

impl Default for QuantizationParams {
    /// `mu = 2π`.
    fn default() -> Self {
        Self {
            mu: 2.0 * PI,
            theta: 1.0 / (2.0 * PI),
            n: 1,
        }
    }
}

/// Samples of a state in `L²(Q)` on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionWavefunction {
    grid: Grid1D,
    samples: Vec<Complex64>,
}

impl PositionWavefunction {
    pub fn new(grid: Grid1D, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: samples.len(),
            });
        }
        if let Some(k) = samples
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite {
                q: grid.point(k),
                p: 0.0,
            });
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        let samples = grid.points().into_iter().map(f).collect();
        Self { grid, samples }
    }

    pub fn from_real_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Grid inner product `h Σ conj(a) b`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let h = self.grid.spacing();
        sum::sum_complex(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a.conj() * b),
        ) * h
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}
