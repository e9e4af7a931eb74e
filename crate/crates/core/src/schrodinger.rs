//! The Kirillov–Weyl representation on sampled `L²(Q)`, the parity `Σ`, the
//! point quantizer `Ξ(v) = U(v) Σ U(v⁻¹)` and the Weyl quantizer
//! `Ξ(F) = (μ/π) ∫ F(v) Ξ(v) dv` with its inverse.
//!
//! In exponential coordinates
//!
//! ```text
//! U(q, p, z) ψ(x) = e^{iμ(z + qp/2 − xp)} ψ(x − q)
//! Ξ(q, p)    ψ(x) = e^{2iμp(q − x)} ψ(2q − x)
//! ```
//!
//! Symbols live on a [`PhaseGrid`]: `2N` positions at spacing `h/2` (the
//! midpoints `(x_k + x_l)/2` of the position grid) times `N` momenta at
//! spacing `2π/(μNh)`. On that grid the kernel of `Ξ(F)` is a discrete
//! Fourier transform in `p`, so `Ξ(1) = Id` holds exactly and real symbols
//! give exactly Hermitian matrices.

use crate::error::{Error, Result};
use crate::heisenberg::GroupElement;
use crate::moyal::SymbolSum;
use crate::numerics::{
    bandlimited_kernel, fractional_shift, hermite_values, interpolate_double, operator_norm,
    quad_2d, Grid1D, PositionWavefunction, QuantizationParams, Window2D,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt::Write as _;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense operator on the samples of a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridOperator {
    grid: Grid1D,
    matrix: DMatrix<Complex64>,
}

impl GridOperator {
    pub fn new(grid: Grid1D, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != grid.len() || matrix.ncols() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { grid, matrix })
    }

    pub fn identity(grid: Grid1D) -> Self {
        Self {
            grid,
            matrix: DMatrix::identity(grid.len(), grid.len()),
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    fn same_grid(&self, other: &Grid1D) -> Result<()> {
        if &self.grid == other {
            Ok(())
        } else {
            Err(Error::InvalidGrid(
                "operands live on different grids".into(),
            ))
        }
    }

    pub fn apply(&self, psi: &PositionWavefunction) -> Result<PositionWavefunction> {
        self.same_grid(psi.grid())?;
        let v = nalgebra::DVector::from_column_slice(psi.samples());
        PositionWavefunction::new(self.grid, (&self.matrix * v).as_slice().to_vec())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_grid(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            grid: self.grid,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            matrix: &self.matrix * c,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_grid(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn norm(&self) -> Result<f64> {
        operator_norm(&self.matrix)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |A − A*|`.
    pub fn hermitian_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Row-major dump, one matrix row per line as `re,im` pairs.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.matrix.nrows() {
            let row: Vec<String> = (0..self.matrix.ncols())
                .map(|c| {
                    let z = self.matrix[(r, c)];
                    format!("{:.16e},{:.16e}", z.re, z.im)
                })
                .collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

fn one_dof(
    g: &GroupElement,
    params: &QuantizationParams,
    op: &'static str,
) -> Result<(f64, f64, f64)> {
    params.require_one_dof(op)?;
    g.qpz().map_err(|_| Error::RequiresOneDof(op))
}

/// `U_KW(g) ψ`.
pub fn u_kw(
    g: &GroupElement,
    psi: &PositionWavefunction,
    params: &QuantizationParams,
) -> Result<PositionWavefunction> {
    let (q, p, z) = one_dof(g, params, "u_kw")?;
    let mut out = fractional_shift(psi, q)?;
    let mu = params.mu;
    let grid = *psi.grid();
    for (k, s) in out.samples_mut().iter_mut().enumerate() {
        let x = grid.point(k);
        *s *= Complex64::from_polar(1.0, mu * (z + 0.5 * q * p - x * p));
    }
    Ok(out)
}

// D(x_k − x_l − s), indexed by k − l + N − 1
fn shift_kernel_table(grid: &Grid1D, s: f64) -> Vec<f64> {
    let n = grid.len() as i64;
    let h = grid.spacing();
    (-(n - 1)..n)
        .map(|d| bandlimited_kernel(grid, d as f64 * h - s))
        .collect()
}

/// Matrix of `U_KW(g)` on `grid`.
pub fn u_kw_operator(
    g: &GroupElement,
    grid: &Grid1D,
    params: &QuantizationParams,
) -> Result<GridOperator> {
    let (q, p, z) = one_dof(g, params, "u_kw")?;
    if q.abs() >= grid.half_width() {
        return Err(Error::DomainTooSmall {
            shift: q,
            half_width: grid.half_width(),
        });
    }
    let n = grid.len();
    let table = shift_kernel_table(grid, q);
    let mu = params.mu;
    let m = DMatrix::from_fn(n, n, |k, l| {
        let phase = Complex64::from_polar(1.0, mu * (z + 0.5 * q * p - grid.point(k) * p));
        phase * table[k + n - 1 - l]
    });
    GridOperator::new(*grid, m)
}

fn require_symmetric(grid: &Grid1D) -> Result<()> {
    if grid.is_symmetric() {
        Ok(())
    } else {
        Err(Error::AsymmetricGrid(grid.center()))
    }
}

/// `Σψ(x) = ψ(−x)`.
pub fn parity(psi: &PositionWavefunction) -> Result<PositionWavefunction> {
    let grid = *psi.grid();
    require_symmetric(&grid)?;
    let s = psi.samples();
    PositionWavefunction::new(
        grid,
        (0..grid.len()).map(|k| s[grid.reflect_index(k)]).collect(),
    )
}

pub fn parity_operator(grid: &Grid1D) -> Result<GridOperator> {
    require_symmetric(grid)?;
    let n = grid.len();
    let m = DMatrix::from_fn(n, n, |k, l| {
        if grid.reflect_index(k) == l {
            Complex64::new(1.0, 0.0)
        } else {
            ZERO
        }
    });
    GridOperator::new(*grid, m)
}

fn point_window(v: [f64; 2], grid: &Grid1D) -> Result<()> {
    require_symmetric(grid)?;
    let limit = 0.5 * grid.half_width();
    if v[0].is_nan() || v[0].abs() >= limit {
        return Err(Error::WindowViolation { q: v[0], limit });
    }
    Ok(())
}

/// `Ξ(v)ψ`, computed as a phase times the reflection about `q`.
pub fn apply_point(
    v: [f64; 2],
    psi: &PositionWavefunction,
    params: &QuantizationParams,
) -> Result<PositionWavefunction> {
    params.require_one_dof("quantize_point")?;
    let grid = *psi.grid();
    point_window(v, &grid)?;
    let (q, p) = (v[0], v[1]);
    let mut out = fractional_shift(&parity(psi)?, 2.0 * q)?;
    for (k, s) in out.samples_mut().iter_mut().enumerate() {
        *s *= Complex64::from_polar(1.0, 2.0 * params.mu * p * (q - grid.point(k)));
    }
    Ok(out)
}

/// Matrix of the point quantizer `Ξ(v)`.
pub fn quantize_point(
    v: [f64; 2],
    grid: &Grid1D,
    params: &QuantizationParams,
) -> Result<GridOperator> {
    params.require_one_dof("quantize_point")?;
    point_window(v, grid)?;
    let (q, p) = (v[0], v[1]);
    let n = grid.len();
    let h = grid.spacing();
    let l0 = grid.half_width();
    // x_k + x_l = −2L + (k + l) h
    let table: Vec<f64> = (0..2 * n - 1)
        .map(|s| bandlimited_kernel(grid, 2.0 * q + 2.0 * l0 - s as f64 * h))
        .collect();
    let mu = params.mu;
    let m = DMatrix::from_fn(n, n, |k, l| {
        Complex64::from_polar(1.0, 2.0 * mu * p * (q - grid.point(k))) * table[k + l]
    });
    GridOperator::new(*grid, m)
}

/// Phase-space sampling lattice attached to a position grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    grid: Grid1D,
    mu: f64,
}

impl PhaseGrid {
    pub fn new(grid: Grid1D, mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidParams(format!(
                "phase grids need mu > 0, got {mu}"
            )));
        }
        Ok(Self { grid, mu })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `2N` positions `c − L + s h/2`.
    pub fn q_nodes(&self) -> Vec<f64> {
        let h2 = 0.5 * self.grid.spacing();
        let start = self.grid.center() - self.grid.half_width();
        (0..2 * self.grid.len())
            .map(|s| start + s as f64 * h2)
            .collect()
    }

    pub fn dp(&self) -> f64 {
        2.0 * PI / (self.mu * self.grid.len() as f64 * self.grid.spacing())
    }

    /// `N` momenta `(j − N/2) Δp`.
    pub fn p_nodes(&self) -> Vec<f64> {
        let n = self.grid.len() as i64;
        let dp = self.dp();
        (0..n).map(|j| (j - n / 2) as f64 * dp).collect()
    }

    pub fn p_max(&self) -> f64 {
        0.5 * self.grid.len() as f64 * self.dp()
    }
}

/// Samples of a symbol on a [`PhaseGrid`], row `s` (position) major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSymbol {
    phase: PhaseGrid,
    values: Vec<Complex64>,
}

impl GridSymbol {
    pub fn new(phase: PhaseGrid, values: Vec<Complex64>) -> Result<Self> {
        let expected = 2 * phase.grid.len() * phase.grid.len();
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: values.len(),
            });
        }
        Ok(Self { phase, values })
    }

    pub fn from_fn(phase: PhaseGrid, f: impl Fn(f64, f64) -> Complex64 + Sync) -> Result<Self> {
        let qs = phase.q_nodes();
        let ps = phase.p_nodes();
        let rows: Vec<Vec<Complex64>> = qs
            .par_iter()
            .map(|&q| ps.iter().map(|&p| f(q, p)).collect())
            .collect();
        let values: Vec<Complex64> = rows.into_iter().flatten().collect();
        if let Some(i) = values
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            let n = ps.len();
            return Err(Error::NonFinite {
                q: qs[i / n],
                p: ps[i % n],
            });
        }
        Self::new(phase, values)
    }

    pub fn from_sum(phase: PhaseGrid, f: &SymbolSum) -> Result<Self> {
        Self::from_fn(phase, |q, p| f.eval(q, p))
    }

    pub fn phase(&self) -> &PhaseGrid {
        &self.phase
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Value at position node `s`, momentum node `j`.
    pub fn at(&self, s: usize, j: usize) -> Complex64 {
        self.values[s * self.phase.grid.len() + j]
    }

    pub fn map(&self, f: impl Fn(f64, f64, Complex64) -> Complex64) -> Self {
        let qs = self.phase.q_nodes();
        let ps = self.phase.p_nodes();
        let n = ps.len();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, z)| f(qs[i / n], ps[i % n], *z))
            .collect();
        Self {
            phase: self.phase,
            values,
        }
    }

    /// Largest deviation from `g` over `|q − c| ≤ frac·L`, `|p| ≤ frac·p_max`.
    pub fn interior_max_diff(&self, g: impl Fn(f64, f64) -> Complex64, frac: f64) -> f64 {
        let qs = self.phase.q_nodes();
        let ps = self.phase.p_nodes();
        let n = ps.len();
        let (c, l, pm) = (
            self.phase.grid.center(),
            self.phase.grid.half_width(),
            self.phase.p_max(),
        );
        self.values
            .iter()
            .enumerate()
            .filter(|(i, _)| (qs[i / n] - c).abs() <= frac * l && ps[i % n].abs() <= frac * pm)
            .map(|(i, z)| (z - g(qs[i / n], ps[i % n])).norm())
            .fold(0.0, f64::max)
    }

    /// Row-major `q,p,re,im` dump.
    pub fn to_csv(&self) -> Result<String> {
        crate::numerics::csv::write_2d(&self.phase.q_nodes(), &self.phase.p_nodes(), &self.values)
    }
}

/// Operand of [`quantize_symbol`].
#[derive(Debug, Clone, Copy)]
pub enum SymbolRef<'a> {
    Sum(&'a SymbolSum),
    Grid(&'a GridSymbol),
}

impl<'a> From<&'a SymbolSum> for SymbolRef<'a> {
    fn from(s: &'a SymbolSum) -> Self {
        SymbolRef::Sum(s)
    }
}

impl<'a> From<&'a GridSymbol> for SymbolRef<'a> {
    fn from(s: &'a GridSymbol) -> Self {
        SymbolRef::Grid(s)
    }
}

fn check_mu(phase: &PhaseGrid, params: &QuantizationParams) -> Result<()> {
    if (phase.mu - params.mu).abs() > 1e-12 * params.mu.abs() {
        return Err(Error::MuMismatch {
            left: phase.mu,
            right: params.mu,
        });
    }
    Ok(())
}

/// `Ξ(F)` on `grid`. Plane waves map to Weyl shifts `Ξ(e_a) = U_KW(θa)`;
/// grid symbols go through the discrete kernel.
pub fn quantize_symbol(
    f: SymbolRef<'_>,
    grid: &Grid1D,
    params: &QuantizationParams,
) -> Result<GridOperator> {
    params.require_one_dof("quantize_symbol")?;
    match f {
        SymbolRef::Sum(s) => quantize_sum(s, grid, params),
        SymbolRef::Grid(g) => {
            check_mu(&g.phase, params)?;
            if &g.phase.grid != grid {
                return Err(Error::InvalidGrid(
                    "symbol and operator grids differ".into(),
                ));
            }
            Ok(quantize_grid(g))
        }
    }
}

fn quantize_sum(s: &SymbolSum, grid: &Grid1D, params: &QuantizationParams) -> Result<GridOperator> {
    let n = grid.len();
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    for t in s.terms() {
        let g = GroupElement::from_qpz(params.theta * t.a[0], params.theta * t.a[1], 0.0);
        acc += u_kw_operator(&g, grid, params)?.into_matrix() * t.amp;
    }
    GridOperator::new(*grid, acc)
}

fn quantize_grid(f: &GridSymbol) -> GridOperator {
    let grid = f.phase.grid;
    let n = grid.len();
    let inv = crate::numerics::shift::inverse(n);
    let scale = 1.0 / n as f64;
    // G_s[d] = (1/N) Σ_j F(q̄_s, p_j) e^{2πi(j − N/2)d/N}
    let cols: Vec<Vec<Complex64>> = (0..2 * n)
        .into_par_iter()
        .map(|s| {
            let mut buf = f.values[s * n..(s + 1) * n].to_vec();
            inv.process(&mut buf);
            for (d, z) in buf.iter_mut().enumerate() {
                *z *= if d % 2 == 0 { scale } else { -scale };
            }
            buf
        })
        .collect();
    // each pair of points on the circle is read at its nearer midpoint
    let m = DMatrix::from_fn(n, n, |k, l| {
        let d = (l + n - k) % n;
        let near = (k + l) % (2 * n);
        let far = (k + l + n) % (2 * n);
        let sep = k.abs_diff(l);
        match (2 * sep).cmp(&n) {
            std::cmp::Ordering::Less => cols[near][d],
            std::cmp::Ordering::Greater => cols[far][d],
            std::cmp::Ordering::Equal => 0.5 * (cols[near][d] + cols[far][d]),
        }
    });
    GridOperator { grid, matrix: m }
}

/// Direct quadrature `(μ/π) Σ F(v) Ξ(v) ΔA` over `window`; costs
/// `O(n_q (N² + N n_p))` and serves as an independent check of the kernel.
pub fn quantize_quadrature(
    f: impl Fn(f64, f64) -> Complex64 + Sync,
    window: &Window2D,
    grid: &Grid1D,
    params: &QuantizationParams,
) -> Result<GridOperator> {
    params.require_one_dof("quantize_symbol")?;
    require_symmetric(grid)?;
    let limit = 0.5 * grid.half_width();
    if window.q_min.abs() >= limit || window.q_max.abs() >= limit {
        return Err(Error::WindowViolation {
            q: window.q_min.abs().max(window.q_max.abs()),
            limit,
        });
    }
    let n = grid.len();
    let h = grid.spacing();
    let l0 = grid.half_width();
    let mu = params.mu;
    let weight = mu / PI * window.cell_area();
    let ps = window.p_nodes();
    let xs = grid.points();
    let parts: Vec<Result<DMatrix<Complex64>>> = window
        .q_nodes()
        .par_iter()
        .map(|&q| {
            let mut g = vec![ZERO; n];
            for &p in &ps {
                let fv = f(q, p);
                if !(fv.re.is_finite() && fv.im.is_finite()) {
                    return Err(Error::NonFinite { q, p });
                }
                for (k, gk) in g.iter_mut().enumerate() {
                    *gk += fv * Complex64::from_polar(1.0, 2.0 * mu * p * (q - xs[k]));
                }
            }
            let table: Vec<f64> = (0..2 * n - 1)
                .map(|s| bandlimited_kernel(grid, 2.0 * q + 2.0 * l0 - s as f64 * h))
                .collect();
            Ok(DMatrix::from_fn(n, n, |k, l| g[k] * table[k + l]))
        })
        .collect();
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    for part in parts {
        acc += part?;
    }
    GridOperator::new(*grid, acc * Complex64::new(weight, 0.0))
}

/// Left inverse of the grid quantizer.
///
/// Entry `(k, l)` fixes the kernel at midpoint index `k + l` and separation
/// `l − k`, which always share parity; the other half of the
/// (midpoint, separation) table is filled by bandlimited interpolation along
/// the midpoint, and a DFT in the separation recovers `F(q, p)`.
pub fn symbol_of(a: &GridOperator, params: &QuantizationParams) -> Result<GridSymbol> {
    params.require_one_dof("symbol_of")?;
    let phase = PhaseGrid::new(a.grid, params.mu)?;
    let n = a.grid.len();
    let n2 = 2 * n;
    let ni = n as i64;
    let mat = &a.matrix;
    // by_sep[d][s] = G_s[d]
    let by_sep: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|d| {
            let m = if d <= n / 2 { d as i64 } else { d as i64 - ni };
            let par = m.rem_euclid(2) as usize;
            let seq: Vec<Complex64> = (0..n)
                .map(|t| {
                    let s = (2 * t + par) as i64;
                    let k = ((s - m) / 2).rem_euclid(ni) as usize;
                    let l = ((s + m) / 2).rem_euclid(ni) as usize;
                    if d == n / 2 {
                        0.5 * (mat[(k, l)] + mat[(l, k)])
                    } else {
                        mat[(k, l)]
                    }
                })
                .collect();
            let fine = interpolate_double(&seq);
            let mut out = vec![ZERO; n2];
            for (u, z) in fine.into_iter().enumerate() {
                out[(par + u) % n2] = z;
            }
            out
        })
        .collect();
    let fwd = crate::numerics::shift::forward(n);
    let values: Vec<Vec<Complex64>> = (0..n2)
        .into_par_iter()
        .map(|s| {
            let mut buf: Vec<Complex64> = (0..n)
                .map(|d| {
                    if d % 2 == 0 {
                        by_sep[d][s]
                    } else {
                        -by_sep[d][s]
                    }
                })
                .collect();
            fwd.process(&mut buf);
            buf
        })
        .collect();
    GridSymbol::new(phase, values.into_iter().flatten().collect())
}

/// [`symbol_of`] followed by a re-quantization check; fails with the
/// measured relative residual when it exceeds `tolerance`.
pub fn symbol_of_checked(
    a: &GridOperator,
    params: &QuantizationParams,
    tolerance: f64,
) -> Result<GridSymbol> {
    let s = symbol_of(a, params)?;
    let back = quantize_grid(&s);
    let scale = a
        .matrix
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let residual = back.max_abs_diff(a) / scale;
    if residual > tolerance {
        return Err(Error::RoundTrip {
            residual,
            tolerance,
        });
    }
    Ok(s)
}

/// Columns: the first `k` Hermite functions of width `scale`, sampled and
/// orthonormalized for the Euclidean product on samples.
pub fn hermite_basis(grid: &Grid1D, k: usize, scale: f64) -> Result<DMatrix<Complex64>> {
    if k == 0 {
        return Err(Error::InvalidParams(
            "basis needs at least one vector".into(),
        ));
    }
    let n = grid.len();
    let sh = grid.spacing().sqrt();
    let mut b = DMatrix::<Complex64>::zeros(n, k);
    for (r, x) in grid.points().into_iter().enumerate() {
        let hv = hermite_values(k - 1, x - grid.center(), scale)?;
        for (c, v) in hv.into_iter().enumerate() {
            b[(r, c)] = Complex64::new(v * sh, 0.0);
        }
    }
    Ok(b.qr().q())
}

/// Columns: unit Fourier modes with `|ω| < cutoff · π/h`.
pub fn band_basis(grid: &Grid1D, cutoff: f64) -> DMatrix<Complex64> {
    let n = grid.len();
    let nyq = PI / grid.spacing();
    let keep: Vec<f64> = grid
        .frequencies()
        .into_iter()
        .filter(|w| w.abs() < cutoff * nyq)
        .collect();
    let norm = 1.0 / (n as f64).sqrt();
    DMatrix::from_fn(n, keep.len(), |r, c| {
        Complex64::from_polar(norm, keep[c] * (grid.point(r) - grid.point(0)))
    })
}

/// Orthonormal sample-space copy of a state, for use with the bases above.
pub fn to_euclidean(psi: &PositionWavefunction) -> nalgebra::DVector<Complex64> {
    let sh = psi.grid().spacing().sqrt();
    nalgebra::DVector::from_iterator(psi.grid().len(), psi.samples().iter().map(|z| z * sh))
}

/// `(μ/π) ∫ F` over a window, the scalar part of `Ξ(F)` used for pairing checks.
pub fn symbol_mass(
    f: impl Fn(f64, f64) -> Complex64 + Sync,
    window: &Window2D,
    params: &QuantizationParams,
) -> Result<Complex64> {
    Ok(quad_2d(f, window)? * (params.mu / PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{compress, sum::Neumaier};

    fn params() -> QuantizationParams {
        QuantizationParams::default()
    }

    fn gauss_state(grid: Grid1D, c: f64, k: f64) -> PositionWavefunction {
        PositionWavefunction::from_fn(grid, |x| {
            Complex64::from_polar((-(x - c) * (x - c)).exp(), k * x)
        })
    }

    #[test]
    fn central_element_is_phase() {
        let grid = Grid1D::default();
        let psi = gauss_state(grid, 0.3, 1.0);
        let pr = params();
        let out = u_kw(&GroupElement::central(1, 0.4), &psi, &pr).unwrap();
        let expect = psi.scale(Complex64::from_polar(1.0, pr.mu * 0.4));
        assert!(out.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn pure_translation_has_no_phase() {
        let grid = Grid1D::default();
        let psi = gauss_state(grid, 0.0, 0.0);
        let out = u_kw(&GroupElement::from_qpz(0.77, 0.0, 0.0), &psi, &params()).unwrap();
        let expect = fractional_shift(&psi, 0.77).unwrap();
        assert_eq!(out, expect);
    }

    #[test]
    fn representation_property() {
        let grid = Grid1D::default();
        let pr = params();
        let psi = gauss_state(grid, -0.4, 0.5);
        let g = GroupElement::from_qpz(0.9, -0.35, 0.2);
        let h = GroupElement::from_qpz(-1.3, 0.6, -0.7);
        let lhs = u_kw(&g, &u_kw(&h, &psi, &pr).unwrap(), &pr).unwrap();
        let rhs = u_kw(&g.multiply(&h).unwrap(), &psi, &pr).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-9);
    }

    #[test]
    fn operator_matches_action_and_is_unitary() {
        let grid = Grid1D::default();
        let pr = params();
        let g = GroupElement::from_qpz(0.41, 0.3, 0.1);
        let op = u_kw_operator(&g, &grid, &pr).unwrap();
        let psi = gauss_state(grid, 0.2, -1.0);
        assert!(
            op.apply(&psi)
                .unwrap()
                .max_abs_diff(&u_kw(&g, &psi, &pr).unwrap())
                < 1e-12
        );
        assert!((op.norm().unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn parity_cases() {
        let grid = Grid1D::default();
        let even = PositionWavefunction::from_real_fn(grid, |x| (-x * x).exp());
        let odd = PositionWavefunction::from_real_fn(grid, |x| x * (-x * x).exp());
        assert_eq!(parity(&even).unwrap().max_abs_diff(&even), 0.0);
        assert!(
            parity(&odd)
                .unwrap()
                .max_abs_diff(&odd.scale(Complex64::new(-1.0, 0.0)))
                < 1e-15
        );
        let psi = gauss_state(grid, 1.0, 2.0);
        assert_eq!(parity(&parity(&psi).unwrap()).unwrap(), psi);
        let off = Grid1D::new(0.5, 12.0, 64).unwrap();
        assert!(matches!(
            parity(&PositionWavefunction::zeros(off)),
            Err(Error::AsymmetricGrid(_))
        ));
    }

    #[test]
    fn point_at_origin_is_parity() {
        let grid = Grid1D::centered(8.0, 64).unwrap();
        let a = quantize_point([0.0, 0.0], &grid, &params()).unwrap();
        assert!(a.max_abs_diff(&parity_operator(&grid).unwrap()) < 1e-13);
    }

    #[test]
    fn point_operator_matches_composition() {
        let grid = Grid1D::default();
        let pr = params();
        let v = [0.6, -0.45];
        let g = GroupElement::from_qpz(v[0], v[1], 0.0);
        let psi = gauss_state(grid, 0.1, 0.7);
        let composed = u_kw(
            &g,
            &parity(&u_kw(&g.inverse(), &psi, &pr).unwrap()).unwrap(),
            &pr,
        )
        .unwrap();
        let closed = apply_point(v, &psi, &pr).unwrap();
        let matrix = quantize_point(v, &grid, &pr).unwrap().apply(&psi).unwrap();
        assert!(composed.max_abs_diff(&closed) < 1e-10);
        assert!(matrix.max_abs_diff(&closed) < 1e-10);
        let twice = apply_point(v, &closed, &pr).unwrap();
        assert!(twice.max_abs_diff(&psi) < 1e-9);
    }

    #[test]
    fn point_window_enforced() {
        let grid = Grid1D::default();
        assert!(matches!(
            quantize_point([6.5, 0.0], &grid, &params()),
            Err(Error::WindowViolation { .. })
        ));
    }

    #[test]
    fn equivariance() {
        let grid = Grid1D::default();
        let pr = params();
        let (v, w) = ([0.3, 0.2], [-0.5, 0.4]);
        let gw = GroupElement::from_qpz(w[0], w[1], 0.0);
        let psi = gauss_state(grid, 0.0, 0.3);
        let lhs = u_kw(
            &gw,
            &apply_point(v, &u_kw(&gw.inverse(), &psi, &pr).unwrap(), &pr).unwrap(),
            &pr,
        )
        .unwrap();
        let rhs = apply_point([v[0] + w[0], v[1] + w[1]], &psi, &pr).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-8);
    }

    #[test]
    fn unit_symbol_is_identity() {
        let grid = Grid1D::default();
        let pr = params();
        let phase = PhaseGrid::new(grid, pr.mu).unwrap();
        let one = GridSymbol::from_fn(phase, |_, _| Complex64::new(1.0, 0.0)).unwrap();
        let a = quantize_symbol((&one).into(), &grid, &pr).unwrap();
        assert!(a.max_abs_diff(&GridOperator::identity(grid)) < 1e-13);
        let back = symbol_of(&a, &pr).unwrap();
        let err = back.interior_max_diff(|_, _| Complex64::new(1.0, 0.0), 1.0);
        assert!(err < 1e-12, "{err} {:?} {:?}", back.at(0, 0), back.at(1, 5));
    }

    #[test]
    fn real_symbol_gives_hermitian() {
        let grid = Grid1D::default();
        let pr = params();
        let phase = PhaseGrid::new(grid, pr.mu).unwrap();
        let f = GridSymbol::from_fn(phase, |q, p| Complex64::new((-(q * q + p * p)).exp(), 0.0))
            .unwrap();
        let a = quantize_symbol((&f).into(), &grid, &pr).unwrap();
        assert!(a.hermitian_residual() < 1e-13);
    }

    #[test]
    fn gaussian_round_trip() {
        let grid = Grid1D::default();
        let pr = params();
        let phase = PhaseGrid::new(grid, pr.mu).unwrap();
        let g = |q: f64, p: f64| Complex64::new((-(q * q + p * p)).exp(), 0.0);
        let f = GridSymbol::from_fn(phase, g).unwrap();
        let a = quantize_symbol((&f).into(), &grid, &pr).unwrap();
        let back = symbol_of_checked(&a, &pr, 1e-9).unwrap();
        assert!(back.interior_max_diff(g, 0.5) < 1e-6);
    }

    #[test]
    fn plane_wave_closed_form_is_unitary() {
        let grid = Grid1D::default();
        let pr = params();
        let u = quantize_symbol((&SymbolSum::u()).into(), &grid, &pr).unwrap();
        assert!((u.norm().unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn plane_wave_grid_path_agrees_with_closed_form() {
        // grid sampling of e_a versus the Weyl shift, seen through localized states
        let grid = Grid1D::default();
        let pr = params();
        let phase = PhaseGrid::new(grid, pr.mu).unwrap();
        let s = SymbolSum::wave(Complex64::new(1.0, 0.0), [0.0, 1.5]);
        let sampled = GridSymbol::from_sum(phase, &s).unwrap();
        let a = quantize_symbol((&sampled).into(), &grid, &pr).unwrap();
        let b = quantize_symbol((&s).into(), &grid, &pr).unwrap();
        let basis = hermite_basis(&grid, 24, 0.7).unwrap();
        let d = compress(a.matrix(), &basis) - compress(b.matrix(), &basis);
        assert!(d.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-10);
    }

    #[test]
    fn kernel_agrees_with_direct_quadrature() {
        let grid = Grid1D::centered(8.0, 64).unwrap();
        let pr = QuantizationParams::from_mu(2.0).unwrap();
        let g = |q: f64, p: f64| {
            Complex64::new((-2.0 * (q * q + p * p)).exp(), 0.0)
                * Complex64::from_polar(1.0, 0.3 * q)
        };
        let phase = PhaseGrid::new(grid, pr.mu).unwrap();
        let a =
            quantize_symbol((&GridSymbol::from_fn(phase, g).unwrap()).into(), &grid, &pr).unwrap();
        let w = Window2D::new((-3.9, 3.9), (-5.0, 5.0), 156, 200).unwrap();
        let b = quantize_quadrature(g, &w, &grid, &pr).unwrap();
        let basis = hermite_basis(&grid, 12, 0.8).unwrap();
        let d = compress(a.matrix(), &basis) - compress(b.matrix(), &basis);
        assert!(d.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-6);
    }

    #[test]
    fn parity_symbol_is_concentrated() {
        // Ξ(0) = Σ has symbol (π/μ)δ(v); pairing with a Gaussian recovers G(0)
        let grid = Grid1D::default();
        let pr = params();
        let sigma = parity_operator(&grid).unwrap();
        let s = symbol_of(&sigma, &pr).unwrap();
        let phase = *s.phase();
        let (qs, ps) = (phase.q_nodes(), phase.p_nodes());
        let da = 0.5 * grid.spacing() * phase.dp();
        let n = ps.len();
        let mut acc = Neumaier::new();
        for (i, z) in s.values().iter().enumerate() {
            let (q, p) = (qs[i / n], ps[i % n]);
            acc.add(z * (-(q * q + p * p)).exp());
        }
        let pairing = acc.total() * da * (pr.mu / PI);
        assert!(
            (pairing - Complex64::new(1.0, 0.0)).norm() < 1e-6,
            "{pairing}"
        );
        // rows on the position grid itself are exact; only the two fixed
        // points q = 0 and q = ±L carry weight there
        let n2 = qs.len();
        let far = s
            .values()
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let row = i / n;
                row % 2 == 0 && row != 0 && row != n2 / 2
            })
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max);
        assert!(far < 1e-12, "{far}");
    }

    #[test]
    fn norms_stay_bounded_under_refinement() {
        let pr = params();
        let mut norms = Vec::new();
        for n in [128, 256, 512] {
            let grid = Grid1D::centered(12.0, n).unwrap();
            let phase = PhaseGrid::new(grid, pr.mu).unwrap();
            let f = GridSymbol::from_fn(phase, |q, p| {
                Complex64::new((q).cos() * (-p * p / 4.0).exp(), 0.0) * (-(q * q) / 50.0).exp()
            })
            .unwrap();
            norms.push(
                quantize_symbol((&f).into(), &grid, &pr)
                    .unwrap()
                    .norm()
                    .unwrap(),
            );
        }
        let spread = norms.iter().cloned().fold(0.0, f64::max)
            - norms.iter().cloned().fold(f64::MAX, f64::min);
        assert!(norms.iter().all(|x| *x < 2.0), "{norms:?}");
        assert!(spread < 1e-3, "{norms:?}");
    }

    #[test]
    fn round_trip_check_reports_residual() {
        let grid = Grid1D::centered(6.0, 32).unwrap();
        let pr = params();
        let mut m = DMatrix::<Complex64>::zeros(32, 32);
        m[(0, 16)] = Complex64::new(1.0, 0.0);
        let a = GridOperator::new(grid, m).unwrap();
        assert!(matches!(
            symbol_of_checked(&a, &pr, 1e-12),
            Err(Error::RoundTrip { .. })
        ));
    }
}
