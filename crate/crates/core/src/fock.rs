//! Polarized sections `φ(z) = e^{−μ|z|²/4} f(z)` with `f` entire, the
//! Bargmann–Fock representation, the transported quantizer `BF_μ`, the
//! symplectic Fourier transform and the torus action on Fock space.
//!
//! Integral operations evaluate their output on a polar quadrature grid
//! (Gauss–Laguerre in `s = μr²/2` times uniform angles) and project back
//! onto the orthonormal monomials `ẽ_k = e^{−μ|z|²/4} z^k / √w_k`.

use crate::error::{Error, Result};
use crate::heisenberg::GroupElement;
use crate::moyal::{PlaneWave, SymbolSum};
use crate::nctorus::TorusElement;
use crate::numerics::{gauss_laguerre, QuantizationParams};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest supported truncation order.
pub const MAX_ORDER: usize = 128;

/// Off-basis residual allowed before the truncation order is enlarged.
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// Largest `|φ|` on the boundary of a kernel window, relative to `‖φ‖`.
pub const WINDOW_TOLERANCE: f64 = 1e-12;

/// `C` in `ℱ_ℂ(φ)(Z₀) = C ∫ e^{(i/2)Im(Z̄Z₀)} φ(Z) dZ`.
pub const FOURIER_C: f64 = 1.0 / (4.0 * PI);

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const CHUNK: usize = 256;

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|j| (j as f64).ln()).sum()
}

/// `ln w_k` with `w_k = ∫ e^{−μ|z|²/2}|z|^{2k} dq dp = 2π k! 2^k / μ^{k+1}`.
pub fn ln_weight(k: usize, mu: f64) -> f64 {
    (2.0 * PI).ln() + ln_factorial(k) + k as f64 * 2f64.ln() - (k + 1) as f64 * mu.ln()
}

pub fn weight(k: usize, mu: f64) -> f64 {
    ln_weight(k, mu).exp()
}

/// `ẽ_0(z), …, ẽ_order(z)`.
pub fn basis_values(z: Complex64, mu: f64, order: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(order + 1);
    let g = (-0.25 * mu * z.norm_sqr() - 0.5 * ln_weight(0, mu)).exp();
    out.push(Complex64::new(g, 0.0));
    for j in 1..=order {
        let prev = out[j - 1];
        out.push(prev * z * (mu / (2.0 * j as f64)).sqrt());
    }
    out
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::InvalidParams(format!(
            "Fock space needs mu > 0, got {mu}"
        )));
    }
    Ok(())
}

fn same_mu(a: f64, b: f64) -> Result<()> {
    if (a - b).abs() > 1e-14 * a.abs().max(b.abs()) {
        return Err(Error::MuMismatch { left: a, right: b });
    }
    Ok(())
}

/// `Σ c_k z^k` times the Gaussian, truncated at order `K = coeffs.len() − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FockJson")]
pub struct FockVector {
    mu: f64,
    coeffs: Vec<Complex64>,
}

#[derive(Deserialize)]
struct FockJson {
    mu: f64,
    coeffs: Vec<Complex64>,
}

impl TryFrom<FockJson> for FockVector {
    type Error = Error;

    fn try_from(j: FockJson) -> Result<Self> {
        FockVector::new(j.mu, j.coeffs)
    }
}

impl FockVector {
    pub fn new(mu: f64, coeffs: Vec<Complex64>) -> Result<Self> {
        check_mu(mu)?;
        if coeffs.is_empty() {
            return Err(Error::InvalidParams(
                "a Fock vector needs at least one coefficient".into(),
            ));
        }
        if coeffs.len() > MAX_ORDER + 1 {
            return Err(Error::TruncationOverflow {
                tail: f64::INFINITY,
                tolerance: TAIL_TOLERANCE,
                order: coeffs.len() - 1,
            });
        }
        if coeffs
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::InvalidParams("non-finite Fock coefficient".into()));
        }
        Ok(Self { mu, coeffs })
    }

    /// `e^{−μ|z|²/4}`.
    pub fn vacuum(mu: f64) -> Result<Self> {
        Self::new(mu, vec![Complex64::new(1.0, 0.0)])
    }

    pub fn monomial(mu: f64, k: usize) -> Result<Self> {
        let mut c = vec![ZERO; k + 1];
        c[k] = Complex64::new(1.0, 0.0);
        Self::new(mu, c)
    }

    /// From coefficients in the orthonormal basis `ẽ_k`.
    pub fn from_orthonormal(mu: f64, b: &[Complex64]) -> Result<Self> {
        check_mu(mu)?;
        let c = b
            .iter()
            .enumerate()
            .map(|(k, z)| z * (-0.5 * ln_weight(k, mu)).exp())
            .collect();
        Self::new(mu, c)
    }

    pub fn orthonormal(&self) -> Vec<Complex64> {
        let mut lw = ln_weight(0, self.mu);
        let step = (2.0 / self.mu).ln();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    lw += step + (k as f64).ln();
                }
                c * (0.5 * lw).exp()
            })
            .collect()
    }

    /// Pointwise evaluator with the orthonormal coefficients computed once.
    pub fn evaluator(&self) -> impl Fn(Complex64) -> Complex64 + Sync + '_ {
        let b = self.orthonormal();
        let (mu, order) = (self.mu, self.order());
        move |z| {
            basis_values(z, mu, order)
                .iter()
                .zip(&b)
                .map(|(e, c)| e * c)
                .sum()
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        same_mu(self.mu, other.mu)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .enumerate()
            .map(|(k, (a, b))| a.conj() * b * weight(k, self.mu))
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.orthonormal()
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `φ(z)`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.evaluator()(z)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            mu: self.mu,
            coeffs: self.coeffs.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_mu(self.mu, other.mu)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[Complex64], k: usize| v.get(k).copied().unwrap_or(ZERO);
        Self::new(
            self.mu,
            (0..n)
                .map(|k| get(&self.coeffs, k) + get(&other.coeffs, k))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// Keeps orders `0..=order`.
    pub fn truncate(&self, order: usize) -> Self {
        Self {
            mu: self.mu,
            coeffs: self.coeffs.iter().take(order + 1).copied().collect(),
        }
    }

    /// Norm of the orthonormal coefficients of order other than `k`, over
    /// the total norm.
    pub fn off_degree_fraction(&self, k: usize) -> f64 {
        let b = self.orthonormal();
        let total: f64 = b.iter().map(|z| z.norm_sqr()).sum();
        let off: f64 = b
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, z)| z.norm_sqr())
            .sum();
        (off / total).sqrt()
    }
}

/// Nodes and weights for `∫_ℂ g(z) dq dp` when `g` carries the Gaussian
/// decay `e^{−μ|z|²/2}`; exact on `ẽ_j ẽ_k` for `j, k ≤ order`.
#[derive(Debug, Clone)]
pub struct PolarGrid {
    mu: f64,
    order: usize,
    nodes: Vec<Complex64>,
    weights: Vec<f64>,
}

impl PolarGrid {
    pub fn new(mu: f64, order: usize) -> Result<Self> {
        check_mu(mu)?;
        let nr = order / 2 + 8;
        let m = 2 * order + 16;
        let gl = gauss_laguerre(nr)?;
        let dphi = 2.0 * PI / m as f64;
        let mut nodes = Vec::with_capacity(nr * m);
        let mut weights = Vec::with_capacity(nr * m);
        for (s, w) in gl.nodes.iter().zip(&gl.scaled_weights) {
            let r = (2.0 * s / mu).sqrt();
            for j in 0..m {
                nodes.push(Complex64::from_polar(r, j as f64 * dphi));
                weights.push(w * dphi / mu);
            }
        }
        Ok(Self {
            mu,
            order,
            nodes,
            weights,
        })
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Orthonormal coefficients of the sampled function and the quadrature
    /// norm of what is left over.
    pub fn project(&self, values: &[Complex64]) -> (Vec<Complex64>, f64) {
        let k = self.order;
        let idx: Vec<usize> = (0..self.nodes.len()).collect();
        let partials: Vec<Vec<Complex64>> = idx
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut acc = vec![ZERO; k + 1];
                for &i in chunk {
                    let e = basis_values(self.nodes[i], self.mu, k);
                    let wv = values[i] * self.weights[i];
                    for (a, ej) in acc.iter_mut().zip(&e) {
                        *a += ej.conj() * wv;
                    }
                }
                acc
            })
            .collect();
        let mut b = vec![ZERO; k + 1];
        for p in partials {
            for (x, y) in b.iter_mut().zip(p) {
                *x += y;
            }
        }
        let res: Vec<f64> = idx
            .par_chunks(CHUNK)
            .map(|chunk| {
                chunk
                    .iter()
                    .map(|&i| {
                        let e = basis_values(self.nodes[i], self.mu, k);
                        let fit: Complex64 = e.iter().zip(&b).map(|(x, y)| x * y).sum();
                        self.weights[i] * (values[i] - fit).norm_sqr()
                    })
                    .sum::<f64>()
            })
            .collect();
        (b, res.iter().sum::<f64>().sqrt())
    }
}

/// A projected result and its off-basis residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub vector: FockVector,
    pub residual: f64,
}

pub(crate) fn trimmed(mu: f64, mut b: Vec<Complex64>) -> Result<FockVector> {
    let total: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    let mut tail = 0.0;
    while b.len() > 1 {
        let last = b[b.len() - 1].norm_sqr();
        if tail + last > 1e-28 * total {
            break;
        }
        tail += last;
        b.pop();
    }
    FockVector::from_orthonormal(mu, &b)
}

/// Projects `f` onto orders `0..=order` without enlarging the basis.
pub fn project_fn(
    mu: f64,
    order: usize,
    f: impl Fn(Complex64) -> Complex64 + Sync,
) -> Result<Expansion> {
    if order > MAX_ORDER {
        return Err(Error::UnsupportedOrder(order));
    }
    let grid = PolarGrid::new(mu, order)?;
    let values: Vec<Complex64> = grid.nodes().par_iter().map(|z| f(*z)).collect();
    let (b, residual) = grid.project(&values);
    Ok(Expansion {
        vector: trimmed(mu, b)?,
        residual,
    })
}

/// Projects with orders doubling from `start` until the residual is below
/// `TAIL_TOLERANCE · scale`. For unitary maps `keeps_norm` also demands that
/// the projection retains the input norm, which catches mass pushed beyond
/// the reach of the polar grid.
fn expand(
    mu: f64,
    start: usize,
    scale: f64,
    keeps_norm: bool,
    f: impl Fn(Complex64) -> Complex64 + Sync,
) -> Result<Expansion> {
    let mut order = start.clamp(16, MAX_ORDER);
    loop {
        let mut e = project_fn(mu, order, &f)?;
        let tol = TAIL_TOLERANCE * scale.max(f64::MIN_POSITIVE);
        if keeps_norm {
            e.residual = e.residual.max((e.vector.norm() - scale).abs());
        }
        if e.residual <= tol {
            return Ok(e);
        }
        if order == MAX_ORDER {
            return Err(Error::TruncationOverflow {
                tail: e.residual,
                tolerance: tol,
                order,
            });
        }
        order = (2 * order).min(MAX_ORDER);
    }
}

// orders needed to absorb a translation by `shift`
fn order_hint(phi: &FockVector, mu: f64, shift: f64) -> usize {
    let lam = 0.5 * mu * shift * shift;
    phi.order() + 16 + (lam + 8.0 * lam.sqrt()).ceil() as usize
}

fn one_dof(
    g: &GroupElement,
    params: &QuantizationParams,
    op: &'static str,
) -> Result<(f64, f64, f64)> {
    params.require_one_dof(op)?;
    g.qpz().map_err(|_| Error::RequiresOneDof(op))
}

/// `U_BF(q, p, z) φ(Z₀) = e^{iμ(z + ½Im(Z̄Z₀))} φ(Z₀ − Z)` with `Z = q + ip`.
pub fn u_bf(g: &GroupElement, phi: &FockVector, params: &QuantizationParams) -> Result<FockVector> {
    let (q, p, z) = one_dof(g, params, "u_bf")?;
    same_mu(params.mu, phi.mu)?;
    let mu = params.mu;
    let zz = Complex64::new(q, p);
    let ev = phi.evaluator();
    let f = |z0: Complex64| {
        Complex64::from_polar(1.0, mu * (z + 0.5 * (zz.conj() * z0).im)) * ev(z0 - zz)
    };
    Ok(expand(mu, order_hint(phi, mu, zz.norm()), phi.norm(), true, f)?.vector)
}

/// `BF_μ(Z) φ(Z₀) = e^{iμ Im(Z̄Z₀)} φ(2Z − Z₀)`.
pub fn bf_point(
    zz: Complex64,
    phi: &FockVector,
    params: &QuantizationParams,
) -> Result<FockVector> {
    params.require_one_dof("bf_point")?;
    same_mu(params.mu, phi.mu)?;
    let mu = params.mu;
    let ev = phi.evaluator();
    let f =
        |z0: Complex64| Complex64::from_polar(1.0, mu * (zz.conj() * z0).im) * ev(2.0 * zz - z0);
    Ok(expand(
        mu,
        order_hint(phi, mu, 2.0 * zz.norm()),
        phi.norm(),
        true,
        f,
    )?
    .vector)
}

/// Square window `[−R, R]²` with `points` trapezoid nodes per axis for the
/// kernel integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelQuadrature {
    pub half_width: f64,
    pub points: usize,
}

impl Default for KernelQuadrature {
    fn default() -> Self {
        Self {
            half_width: 20.0,
            points: 201,
        }
    }
}

impl KernelQuadrature {
    fn nodes(&self) -> Result<(Vec<f64>, f64)> {
        if self.half_width.is_nan() || self.half_width <= 0.0 || self.points < 3 {
            return Err(Error::InvalidParams(format!("bad kernel window {self:?}")));
        }
        let h = 2.0 * self.half_width / (self.points - 1) as f64;
        Ok((
            (0..self.points)
                .map(|i| -self.half_width + i as f64 * h)
                .collect(),
            h,
        ))
    }
}

/// Symbols accepted by [`bf_symbol`].
#[derive(Clone, Copy)]
pub enum FockSymbol<'a> {
    Sum(&'a SymbolSum),
    Fn(&'a (dyn Fn(f64, f64) -> Complex64 + Sync)),
}

impl<'a> From<&'a SymbolSum> for FockSymbol<'a> {
    fn from(s: &'a SymbolSum) -> Self {
        FockSymbol::Sum(s)
    }
}

// samples of φ on the window, with the boundary check
fn window_samples(phi: &FockVector, xs: &[f64]) -> Result<Vec<Complex64>> {
    let n = xs.len();
    let ev = phi.evaluator();
    let samples: Vec<Complex64> = (0..n * n)
        .into_par_iter()
        .map(|i| ev(Complex64::new(xs[i / n], xs[i % n])))
        .collect();
    let edge = (0..n)
        .flat_map(|k| [(0, k), (n - 1, k), (k, 0), (k, n - 1)])
        .map(|(i, j)| samples[i * n + j].norm())
        .fold(0.0, f64::max);
    let tail = edge / phi.norm().max(f64::MIN_POSITIVE);
    if tail > WINDOW_TOLERANCE {
        return Err(Error::WindowTooSmall {
            tail,
            tolerance: WINDOW_TOLERANCE,
        });
    }
    Ok(samples)
}

#[derive(Clone, Copy)]
enum Order {
    Adaptive(usize),
    Fixed(usize),
}

// pref · ∫ F(½(Z + Z₀)) e^{(iκ/2)Im(Z̄Z₀)} φ(Z) dZ on the polar nodes
fn kernel_transform(
    f: FockSymbol<'_>,
    kappa: f64,
    pref: f64,
    phi: &FockVector,
    quad: &KernelQuadrature,
    order: Order,
) -> Result<Expansion> {
    let (xs, h) = quad.nodes()?;
    let n = xs.len();
    let samples = window_samples(phi, &xs)?;
    let da = h * h * pref;
    let eval = |z0: Complex64| -> Complex64 {
        let (q0, p0) = (z0.re, z0.im);
        match f {
            FockSymbol::Sum(sum) => {
                let mut total = ZERO;
                for t in sum.terms() {
                    // F splits into a q-factor and a p-factor, as does the kernel
                    let kq = 0.5 * (kappa * p0 - t.a[1]);
                    let kp = 0.5 * (t.a[0] - kappa * q0);
                    let cp: Vec<Complex64> = xs
                        .iter()
                        .map(|p| Complex64::from_polar(1.0, kp * p))
                        .collect();
                    let mut acc = ZERO;
                    for (i, q) in xs.iter().enumerate() {
                        let row = &samples[i * n..(i + 1) * n];
                        let inner: Complex64 = row.iter().zip(&cp).map(|(s, c)| s * c).sum();
                        acc += Complex64::from_polar(1.0, kq * q) * inner;
                    }
                    total += t.eval(0.5 * q0, 0.5 * p0) * acc;
                }
                total * da
            }
            FockSymbol::Fn(func) => {
                let mut acc = ZERO;
                for (i, q) in xs.iter().enumerate() {
                    for (j, p) in xs.iter().enumerate() {
                        let k = Complex64::from_polar(1.0, 0.5 * kappa * (q * p0 - p * q0));
                        acc += func(0.5 * (q + q0), 0.5 * (p + p0)) * k * samples[i * n + j];
                    }
                }
                acc * da
            }
        }
    };
    match order {
        Order::Adaptive(start) => expand(phi.mu, start, phi.norm(), false, eval),
        Order::Fixed(k) => project_fn(phi.mu, k, eval),
    }
}

/// `BF_μ(F) φ(Z₀) = (μ/4π) ∫ F(½(Z + Z₀)) e^{(iμ/2)Im(Z̄Z₀)} φ(Z) dZ`.
pub fn bf_symbol(
    f: FockSymbol<'_>,
    phi: &FockVector,
    params: &QuantizationParams,
    quad: &KernelQuadrature,
) -> Result<Expansion> {
    params.require_one_dof("bf_symbol")?;
    same_mu(params.mu, phi.mu)?;
    let shift = match f {
        FockSymbol::Sum(s) => s
            .terms()
            .iter()
            .map(|t| params.theta * t.a[0].hypot(t.a[1]))
            .fold(0.0, f64::max),
        FockSymbol::Fn(_) => 0.0,
    };
    kernel_transform(
        f,
        params.mu,
        params.mu / (4.0 * PI),
        phi,
        quad,
        Order::Adaptive(order_hint(phi, params.mu, shift)),
    )
}

/// Plane-wave closed form `BF_μ(e_a) φ(Z₀) = e^{(i/2)Im(ĀZ₀)} φ(Z₀ − θA)`,
/// `A = a_q + i a_p`, summed over the terms.
pub fn bf_symbol_closed(
    f: &SymbolSum,
    phi: &FockVector,
    params: &QuantizationParams,
) -> Result<FockVector> {
    params.require_one_dof("bf_symbol")?;
    same_mu(params.mu, phi.mu)?;
    let theta = params.theta;
    let waves: Vec<(Complex64, Complex64)> = f
        .terms()
        .iter()
        .map(|t| (t.amp, Complex64::new(t.a[0], t.a[1])))
        .collect();
    let shift = waves
        .iter()
        .map(|(_, a)| theta * a.norm())
        .fold(0.0, f64::max);
    let ev = phi.evaluator();
    let g = |z0: Complex64| -> Complex64 {
        waves
            .iter()
            .map(|(amp, a)| {
                amp * Complex64::from_polar(1.0, 0.5 * (a.conj() * z0).im) * ev(z0 - theta * a)
            })
            .sum()
    };
    Ok(expand(
        params.mu,
        order_hint(phi, params.mu, shift),
        phi.norm(),
        false,
        g,
    )?
    .vector)
}

/// `F_X(W) = e^{iα Im(W̄X)}` as a plane wave.
pub fn f_x(x: Complex64, alpha: f64) -> SymbolSum {
    SymbolSum::new([PlaneWave::new(
        Complex64::new(1.0, 0.0),
        [-alpha * x.re, -alpha * x.im],
    )])
}

/// `e^{(iα/2)Im(Z̄₀X)} φ(μZ₀ + αX)` projected at a fixed order; this form
/// agrees with [`bf_symbol`] only at `μ = 1`, and the residual reports how
/// far it leaves the polarized space otherwise.
pub fn bf_fx_scaled_form(
    x: Complex64,
    alpha: f64,
    phi: &FockVector,
    order: usize,
) -> Result<Expansion> {
    let mu = phi.mu;
    let ev = phi.evaluator();
    project_fn(mu, order, |z0| {
        Complex64::from_polar(1.0, 0.5 * alpha * (z0.conj() * x).im) * ev(mu * z0 + alpha * x)
    })
}

/// `ℱ_ℂ(φ)(Z₀) = C ∫ e^{(i/2)Im(Z̄Z₀)} φ(Z) dZ` with `C = 1/(4π)`,
/// projected at the order of `φ` plus a margin. Only at `μ = 1` does the
/// image stay polarized; elsewhere the residual is large.
pub fn fourier_c(phi: &FockVector, quad: &KernelQuadrature) -> Result<Expansion> {
    let one = SymbolSum::constant(Complex64::new(1.0, 0.0));
    let order = (phi.order() + 16).min(MAX_ORDER);
    kernel_transform(
        FockSymbol::Sum(&one),
        1.0,
        FOURIER_C,
        phi,
        quad,
        Order::Fixed(order),
    )
}

/// `⟨ẽ_k, ℱ_ℂ ẽ_k⟩` for `k = 0..=kmax` at `μ = 1`.
pub fn fourier_eigenvalues(kmax: usize, quad: &KernelQuadrature) -> Result<Vec<Complex64>> {
    (0..=kmax)
        .map(|k| {
            let mut b = vec![ZERO; k + 1];
            b[k] = Complex64::new(1.0, 0.0);
            let e = FockVector::from_orthonormal(1.0, &b)?;
            let out = fourier_c(&e, quad)?.vector.orthonormal();
            Ok(out.get(k).copied().unwrap_or(ZERO))
        })
        .collect()
}

/// `BF_μ(to_symbol(A)) φ`.
pub fn torus_action(
    a: &TorusElement,
    phi: &FockVector,
    params: &QuantizationParams,
    quad: &KernelQuadrature,
) -> Result<FockVector> {
    params.validate()?;
    let sym = a.to_symbol(params)?;
    Ok(bf_symbol(FockSymbol::Sum(&sym), phi, params, quad)?.vector)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nctorus::Generator;
    use crate::numerics::{quad_2d, Window2D};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(mu: f64) -> QuantizationParams {
        QuantizationParams::from_mu(mu).unwrap()
    }

    fn sample_vector(mu: f64) -> FockVector {
        FockVector::from_orthonormal(
            mu,
            &[
                c(0.6, 0.1),
                c(-0.3, 0.4),
                c(0.2, 0.0),
                c(0.0, -0.25),
                c(0.1, 0.05),
            ],
        )
        .unwrap()
    }

    #[test]
    fn vacuum_weight_matches_gaussian_integral() {
        let w = Window2D::square(8.0, 401).unwrap();
        let direct = quad_2d(|q, p| c((-(q * q + p * p)).exp(), 0.0), &w).unwrap();
        assert!((weight(0, 2.0) - PI).abs() < 1e-12);
        assert!((direct.re - weight(0, 2.0)).abs() < 1e-10);
    }

    #[test]
    fn first_weight_ratio() {
        for mu in [0.5, 1.0, 2.0 * PI] {
            let r = 12.0 / mu.sqrt();
            let w = Window2D::square(r, 601).unwrap();
            let g = |k: i32| {
                quad_2d(
                    move |q, p| {
                        let s = q * q + p * p;
                        c((-0.5 * mu * s).exp() * s.powi(k), 0.0)
                    },
                    &w,
                )
                .unwrap()
                .re
            };
            let ratio = weight(1, mu) / weight(0, mu);
            assert!(
                (g(1) / g(0) - ratio).abs() < 1e-8,
                "{mu}: {} vs {ratio}",
                g(1) / g(0)
            );
            assert!((ratio - 2.0 / mu).abs() < 1e-13);
        }
    }

    #[test]
    fn monomials_are_orthogonal() {
        let a = FockVector::monomial(1.5, 3).unwrap();
        let b = FockVector::monomial(1.5, 5).unwrap();
        assert_eq!(a.inner(&b).unwrap(), c(0.0, 0.0));
        // and the polar projection agrees
        let e = project_fn(1.5, 8, |z| b.eval(z)).unwrap();
        let o = e.vector.orthonormal();
        assert!((o[5].norm() - weight(5, 1.5).sqrt()).abs() < 1e-10 * weight(5, 1.5).sqrt());
        assert!(o
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != 5)
            .all(|(_, z)| z.norm() < 1e-10));
        assert!(e.residual < 1e-10);
    }

    #[test]
    fn mu_mismatch() {
        let a = FockVector::vacuum(1.0).unwrap();
        let b = FockVector::vacuum(2.0).unwrap();
        assert!(matches!(a.inner(&b), Err(Error::MuMismatch { .. })));
    }

    #[test]
    fn json_layout() {
        let v = FockVector::new(1.0, vec![c(1.0, 0.0), c(0.5, -0.25)]).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"mu":1.0,"coeffs":[[1.0,0.0],[0.5,-0.25]]}"#);
        assert_eq!(serde_json::from_str::<FockVector>(&s).unwrap(), v);
        assert!(serde_json::from_str::<FockVector>(r#"{"mu":-1.0,"coeffs":[[1.0,0.0]]}"#).is_err());
    }

    #[test]
    fn central_element_is_phase() {
        let pr = params(2.0);
        let v = sample_vector(2.0);
        let out = u_bf(&GroupElement::central(1, 0.3), &v, &pr).unwrap();
        let want = v.scale(Complex64::from_polar(1.0, 0.6));
        assert!(out.distance(&want).unwrap() < 1e-12);
    }

    #[test]
    fn representation_on_vacuum() {
        let pr = params(1.0);
        let vac = FockVector::vacuum(1.0).unwrap();
        let g = GroupElement::from_qpz(0.7, -0.4, 0.2);
        let h = GroupElement::from_qpz(-0.3, 1.1, -0.5);
        let two = u_bf(&g, &u_bf(&h, &vac, &pr).unwrap(), &pr).unwrap();
        let one = u_bf(&g.multiply(&h).unwrap(), &vac, &pr).unwrap();
        assert!(two.distance(&one).unwrap() < 1e-7);
    }

    #[test]
    fn point_at_origin_is_parity() {
        let pr = params(1.0);
        let v = sample_vector(1.0);
        let out = bf_point(c(0.0, 0.0), &v, &pr).unwrap();
        let want: Vec<Complex64> = v
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, z)| if k % 2 == 0 { *z } else { -z })
            .collect();
        assert!(out.distance(&FockVector::new(1.0, want).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn point_is_involutive() {
        let pr = params(1.0);
        let v = sample_vector(1.0);
        let z = c(0.4, -0.3);
        let twice = bf_point(z, &bf_point(z, &v, &pr).unwrap(), &pr).unwrap();
        assert!(twice.distance(&v).unwrap() < 1e-8);
    }

    #[test]
    fn point_is_conjugated_parity() {
        let pr = params(1.3);
        let v = sample_vector(1.3);
        let z = c(-0.5, 0.2);
        let (g, gi) = (
            GroupElement::from_qpz(z.re, z.im, 0.0),
            GroupElement::from_qpz(-z.re, -z.im, 0.0),
        );
        let inner = u_bf(&gi, &v, &pr).unwrap();
        let par = bf_point(c(0.0, 0.0), &inner, &pr).unwrap();
        let lhs = u_bf(&g, &par, &pr).unwrap();
        assert!(lhs.distance(&bf_point(z, &v, &pr).unwrap()).unwrap() < 1e-8);
    }

    #[test]
    fn constant_symbol_fixes_vacuum() {
        let vac = FockVector::vacuum(1.0).unwrap();
        let one = SymbolSum::constant(c(1.0, 0.0));
        let out = bf_symbol(
            (&one).into(),
            &vac,
            &params(1.0),
            &KernelQuadrature::default(),
        )
        .unwrap();
        assert!(out.vector.distance(&vac).unwrap() < 1e-7);
        let f = fourier_c(&vac, &KernelQuadrature::default()).unwrap();
        assert!(f.vector.distance(&vac).unwrap() < 1e-7);
    }

    #[test]
    fn plane_wave_by_quadrature_matches_closed_form() {
        for mu in [1.0, 2.0] {
            let pr = params(mu);
            let v = sample_vector(mu);
            let f = SymbolSum::new([
                PlaneWave::new(c(0.5, 0.5), [0.6, -0.3]),
                PlaneWave::new(c(1.0, 0.0), [-0.2, 0.4]),
            ]);
            let quad = bf_symbol((&f).into(), &v, &pr, &KernelQuadrature::default()).unwrap();
            let closed = bf_symbol_closed(&f, &v, &pr).unwrap();
            assert!(quad.vector.distance(&closed).unwrap() < 1e-7, "mu = {mu}");
            assert!(quad.residual < 1e-7);
        }
    }

    #[test]
    fn scaled_form_holds_only_at_unit_mu() {
        let x = c(0.7, -0.4);
        for alpha in [0.5, 1.0] {
            let v = sample_vector(1.0);
            let scaled = bf_fx_scaled_form(x, alpha, &v, 40).unwrap();
            let ours = bf_symbol_closed(&f_x(x, alpha), &v, &params(1.0)).unwrap();
            assert!(scaled.vector.distance(&ours).unwrap() < 1e-9);
            assert!(scaled.residual < 1e-9);
        }
        let v = sample_vector(2.0);
        let scaled = bf_fx_scaled_form(x, 1.0, &v, 40).unwrap();
        let ours = bf_symbol_closed(&f_x(x, 1.0), &v, &params(2.0)).unwrap();
        assert!(scaled.vector.distance(&ours).unwrap() > 1e-2);
    }

    #[test]
    fn fourier_eigenvalues_at_unit_mu() {
        let ev = fourier_eigenvalues(6, &KernelQuadrature::default()).unwrap();
        for (k, e) in ev.iter().enumerate() {
            assert!((e.norm() - 1.0).abs() < 1e-7, "k = {k}: {e}");
            assert!((e - 1.0).norm() < 1e-7, "k = {k}: {e}");
        }
    }

    #[test]
    fn fourier_leaves_polarized_space_away_from_unit_mu() {
        let vac = FockVector::vacuum(2.0).unwrap();
        let f = fourier_c(&vac, &KernelQuadrature::default()).unwrap();
        assert!(f.residual > 1e-3);
    }

    #[test]
    fn window_too_small() {
        let v = sample_vector(1.0);
        let quad = KernelQuadrature {
            half_width: 3.0,
            points: 41,
        };
        let one = SymbolSum::constant(c(1.0, 0.0));
        assert!(matches!(
            bf_symbol((&one).into(), &v, &params(1.0), &quad),
            Err(Error::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn truncation_overflow() {
        let v = FockVector::vacuum(1.0).unwrap();
        let g = GroupElement::from_qpz(40.0, 0.0, 0.0);
        assert!(matches!(
            u_bf(&g, &v, &params(1.0)),
            Err(Error::TruncationOverflow { .. })
        ));
    }

    #[test]
    fn torus_generators_on_fock_space() {
        let pr = params(1.0);
        let quad = KernelQuadrature::default();
        let v = sample_vector(1.0);
        let u = TorusElement::generator(Generator::U, 1.0);
        let w = TorusElement::generator(Generator::V, 1.0);
        let id = torus_action(&TorusElement::identity(1.0), &v, &pr, &quad).unwrap();
        assert!(id.distance(&v).unwrap() < 1e-7);
        let uv = torus_action(&u, &torus_action(&w, &v, &pr, &quad).unwrap(), &pr, &quad).unwrap();
        let vu = torus_action(&w, &torus_action(&u, &v, &pr, &quad).unwrap(), &pr, &quad).unwrap();
        let rel = uv
            .distance(&vu.scale(Complex64::from_polar(1.0, 1.0)))
            .unwrap();
        assert!(rel < 1e-6 * v.norm(), "{rel}");
        let prod = torus_action(&u.multiply(&w).unwrap(), &v, &pr, &quad).unwrap();
        assert!(prod.distance(&uv).unwrap() < 1e-6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn u_bf_is_unitary(q in -1.0f64..1.0, p in -1.0f64..1.0, z in -1.0f64..1.0) {
            let pr = params(1.0);
            let a = sample_vector(1.0);
            let b = FockVector::from_orthonormal(1.0, &[c(0.1, 0.0), c(0.0, 0.7), c(-0.4, 0.2)]).unwrap();
            let g = GroupElement::from_qpz(q, p, z);
            let ua = u_bf(&g, &a, &pr).unwrap();
            let ub = u_bf(&g, &b, &pr).unwrap();
            prop_assert!((ua.inner(&ub).unwrap() - a.inner(&b).unwrap()).norm() < 1e-7);
        }

        #[test]
        fn inner_is_positive(bs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..10), mu in 0.3f64..7.0) {
            let b: Vec<Complex64> = bs.iter().map(|(x, y)| c(*x, *y)).collect();
            let v = FockVector::from_orthonormal(mu, &b).unwrap();
            let n = v.inner(&v).unwrap();
            prop_assert!(n.im.abs() <= 1e-12 * n.re.max(1e-300));
            prop_assert!(n.re >= 0.0);
            prop_assert!((n.re.sqrt() - v.norm()).abs() < 1e-10 * v.norm().max(1e-300));
        }
    }

    #[test]
    fn bf_symbol_is_bilinear() {
        let pr = params(1.0);
        let quad = KernelQuadrature::default();
        let f = SymbolSum::wave(c(1.0, 0.0), [0.3, 0.2]);
        let g = SymbolSum::wave(c(0.0, 2.0), [-0.5, 0.1]);
        let a = sample_vector(1.0);
        let b = FockVector::vacuum(1.0).unwrap();
        let run =
            |s: &SymbolSum, v: &FockVector| bf_symbol(s.into(), v, &pr, &quad).unwrap().vector;
        let lhs = run(&f.add(&g), &a.add(&b).unwrap());
        let rhs = run(&f, &a)
            .add(&run(&f, &b))
            .unwrap()
            .add(&run(&g, &a))
            .unwrap()
            .add(&run(&g, &b))
            .unwrap();
        assert!(lhs.distance(&rhs).unwrap() < 1e-8);
    }

    #[test]
    fn windowed_function_route_matches_sum_route() {
        let pr = params(1.0);
        let quad = KernelQuadrature {
            half_width: 14.0,
            points: 97,
        };
        let v = FockVector::vacuum(1.0).unwrap();
        let s = SymbolSum::wave(c(1.0, 0.0), [0.3, -0.2]);
        let func = |q: f64, p: f64| s.eval(q, p);
        let by_fn = bf_symbol(FockSymbol::Fn(&func), &v, &pr, &quad).unwrap();
        let by_sum = bf_symbol((&s).into(), &v, &pr, &quad).unwrap();
        assert!(by_fn.vector.distance(&by_sum.vector).unwrap() < 1e-10);
    }
}
