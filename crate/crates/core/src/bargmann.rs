//! Intertwiners built as sums or integrals of rank-one maps
//! `T = ∫ |η′_g⟩⟨η_g| dg`: the finite-group case, and the Bargmann transform
//! from `L²(Q)` to Fock space with Gaussian mother states.

use crate::error::{Error, Result};
use crate::fock::{basis_values, project_fn, trimmed, FockVector, MAX_ORDER};
use crate::numerics::PositionWavefunction;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Largest boundary value of the `v`-integrand relative to its peak.
pub const V_TAIL_TOLERANCE: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Finite group given by its multiplication table, with a unitary matrix
/// per element.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteRep {
    table: Vec<Vec<usize>>,
    matrices: Vec<DMatrix<Complex64>>,
}

fn max_entry(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl FiniteRep {
    pub fn new(table: Vec<Vec<usize>>, matrices: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || matrices.len() != n {
            return Err(Error::InvalidRepresentation(format!(
                "{} matrices for a group of order {n}",
                matrices.len()
            )));
        }
        if table
            .iter()
            .any(|row| row.len() != n || row.iter().any(|&k| k >= n))
        {
            return Err(Error::InvalidRepresentation(
                "malformed multiplication table".into(),
            ));
        }
        let d = matrices[0].nrows();
        for m in &matrices {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: m.nrows().max(m.ncols()),
                });
            }
            let err = max_entry(&(m.adjoint() * m - DMatrix::identity(d, d)));
            if err > 1e-12 {
                return Err(Error::InvalidRepresentation(format!(
                    "matrix not unitary ({err:e})"
                )));
            }
        }
        for g in 0..n {
            for h in 0..n {
                let err = max_entry(&(&matrices[g] * &matrices[h] - &matrices[table[g][h]]));
                if err > 1e-12 {
                    return Err(Error::InvalidRepresentation(format!(
                        "ρ({g})ρ({h}) ≠ ρ({}) ({err:e})",
                        table[g][h]
                    )));
                }
            }
        }
        Ok(Self { table, matrices })
    }

    /// The character `g ↦ e^{2πi gk/n}` of `ℤ_n`.
    pub fn cyclic_character(n: usize, k: usize) -> Result<Self> {
        let table = (0..n)
            .map(|g| (0..n).map(|h| (g + h) % n).collect())
            .collect();
        let mats = (0..n)
            .map(|g| {
                let ang = 2.0 * PI * ((g * k) % n) as f64 / n as f64;
                DMatrix::from_element(1, 1, Complex64::from_polar(1.0, ang))
            })
            .collect();
        Self::new(table, mats)
    }

    /// Left-regular representation of `S_3` on `ℂ^6`.
    pub fn s3_regular() -> Result<Self> {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [1, 0, 2],
            [0, 2, 1],
            [2, 1, 0],
            [1, 2, 0],
            [2, 0, 1],
        ];
        let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        // (g h)(i) = g(h(i))
        let table: Vec<Vec<usize>> = perms
            .iter()
            .map(|g| {
                perms
                    .iter()
                    .map(|h| index([g[h[0]], g[h[1]], g[h[2]]]))
                    .collect()
            })
            .collect();
        let mats = (0..6)
            .map(|g| {
                DMatrix::from_fn(6, 6, |r, c| {
                    if table[g][c] == r {
                        Complex64::new(1.0, 0.0)
                    } else {
                        ZERO
                    }
                })
            })
            .collect();
        Self::new(table, mats)
    }

    /// The one-element group acting trivially on `ℂ^dim`.
    pub fn trivial(dim: usize) -> Result<Self> {
        Self::new(vec![vec![0]], vec![DMatrix::identity(dim, dim)])
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn matrix(&self, g: usize) -> &DMatrix<Complex64> {
        &self.matrices[g]
    }
}

fn same_group(a: &FiniteRep, b: &FiniteRep) -> Result<()> {
    if a.table != b.table {
        return Err(Error::InvalidRepresentation(
            "representations of different groups".into(),
        ));
    }
    Ok(())
}

/// `T = Σ_g |ρ′(g)η′⟩⟨ρ(g)η|`.
pub fn finite_intertwiner(
    rho: &FiniteRep,
    rho2: &FiniteRep,
    eta: &DVector<Complex64>,
    eta2: &DVector<Complex64>,
) -> Result<DMatrix<Complex64>> {
    same_group(rho, rho2)?;
    if eta.len() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: eta.len(),
        });
    }
    if eta2.len() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho2.dim(),
            got: eta2.len(),
        });
    }
    let mut t = DMatrix::zeros(rho2.dim(), rho.dim());
    for g in 0..rho.order() {
        let left = rho2.matrix(g) * eta2;
        let right = rho.matrix(g) * eta;
        t += left * right.adjoint();
    }
    Ok(t)
}

/// `max_g max |T ρ(g) − ρ′(g) T|`.
pub fn intertwining_residual(
    t: &DMatrix<Complex64>,
    rho: &FiniteRep,
    rho2: &FiniteRep,
) -> Result<f64> {
    same_group(rho, rho2)?;
    Ok((0..rho.order())
        .map(|g| max_entry(&(t * rho.matrix(g) - rho2.matrix(g) * t)))
        .fold(0.0, f64::max))
}

/// Mother state `e^{−αq²}`, orbit parameter `μ`, and the `v`-quadrature
/// over `[−R, R]²` with step `v_step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BargmannConfig {
    pub alpha: f64,
    pub mu: f64,
    pub radius: f64,
    pub v_step: f64,
    pub order: usize,
}

impl BargmannConfig {
    /// `R = max(6, 10/√μ + 2)`, step `0.1`, Fock order 64.
    pub fn new(alpha: f64, mu: f64) -> Result<Self> {
        let cfg = Self {
            alpha,
            mu,
            radius: (10.0 / mu.sqrt() + 2.0).max(6.0),
            v_step: 0.1,
            order: 64,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `α = 3π/2`, `μ = 2π`, `R = 6`.
    pub fn folland() -> Self {
        Self {
            alpha: 1.5 * PI,
            mu: 2.0 * PI,
            radius: 6.0,
            v_step: 0.1,
            order: 64,
        }
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "mu must be positive, got {}",
                self.mu
            )));
        }
        if !(self.radius > 0.0 && self.v_step > 0.0 && self.v_step < self.radius) {
            return Err(Error::InvalidParams("bad v-window".into()));
        }
        if self.order > MAX_ORDER {
            return Err(Error::UnsupportedOrder(self.order));
        }
        Ok(())
    }

    fn v_nodes(&self) -> Vec<f64> {
        let n = (2.0 * self.radius / self.v_step).round() as usize + 1;
        let h = 2.0 * self.radius / (n - 1) as f64;
        (0..n).map(|i| -self.radius + i as f64 * h).collect()
    }

    /// `T` maps the Kirillov–Weyl vacuum `e^{−μq²/2}` to this multiple of
    /// the Fock vacuum `e^{−μ|z|²/4}`.
    pub fn vacuum_constant(&self) -> f64 {
        2.0 * PI * PI.sqrt() / (self.mu * (self.alpha + 0.5 * self.mu).sqrt())
    }
}

/// `T u = ∫_V ⟨ũ⁰_v, u⟩ φ̃⁰_v dv` with `ũ⁰_v = U_KW(v)ũ⁰` and
/// `φ̃⁰_v = U_BF(v)φ̃⁰`, by the trapezoid rule over the `v`-window.
pub fn intertwiner_apply(u: &PositionWavefunction, cfg: &BargmannConfig) -> Result<FockVector> {
    cfg.validate()?;
    let grid = *u.grid();
    let xs = grid.points();
    let h = grid.spacing();
    let vs = cfg.v_nodes();
    let nv = vs.len();
    let dv = vs[1] - vs[0];
    let (alpha, mu) = (cfg.alpha, cfg.mu);
    // ⟨ũ⁰_v, u⟩ = e^{−iμqp/2} ∫ e^{iμxp − α(x−q)²} u(x) dx
    let a = DMatrix::from_fn(nv, xs.len(), |i, k| {
        let d = xs[k] - vs[i];
        u.samples()[k] * (-alpha * d * d).exp() * h
    });
    let b = DMatrix::from_fn(xs.len(), nv, |k, j| {
        Complex64::from_polar(1.0, mu * xs[k] * vs[j])
    });
    let mut pair = a * b;
    for i in 0..nv {
        for j in 0..nv {
            pair[(i, j)] *= Complex64::from_polar(1.0, -0.5 * mu * vs[i] * vs[j]);
        }
    }
    // the integrand carries the extra Gaussian e^{−μ|Z|²/4}
    let weight = |i: usize, j: usize| {
        pair[(i, j)].norm() * (-0.25 * mu * (vs[i] * vs[i] + vs[j] * vs[j])).exp()
    };
    let peak = (0..nv * nv)
        .map(|t| weight(t / nv, t % nv))
        .fold(0.0, f64::max);
    let edge = (0..nv)
        .flat_map(|k| [(0, k), (nv - 1, k), (k, 0), (k, nv - 1)])
        .map(|(i, j)| weight(i, j))
        .fold(0.0, f64::max);
    if peak > 0.0 && edge > V_TAIL_TOLERANCE * peak {
        return Err(Error::WindowTooSmall {
            tail: edge / peak,
            tolerance: V_TAIL_TOLERANCE,
        });
    }
    let k = cfg.order;
    let pref = (2.0 * PI / mu).sqrt() * dv * dv;
    let step = (0.5 * mu).sqrt();
    let partials: Vec<Vec<Complex64>> = (0..nv)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![ZERO; k + 1];
            for j in 0..nv {
                // orthonormal coefficients of φ̃⁰_v: √(2π/μ) e^{−μ|Z|²/4} (√(μ/2) Z̄)^k / √k!
                let zbar = Complex64::new(vs[i], -vs[j]) * step;
                let mut c = pair[(i, j)] * (-0.25 * mu * (vs[i] * vs[i] + vs[j] * vs[j])).exp();
                for (n, slot) in acc.iter_mut().enumerate() {
                    if n > 0 {
                        c *= zbar / (n as f64).sqrt();
                    }
                    *slot += c;
                }
            }
            acc
        })
        .collect();
    let mut total = vec![ZERO; k + 1];
    for p in partials {
        for (t, x) in total.iter_mut().zip(p) {
            *t += x;
        }
    }
    trimmed(mu, total.into_iter().map(|z| z * pref).collect())
}

/// Exponent coefficient of `x²` in the closed kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelVariant {
    /// `e^{−(μ/4)(Z² − 4xZ + 2x²)}` with prefactor `2π/√(μ(α + μ/2))`.
    Derived,
    /// `e^{−(μ/4)(Z − x)(Z − 3x)}` with prefactor `2π√((α + μ/4)/μ)`.
    Factored,
}

impl KernelVariant {
    fn quadratic(self) -> f64 {
        match self {
            KernelVariant::Derived => 2.0,
            KernelVariant::Factored => 3.0,
        }
    }

    fn prefactor(self, cfg: &BargmannConfig) -> f64 {
        match self {
            KernelVariant::Derived => 2.0 * PI / (cfg.mu * (cfg.alpha + 0.5 * cfg.mu)).sqrt(),
            KernelVariant::Factored => 2.0 * PI * ((cfg.alpha + 0.25 * cfg.mu) / cfg.mu).sqrt(),
        }
    }
}

/// `T u(Z) = P e^{−μ|Z|²/4} ∫ e^{−(μ/4)(Z² − 4xZ + c x²)} u(x) dx`,
/// evaluated on the Fock quadrature nodes and projected.
pub fn intertwiner_kernel(
    u: &PositionWavefunction,
    cfg: &BargmannConfig,
    variant: KernelVariant,
) -> Result<FockVector> {
    cfg.validate()?;
    let grid = *u.grid();
    let xs = grid.points();
    let h = grid.spacing();
    let mu = cfg.mu;
    let c = variant.quadratic();
    let pref = variant.prefactor(cfg) * h;
    let samples = u.samples();
    let e = project_fn(mu, cfg.order, |z| {
        let base = -0.25 * mu * (z.norm_sqr() + z * z);
        let acc: Complex64 = xs
            .iter()
            .zip(samples)
            .map(|(x, s)| s * (base + 0.25 * mu * (4.0 * x * z - c * x * x)).exp())
            .sum();
        acc * pref
    })?;
    Ok(e.vector)
}

/// Kernel route over quadrature route at sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteRatio {
    pub ratios: Vec<Complex64>,
    /// Mean of the ratios.
    pub constant: Complex64,
    /// `max |r − constant| / |constant|`.
    pub spread: f64,
}

/// Compares the two routes at a few points `|Z| ≤ 1` for every input.
pub fn route_ratio(
    inputs: &[PositionWavefunction],
    cfg: &BargmannConfig,
    variant: KernelVariant,
) -> Result<RouteRatio> {
    let points = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.5, 0.0),
        Complex64::new(0.0, 0.6),
        Complex64::new(-0.4, 0.3),
        Complex64::new(0.7, -0.7),
    ];
    let mut ratios = Vec::new();
    for u in inputs {
        let a = intertwiner_apply(u, cfg)?;
        let k = intertwiner_kernel(u, cfg, variant)?;
        let scale = a.norm() * basis_values(Complex64::new(0.0, 0.0), cfg.mu, 0)[0].norm();
        for z in points {
            let av = a.eval(z);
            // skip points where the quadrature route is near a zero
            if av.norm() > 1e-3 * scale {
                ratios.push(k.eval(z) / av);
            }
        }
    }
    if ratios.is_empty() {
        return Err(Error::Inconsistent("no usable sample points".into()));
    }
    let constant = ratios.iter().sum::<Complex64>() / ratios.len() as f64;
    let spread = ratios
        .iter()
        .map(|r| (r - constant).norm())
        .fold(0.0, f64::max)
        / constant.norm();
    Ok(RouteRatio {
        ratios,
        constant,
        spread,
    })
}
