//! The algebraic noncommutative torus: finite sums `Σ c_mn U^m V^n` in the
//! normal order U-before-V, with `U V = e^{iθ} V U`.

use crate::error::{Error, Result};
use crate::moyal::{PlaneWave, SymbolSum};
use crate::numerics::{compress, operator_norm, Grid1D, QuantizationParams};
use crate::schrodinger::{band_basis, quantize_symbol};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const THETA_TOLERANCE: f64 = 1e-14;

/// Fraction of the grid Nyquist frequency kept when estimating norms.
pub const BAND_CUTOFF: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    U,
    V,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementJson", into = "ElementJson")]
pub struct TorusElement {
    theta: f64,
    coeffs: BTreeMap<(i64, i64), Complex64>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    m: i64,
    n: i64,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    theta: f64,
    terms: Vec<TermJson>,
}

impl TryFrom<ElementJson> for TorusElement {
    type Error = Error;

    fn try_from(j: ElementJson) -> Result<Self> {
        if !j.theta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "theta must be finite, got {}",
                j.theta
            )));
        }
        Ok(TorusElement::new(
            j.theta,
            j.terms
                .into_iter()
                .map(|t| ((t.m, t.n), Complex64::new(t.re, t.im))),
        ))
    }
}

impl From<TorusElement> for ElementJson {
    fn from(e: TorusElement) -> Self {
        ElementJson {
            theta: e.theta,
            terms: e
                .coeffs
                .into_iter()
                .map(|((m, n), c)| TermJson {
                    m,
                    n,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl TorusElement {
    /// Repeated indices are summed; exact zeros are dropped.
    pub fn new(theta: f64, terms: impl IntoIterator<Item = ((i64, i64), Complex64)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (k, c) in terms {
            *coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Self { theta, coeffs }
    }

    pub fn zero(theta: f64) -> Self {
        Self::new(theta, [])
    }

    pub fn identity(theta: f64) -> Self {
        Self::monomial(theta, 0, 0, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(theta: f64, m: i64, n: i64, c: Complex64) -> Self {
        Self::new(theta, [((m, n), c)])
    }

    pub fn generator(which: Generator, theta: f64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        match which {
            Generator::U => Self::monomial(theta, 1, 0, one),
            Generator::V => Self::monomial(theta, 0, 1, one),
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn coeffs(&self) -> &BTreeMap<(i64, i64), Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, m: i64, n: i64) -> Complex64 {
        self.coeffs.get(&(m, n)).copied().unwrap_or_default()
    }

    pub fn support(&self) -> Vec<(i64, i64)> {
        self.coeffs.keys().copied().collect()
    }

    fn check_theta(&self, other: f64) -> Result<()> {
        if (self.theta - other).abs() > THETA_TOLERANCE {
            return Err(Error::ThetaMismatch {
                left: self.theta,
                right: other,
            });
        }
        Ok(())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.theta, self.coeffs.iter().map(|(k, v)| (*k, v * c)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_theta(other.theta)?;
        Ok(Self::new(
            self.theta,
            self.coeffs
                .iter()
                .chain(other.coeffs.iter())
                .map(|(k, v)| (*k, *v)),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `(U^m V^n)(U^m′ V^n′) = e^{−iθ n m′} U^{m+m′} V^{n+n′}`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_theta(other.theta)?;
        let mut out = Vec::with_capacity(self.coeffs.len() * other.coeffs.len());
        for (&(m, n), a) in &self.coeffs {
            for (&(m2, n2), b) in &other.coeffs {
                let phase = Complex64::from_polar(1.0, -self.theta * (n * m2) as f64);
                out.push(((m + m2, n + n2), a * b * phase));
            }
        }
        Ok(Self::new(self.theta, out))
    }

    pub fn adjoint(&self) -> Self {
        Self::new(
            self.theta,
            self.coeffs.iter().map(|(&(m, n), c)| {
                (
                    (-m, -n),
                    c.conj() * Complex64::from_polar(1.0, -self.theta * (m * n) as f64),
                )
            }),
        )
    }

    pub fn trace(&self) -> Complex64 {
        self.coeff(0, 0)
    }

    /// `Σ c_mn e^{(iθ/2)mn} e^{iΩ((m, n), ·)}`.
    pub fn to_symbol(&self, params: &QuantizationParams) -> Result<SymbolSum> {
        self.check_theta(params.theta)?;
        Ok(SymbolSum::new(self.coeffs.iter().map(|(&(m, n), c)| {
            let phase = Complex64::from_polar(1.0, 0.5 * self.theta * (m * n) as f64);
            PlaneWave::new(c * phase, [m as f64, n as f64])
        })))
    }

    /// `max |c − c′|` over the union of supports.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .keys()
            .chain(other.coeffs.keys())
            .map(|&(m, n)| (self.coeff(m, n) - other.coeff(m, n)).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub norm: f64,
    /// The same estimate on a grid of half the resolution.
    pub coarse: f64,
    pub refinement_delta: f64,
    pub basis_dim: usize,
}

fn band_norm(a: &TorusElement, params: &QuantizationParams, grid: &Grid1D) -> Result<(f64, usize)> {
    let op = quantize_symbol((&a.to_symbol(params)?).into(), grid, params)?;
    let basis = band_basis(grid, BAND_CUTOFF);
    Ok((
        operator_norm(&compress(op.matrix(), &basis))?,
        basis.ncols(),
    ))
}

/// Operator norm of `Ξ(A)` compressed onto the states of bandwidth below
/// [`BAND_CUTOFF`]·Nyquist. Products of `e^{−iq}` wrap around the grid
/// spectrum at the Nyquist frequency, so the uncompressed matrix is not a
/// faithful model of the torus action.
pub fn norm_estimate(
    a: &TorusElement,
    params: &QuantizationParams,
    grid: &Grid1D,
) -> Result<NormEstimate> {
    params.validate()?;
    a.check_theta(params.theta)?;
    if !grid.is_commensurate() {
        return Err(Error::NotCommensurate {
            half_width: grid.half_width(),
        });
    }
    let coarse_grid = Grid1D::new(grid.center(), grid.half_width(), grid.len() / 2)?;
    let (norm, basis_dim) = band_norm(a, params, grid)?;
    let (coarse, _) = band_norm(a, params, &coarse_grid)?;
    Ok(NormEstimate {
        norm,
        coarse,
        refinement_delta: (norm - coarse).abs(),
        basis_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moyal::star_planewave;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn u(theta: f64) -> TorusElement {
        TorusElement::generator(Generator::U, theta)
    }

    fn v(theta: f64) -> TorusElement {
        TorusElement::generator(Generator::V, theta)
    }

    fn element(theta: f64) -> impl Strategy<Value = TorusElement> {
        prop::collection::vec((-2i64..=2, -2i64..=2, -1.0f64..1.0, -1.0f64..1.0), 1..=5).prop_map(
            move |ts| {
                TorusElement::new(
                    theta,
                    ts.into_iter().map(|(m, n, re, im)| ((m, n), c(re, im))),
                )
            },
        )
    }

    // normal-orders a word in U, V by repeatedly replacing VU with e^{−iθ}UV
    fn rewrite(word: &[Generator], theta: f64) -> TorusElement {
        let mut w = word.to_vec();
        let mut phase = c(1.0, 0.0);
        while let Some(i) = w.windows(2).position(|p| p == [Generator::V, Generator::U]) {
            w.swap(i, i + 1);
            phase *= Complex64::from_polar(1.0, -theta);
        }
        let m = w.iter().filter(|g| **g == Generator::U).count() as i64;
        TorusElement::monomial(theta, m, w.len() as i64 - m, phase)
    }

    #[test]
    fn generator_supports() {
        assert_eq!(u(0.5).support(), vec![(1, 0)]);
        assert_eq!(v(0.5).support(), vec![(0, 1)]);
    }

    #[test]
    fn torus_relation() {
        for theta in [0.3, 0.5, 2.0 * PI / 3.0] {
            let uv = u(theta).multiply(&v(theta)).unwrap();
            let vu = v(theta).multiply(&u(theta)).unwrap();
            assert_eq!(uv.support(), vec![(1, 1)]);
            assert_eq!(vu.support(), vec![(1, 1)]);
            let ratio = uv.coeff(1, 1) / vu.coeff(1, 1);
            assert!((ratio - Complex64::from_polar(1.0, theta)).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_is_neutral() {
        let a = TorusElement::new(0.7, [((1, -2), c(0.5, 1.0)), ((0, 3), c(-1.0, 0.0))]);
        let one = TorusElement::identity(0.7);
        assert_eq!(a.multiply(&one).unwrap(), a);
        assert_eq!(one.multiply(&a).unwrap(), a);
    }

    #[test]
    fn square_of_sum_matches_rewriting() {
        let theta = 0.9;
        let s = u(theta).add(&v(theta)).unwrap();
        let sq = s.multiply(&s).unwrap();
        let one = c(1.0, 0.0);
        let want = TorusElement::new(
            theta,
            [
                ((2, 0), one),
                ((1, 1), one + Complex64::from_polar(1.0, -theta)),
                ((0, 2), one),
            ],
        );
        assert!(sq.max_coeff_diff(&want) < 1e-15);
        let mut by_words = TorusElement::zero(theta);
        for w in [
            [Generator::U, Generator::U],
            [Generator::U, Generator::V],
            [Generator::V, Generator::U],
            [Generator::V, Generator::V],
        ] {
            by_words = by_words.add(&rewrite(&w, theta)).unwrap();
        }
        assert!(sq.max_coeff_diff(&by_words) < 1e-15);
    }

    #[test]
    fn theta_mismatch_is_rejected() {
        assert!(matches!(
            u(0.5).multiply(&v(0.6)),
            Err(Error::ThetaMismatch { .. })
        ));
        let p = QuantizationParams::from_theta(0.6).unwrap();
        assert!(matches!(
            u(0.5).to_symbol(&p),
            Err(Error::ThetaMismatch { .. })
        ));
    }

    #[test]
    fn adjoint_of_generators() {
        let a = u(0.4).adjoint();
        assert_eq!(a.support(), vec![(-1, 0)]);
        assert_eq!(a.coeff(-1, 0), c(1.0, 0.0));
        assert_eq!(
            TorusElement::identity(0.4).adjoint(),
            TorusElement::identity(0.4)
        );
        let w = u(0.4).multiply(&u(0.4).adjoint()).unwrap();
        assert!(w.max_coeff_diff(&TorusElement::identity(0.4)) < 1e-15);
    }

    #[test]
    fn traces() {
        assert_eq!(TorusElement::identity(1.0).trace(), c(1.0, 0.0));
        assert_eq!(
            TorusElement::monomial(1.0, 2, -1, c(3.0, 0.0)).trace(),
            c(0.0, 0.0)
        );
    }

    #[test]
    fn symbols_of_generators() {
        let p = QuantizationParams::from_theta(0.5).unwrap();
        assert_eq!(u(0.5).to_symbol(&p).unwrap(), SymbolSum::u());
        assert_eq!(v(0.5).to_symbol(&p).unwrap(), SymbolSum::v());
        let uv = u(0.5).multiply(&v(0.5)).unwrap().to_symbol(&p).unwrap();
        let vu = v(0.5).multiply(&u(0.5)).unwrap().to_symbol(&p).unwrap();
        let ratio = uv.amplitude([1.0, 1.0]) / vu.amplitude([1.0, 1.0]);
        assert!((ratio - Complex64::from_polar(1.0, 0.5)).norm() < 1e-14);
    }

    #[test]
    fn json_layout() {
        let a = TorusElement::new(0.25, [((1, -1), c(0.5, -2.0))]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(
            s,
            r#"{"theta":0.25,"terms":[{"m":1,"n":-1,"re":0.5,"im":-2.0}]}"#
        );
        let back: TorusElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn norm_needs_commensurate_grid() {
        let p = QuantizationParams::from_theta(0.5).unwrap();
        let grid = Grid1D::centered(12.0, 128).unwrap();
        assert!(matches!(
            norm_estimate(&u(0.5), &p, &grid),
            Err(Error::NotCommensurate { .. })
        ));
    }

    #[test]
    fn unit_norms() {
        let p = QuantizationParams::from_theta(0.5).unwrap();
        let grid = Grid1D::centered(2.0 * PI, 128).unwrap();
        let one = norm_estimate(&TorusElement::identity(0.5), &p, &grid).unwrap();
        assert!((one.norm - 1.0).abs() < 1e-8);
        let uu = norm_estimate(&u(0.5), &p, &grid).unwrap();
        assert!((uu.norm - 1.0).abs() < 1e-8, "{uu:?}");
        let vv = norm_estimate(&v(0.5), &p, &grid).unwrap();
        assert!((vv.norm - 1.0).abs() < 1e-8, "{vv:?}");
    }

    #[test]
    fn c_star_identity_at_desk_scale() {
        let theta = 0.5;
        let p = QuantizationParams::from_theta(theta).unwrap();
        let grid = Grid1D::centered(PI, 256).unwrap();
        let a = TorusElement::new(
            theta,
            [
                ((1, 0), c(1.0, 0.0)),
                ((0, 1), c(0.5, 0.5)),
                ((1, 1), c(-0.3, 0.0)),
            ],
        );
        let na = norm_estimate(&a, &p, &grid).unwrap().norm;
        let nsq = norm_estimate(&a.adjoint().multiply(&a).unwrap(), &p, &grid)
            .unwrap()
            .norm;
        assert!(
            (nsq - na * na).abs() <= 5e-3 * na * na,
            "{nsq} vs {}",
            na * na
        );
    }

    #[test]
    fn commutative_at_zero_theta() {
        let a = TorusElement::new(0.0, [((1, 2), c(1.0, 0.5)), ((-1, 0), c(0.2, 0.0))]);
        let b = TorusElement::new(0.0, [((0, 1), c(0.3, -1.0)), ((2, -1), c(1.0, 0.0))]);
        assert_eq!(a.multiply(&b).unwrap(), b.multiply(&a).unwrap());
    }

    proptest! {
        #[test]
        fn associative(a in element(0.7), b in element(0.7), d in element(0.7)) {
            let l = a.multiply(&b).unwrap().multiply(&d).unwrap();
            let r = a.multiply(&b.multiply(&d).unwrap()).unwrap();
            prop_assert!(l.max_coeff_diff(&r) < 1e-13);
        }

        #[test]
        fn adjoint_is_involutive_antihomomorphism(a in element(1.3), b in element(1.3)) {
            prop_assert!(a.adjoint().adjoint().max_coeff_diff(&a) < 1e-15);
            let l = a.multiply(&b).unwrap().adjoint();
            let r = b.adjoint().multiply(&a.adjoint()).unwrap();
            prop_assert!(l.max_coeff_diff(&r) < 1e-13);
        }

        #[test]
        fn trace_is_tracial(a in element(0.4), b in element(0.4)) {
            let l = a.multiply(&b).unwrap().trace();
            let r = b.multiply(&a).unwrap().trace();
            prop_assert!((l - r).norm() < 1e-13);
        }

        #[test]
        fn symbol_map_is_multiplicative(a in element(0.8), b in element(0.8)) {
            let p = QuantizationParams::from_theta(0.8).unwrap();
            let l = a.multiply(&b).unwrap().to_symbol(&p).unwrap();
            let r = star_planewave(&a.to_symbol(&p).unwrap(), &b.to_symbol(&p).unwrap(), &p);
            prop_assert!(l.max_amp_diff(&r) < 1e-12);
        }

        #[test]
        fn small_theta_approaches_commutative(a in element(1e-9), b in element(1e-9)) {
            let d = a.multiply(&b).unwrap().max_coeff_diff(&b.multiply(&a).unwrap());
            prop_assert!(d < 1e-7);
        }

        #[test]
        fn words_normal_order_like_rewriting(word in prop::collection::vec(any::<bool>(), 1..8), theta in 0.1f64..3.0) {
            let gens: Vec<Generator> = word.iter().map(|b| if *b { Generator::U } else { Generator::V }).collect();
            let mut prod = TorusElement::identity(theta);
            for g in &gens {
                prod = prod.multiply(&TorusElement::generator(*g, theta)).unwrap();
            }
            prop_assert!(prod.max_coeff_diff(&rewrite(&gens, theta)) < 1e-13);
        }
    }
}
