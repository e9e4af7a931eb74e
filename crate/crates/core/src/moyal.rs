//! The Moyal star product in three realizations: exact on plane waves,
//! term-wise on polynomials, and numerically through the grid quantizer.
//!
//! Plane waves are `e_a(v) = e^{iΩ(a, v)} = e^{i(a_q p − a_p q)}`; with the
//! sign convention fixed here, `e_a ⋆ e_b = e^{(iθ/2)Ω(a,b)} e_{a+b}` and
//! `q ⋆ p − p ⋆ q = −iθ`, which gives `U V = e^{iθ} V U` for `U = e^{ip}`,
//! `V = e^{−iq}`.

use crate::error::Result;
use crate::numerics::QuantizationParams;
use crate::schrodinger::{quantize_symbol, symbol_of, GridSymbol, PhaseGrid, SymbolRef};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Global orientation of the star phase.
pub const STAR_SIGN: f64 = 1.0;

/// Frequencies closer than this (max norm) are merged.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// `amp · e^{iΩ(a, ·)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "WaveJson", into = "WaveJson")]
pub struct PlaneWave {
    pub amp: Complex64,
    pub a: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct WaveJson {
    amp_re: f64,
    amp_im: f64,
    a_q: f64,
    a_p: f64,
}

impl From<WaveJson> for PlaneWave {
    fn from(w: WaveJson) -> Self {
        PlaneWave::new(Complex64::new(w.amp_re, w.amp_im), [w.a_q, w.a_p])
    }
}

impl From<PlaneWave> for WaveJson {
    fn from(w: PlaneWave) -> Self {
        WaveJson {
            amp_re: w.amp.re,
            amp_im: w.amp.im,
            a_q: w.a[0],
            a_p: w.a[1],
        }
    }
}

#[inline]
pub fn omega2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

impl PlaneWave {
    pub fn new(amp: Complex64, a: [f64; 2]) -> Self {
        Self { amp, a }
    }

    pub fn eval(&self, q: f64, p: f64) -> Complex64 {
        self.amp * Complex64::from_polar(1.0, omega2(self.a, [q, p]))
    }

    pub fn conj(&self) -> Self {
        Self::new(self.amp.conj(), [-self.a[0], -self.a[1]])
    }
}

/// Finite sum of plane waves with distinct frequencies.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "SumJson")]
pub struct SymbolSum {
    terms: Vec<PlaneWave>,
}

#[derive(Deserialize)]
struct SumJson {
    terms: Vec<PlaneWave>,
}

impl From<SumJson> for SymbolSum {
    fn from(s: SumJson) -> Self {
        SymbolSum::new(s.terms)
    }
}

impl SymbolSum {
    /// Merges equal frequencies, drops zero amplitudes, and sorts by frequency.
    pub fn new(terms: impl IntoIterator<Item = PlaneWave>) -> Self {
        let mut merged: Vec<PlaneWave> = Vec::new();
        for t in terms {
            match merged.iter_mut().find(|m| {
                (m.a[0] - t.a[0]).abs() <= MERGE_TOLERANCE
                    && (m.a[1] - t.a[1]).abs() <= MERGE_TOLERANCE
            }) {
                Some(m) => m.amp += t.amp,
                None => merged.push(t),
            }
        }
        merged.retain(|t| t.amp != Complex64::new(0.0, 0.0));
        merged.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(std::cmp::Ordering::Equal));
        Self { terms: merged }
    }

    pub fn wave(amp: Complex64, a: [f64; 2]) -> Self {
        Self::new([PlaneWave::new(amp, a)])
    }

    pub fn constant(c: Complex64) -> Self {
        Self::wave(c, [0.0, 0.0])
    }

    /// `e^{ip}`.
    pub fn u() -> Self {
        Self::wave(Complex64::new(1.0, 0.0), [1.0, 0.0])
    }

    /// `e^{−iq}`.
    pub fn v() -> Self {
        Self::wave(Complex64::new(1.0, 0.0), [0.0, 1.0])
    }

    pub fn terms(&self) -> &[PlaneWave] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, q: f64, p: f64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(q, p)).sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.terms.iter().map(|t| PlaneWave::new(t.amp * c, t.a)))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.terms.iter().chain(&other.terms).copied())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.terms.iter().map(PlaneWave::conj))
    }

    /// Amplitude at frequency `a`, zero when absent.
    pub fn amplitude(&self, a: [f64; 2]) -> Complex64 {
        self.terms
            .iter()
            .find(|t| {
                (t.a[0] - a[0]).abs() <= MERGE_TOLERANCE && (t.a[1] - a[1]).abs() <= MERGE_TOLERANCE
            })
            .map_or(Complex64::new(0.0, 0.0), |t| t.amp)
    }

    /// Largest amplitude difference over the union of frequencies.
    pub fn max_amp_diff(&self, other: &Self) -> f64 {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
            .terms
            .iter()
            .map(|t| t.amp.norm())
            .fold(0.0, f64::max)
    }

    pub fn star(&self, other: &Self, params: &QuantizationParams) -> Self {
        star_planewave(self, other, params)
    }
}

/// Plane-wave star product at an arbitrary `θ`, including `θ = 0`.
pub fn star_planewave_theta(f: &SymbolSum, g: &SymbolSum, theta: f64) -> SymbolSum {
    let mut out = Vec::with_capacity(f.len() * g.len());
    for s in &f.terms {
        for t in &g.terms {
            let phase = Complex64::from_polar(1.0, 0.5 * theta * STAR_SIGN * omega2(s.a, t.a));
            out.push(PlaneWave::new(
                s.amp * t.amp * phase,
                [s.a[0] + t.a[0], s.a[1] + t.a[1]],
            ));
        }
    }
    SymbolSum::new(out)
}

pub fn star_planewave(f: &SymbolSum, g: &SymbolSum, params: &QuantizationParams) -> SymbolSum {
    star_planewave_theta(f, g, params.theta)
}

/// `Σ c_ij q^i p^j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolynomialSymbol {
    coeffs: BTreeMap<(usize, usize), Complex64>,
}

impl PolynomialSymbol {
    pub fn new(coeffs: impl IntoIterator<Item = ((usize, usize), Complex64)>) -> Self {
        let mut map = BTreeMap::new();
        for (k, c) in coeffs {
            *map.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Self { coeffs: map }
    }

    pub fn monomial(i: usize, j: usize, c: Complex64) -> Self {
        Self::new([((i, j), c)])
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn q() -> Self {
        Self::monomial(1, 0, Complex64::new(1.0, 0.0))
    }

    pub fn p() -> Self {
        Self::monomial(0, 1, Complex64::new(1.0, 0.0))
    }

    pub fn coeffs(&self) -> &BTreeMap<(usize, usize), Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> Complex64 {
        self.coeffs.get(&(i, j)).copied().unwrap_or_default()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn eval(&self, q: f64, p: f64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&(i, j), c)| c * q.powi(i as i32) * p.powi(j as i32))
            .sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|(k, v)| (*k, v * c)))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .chain(&other.coeffs)
                .map(|(k, v)| (*k, *v)),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        self.sub(other)
            .coeffs
            .values()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn star(&self, other: &Self, params: &QuantizationParams) -> Self {
        star_poly(self, other, params)
    }
}

fn falling(n: usize, r: usize) -> f64 {
    (0..r).map(|t| (n - t) as f64).product()
}

fn binom(n: usize, r: usize) -> f64 {
    falling(n, r) / falling(r, r)
}

/// Terminating Moyal series
/// `Σ_k (1/k!)(θ/2i)^k (∂_q^F ∂_p^G − ∂_p^F ∂_q^G)^k`.
pub fn star_poly_theta(f: &PolynomialSymbol, g: &PolynomialSymbol, theta: f64) -> PolynomialSymbol {
    let half = Complex64::new(0.0, -0.5 * theta * STAR_SIGN);
    let mut out = Vec::new();
    for (&(i, j), a) in &f.coeffs {
        for (&(k, l), b) in &g.coeffs {
            let kmax = (i + j).min(k + l);
            let mut pref = Complex64::new(1.0, 0.0);
            for order in 0..=kmax {
                if order > 0 {
                    pref *= half / order as f64;
                }
                // r derivatives ∂_q on F paired with ∂_p on G, the rest the other way
                for r in 0..=order {
                    let s = order - r;
                    if r > i || s > j || r > l || s > k {
                        continue;
                    }
                    let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
                    let c = binom(order, r)
                        * sign
                        * falling(i, r)
                        * falling(j, s)
                        * falling(l, r)
                        * falling(k, s);
                    out.push(((i - r + k - s, j - s + l - r), a * b * pref * c));
                }
            }
        }
    }
    PolynomialSymbol::new(out)
}

pub fn star_poly(
    f: &PolynomialSymbol,
    g: &PolynomialSymbol,
    params: &QuantizationParams,
) -> PolynomialSymbol {
    star_poly_theta(f, g, params.theta)
}

/// `Ξ⁻¹(Ξ(F) Ξ(G))` on a phase grid.
pub fn star_numeric(
    f: SymbolRef<'_>,
    g: SymbolRef<'_>,
    phase: &PhaseGrid,
    params: &QuantizationParams,
) -> Result<GridSymbol> {
    let a = quantize_symbol(f, phase.grid(), params)?;
    let b = quantize_symbol(g, phase.grid(), params)?;
    symbol_of(&a.compose(&b)?, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(theta: f64) -> QuantizationParams {
        QuantizationParams::from_theta(theta).unwrap()
    }

    fn small_sum() -> impl Strategy<Value = SymbolSum> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0, -3i32..=3, -3i32..=3), 1..4).prop_map(
            |ts| {
                SymbolSum::new(
                    ts.into_iter()
                        .map(|(re, im, m, n)| PlaneWave::new(c(re, im), [m as f64, n as f64])),
                )
            },
        )
    }

    #[test]
    fn unit_is_neutral() {
        let f = SymbolSum::new([
            PlaneWave::new(c(0.3, -1.0), [1.5, -0.5]),
            PlaneWave::new(c(2.0, 0.0), [0.0, 1.0]),
        ]);
        let one = SymbolSum::constant(c(1.0, 0.0));
        assert_eq!(star_planewave(&f, &one, &params(0.7)), f);
        assert_eq!(star_planewave(&one, &f, &params(0.7)), f);
    }

    #[test]
    fn torus_relation_on_symbols() {
        let theta = 0.5;
        let p = params(theta);
        let uv = SymbolSum::u().star(&SymbolSum::v(), &p);
        let vu = SymbolSum::v().star(&SymbolSum::u(), &p);
        let ratio = uv.amplitude([1.0, 1.0]) / vu.amplitude([1.0, 1.0]);
        assert!((ratio - Complex64::from_polar(1.0, theta)).norm() < 1e-15);
    }

    #[test]
    fn canonicalization() {
        let s = SymbolSum::new([
            PlaneWave::new(c(1.0, 0.0), [1.0, 0.0]),
            PlaneWave::new(c(-1.0, 0.0), [1.0 + 1e-14, 0.0]),
            PlaneWave::new(c(0.5, 0.0), [0.0, 2.0]),
        ]);
        assert_eq!(s.len(), 1);
        assert_eq!(s.terms()[0].a, [0.0, 2.0]);
    }

    #[test]
    fn json_round_trip() {
        let s = SymbolSum::new([PlaneWave::new(c(0.25, -1.0), [1.0, -2.0])]);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(
            text,
            r#"{"terms":[{"amp_re":0.25,"amp_im":-1.0,"a_q":1.0,"a_p":-2.0}]}"#
        );
        let back: SymbolSum = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn eval_matches_definition() {
        let w = PlaneWave::new(c(1.0, 0.0), [0.3, -0.8]);
        let (q, p) = (1.1, 0.4);
        let expect = Complex64::from_polar(1.0, 0.3 * p - (-0.8) * q);
        assert!((w.eval(q, p) - expect).norm() < 1e-15);
    }

    #[test]
    fn coordinate_commutator() {
        let theta = 0.37;
        let pr = params(theta);
        let comm = PolynomialSymbol::q()
            .star(&PolynomialSymbol::p(), &pr)
            .sub(&PolynomialSymbol::p().star(&PolynomialSymbol::q(), &pr));
        let expect = PolynomialSymbol::constant(c(0.0, -theta * STAR_SIGN));
        assert!(comm.max_coeff_diff(&expect) < 1e-15);
    }

    #[test]
    fn unit_polynomial_is_neutral() {
        let p = PolynomialSymbol::new([((2, 1), c(1.0, 2.0)), ((0, 3), c(-0.5, 0.0))]);
        let one = PolynomialSymbol::constant(c(1.0, 0.0));
        assert_eq!(star_poly(&one, &p, &params(0.9)), p);
        assert_eq!(star_poly(&p, &one, &params(0.9)), p);
    }

    #[test]
    fn q_squared_star_p_squared() {
        // q²⋆p² = q²p² − 2iθ qp − θ²/2
        let t = 0.3;
        let lhs = star_poly(
            &PolynomialSymbol::monomial(2, 0, c(1.0, 0.0)),
            &PolynomialSymbol::monomial(0, 2, c(1.0, 0.0)),
            &params(t),
        );
        let rhs = PolynomialSymbol::new([
            ((2, 2), c(1.0, 0.0)),
            ((1, 1), c(0.0, -2.0 * t)),
            ((0, 0), c(-t * t / 2.0, 0.0)),
        ]);
        assert!(lhs.max_coeff_diff(&rhs) < 1e-15);
    }

    #[test]
    fn linear_symbols_agree_with_plane_waves() {
        let theta = 0.8;
        let pr = params(theta);
        // ℓ_a(v) = Ω(a, v); ℓ_a ⋆ ℓ_b = ℓ_a ℓ_b − (iθ/2) Ω(a, b)
        let (a, b) = ([0.7, -0.2], [1.3, 0.5]);
        let lin =
            |x: [f64; 2]| PolynomialSymbol::new([((0, 1), c(x[0], 0.0)), ((1, 0), c(-x[1], 0.0))]);
        let prod = star_poly(&lin(a), &lin(b), &pr);
        assert!((prod.coeff(0, 0) - c(0.0, -0.5 * theta * omega2(a, b))).norm() < 1e-15);
    }

    #[test]
    fn theta_zero_is_pointwise() {
        let f = SymbolSum::new([PlaneWave::new(c(1.0, 0.5), [1.0, 2.0])]);
        let g = SymbolSum::new([PlaneWave::new(c(-0.3, 0.0), [-0.4, 1.0])]);
        let h = star_planewave_theta(&f, &g, 0.0);
        for (q, p) in [(0.2, 0.9), (-1.0, 3.0)] {
            assert!((h.eval(q, p) - f.eval(q, p) * g.eval(q, p)).norm() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn associative(f in small_sum(), g in small_sum(), h in small_sum(), theta in 0.01f64..2.0 * PI) {
            let p = params(theta);
            let l = f.star(&g, &p).star(&h, &p);
            let r = f.star(&g.star(&h, &p), &p);
            prop_assert!(l.max_amp_diff(&r) <= 1e-12 * (1.0 + l.terms().iter().map(|t| t.amp.norm()).sum::<f64>()));
        }

        #[test]
        fn conjugation_reverses(f in small_sum(), g in small_sum(), theta in 0.01f64..3.0) {
            let p = params(theta);
            let l = f.star(&g, &p).conj();
            let r = g.conj().star(&f.conj(), &p);
            prop_assert!(l.max_amp_diff(&r) <= 1e-13);
        }

        #[test]
        fn polynomial_associative(a in -2.0f64..2.0, b in -2.0f64..2.0, theta in 0.05f64..1.0) {
            let p = params(theta);
            let f = PolynomialSymbol::new([((1, 1), c(a, 0.0)), ((0, 2), c(1.0, b))]);
            let g = PolynomialSymbol::new([((2, 0), c(b, 0.0)), ((1, 0), c(0.0, 1.0))]);
            let h = PolynomialSymbol::new([((0, 1), c(1.0, 0.0)), ((3, 0), c(a, -b))]);
            let l = f.star(&g, &p).star(&h, &p);
            let r = f.star(&g.star(&h, &p), &p);
            prop_assert!(l.max_coeff_diff(&r) <= 1e-12);
        }
    }
}
