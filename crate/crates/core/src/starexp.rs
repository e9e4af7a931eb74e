//! The star-exponential `ℰ_θ(g) = Exp_θ(λ_{log g})` on the Heisenberg group.
//!
//! Moyal corrections vanish between powers of one affine-linear symbol, so
//! the star power series resums to the pointwise exponential
//! `e^{(i/θ)λ}`: for `g = v + zE` this is `e^{iz/θ²} e^{iΩ(v/θ², ·)}`.

use crate::error::{Error, Result};
use crate::heisenberg::{moment, GroupElement};
use crate::moyal::{star_planewave, PlaneWave, SymbolSum};
use crate::numerics::QuantizationParams;
use num_complex::Complex64;

/// Frequencies of `ℰ(g)⋆ℰ(g′)` and `ℰ(gg′)` must agree to this tolerance.
pub const FREQUENCY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StarExpResult {
    /// A single plane wave.
    pub symbol: SymbolSum,
    /// `e^{iz/θ²}`, the value of the symbol at the origin.
    pub central_phase: Complex64,
}

impl StarExpResult {
    pub fn wave(&self) -> PlaneWave {
        self.symbol.terms()[0]
    }

    pub fn frequency(&self) -> [f64; 2] {
        self.wave().a
    }
}

pub fn star_exp(g: &GroupElement, params: &QuantizationParams) -> Result<StarExpResult> {
    params.require_one_dof("star_exp")?;
    let (q, p, z) = g.qpz().map_err(|_| Error::RequiresOneDof("star_exp"))?;
    let theta = params.theta;
    // λ(0) carries the central part; the gradient of λ gives the frequency
    let lambda0 = moment(g, params, &[0.0, 0.0])?;
    debug_assert!((lambda0 - params.mu * z).abs() <= 1e-12 * lambda0.abs().max(1.0));
    let central_phase = Complex64::from_polar(1.0, lambda0 / theta);
    let a = [q / (theta * theta), p / (theta * theta)];
    Ok(StarExpResult {
        symbol: SymbolSum::new([PlaneWave::new(central_phase, a)]),
        central_phase,
    })
}

/// The scalar `r` in `ℰ(g) ⋆ ℰ(g′) = r · ℰ(g g′)`.
pub fn homomorphism_defect(
    g: &GroupElement,
    g2: &GroupElement,
    params: &QuantizationParams,
) -> Result<Complex64> {
    let lhs = star_planewave(
        &star_exp(g, params)?.symbol,
        &star_exp(g2, params)?.symbol,
        params,
    );
    let rhs = star_exp(&g.multiply(g2)?, params)?;
    let [l] = lhs.terms() else {
        return Err(Error::Inconsistent(format!(
            "product has {} terms",
            lhs.len()
        )));
    };
    let (a, b) = (l.a, rhs.frequency());
    let scale = a[0].abs().max(a[1].abs()).max(1.0);
    if (a[0] - b[0]).abs().max((a[1] - b[1]).abs()) > FREQUENCY_TOLERANCE * scale {
        return Err(Error::Inconsistent(format!(
            "frequencies do not add: {a:?} vs {b:?}"
        )));
    }
    Ok(l.amp / rhs.central_phase)
}

/// `e^{(i/2)Ω(v, v′)(θ⁻³ − θ⁻²)}`, the closed form of [`homomorphism_defect`].
pub fn predicted_defect(
    g: &GroupElement,
    g2: &GroupElement,
    params: &QuantizationParams,
) -> Result<Complex64> {
    let (q, p, _) = g.qpz()?;
    let (q2, p2, _) = g2.qpz()?;
    let om = q * p2 - p * q2;
    let t = params.theta;
    Ok(Complex64::from_polar(
        1.0,
        0.5 * om * (t.powi(-3) - t.powi(-2)),
    ))
}
