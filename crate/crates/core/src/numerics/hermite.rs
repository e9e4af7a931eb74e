use crate::error::{Error, Result};
use std::f64::consts::PI;

pub const MAX_HERMITE_ORDER: usize = 64;

/// Hermite functions `ψ_0..=ψ_kmax` at `q` with width `scale`:
/// `ψ_k(q) = s^{-1/2} h_k(q / s)`, `h_0(y) = π^{-1/4} e^{-y²/2}`.
pub fn hermite_values(kmax: usize, q: f64, scale: f64) -> Result<Vec<f64>> {
    if kmax > MAX_HERMITE_ORDER {
        return Err(Error::UnsupportedOrder(kmax));
    }
    if scale.is_nan() || scale <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "scale must be positive, got {scale}"
        )));
    }
    let y = q / scale;
    let mut out = Vec::with_capacity(kmax + 1);
    let h0 = PI.powf(-0.25) * (-0.5 * y * y).exp();
    out.push(h0);
    if kmax >= 1 {
        out.push(2f64.sqrt() * y * h0);
    }
    for k in 1..kmax {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * y * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    let norm = scale.sqrt().recip();
    out.iter_mut().for_each(|v| *v *= norm);
    Ok(out)
}

pub fn hermite_fn(k: usize, q: f64, scale: f64) -> Result<f64> {
    Ok(hermite_values(k, q, scale)?[k])
}
