//! The Heisenberg group `H_n = V ⊕ ℝE` in exponential coordinates.
//!
//! `V = ℝ^{2n}` carries `Ω(v, v') = Σ_j q_j p'_j − p_j q'_j`, so that
//! `Ω(e_q, e_p) = 1`. The exponential map is the identity, and the group law
//! is `(v, z)(v', z') = (v + v', z + z' + ½Ω(v, v'))`.

use crate::error::{Error, Result};
use crate::numerics::QuantizationParams;
use serde::{Deserialize, Serialize};

/// An element of `h_n`, equivalently of `H_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub z: f64,
}

/// A point `♭v₀ + μ♭E` of the dual. `w` lists the coefficients of `♭v₀`
/// on the dual basis of `(e_q1..e_qn, e_p1..e_pn)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoadjointPoint {
    pub w: Vec<f64>,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticForm {
    pub n: usize,
}

impl SymplecticForm {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    /// `Ω(v, v')` with `v = (q, p)` packed as `[q_1..q_n, p_1..p_n]`.
    pub fn eval(&self, v: &[f64], w: &[f64]) -> Result<f64> {
        check_len(2 * self.n, v.len())?;
        check_len(2 * self.n, w.len())?;
        let n = self.n;
        Ok((0..n).map(|j| v[j] * w[n + j] - v[n + j] * w[j]).sum())
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// `Ω` on split coordinates.
pub fn omega(q: &[f64], p: &[f64], q2: &[f64], p2: &[f64]) -> f64 {
    q.iter()
        .zip(p)
        .zip(q2.iter().zip(p2))
        .map(|((a, b), (c, d))| a * d - b * c)
        .sum()
}

/// Dual coefficients of `♭v = Ω(v, ·)`: `(−p, q)`.
pub fn flat(q: &[f64], p: &[f64]) -> Vec<f64> {
    p.iter().map(|x| -x).chain(q.iter().copied()).collect()
}

impl GroupElement {
    pub fn new(q: Vec<f64>, p: Vec<f64>, z: f64) -> Result<Self> {
        check_len(q.len(), p.len())?;
        if q.is_empty() {
            return Err(Error::InvalidParams(
                "need at least one degree of freedom".into(),
            ));
        }
        Ok(Self { q, p, z })
    }

    /// One degree of freedom.
    pub fn from_qpz(q: f64, p: f64, z: f64) -> Self {
        Self {
            q: vec![q],
            p: vec![p],
            z,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            q: vec![0.0; n],
            p: vec![0.0; n],
            z: 0.0,
        }
    }

    pub fn central(n: usize, z: f64) -> Self {
        Self {
            z,
            ..Self::identity(n)
        }
    }

    pub fn e_q(n: usize, j: usize) -> Self {
        let mut g = Self::identity(n);
        g.q[j] = 1.0;
        g
    }

    pub fn e_p(n: usize, j: usize) -> Self {
        let mut g = Self::identity(n);
        g.p[j] = 1.0;
        g
    }

    pub fn dof(&self) -> usize {
        self.q.len()
    }

    /// The `V`-part packed as `[q.., p..]`.
    pub fn v(&self) -> Vec<f64> {
        self.q.iter().chain(&self.p).copied().collect()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            q: self.q.iter().map(|x| c * x).collect(),
            p: self.p.iter().map(|x| c * x).collect(),
            z: c * self.z,
        }
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        check_len(self.dof(), other.dof())?;
        let half = 0.5 * omega(&self.q, &self.p, &other.q, &other.p);
        Ok(Self {
            q: self.q.iter().zip(&other.q).map(|(a, b)| a + b).collect(),
            p: self.p.iter().zip(&other.p).map(|(a, b)| a + b).collect(),
            z: self.z + other.z + half,
        })
    }

    pub fn inverse(&self) -> Self {
        self.scale(-1.0)
    }

    /// The single-dof triple `(q, p, z)`.
    pub fn qpz(&self) -> Result<(f64, f64, f64)> {
        if self.dof() != 1 {
            return Err(Error::RequiresOneDof("qpz"));
        }
        Ok((self.q[0], self.p[0], self.z))
    }
}

impl CoadjointPoint {
    /// The base point `ξ₀ = μ♭E`.
    pub fn base(n: usize, mu: f64) -> Self {
        Self {
            w: vec![0.0; 2 * n],
            mu,
        }
    }

    /// `⟨ξ, X⟩`.
    pub fn pair(&self, x: &GroupElement) -> Result<f64> {
        check_len(self.w.len(), 2 * x.dof())?;
        let lin: f64 = self.w.iter().zip(x.v()).map(|(a, b)| a * b).sum();
        Ok(lin + self.mu * x.z)
    }
}

/// `Ad♭_g(♭v₀ + μ♭E) = ♭(v₀ − μv) + μ♭E`; the central part of `g` drops out.
pub fn coadjoint(g: &GroupElement, xi: &CoadjointPoint) -> Result<CoadjointPoint> {
    check_len(xi.w.len(), 2 * g.dof())?;
    let fv = flat(&g.q, &g.p);
    Ok(CoadjointPoint {
        w: xi.w.iter().zip(fv).map(|(w, f)| w - xi.mu * f).collect(),
        mu: xi.mu,
    })
}

/// The linear moment `λ_X(v) = ⟨Ad♭_v ξ₀, X⟩ = μ(Ω(x, v) + z_X)`.
pub fn moment(x: &GroupElement, params: &QuantizationParams, v: &[f64]) -> Result<f64> {
    let n = x.dof();
    check_len(2 * n, v.len())?;
    let g = GroupElement {
        q: v[..n].to_vec(),
        p: v[n..].to_vec(),
        z: 0.0,
    };
    coadjoint(&g, &CoadjointPoint::base(n, params.mu))?.pair(x)
}
