use super::sum::Neumaier;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Rectangular integration window sampled at cell midpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window2D {
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nq: usize,
    pub np: usize,
}

impl Window2D {
    pub fn new(q: (f64, f64), p: (f64, f64), nq: usize, np: usize) -> Result<Self> {
        if !(q.1 > q.0 && p.1 > p.0) || nq == 0 || np == 0 {
            return Err(Error::InvalidGrid(format!(
                "bad window q={q:?} p={p:?} nq={nq} np={np}"
            )));
        }
        Ok(Self {
            q_min: q.0,
            q_max: q.1,
            p_min: p.0,
            p_max: p.1,
            nq,
            np,
        })
    }

    /// `[-r, r]²` with `n` points per axis.
    pub fn square(r: f64, n: usize) -> Result<Self> {
        Self::new((-r, r), (-r, r), n, n)
    }

    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / self.nq as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.np as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dq() * self.dp()
    }

    pub fn q_nodes(&self) -> Vec<f64> {
        let d = self.dq();
        (0..self.nq)
            .map(|i| self.q_min + (i as f64 + 0.5) * d)
            .collect()
    }

    pub fn p_nodes(&self) -> Vec<f64> {
        let d = self.dp();
        (0..self.np)
            .map(|j| self.p_min + (j as f64 + 0.5) * d)
            .collect()
    }
}

/// Midpoint tensor quadrature of `f` over `window`.
///
/// Rows are evaluated in parallel and merged in row order with compensated
/// summation, so the result does not depend on the thread schedule.
pub fn quad_2d<F>(f: F, window: &Window2D) -> Result<Complex64>
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    let qs = window.q_nodes();
    let ps = window.p_nodes();
    let rows: Vec<Result<Complex64>> = qs
        .par_iter()
        .map(|&q| {
            let mut acc = Neumaier::new();
            for &p in &ps {
                let v = f(q, p);
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::NonFinite { q, p });
                }
                acc.add(v);
            }
            Ok(acc.total())
        })
        .collect();
    let mut total = Neumaier::new();
    for r in rows {
        total.add(r?);
    }
    Ok(total.total() * window.cell_area())
}

/// Gauss–Laguerre rule for `∫_0^∞ e^{-x} g(x) dx`.
///
/// `scaled_weights[i] = w_i e^{x_i}`, the weights of the same nodes for
/// `∫_0^∞ G(x) dx` when `G` carries its own exponential decay.
#[derive(Debug, Clone)]
pub struct GaussLaguerre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub scaled_weights: Vec<f64>,
}

fn laguerre_pair(n: usize, x: f64) -> (f64, f64) {
    // (L_n(x), L_{n-1}(x))
    let mut prev = 1.0;
    if n == 0 {
        return (prev, 0.0);
    }
    let mut cur = 1.0 - x;
    for k in 1..n {
        let next = ((2 * k + 1) as f64 - x) * cur - k as f64 * prev;
        prev = cur;
        cur = next / (k + 1) as f64;
    }
    (cur, prev)
}

/// Nodes from the Golub–Welsch eigenproblem, polished by Newton steps on
/// `L_n`; weights from `x / ((n+1)² L_{n+1}(x)²)` evaluated in log form.
pub fn gauss_laguerre(n: usize) -> Result<GaussLaguerre> {
    if n == 0 || n > 300 {
        return Err(Error::InvalidParams(format!(
            "Gauss-Laguerre order must be in 1..=300, got {n}"
        )));
    }
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jac[(i, i)] = (2 * i + 1) as f64;
        if i + 1 < n {
            jac[(i, i + 1)] = (i + 1) as f64;
            jac[(i + 1, i)] = (i + 1) as f64;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

    for x in nodes.iter_mut() {
        for _ in 0..8 {
            let (ln, lm1) = laguerre_pair(n, *x);
            let deriv = n as f64 * (ln - lm1) / *x;
            let step = ln / deriv;
            *x -= step;
            if step.abs() <= 1e-15 * x.abs() {
                break;
            }
        }
    }

    let mut weights = Vec::with_capacity(n);
    let mut scaled = Vec::with_capacity(n);
    for &x in &nodes {
        let (lnp1, _) = laguerre_pair(n + 1, x);
        let log_w = x.ln() - 2.0 * ((n + 1) as f64).ln() - 2.0 * lnp1.abs().ln();
        weights.push(log_w.exp());
        scaled.push((log_w + x).exp());
    }
    Ok(GaussLaguerre {
        nodes,
        weights,
        scaled_weights: scaled,
    })
}
