use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Power iteration on `A*A` for the largest singular value.
#[derive(Debug, Clone, Copy)]
pub struct PowerIteration {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PowerIteration {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 20_000,
        }
    }
}

fn start_vector(n: usize) -> DVector<Complex64> {
    // fixed, generic start so that runs are reproducible
    let v = DVector::from_iterator(
        n,
        (0..n).map(|k| {
            let t = k as f64;
            Complex64::new(
                1.0 + 0.5 * (0.7 * t + 0.3).cos(),
                0.25 * (1.3 * t + 0.1).sin(),
            )
        }),
    );
    let nv = v.norm();
    v / Complex64::new(nv, 0.0)
}

pub fn operator_norm(a: &DMatrix<Complex64>) -> Result<f64> {
    operator_norm_with(a, PowerIteration::default())
}

pub fn operator_norm_with(a: &DMatrix<Complex64>, opts: PowerIteration) -> Result<f64> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    let n = a.ncols();
    if n == 0 {
        return Ok(0.0);
    }
    let mut v = start_vector(n);
    let mut last = 0.0;
    for it in 0..opts.max_iterations {
        let w = a * &v;
        let sigma = w.norm();
        if sigma == 0.0 && a.iter().all(|z| z.norm_sqr() == 0.0) {
            return Ok(0.0);
        }
        if it > 0 && (sigma - last).abs() <= opts.tolerance * sigma {
            return Ok(sigma);
        }
        last = sigma;
        let u = a.ad_mul(&w);
        let nu = u.norm();
        if nu == 0.0 {
            return Ok(sigma);
        }
        v = u / Complex64::new(nu, 0.0);
    }
    Err(Error::Convergence {
        iterations: opts.max_iterations,
        last,
    })
}

/// `B* A B` for a basis `B` with orthonormal columns.
pub fn compress(a: &DMatrix<Complex64>, basis: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    basis.ad_mul(&(a * basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_has_unit_norm() {
        let a = DMatrix::<Complex64>::identity(7, 7);
        assert!((operator_norm(&a).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_takes_max_modulus() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, -4.0),
        ]));
        assert!((operator_norm(&a).unwrap() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn zero_matrix() {
        let a = DMatrix::<Complex64>::zeros(4, 4);
        assert_eq!(operator_norm(&a).unwrap(), 0.0);
    }

    #[test]
    fn rank_one_norm() {
        let u = DVector::from_vec(vec![Complex64::new(1.0, 1.0), Complex64::new(0.0, 2.0)]);
        let v = DVector::from_vec(vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, -4.0)]);
        let a = &u * v.adjoint();
        let expect = u.norm() * v.norm();
        assert!((operator_norm(&a).unwrap() - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn iteration_cap_reports_last() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.999, 0.0),
        ]));
        let err = operator_norm_with(
            &a,
            PowerIteration {
                tolerance: 1e-16,
                max_iterations: 3,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::Convergence { iterations: 3, last } if last > 0.99));
    }

    proptest! {
        #[test]
        fn homogeneous(re in -3.0f64..3.0, im in -3.0f64..3.0, seed in 0u64..1000) {
            let n = 6;
            let a = DMatrix::from_fn(n, n, |i, j| {
                let t = (seed as f64 + 1.0) * (i as f64 * 1.7 + j as f64 * 0.3 + 0.11);
                Complex64::new(t.sin(), (1.9 * t).cos())
            });
            let c = Complex64::new(re, im);
            prop_assume!(c.norm() > 1e-3);
            let na = operator_norm(&a).unwrap();
            let nca = operator_norm(&(a.clone() * c)).unwrap();
            prop_assert!((nca - c.norm() * na).abs() <= 1e-8 * nca.max(1.0));
        }
    }
}
