//! Compensated summation.
//!
//! Every reduction in the crate goes through [`Neumaier`] (or [`sum_complex`])
//! so that a parallel split followed by an ordered merge reproduces the
//! serial result to rounding.

use num_complex::Complex64;

/// Neumaier (improved Kahan) accumulator for complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: Complex64,
    comp: Complex64,
}

#[inline]
fn two_sum(acc: f64, comp: f64, x: f64) -> (f64, f64) {
    let t = acc + x;
    let c = if acc.abs() >= x.abs() {
        (acc - t) + x
    } else {
        (x - t) + acc
    };
    (t, comp + c)
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: Complex64) {
        let (re, cre) = two_sum(self.sum.re, self.comp.re, x.re);
        let (im, cim) = two_sum(self.sum.im, self.comp.im, x.im);
        self.sum = Complex64::new(re, im);
        self.comp = Complex64::new(cre, cim);
    }

    #[inline]
    pub fn total(&self) -> Complex64 {
        self.sum + self.comp
    }
}

impl Extend<Complex64> for Neumaier {
    fn extend<I: IntoIterator<Item = Complex64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

pub fn sum_complex<I: IntoIterator<Item = Complex64>>(iter: I) -> Complex64 {
    let mut acc = Neumaier::new();
    acc.extend(iter);
    acc.total()
}

pub fn sum_real<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    sum_complex(iter.into_iter().map(|x| Complex64::new(x, 0.0))).re
}
