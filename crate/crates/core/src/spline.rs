//! Natural cubic spline through a strictly increasing set of knots.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Interpolant with zero second derivative at both end knots.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalCubicSpline<T> {
    x: Vec<T>,
    y: Vec<T>,
    /// Second derivative at each knot.
    m: Vec<T>,
}

impl<T: Scalar> NaturalCubicSpline<T> {
    pub fn new(x: &[T], y: &[T]) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(Error::invalid("spline knots and values differ in length"));
        }
        if n < 2 {
            return Err(Error::invalid("spline needs at least two knots"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("spline knots must be strictly increasing"));
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::invalid("spline knots and values must be finite"));
        }

        let two = T::lit(2.0);
        let six = T::lit(6.0);
        let mut m = vec![T::zero(); n];
        if n > 2 {
            // Thomas algorithm on the interior second derivatives.
            let k = n - 2;
            let mut diag = vec![T::zero(); k];
            let mut upper = vec![T::zero(); k];
            let mut rhs = vec![T::zero(); k];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                diag[i - 1] = two * (h0 + h1);
                upper[i - 1] = h1;
                rhs[i - 1] = six * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for j in 1..k {
                let lower = x[j + 1] - x[j];
                let w = lower / diag[j - 1];
                diag[j] -= w * upper[j - 1];
                rhs[j] = rhs[j] - w * rhs[j - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for j in (0..k - 1).rev() {
                m[j + 1] = (rhs[j] - upper[j] * m[j + 2]) / diag[j];
            }
        }

        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    pub fn knots(&self) -> &[T] {
        &self.x
    }

    pub fn values(&self) -> &[T] {
        &self.y
    }

    /// Evaluates the spline; arguments outside the knot range are clamped.
    pub fn eval(&self, t: T) -> T {
        let n = self.x.len();
        let t = t.max(self.x[0]).min(self.x[n - 1]);
        // Exact knot hits return the stored value.
        if let Some(i) = self.x.iter().position(|&k| k == t) {
            return self.y[i];
        }
        let i = match self.x.iter().position(|&k| k > t) {
            Some(j) => j - 1,
            None => n - 2,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let six = T::lit(6.0);
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / six
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_linear_data() {
        let x = [0.0f64, 1.0, 3.0, 4.0];
        let y = [1.0, 3.0, 7.0, 9.0];
        let s = NaturalCubicSpline::new(&x, &y).unwrap();
        for t in [0.25, 1.5, 2.0, 3.7] {
            assert!((s.eval(t) - (1.0 + 2.0 * t)).abs() < 1e-12);
        }
    }

    #[test]
    fn two_knots_is_a_line() {
        let s = NaturalCubicSpline::new(&[0.0f32, 2.0], &[0.0, 4.0]).unwrap();
        assert!((s.eval(0.5) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(NaturalCubicSpline::new(&[0.0, 0.0], &[1.0, 2.0]).is_err());
        assert!(NaturalCubicSpline::new(&[0.0], &[1.0]).is_err());
        assert!(NaturalCubicSpline::new(&[0.0, 1.0], &[1.0]).is_err());
    }

    #[test]
    fn clamps_outside_range() {
        let s = NaturalCubicSpline::new(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(s.eval(-5.0), 0.0);
        assert_eq!(s.eval(9.0), 0.0);
    }
}
