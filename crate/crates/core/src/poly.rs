//! Dense univariate polynomials over a [`Field`].

use std::fmt;

use num_traits::Zero;

use crate::field::Field;

/// Coefficients from the constant term upwards, with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl<T: Field> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// `x - a`
    pub fn linear_root(a: &T) -> Self {
        Poly::new(vec![-a.clone(), T::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, other: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Poly<T>) -> Poly<T> {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a.clone() * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: &T) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * s).collect())
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, divisor: &Poly<T>) -> (Poly<T>, Poly<T>) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let lead_inv = divisor.coeffs[dd].inv();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= c.clone() * d;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Scales to leading coefficient 1; zero stays zero.
    pub fn monic(&self) -> Poly<T> {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => self.scale(&l.inv()),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly<T>) -> Poly<T> {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Unique polynomial of degree `< xs.len()` through the given points (Newton form).
    pub fn interpolate(xs: &[T], ys: &[T]) -> Poly<T> {
        assert_eq!(xs.len(), ys.len());
        let n = xs.len();
        let mut dd: Vec<T> = ys.to_vec();
        for level in 1..n {
            for i in (level..n).rev() {
                let denom = xs[i].clone() - &xs[i - level];
                assert!(!denom.is_zero(), "interpolation nodes must be distinct");
                dd[i] = (dd[i].clone() - &dd[i - 1]) / denom;
            }
        }
        let mut out = Poly::constant(dd[n - 1].clone());
        for i in (0..n.saturating_sub(1)).rev() {
            out = out.mul(&Poly::linear_root(&xs[i])).add(&Poly::constant(dd[i].clone()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{q_frac, q_int};
    use crate::Q;

    fn p(c: &[i64]) -> Poly<Q> {
        Poly::new(c.iter().map(|&x| q_int(x)).collect())
    }

    #[test]
    fn interpolation_recovers_cubic() {
        let f = p(&[3, 0, -2, 5]);
        let xs: Vec<Q> = (0..6).map(q_int).collect();
        let ys: Vec<Q> = xs.iter().map(|x| f.eval(x)).collect();
        assert_eq!(Poly::interpolate(&xs, &ys), f);
    }

    #[test]
    fn division_identity() {
        let a = p(&[1, 2, 3, 4, 5]);
        let b = p(&[2, 0, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap() < 2);
    }

    #[test]
    fn gcd_of_products() {
        let common = p(&[-1, 1]).mul(&p(&[2, 0, 1]));
        let a = common.mul(&p(&[5, 1]));
        let b = common.mul(&p(&[-3, 7]));
        assert_eq!(a.gcd(&b), common.monic());
        assert_eq!(p(&[1, 1]).gcd(&p(&[2])), p(&[1]));
        assert_eq!(Poly::<Q>::zero().degree(), None);
        assert_eq!(p(&[0, 0, 4]).scale(&q_frac(1, 4)), p(&[0, 0, 1]));
    }
}
