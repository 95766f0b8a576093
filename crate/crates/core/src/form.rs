//! Quadratic forms stored as symmetric matrices.

use thiserror::Error;

use crate::field::Field;
use crate::linalg::{bilinear, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("matrix is not square and symmetric")]
    NotSymmetric,
    #[error("polynomial is not a homogeneous quadric (term of degree {0})")]
    NotHomogeneousQuadric(u32),
    #[error("exponent vector of length {got}, expected {expected}")]
    WrongArity { expected: usize, got: usize },
}

/// Symmetric `n x n` matrix `S`, read as the quadratic form `x -> x^T S x`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SymForm<T> {
    matrix: Matrix<T>,
}

impl<T: Field> SymForm<T> {
    pub fn new(matrix: Matrix<T>) -> Result<Self, FormError> {
        if !matrix.is_symmetric() {
            return Err(FormError::NotSymmetric);
        }
        Ok(SymForm { matrix })
    }

    pub fn zero(n: usize) -> Self {
        SymForm { matrix: Matrix::zeros(n, n) }
    }

    /// Builds the form from polynomial terms `(exponents, coefficient)`; every term
    /// must have total degree 2.
    pub fn from_terms(n: usize, terms: &[(Vec<u32>, T)]) -> Result<Self, FormError> {
        let mut m = Matrix::zeros(n, n);
        let half = T::from_int(2).inv();
        for (exp, c) in terms {
            if exp.len() != n {
                return Err(FormError::WrongArity { expected: n, got: exp.len() });
            }
            let deg: u32 = exp.iter().sum();
            if deg != 2 {
                return Err(FormError::NotHomogeneousQuadric(deg));
            }
            let support: Vec<usize> = (0..n).filter(|&i| exp[i] > 0).collect();
            match support[..] {
                [i] => m[(i, i)] += c.clone(),
                [i, j] => {
                    let h = c.clone() * &half;
                    m[(i, j)] += h.clone();
                    m[(j, i)] += h;
                }
                _ => unreachable!(),
            }
        }
        Ok(SymForm { matrix: m })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    pub fn eval(&self, x: &[T]) -> T {
        bilinear(&self.matrix, x, x)
    }

    pub fn polar(&self, x: &[T], y: &[T]) -> T {
        bilinear(&self.matrix, x, y)
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn corank(&self) -> usize {
        self.dim() - self.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// Restriction to the row space of `basis`: the form `B S B^T`.
    pub fn restrict(&self, basis: &Matrix<T>) -> SymForm<T> {
        SymForm { matrix: basis.mul(&self.matrix).mul(&basis.transpose()) }
    }

    pub fn add(&self, other: &SymForm<T>) -> SymForm<T> {
        SymForm { matrix: self.matrix.add(&other.matrix) }
    }

    pub fn sub(&self, other: &SymForm<T>) -> SymForm<T> {
        SymForm { matrix: self.matrix.sub(&other.matrix) }
    }

    pub fn scale(&self, s: &T) -> SymForm<T> {
        SymForm { matrix: self.matrix.scale(s) }
    }

    pub fn neg(&self) -> SymForm<T> {
        self.scale(&-T::one())
    }

    /// Coefficients on the degree-2 monomials `x_i x_j` (`i <= j`, lexicographic):
    /// `S_ii` on squares and `2 S_ij` on mixed terms.
    pub fn monomial_coefficients(&self) -> Vec<T> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                let v = self.matrix[(i, j)].clone();
                out.push(if i == j { v } else { v.clone() + v });
            }
        }
        out
    }

    /// Inverse of [`SymForm::monomial_coefficients`].
    pub fn from_monomial_coefficients(n: usize, coeffs: &[T]) -> SymForm<T> {
        assert_eq!(coeffs.len(), n * (n + 1) / 2);
        let half = T::from_int(2).inv();
        let mut m = Matrix::zeros(n, n);
        let mut it = coeffs.iter();
        for i in 0..n {
            for j in i..n {
                let c = it.next().unwrap().clone();
                if c.is_zero() {
                    continue;
                }
                if i == j {
                    m[(i, i)] = c;
                } else {
                    let h = c * &half;
                    m[(i, j)] = h.clone();
                    m[(j, i)] = h;
                }
            }
        }
        SymForm { matrix: m }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::q_int;
    use crate::Q;

    #[test]
    fn terms_roundtrip() {
        let f = SymForm::<Q>::from_terms(3, &[(vec![2, 0, 0], q_int(3)), (vec![0, 1, 1], q_int(4))]).unwrap();
        assert_eq!(f.eval(&[q_int(1), q_int(1), q_int(1)]), q_int(7));
        let c = f.monomial_coefficients();
        assert_eq!(SymForm::from_monomial_coefficients(3, &c), f);
        assert_eq!(
            SymForm::<Q>::from_terms(2, &[(vec![1, 0], q_int(1))]),
            Err(FormError::NotHomogeneousQuadric(1))
        );
        assert!(SymForm::new(Matrix::<Q>::from_int_rows(&[vec![0, 1], vec![0, 0]])).is_err());
    }
}
