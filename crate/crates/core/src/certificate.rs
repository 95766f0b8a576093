//! Certificates that a family of quadrics has no common projective zero.
//!
//! The quadrics `q_1..q_r` on `W` generate an ideal `J`. If `J_d` is the whole space of
//! degree-`d` forms for some `d`, the quadrics have no common zero over the algebraic
//! closure. The dimension of `S_d / J_d` is computed through the inverse system
//! `J_d^perp`, built one degree at a time: a functional on degree-`(d+1)` forms
//! annihilates `J_{d+1}` iff all of its contractions `g -> lambda(x_j g)` annihilate `J_d`.
//!
//! Computations run modulo two large primes first. Reduction mod `p` can only enlarge
//! `S_d / J_d`, so a vanishing modular value certifies the rational one. Small instances
//! fall back to exact rational arithmetic when both primes fail.

use thiserror::Error;

use crate::field::{primitive_integer_row, Field, Fp, ReduceMod, PRIME_A, PRIME_B};
use crate::form::{FormError, SymForm};
use crate::linalg::Matrix;
use crate::monomial::Monomials;
use crate::Q;

/// Default highest degree tried by [`emptiness_certificate`].
pub const DEFAULT_MAX_DEGREE: usize = 6;
/// Largest number of variables accepted.
pub const MAX_VARIABLES: usize = 10;
/// Instances with at most this many variables are retried over the rationals.
pub const EXACT_FALLBACK_VARIABLES: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("quadrics live on spaces of different dimension ({0} and {1})")]
    DimensionMismatch(usize, usize),
    #[error("{0} variables exceeds the supported maximum of {MAX_VARIABLES}")]
    TooManyVariables(usize),
    #[error(transparent)]
    Form(#[from] FormError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Certified by a computation modulo this prime.
    Modular(u64),
    /// Certified over the rationals.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// The products of the quadrics with all monomials of degree `degree - 2` span
    /// every form of degree `degree`.
    Empty { degree: usize, route: Route },
    /// No certificate up to the degree bound. Not a proof of a common zero.
    /// `hilbert[i]` is `dim S_{i+2} / J_{i+2}` from the last route tried.
    Inconclusive { max_degree: usize, hilbert: Vec<usize> },
}

impl Certificate {
    pub fn is_empty_certified(&self) -> bool {
        matches!(self, Certificate::Empty { .. })
    }

    pub fn degree(&self) -> Option<usize> {
        match self {
            Certificate::Empty { degree, .. } => Some(*degree),
            Certificate::Inconclusive { .. } => None,
        }
    }
}

/// Tries to certify that `quads` have no common zero in projective space over the
/// algebraic closure, using degrees up to `max_degree`.
pub fn emptiness_certificate(quads: &[SymForm<Q>], max_degree: usize) -> Result<Certificate, CertificateError> {
    let n = check_dims(quads)?;
    let rows: Vec<Vec<Q>> = quads.iter().map(SymForm::monomial_coefficients).collect();
    let int_rows: Vec<Vec<Q>> =
        rows.iter().map(|r| primitive_integer_row(r).into_iter().map(Q::from_integer).collect()).collect();

    let a = hilbert_mod::<PRIME_A>(n, &int_rows, max_degree);
    let b = hilbert_mod::<PRIME_B>(n, &int_rows, max_degree);
    let best = [(PRIME_A, &a), (PRIME_B, &b)]
        .into_iter()
        .filter_map(|(p, h)| first_zero(h).map(|d| (d, p)))
        .min();
    if let Some((degree, p)) = best {
        return Ok(Certificate::Empty { degree, route: Route::Modular(p) });
    }
    if n <= EXACT_FALLBACK_VARIABLES {
        let h = inverse_system_hilbert(n, &rows, max_degree);
        if let Some(degree) = first_zero(&h) {
            return Ok(Certificate::Empty { degree, route: Route::Exact });
        }
        return Ok(Certificate::Inconclusive { max_degree, hilbert: h });
    }
    Ok(Certificate::Inconclusive { max_degree, hilbert: a })
}

/// Same as [`emptiness_certificate`] for quadrics given as polynomial terms
/// `(exponents, coefficient)`; rejects terms that are not of degree 2.
pub fn emptiness_certificate_from_terms(
    n: usize,
    polys: &[Vec<(Vec<u32>, Q)>],
    max_degree: usize,
) -> Result<Certificate, CertificateError> {
    let quads = polys.iter().map(|p| SymForm::from_terms(n, p)).collect::<Result<Vec<_>, _>>()?;
    if quads.is_empty() {
        return Ok(Certificate::Inconclusive { max_degree, hilbert: Vec::new() });
    }
    emptiness_certificate(&quads, max_degree)
}

fn check_dims(quads: &[SymForm<Q>]) -> Result<usize, CertificateError> {
    let n = quads.first().map_or(0, SymForm::dim);
    if let Some(q) = quads.iter().find(|q| q.dim() != n) {
        return Err(CertificateError::DimensionMismatch(n, q.dim()));
    }
    if n > MAX_VARIABLES {
        return Err(CertificateError::TooManyVariables(n));
    }
    Ok(n)
}

fn first_zero(h: &[usize]) -> Option<usize> {
    h.iter().position(|&x| x == 0).map(|i| i + 2)
}

fn hilbert_mod<const P: u64>(n: usize, int_rows: &[Vec<Q>], max_degree: usize) -> Vec<usize> {
    let rows: Vec<Vec<Fp<P>>> = int_rows
        .iter()
        .map(|r| r.iter().map(|c| Fp::new(c.reduce_mod(P).expect("integer row"))).collect())
        .collect();
    inverse_system_hilbert(n, &rows, max_degree)
}

/// `dim S_d / J_d` for `d = 2..=max_degree`, stopping after the first zero.
/// `quad_rows` are coefficient vectors on the degree-2 monomials of [`Monomials`].
pub fn inverse_system_hilbert<T: Field>(n: usize, quad_rows: &[Vec<T>], max_degree: usize) -> Vec<usize> {
    let mut out = Vec::new();
    if max_degree < 2 || n == 0 {
        return out;
    }
    let s2 = Monomials::new(n, 2);
    let coeff = Matrix::from_rows(s2.len(), quad_rows);
    let mut lambdas: Vec<Vec<T>> = coeff.kernel().into_rows();
    out.push(lambdas.len());
    let mut lower = Monomials::new(n, 1);
    let mut cur = s2;
    for _ in 3..=max_degree {
        if lambdas.is_empty() {
            break;
        }
        let next = Monomials::new(n, cur.degree() + 1);
        lambdas = lift_inverse_system(n, &lambdas, &lower, &cur, &next);
        out.push(lambdas.len());
        lower = cur;
        cur = next;
    }
    out
}

/// Basis of the degree-`(d+1)` inverse system from a basis `lambdas` of the degree-`d` one.
fn lift_inverse_system<T: Field>(
    n: usize,
    lambdas: &[Vec<T>],
    lower: &Monomials,
    cur: &Monomials,
    next: &Monomials,
) -> Vec<Vec<T>> {
    let h = lambdas.len();
    let times = cur.times_variable_table(lower);
    // unknowns C[j][a]: the contraction by x_j equals sum_a C[j][a] lambda_a
    let mut cons = Matrix::zeros(0, n * h);
    let mut row = vec![T::zero(); n * h];
    for j in 0..n {
        for k in j + 1..n {
            for g in 0..lower.len() {
                let kg = times[k][g];
                let jg = times[j][g];
                let mut nonzero = false;
                for (a, lam) in lambdas.iter().enumerate() {
                    row[j * h + a] = lam[kg].clone();
                    row[k * h + a] = -lam[jg].clone();
                    nonzero |= !lam[kg].is_zero() || !lam[jg].is_zero();
                }
                if nonzero {
                    cons.push_row(&row);
                }
                for a in 0..h {
                    row[j * h + a] = T::zero();
                    row[k * h + a] = T::zero();
                }
            }
        }
    }
    let sols = cons.kernel();
    let split: Vec<(usize, usize)> = next
        .iter()
        .map(|m| {
            let j = m.iter().position(|&e| e > 0).expect("positive degree");
            let mut rest = m.to_vec();
            rest[j] -= 1;
            (j, cur.index_of(&rest).unwrap())
        })
        .collect();
    sols.rows_iter()
        .map(|c| {
            split
                .iter()
                .map(|&(j, beta)| {
                    let mut acc = T::zero();
                    for (a, lam) in lambdas.iter().enumerate() {
                        let coef = &c[j * h + a];
                        if !coef.is_zero() && !lam[beta].is_zero() {
                            acc += coef.clone() * &lam[beta];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// `dim S_d / J_d` by the rank of the full multiplication (Macaulay) matrix.
/// Independent of the inverse-system recursion; intended for cross-checks.
pub fn macaulay_hilbert<T: Field>(n: usize, quad_rows: &[Vec<T>], d: usize) -> usize {
    assert!(d >= 2);
    let s2 = Monomials::new(n, 2);
    let sd = Monomials::new(n, d);
    let mult = Monomials::new(n, d - 2);
    let mut m = Matrix::zeros(0, sd.len());
    let mut row = vec![T::zero(); sd.len()];
    for q in quad_rows {
        for mono in mult.iter() {
            for (s, c) in s2.iter().zip(q) {
                if !c.is_zero() {
                    row[sd.product_index(s, mono)] = c.clone();
                }
            }
            m.push_row(&row);
            row.iter_mut().for_each(|x| *x = T::zero());
        }
    }
    sd.len() - m.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::q_int;
    use crate::random::{random_symmetric, rng_from_seed};

    fn squares(n: usize) -> Vec<SymForm<Q>> {
        (0..n)
            .map(|i| {
                let mut m = Matrix::zeros(n, n);
                m[(i, i)] = q_int(1);
                SymForm::new(m).unwrap()
            })
            .collect()
    }

    #[test]
    fn all_squares_span_degree_two() {
        let quads: Vec<SymForm<Q>> = {
            let n = 3;
            let s2 = Monomials::new(n, 2);
            (0..s2.len())
                .map(|i| {
                    let mut c = vec![q_int(0); s2.len()];
                    c[i] = q_int(1);
                    SymForm::from_monomial_coefficients(n, &c)
                })
                .collect()
        };
        let c = emptiness_certificate(&quads, 6).unwrap();
        assert_eq!(c.degree(), Some(2));
    }

    #[test]
    fn coordinate_squares_certify_at_n_plus_one() {
        // x_i^2 form a regular sequence: S/J has top degree n
        let c = emptiness_certificate(&squares(3), 6).unwrap();
        assert_eq!(c.degree(), Some(4));
    }

    #[test]
    fn common_zero_is_inconclusive() {
        // x0*x1 and x1*x2 vanish at [1:0:0]
        let q = SymForm::<Q>::from_terms(3, &[(vec![1, 1, 0], q_int(1))]).unwrap();
        let r = SymForm::<Q>::from_terms(3, &[(vec![0, 1, 1], q_int(1))]).unwrap();
        let c = emptiness_certificate(&[q, r], 6).unwrap();
        assert!(!c.is_empty_certified());
    }

    #[test]
    fn inverse_system_matches_macaulay() {
        let mut rng = rng_from_seed(3);
        for n in 2..=4 {
            let quads: Vec<Vec<Q>> = (0..n)
                .map(|_| SymForm::new(random_symmetric(&mut rng, n, 3)).unwrap().monomial_coefficients())
                .collect();
            let h = inverse_system_hilbert(n, &quads[..n - 1], 5);
            for (i, &v) in h.iter().enumerate() {
                assert_eq!(v, macaulay_hilbert(n, &quads[..n - 1], i + 2), "n={n} d={}", i + 2);
            }
        }
    }

    #[test]
    fn rejects_non_quadrics() {
        let err = emptiness_certificate_from_terms(2, &[vec![(vec![1, 0], q_int(1))]], 4);
        assert!(matches!(err, Err(CertificateError::Form(_))));
    }
}
