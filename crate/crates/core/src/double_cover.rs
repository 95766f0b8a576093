//! The double cover `mu -> mu + mu^T` from rank-1 tensors onto the cone of symmetric
//! matrices of rank at most 2, its coordinate ring, and the combinatorics of flops.

use std::collections::VecDeque;

use num_traits::Zero;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::{q_int, ExactSqrt, Field};
use crate::form::SymForm;
use crate::linalg::{Matrix, Subspace};
use crate::monomial::{binomial, Monomials};
use crate::random::random_vector;
use crate::Q;

/// Largest `n` and degree accepted by [`verify_coord_ring`].
pub const COORD_RING_LIMIT: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DoubleCoverError {
    #[error("tensor has rank {0}, expected at most 1")]
    RankTooLarge(usize),
    #[error("symmetric matrix has rank {0}, expected 2")]
    WrongRank(usize),
    #[error("hint does not map to the given matrix")]
    HintMismatch,
    #[error("matrix is not square")]
    NotSquare,
    #[error("parameters (n = {n}, degree = {degree}) exceed the supported range")]
    TooLarge { n: usize, degree: usize },
    #[error("zero vector")]
    ZeroVector,
    #[error("vector lengths differ")]
    LengthMismatch,
}

/// `g2(mu) = mu + mu^T` for `mu` of rank at most 1.
pub fn g2<T: Field>(mu: &Matrix<T>) -> Result<SymForm<T>, DoubleCoverError> {
    if mu.nrows() != mu.ncols() {
        return Err(DoubleCoverError::NotSquare);
    }
    let r = mu.rank();
    if r > 1 {
        return Err(DoubleCoverError::RankTooLarge(r));
    }
    Ok(SymForm::new(mu.add(&mu.transpose())).expect("symmetric by construction"))
}

/// `x y^T`.
pub fn outer<T: Field>(x: &[T], y: &[T]) -> Matrix<T> {
    Matrix::from_fn(x.len(), y.len(), |i, j| x[i].clone() * &y[j])
}

/// Writes a nonzero rank-1 matrix as `x y^T`.
pub fn factor_rank_one<T: Field>(mu: &Matrix<T>) -> Option<(Vec<T>, Vec<T>)> {
    if mu.rank() != 1 {
        return None;
    }
    let (r, c) = (0..mu.nrows())
        .flat_map(|r| (0..mu.ncols()).map(move |c| (r, c)))
        .find(|&(r, c)| !mu[(r, c)].is_zero())?;
    let inv = mu[(r, c)].inv();
    let x: Vec<T> = (0..mu.nrows()).map(|i| mu[(i, c)].clone() * &inv).collect();
    let y: Vec<T> = mu.row(r).to_vec();
    Some((x, y))
}

/// Fiber of [`g2`] over a rank-2 symmetric matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fiber<T> {
    /// The orbit `{mu, mu^T}` (one element when `mu` is symmetric).
    Points(Vec<Matrix<T>>),
    /// The factorization needs a quadratic extension of the base field.
    RequiresExtension,
}

/// The preimage of `s` under [`g2`]. With a hint `mu` satisfying `g2(mu) = s` the answer is
/// `{mu, mu^T}`; otherwise the fiber is found by splitting `s` into rational factors when
/// they exist.
pub fn fiber_g2<T: ExactSqrt>(s: &SymForm<T>, hint: Option<&Matrix<T>>) -> Result<Fiber<T>, DoubleCoverError> {
    let rank = s.rank();
    if rank != 2 {
        return Err(DoubleCoverError::WrongRank(rank));
    }
    let mu = match hint {
        Some(h) => {
            if g2(h)? != *s {
                return Err(DoubleCoverError::HintMismatch);
            }
            h.clone()
        }
        None => match split_rank_two(s.matrix()) {
            Some(mu) => mu,
            None => return Ok(Fiber::RequiresExtension),
        },
    };
    let t = mu.transpose();
    Ok(if t == mu { Fiber::Points(vec![mu]) } else { Fiber::Points(vec![mu, t]) })
}

/// Finds `x, y` with `s = x y^T + y x^T` over the base field, if possible.
fn split_rank_two<T: ExactSqrt>(s: &Matrix<T>) -> Option<Matrix<T>> {
    let n = s.nrows();
    // a rank-2 symmetric matrix has a nonsingular principal 2x2 minor
    let (a, b) = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .find(|&(a, b)| !(s[(a, a)].clone() * &s[(b, b)] - s[(a, b)].clone() * &s[(a, b)]).is_zero())?;
    let g = Matrix::from_fn(2, 2, |i, j| s[([a, b][i], [a, b][j])].clone());
    let gi = g.inverse()?;
    let (al, be, ga) = (gi[(0, 0)].clone(), gi[(0, 1)].clone(), gi[(1, 1)].clone());
    let half = T::from_int(2).inv();
    // al s^2 + 2 be s t + ga t^2 = 2 (u . (s,t)) (v . (s,t))
    let (u, v) = if al.is_zero() {
        (vec![T::zero(), T::one()], vec![be, ga * &half])
    } else {
        let disc = be.clone() * &be - al.clone() * &ga;
        let root = disc.exact_sqrt()?;
        let r_plus = (-be.clone() + &root) / al.clone();
        let r_minus = (-be - root) / al.clone();
        (vec![al.clone() * &half, -(al * &half) * r_plus], vec![T::one(), -r_minus])
    };
    let c = s.select_cols(&[a, b]);
    let x = c.apply(&u);
    let y = c.apply(&v);
    let mu = outer(&x, &y);
    debug_assert!(mu.add(&mu.transpose()) == *s);
    Some(mu)
}

/// Dimensions of `S^2(S^i V)` and `∧^2(S^i V)` for `dim V = n`.
pub fn graded_dims(n: usize, i: usize) -> (usize, usize) {
    let m = binomial(i + n - 1, n - 1);
    (m * (m + 1) / 2, m * (m - 1) / 2)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoordRingCheck {
    pub n: usize,
    pub degree: usize,
    /// Dimension of the degree part of the quotient by the 2x2 minors.
    pub quotient_dim: usize,
    /// Dimensions of the invariant and anti-invariant parts under transposition.
    pub plus: usize,
    pub minus: usize,
    pub ok: bool,
}

/// Builds the degree-`j` part of the polynomial ring on the entries `z_ab` of an `n x n`
/// matrix modulo the 2x2 minors, and compares its dimension and the eigenspaces of
/// transposition with `(dim S^j V)^2` and [`graded_dims`].
pub fn verify_coord_ring(n: usize, j: usize) -> Result<CoordRingCheck, DoubleCoverError> {
    if n == 0 || n > COORD_RING_LIMIT || j > COORD_RING_LIMIT {
        return Err(DoubleCoverError::TooLarge { n, degree: j });
    }
    let nv = n * n;
    let var = |a: usize, b: usize| a * n + b;
    let swap = |m: &[u8]| -> Vec<u8> {
        let mut out = vec![0u8; nv];
        for a in 0..n {
            for b in 0..n {
                out[var(b, a)] = m[var(a, b)];
            }
        }
        out
    };
    let sj = Monomials::new(nv, j);
    // generators of the degree-j part of the ideal
    let mut gens: Vec<Vec<Q>> = Vec::new();
    if j >= 2 {
        let mult = Monomials::new(nv, j - 2);
        for a in 0..n {
            for c in a + 1..n {
                for b in 0..n {
                    for d in b + 1..n {
                        for m in mult.iter() {
                            let mut row = vec![Q::zero(); sj.len()];
                            let mut p = m.to_vec();
                            p[var(a, b)] += 1;
                            p[var(c, d)] += 1;
                            row[sj.index_of(&p).unwrap()] += q_int(1);
                            let mut q = m.to_vec();
                            q[var(a, d)] += 1;
                            q[var(c, b)] += 1;
                            row[sj.index_of(&q).unwrap()] -= q_int(1);
                            gens.push(row);
                        }
                    }
                }
            }
        }
    }
    let ideal = Matrix::from_rows(sj.len(), &gens);
    let ideal_dim = ideal.rank();
    let quotient_dim = sj.len() - ideal_dim;
    let image: Vec<usize> = sj.iter().map(|m| sj.index_of(&swap(m)).unwrap()).collect();
    let fixed = (0..sj.len()).filter(|&i| image[i] == i).count();
    let pairs = (sj.len() - fixed) / 2;
    let sym = |sign: i64| -> usize {
        let rows: Vec<Vec<Q>> = gens
            .iter()
            .map(|g| {
                let mut r = g.clone();
                for (i, c) in g.iter().enumerate() {
                    if !c.is_zero() {
                        r[image[i]] += c.clone() * q_int(sign);
                    }
                }
                r
            })
            .collect();
        Matrix::from_rows(sj.len(), &rows).rank()
    };
    let plus = fixed + pairs - sym(1);
    let minus = pairs - sym(-1);
    let m = binomial(j + n - 1, n - 1);
    let ok = quotient_dim == m * m && (plus, minus) == graded_dims(n, j) && plus + minus == quotient_dim;
    Ok(CoordRingCheck { n, degree: j, quotient_dim, plus, minus, ok })
}

/// Bilinear form `B` with `x^T B y = H(g2(x y^T))`, where `H(S) = sum_{i<=j} h_ij S_ij`
/// reads the upper triangle of `h`.
pub fn hyperplane_pullback<T: Field>(h: &Matrix<T>) -> Matrix<T> {
    let n = h.nrows();
    Matrix::from_fn(n, n, |i, j| {
        if i == j {
            h[(i, i)].clone() + &h[(i, i)]
        } else {
            h[(i.min(j), i.max(j))].clone()
        }
    })
}

/// `H(S) = sum_{i<=j} h_ij S_ij`.
pub fn hyperplane_value<T: Field>(h: &Matrix<T>, s: &Matrix<T>) -> T {
    let n = h.nrows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in i..n {
            acc += h[(i, j)].clone() * &s[(i, j)];
        }
    }
    acc
}

/// The scalar `c` with `a = c b`, if any (`b` nonzero).
pub fn proportionality<T: Field>(a: &Matrix<T>, b: &Matrix<T>) -> Option<T> {
    let (r, c) = (0..b.nrows()).flat_map(|r| (0..b.ncols()).map(move |c| (r, c))).find(|&p| !b[p].is_zero())?;
    let k = a[(r, c)].clone() / b[(r, c)].clone();
    (b.scale(&k) == *a).then_some(k)
}

/// Rank of the differential of `(x, y) -> x y^T + y x^T` at `(x, y)`.
pub fn jacobian_rank_g2<T: Field>(x: &[T], y: &[T]) -> Result<usize, DoubleCoverError> {
    if x.len() != y.len() {
        return Err(DoubleCoverError::LengthMismatch);
    }
    if x.iter().all(T::is_zero) || y.iter().all(T::is_zero) {
        return Err(DoubleCoverError::ZeroVector);
    }
    let n = x.len();
    let jac = Matrix::from_fn(n * n, 2 * n, |row, col| {
        let (i, j) = (row / n, row % n);
        let mut v = T::zero();
        if col < n {
            let k = col;
            if i == k {
                v += y[j].clone();
            }
            if j == k {
                v += y[i].clone();
            }
        } else {
            let k = col - n;
            if j == k {
                v += x[i].clone();
            }
            if i == k {
                v += x[j].clone();
            }
        }
        v
    });
    Ok(jac.rank())
}

/// [`jacobian_rank_g2`] at a rank-1 tensor `mu = x y^T`.
pub fn jacobian_rank_at<T: Field>(mu: &Matrix<T>) -> Result<usize, DoubleCoverError> {
    let (x, y) = factor_rank_one(mu).ok_or(DoubleCoverError::RankTooLarge(mu.rank()))?;
    jacobian_rank_g2(&x, &y)
}

/// Whether `(x, y)` lies on the incidence variety `sum x_i y_i = 0`.
pub fn incidence_member<T: Field>(x: &[T], y: &[T]) -> Result<bool, DoubleCoverError> {
    if x.len() != y.len() {
        return Err(DoubleCoverError::LengthMismatch);
    }
    if x.iter().all(T::is_zero) || y.iter().all(T::is_zero) {
        return Err(DoubleCoverError::ZeroVector);
    }
    Ok(crate::linalg::dot(x, y).is_zero())
}

/// Random point of the incidence variety: `y` is a random vector in the kernel of `x`.
pub fn random_incidence_pair<R: Rng + ?Sized>(rng: &mut R, n: usize, bound: i64) -> (Vec<Q>, Vec<Q>) {
    loop {
        let x = random_vector(rng, n, bound);
        if x.iter().all(Q::is_zero) {
            continue;
        }
        let ker = Subspace::from_matrix(&Matrix::from_rows(n, std::slice::from_ref(&x)).kernel());
        let c = random_vector(rng, ker.dim(), bound);
        let y = ker.basis().left_apply(&c);
        if !y.iter().all(Q::is_zero) {
            return (x, y);
        }
    }
}

/// Hypercube on sign vectors `{+,-}^r` (bit `i` set means `-` in position `i`); edges join
/// vectors differing in one position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlopGraph {
    pub r: usize,
    pub vertices: Vec<u64>,
    pub edges: Vec<(u64, u64)>,
}

pub fn flop_graph(r: usize) -> FlopGraph {
    assert!(r < 64);
    let vertices: Vec<u64> = (0..1u64 << r).collect();
    let mut edges = Vec::with_capacity(r << r.saturating_sub(1));
    for &v in &vertices {
        for i in 0..r {
            let w = v ^ (1 << i);
            if v < w {
                edges.push((v, w));
            }
        }
    }
    FlopGraph { r, vertices, edges }
}

impl FlopGraph {
    pub fn neighbors(&self, v: u64) -> Vec<u64> {
        (0..self.r).map(|i| v ^ (1 << i)).collect()
    }

    pub fn degree(&self, v: u64) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn is_regular(&self) -> bool {
        let mut deg = vec![0usize; self.vertices.len()];
        for &(a, b) in &self.edges {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        deg.iter().all(|&d| d == self.r)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            adj[a as usize].push(b as usize);
            adj[b as usize].push(a as usize);
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// The vertex with every sign flipped.
    pub fn antipode(&self, v: u64) -> u64 {
        v ^ ((1u64 << self.r) - 1)
    }

    pub fn signs(&self, v: u64) -> String {
        (0..self.r).map(|i| if v >> i & 1 == 1 { '-' } else { '+' }).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::rng_from_seed;

    fn qv(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q_int(x)).collect()
    }

    #[test]
    fn g2_examples() {
        let x = qv(&[1, 2, 0]);
        let s = g2(&outer(&x, &x)).unwrap();
        assert_eq!(s.matrix(), &outer(&x, &x).scale(&q_int(2)));
        assert_eq!(s.rank(), 1);
        let e = g2(&outer(&qv(&[1, 0]), &qv(&[0, 1]))).unwrap();
        assert_eq!(e.rank(), 2);
        assert_eq!(g2(&Matrix::<Q>::identity(2)), Err(DoubleCoverError::RankTooLarge(2)));
    }

    #[test]
    fn fibers() {
        let mu = outer(&qv(&[1, 0]), &qv(&[0, 1]));
        let s = g2(&mu).unwrap();
        let Fiber::Points(pts) = fiber_g2(&s, None).unwrap() else { panic!() };
        assert_eq!(pts.len(), 2);
        assert!(pts.contains(&mu) && pts.contains(&mu.transpose()));
        let diag = SymForm::new(Matrix::<Q>::from_int_rows(&[
            vec![1, 0, 0, 0],
            vec![0, 1, 0, 0],
            vec![0, 0, 0, 0],
            vec![0, 0, 0, 0],
        ]))
        .unwrap();
        assert_eq!(fiber_g2(&diag, None).unwrap(), Fiber::RequiresExtension);
        let hyperbolic = SymForm::new(Matrix::<Q>::from_int_rows(&[vec![1, 0], vec![0, -1]])).unwrap();
        let Fiber::Points(p) = fiber_g2(&hyperbolic, None).unwrap() else { panic!() };
        assert!(p.iter().all(|m| g2(m).unwrap() == hyperbolic));
        let bad_hint = outer(&qv(&[1, 1]), &qv(&[1, 0]));
        assert_eq!(fiber_g2(&s, Some(&bad_hint)), Err(DoubleCoverError::HintMismatch));
    }

    #[test]
    fn random_fibers_split_rationally() {
        let mut rng = rng_from_seed(4);
        for _ in 0..50 {
            let x = random_vector(&mut rng, 4, 5);
            let y = random_vector(&mut rng, 4, 5);
            let mu = outer(&x, &y);
            let Ok(s) = g2(&mu) else { continue };
            if s.rank() != 2 {
                continue;
            }
            let Fiber::Points(pts) = fiber_g2(&s, None).unwrap() else { panic!("rational fiber expected") };
            assert!(pts.contains(&mu));
        }
    }

    #[test]
    fn dims() {
        assert_eq!(graded_dims(5, 0), (1, 0));
        assert_eq!(graded_dims(4, 1), (10, 6));
        assert_eq!(graded_dims(2, 2), (6, 3));
        let c = verify_coord_ring(2, 1).unwrap();
        assert!(c.ok);
        assert_eq!((c.plus, c.minus), (3, 1));
        assert!(verify_coord_ring(4, 1).is_err());
    }

    #[test]
    fn pullbacks() {
        let mut h = Matrix::<Q>::zeros(3, 3);
        h[(0, 1)] = q_int(1);
        let b = hyperplane_pullback(&h);
        assert_eq!(b, Matrix::from_int_rows(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 0]]));
        let tr = hyperplane_pullback(&Matrix::<Q>::identity(4));
        assert_eq!(proportionality(&tr, &Matrix::identity(4)), Some(q_int(2)));
        assert_eq!(proportionality(&Matrix::<Q>::identity(2), &Matrix::from_int_rows(&[vec![1, 0], vec![0, 2]])), None);
    }

    #[test]
    fn jacobians() {
        let e = |i: usize| -> Vec<Q> { (0..4).map(|j| q_int(i64::from(i == j))).collect() };
        assert_eq!(jacobian_rank_g2(&e(0), &e(1)).unwrap(), 7);
        assert_eq!(jacobian_rank_g2(&e(0), &e(0)).unwrap(), 4);
        assert_eq!(jacobian_rank_g2(&qv(&[1, 2]), &qv(&[3, -1])).unwrap(), 3);
        assert_eq!(jacobian_rank_g2(&qv(&[0, 0]), &qv(&[3, -1])), Err(DoubleCoverError::ZeroVector));
    }

    #[test]
    fn incidence() {
        let e = |i: usize| -> Vec<Q> { (0..4).map(|j| q_int(i64::from(i == j))).collect() };
        assert!(incidence_member(&e(0), &e(1)).unwrap());
        assert!(!incidence_member(&e(0), &e(0)).unwrap());
        let mut rng = rng_from_seed(2);
        let (x, y) = random_incidence_pair(&mut rng, 4, 5);
        assert!(incidence_member(&x, &y).unwrap());
    }

    #[test]
    fn hypercubes() {
        let g0 = flop_graph(0);
        assert_eq!((g0.vertices.len(), g0.edges.len()), (1, 0));
        let g1 = flop_graph(1);
        assert_eq!((g1.vertices.len(), g1.edges.len()), (2, 1));
        let g3 = flop_graph(3);
        assert_eq!((g3.vertices.len(), g3.edges.len()), (8, 12));
        assert!(g3.is_connected() && g3.is_regular());
        assert_eq!(g3.signs(g3.antipode(0)), "---");
    }
}
