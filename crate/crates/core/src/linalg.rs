//! Dense exact linear algebra over a [`Field`].
//!
//! [`Subspace`] keeps its basis in reduced row-echelon form, so two equal
//! subspaces always have identical representations.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_traits::{Signed, Zero};

use crate::field::Field;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &T {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<T> Matrix<T> {
    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[T]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Fallible element-wise conversion.
    pub fn try_map<U>(&self, f: impl FnMut(&T) -> Option<U>) -> Option<Matrix<U>> {
        let data: Option<Vec<U>> = self.data.iter().map(f).collect();
        Some(Matrix { rows: self.rows, cols: self.cols, data: data? })
    }

    pub fn into_rows(self) -> Vec<Vec<T>> {
        let cols = self.cols;
        let mut out = Vec::with_capacity(self.rows);
        let mut it = self.data.into_iter();
        for _ in 0..self.rows {
            out.push(it.by_ref().take(cols).collect());
        }
        out
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from equal-length rows. `cols` is needed for the empty case.
    pub fn from_rows(cols: usize, rows: &[Vec<T>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().cloned());
        }
        Matrix { rows: rows.len(), cols, data }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn vstack(&self, other: &Matrix<T>) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Matrix::from_fn(idx.len(), self.cols, |r, c| self[(idx[r], c)].clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Matrix::from_fn(self.rows, idx.len(), |r, c| self[(r, idx[c])].clone())
    }

    pub fn push_row(&mut self, row: &[T]) {
        assert_eq!(row.len(), self.cols);
        self.data.extend(row.iter().cloned());
        self.rows += 1;
    }
}

impl<T: Field> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |r, c| if r == c { T::one() } else { T::zero() })
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let conv: Vec<Vec<T>> = rows.iter().map(|r| r.iter().map(|&x| T::from_int(x)).collect()).collect();
        Matrix::from_rows(cols, &conv)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|r| (r + 1..self.cols).all(|c| self[(r, c)] == self[(c, r)]))
    }

    pub fn mul(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = &rhs[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] += a.clone() * b;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (r, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (c, o) in out.iter_mut().enumerate() {
                let b = &self[(r, c)];
                if !b.is_zero() {
                    *o += a.clone() * b;
                }
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        self.rows_iter().map(|row| dot(row, v)).collect()
    }

    pub fn scale(&self, s: &T) -> Matrix<T> {
        self.map(|x| x.clone() * s)
    }

    pub fn add(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b).collect() }
    }

    pub fn sub(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b).collect() }
    }

    /// In-place reduced row-echelon form; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..self.cols {
            if lead == self.rows {
                break;
            }
            let Some(p) = (lead..self.rows).find(|&r| !self[(r, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(lead, p);
            let inv = self[(lead, c)].inv();
            if !inv.is_one() {
                for x in &mut self.data[lead * self.cols + c..(lead + 1) * self.cols] {
                    *x *= &inv;
                }
            }
            let pivot_row: Vec<T> = self.row(lead)[c..].to_vec();
            for r in 0..self.rows {
                if r == lead {
                    continue;
                }
                let f = self[(r, c)].clone();
                if f.is_zero() {
                    continue;
                }
                let row = &mut self.data[r * self.cols + c..(r + 1) * self.cols];
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *x -= f.clone() * p;
                    }
                }
            }
            pivots.push(c);
            lead += 1;
        }
        pivots
    }

    /// Row-echelon form without back substitution; returns the rank.
    fn echelon_rank(&mut self) -> usize {
        let mut lead = 0;
        for c in 0..self.cols {
            if lead == self.rows {
                break;
            }
            let Some(p) = (lead..self.rows).find(|&r| !self[(r, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(lead, p);
            let inv = self[(lead, c)].inv();
            let pivot_row: Vec<T> = self.row(lead)[c..].to_vec();
            for r in lead + 1..self.rows {
                let f = self[(r, c)].clone();
                if f.is_zero() {
                    continue;
                }
                let f = f * &inv;
                let row = &mut self.data[r * self.cols + c..(r + 1) * self.cols];
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *x -= f.clone() * p;
                    }
                }
            }
            lead += 1;
        }
        lead
    }

    pub fn rref(&self) -> (Matrix<T>, Vec<usize>) {
        let mut m = self.clone();
        let piv = m.rref_in_place();
        (m, piv)
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.echelon_rank()
    }

    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m[(r, c)].is_zero()) else {
                return T::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            let inv = piv.inv();
            det *= &piv;
            for r in c + 1..n {
                let f = m[(r, c)].clone();
                if f.is_zero() {
                    continue;
                }
                let f = f * &inv;
                for k in c..n {
                    let p = m[(c, k)].clone();
                    if !p.is_zero() {
                        m[(r, k)] -= f.clone() * p;
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Matrix<T>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::from_fn(n, 2 * n, |r, c| {
            if c < n {
                self[(r, c)].clone()
            } else if c - n == r {
                T::one()
            } else {
                T::zero()
            }
        });
        let piv = aug.rref_in_place();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        Some(Matrix::from_fn(n, n, |r, c| aug[(r, c + n)].clone()))
    }

    /// Basis (as rows) of the right kernel `{x : self * x = 0}`.
    pub fn kernel(&self) -> Matrix<T> {
        let (red, piv) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        let mut out = Matrix::zeros(free.len(), self.cols);
        for (i, &f) in free.iter().enumerate() {
            out[(i, f)] = T::one();
            for (r, &p) in piv.iter().enumerate() {
                out[(i, p)] = -red[(r, f)].clone();
            }
        }
        out
    }

    /// Basis (as rows) of the left kernel `{y : y * self = 0}`.
    pub fn left_kernel(&self) -> Matrix<T> {
        self.transpose().kernel()
    }

    /// Solves `x * self = v` for a row vector `x` when a solution exists.
    pub fn solve_left(&self, v: &[T]) -> Option<Vec<T>> {
        assert_eq!(v.len(), self.cols);
        // [self^T | v^T] in RREF
        let mut aug = Matrix::from_fn(self.cols, self.rows + 1, |r, c| {
            if c < self.rows {
                self[(c, r)].clone()
            } else {
                v[r].clone()
            }
        });
        let piv = aug.rref_in_place();
        if piv.last() == Some(&self.rows) {
            return None;
        }
        let mut x = vec![T::zero(); self.rows];
        for (r, &p) in piv.iter().enumerate() {
            x[p] = aug[(r, self.rows)].clone();
        }
        Some(x)
    }
}

pub fn dot<T: Field>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x.clone() * y;
        }
    }
    acc
}

/// `x^T S y` for a square matrix `S`.
pub fn bilinear<T: Field>(s: &Matrix<T>, x: &[T], y: &[T]) -> T {
    dot(x, &s.apply(y))
}

/// Linear subspace of `T^ambient` with a canonical RREF basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace<T> {
    ambient: usize,
    basis: Matrix<T>,
}

impl<T: fmt::Debug> fmt::Debug for Subspace<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}) {:?}", self.basis.rows, self.ambient, self.basis)
    }
}

impl<T: Field> Subspace<T> {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::zeros(0, ambient) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::identity(ambient) }
    }

    /// Span of the rows of `m`.
    pub fn from_matrix(m: &Matrix<T>) -> Self {
        let (red, piv) = m.rref();
        let basis = Matrix::from_fn(piv.len(), m.ncols(), |r, c| red[(r, c)].clone());
        Subspace { ambient: m.ncols(), basis }
    }

    pub fn span(ambient: usize, vectors: &[Vec<T>]) -> Self {
        Subspace::from_matrix(&Matrix::from_rows(ambient, vectors))
    }

    /// Coordinate subspace spanned by the given standard basis vectors.
    pub fn coordinate(ambient: usize, idx: &[usize]) -> Self {
        let rows: Vec<Vec<T>> =
            idx.iter().map(|&i| (0..ambient).map(|c| if c == i { T::one() } else { T::zero() }).collect()).collect();
        Subspace::span(ambient, &rows)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &Matrix<T> {
        &self.basis
    }

    pub fn contains(&self, v: &[T]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let mut m = self.basis.clone();
        m.push_row(v);
        m.rank() == self.dim()
    }

    pub fn contains_subspace(&self, other: &Subspace<T>) -> bool {
        self.sum(other).dim() == self.dim()
    }

    pub fn sum(&self, other: &Subspace<T>) -> Subspace<T> {
        assert_eq!(self.ambient, other.ambient);
        Subspace::from_matrix(&self.basis.vstack(&other.basis))
    }

    /// `dim A + dim B - rank [A; B]`.
    pub fn intersection_dim(&self, other: &Subspace<T>) -> usize {
        assert_eq!(self.ambient, other.ambient);
        self.dim() + other.dim() - self.basis.vstack(&other.basis).rank()
    }

    pub fn intersection(&self, other: &Subspace<T>) -> Subspace<T> {
        assert_eq!(self.ambient, other.ambient);
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::zero(self.ambient);
        }
        // x * [A; B] = 0 splits as a*A = -b*B
        let stacked = self.basis.vstack(&other.basis);
        let ker = stacked.left_kernel();
        let k = self.dim();
        let rows: Vec<Vec<T>> = ker
            .rows_iter()
            .map(|coeffs| self.basis.left_apply(&coeffs[..k]))
            .collect();
        Subspace::span(self.ambient, &rows)
    }

    /// Coordinates of `v` in the RREF basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[T]) -> Option<Vec<T>> {
        self.basis.solve_left(v)
    }
}

/// Signature `(positive, negative, zero)` of a symmetric matrix over an ordered field,
/// by symmetric Gaussian elimination (Sylvester's law of inertia).
pub fn inertia<T: Field + Signed>(s: &Matrix<T>) -> (usize, usize, usize) {
    assert!(s.is_symmetric(), "inertia needs a symmetric matrix");
    let mut m = s.clone();
    let n = m.nrows();
    let (mut pos, mut neg) = (0, 0);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let piv = active.iter().copied().find(|&i| !m[(i, i)].is_zero());
        let p = match piv {
            Some(p) => p,
            None => {
                // all diagonal entries vanish: fold an off-diagonal entry into the diagonal
                let pair = active
                    .iter()
                    .flat_map(|&i| active.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && !m[(i, j)].is_zero());
                let Some((i, j)) = pair else { break };
                for c in 0..n {
                    let v = m[(j, c)].clone();
                    m[(i, c)] += v;
                }
                for r in 0..n {
                    let v = m[(r, j)].clone();
                    m[(r, i)] += v;
                }
                i
            }
        };
        let d = m[(p, p)].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        let inv = d.inv();
        let prow: Vec<T> = m.row(p).to_vec();
        for &r in &active {
            if r == p || m[(r, p)].is_zero() {
                continue;
            }
            let f = m[(r, p)].clone() * &inv;
            for c in 0..n {
                if !prow[c].is_zero() {
                    m[(r, c)] -= f.clone() * &prow[c];
                }
            }
        }
        for &r in &active {
            if r != p {
                m[(p, r)] = T::zero();
            }
        }
        active.retain(|&r| r != p);
    }
    (pos, neg, n - pos - neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{q_frac, q_int, Fp};
    use crate::Q;

    fn qm(rows: &[Vec<i64>]) -> Matrix<Q> {
        Matrix::from_int_rows(rows)
    }

    #[test]
    fn rref_is_canonical() {
        let a = Subspace::from_matrix(&qm(&[vec![1, 2, 3], vec![2, 4, 7]]));
        let b = Subspace::from_matrix(&qm(&[vec![3, 6, 10], vec![0, 0, 5]]));
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
        assert_eq!(a.basis()[(0, 0)], q_int(1));
    }

    #[test]
    fn det_and_inverse() {
        let m = qm(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]);
        assert_eq!(m.det(), q_int(18));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(3));
        let sing = qm(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(sing.det(), q_int(0));
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn kernel_is_annihilated() {
        let m = qm(&[vec![1, 2, 3, 4], vec![2, 4, 6, 8], vec![1, 0, 1, 0]]);
        let k = m.kernel();
        assert_eq!(k.nrows(), 2);
        for row in k.rows_iter() {
            assert!(m.apply(row).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn intersections() {
        let a = Subspace::<Q>::coordinate(4, &[0, 1]);
        let b = Subspace::from_matrix(&qm(&[vec![1, 0, 1, 0], vec![0, 1, 0, 0]]));
        assert_eq!(a.intersection_dim(&b), 1);
        let i = a.intersection(&b);
        assert_eq!(i, Subspace::coordinate(4, &[1]));
        assert!(a.contains(&[q_frac(1, 2), q_int(3), q_int(0), q_int(0)]));
        assert!(!b.contains(&[q_int(1), q_int(0), q_int(0), q_int(0)]));
    }

    #[test]
    fn solve_left_finds_coefficients() {
        let m = qm(&[vec![1, 0, 2], vec![0, 1, 1]]);
        let x = m.solve_left(&[q_int(3), q_int(-1), q_int(5)]).unwrap();
        assert_eq!(x, vec![q_int(3), q_int(-1)]);
        assert!(m.solve_left(&[q_int(1), q_int(0), q_int(0)]).is_none());
    }

    #[test]
    fn inertia_counts() {
        let hyperbolic = qm(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(inertia(&hyperbolic), (1, 1, 0));
        let m = qm(&[vec![2, 0, 1], vec![0, -4, -2], vec![1, -2, -2]]);
        assert_eq!(inertia(&m), (1, 2, 0));
        let deg = qm(&[vec![1, 1], vec![1, 1]]);
        assert_eq!(inertia(&deg), (1, 0, 1));
    }

    #[test]
    fn prime_field_rank() {
        type F = Fp<7>;
        // rank 2 over Q but 1 over F_7
        let m: Matrix<F> = Matrix::from_int_rows(&[vec![1, 1], vec![1, 8]]);
        assert_eq!(m.rank(), 1);
        let q = qm(&[vec![1, 1], vec![1, 8]]);
        assert_eq!(q.rank(), 2);
    }
}
