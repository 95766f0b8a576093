//! Integral lattices: Gram matrices over the integers, divisibility, discriminant groups,
//! orthogonal complements, and the Heegner-divisor computations on
//! `h^perp = U^2 + E8(-1)^2 + <-2> + <-2>`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{inertia, Matrix};
use crate::Q;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("Gram matrix is not square and symmetric")]
    NotSymmetric,
    #[error("Gram matrix is degenerate")]
    Degenerate,
    #[error("{labels} labels for a lattice of rank {rank}")]
    LabelCount { rank: usize, labels: usize },
    #[error("vector has length {got}, lattice has rank {rank}")]
    WrongLength { rank: usize, got: usize },
    #[error("zero vector")]
    ZeroVector,
    #[error("vector is not primitive")]
    NotPrimitive,
    #[error("vector has square zero")]
    Isotropic,
    #[error("discriminant formula is not integral")]
    NonIntegral,
    #[error("scaling factor must be nonzero")]
    ZeroScale,
    #[error("entry does not fit in a machine integer")]
    Overflow,
}

pub type LatticeVector = Vec<BigInt>;

pub fn int_vector(v: &[i64]) -> LatticeVector {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Nondegenerate symmetric integer Gram matrix with basis labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralLattice {
    gram: Matrix<BigInt>,
    labels: Vec<String>,
    det: BigInt,
}

/// Serialized form `{rank, gram, labels}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeFile {
    pub rank: usize,
    pub gram: Vec<Vec<i64>>,
    pub labels: Vec<String>,
}

impl IntegralLattice {
    pub fn new(gram: Matrix<BigInt>, labels: Vec<String>) -> Result<Self, LatticeError> {
        let n = gram.nrows();
        if gram.ncols() != n || (0..n).any(|i| (0..n).any(|j| gram[(i, j)] != gram[(j, i)])) {
            return Err(LatticeError::NotSymmetric);
        }
        if labels.len() != n {
            return Err(LatticeError::LabelCount { rank: n, labels: labels.len() });
        }
        let det = int_det(&gram);
        if det.is_zero() {
            return Err(LatticeError::Degenerate);
        }
        Ok(IntegralLattice { gram, labels, det })
    }

    pub fn from_rows(rows: &[Vec<i64>], labels: &[&str]) -> Result<Self, LatticeError> {
        let n = rows.len();
        let gram = Matrix::from_fn(n, n, |i, j| BigInt::from(rows[i].get(j).copied().unwrap_or(0)));
        Self::new(gram, labels.iter().map(|s| s.to_string()).collect())
    }

    /// Generic labels `prefix1 .. prefixN`.
    fn with_prefix(gram: Matrix<BigInt>, prefix: &str) -> Result<Self, LatticeError> {
        let labels = (1..=gram.nrows()).map(|i| format!("{prefix}{i}")).collect();
        Self::new(gram, labels)
    }

    pub fn rank(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &Matrix<BigInt> {
        &self.gram
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn det(&self) -> BigInt {
        self.det.clone()
    }

    /// `|det|`.
    pub fn disc(&self) -> BigInt {
        self.det().abs()
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[(i, i)].is_even())
    }

    pub fn is_unimodular(&self) -> bool {
        self.disc().is_one()
    }

    /// `(positive, negative)` inertia.
    pub fn signature(&self) -> (usize, usize) {
        let (p, n, _) = inertia(&self.gram.map(|x| Q::from_integer(x.clone())));
        (p, n)
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.rank()).map(|i| (0..self.rank()).map(|j| &self.gram[(i, j)] * &v[j]).sum()).collect()
    }

    pub fn product(&self, a: &[BigInt], b: &[BigInt]) -> BigInt {
        self.apply(b).iter().zip(a).map(|(x, y)| x * y).sum()
    }

    pub fn square(&self, v: &[BigInt]) -> BigInt {
        self.product(v, v)
    }

    fn check(&self, v: &[BigInt]) -> Result<(), LatticeError> {
        if v.len() != self.rank() {
            return Err(LatticeError::WrongLength { rank: self.rank(), got: v.len() });
        }
        if v.iter().all(Zero::is_zero) {
            return Err(LatticeError::ZeroVector);
        }
        Ok(())
    }

    pub fn to_file(&self) -> Result<LatticeFile, LatticeError> {
        let gram = self
            .gram
            .rows_iter()
            .map(|r| r.iter().map(|x| x.to_i64().ok_or(LatticeError::Overflow)).collect())
            .collect::<Result<_, _>>()?;
        Ok(LatticeFile { rank: self.rank(), gram, labels: self.labels.clone() })
    }

    pub fn from_file(f: &LatticeFile) -> Result<Self, LatticeError> {
        if f.gram.len() != f.rank {
            return Err(LatticeError::NotSymmetric);
        }
        let gram = Matrix::from_fn(f.rank, f.rank, |i, j| BigInt::from(f.gram[i].get(j).copied().unwrap_or(0)));
        Self::new(gram, f.labels.clone())
    }
}

/// The hyperbolic plane `[[0, 1], [1, 0]]` with basis `u, v`.
pub fn hyperbolic_u() -> IntegralLattice {
    IntegralLattice::from_rows(&[vec![0, 1], vec![1, 0]], &["u", "v"]).unwrap()
}

/// The E8 root lattice scaled by `sign` (`E8(-1)` is negative definite).
pub fn e8(sign: i64) -> IntegralLattice {
    assert!(sign == 1 || sign == -1);
    // Dynkin diagram: chain 0-1-2-3-4-5-6 with node 7 attached to node 4
    let mut edges: Vec<(usize, usize)> = (0..6).map(|i| (i, i + 1)).collect();
    edges.push((4, 7));
    let gram = Matrix::from_fn(8, 8, |i, j| {
        let v = if i == j {
            2
        } else if edges.contains(&(i.min(j), i.max(j))) {
            -1
        } else {
            0
        };
        BigInt::from(sign * v)
    });
    IntegralLattice::with_prefix(gram, "e").unwrap()
}

/// `<n>`.
pub fn rank1(n: i64) -> Result<IntegralLattice, LatticeError> {
    IntegralLattice::from_rows(&[vec![n]], &["x"])
}

pub fn rank1_labeled(n: i64, label: &str) -> Result<IntegralLattice, LatticeError> {
    IntegralLattice::from_rows(&[vec![n]], &[label])
}

pub fn direct_sum(a: &IntegralLattice, b: &IntegralLattice) -> IntegralLattice {
    let (n, m) = (a.rank(), b.rank());
    let gram = Matrix::from_fn(n + m, n + m, |i, j| {
        if i < n && j < n {
            a.gram[(i, j)].clone()
        } else if i >= n && j >= n {
            b.gram[(i - n, j - n)].clone()
        } else {
            BigInt::zero()
        }
    });
    let labels = a.labels.iter().chain(&b.labels).cloned().collect();
    IntegralLattice { gram, labels, det: &a.det * &b.det }
}

pub fn rescale(l: &IntegralLattice, c: i64) -> Result<IntegralLattice, LatticeError> {
    if c == 0 {
        return Err(LatticeError::ZeroScale);
    }
    let c = BigInt::from(c);
    let det = &l.det * c.pow(l.rank() as u32);
    Ok(IntegralLattice { gram: l.gram.map(|x| x * &c), labels: l.labels.clone(), det })
}

/// Fraction-free (Bareiss) determinant.
pub fn int_det(m: &Matrix<BigInt>) -> BigInt {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[(r, k)].is_zero()) else {
                return BigInt::zero();
            };
            a.swap_rows(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                a[(i, j)] = v;
            }
        }
        prev = a[(k, k)].clone();
    }
    sign * a[(n - 1, n - 1)].clone()
}

fn int_mul(a: &Matrix<BigInt>, b: &Matrix<BigInt>) -> Matrix<BigInt> {
    assert_eq!(a.ncols(), b.nrows());
    Matrix::from_fn(a.nrows(), b.ncols(), |i, j| (0..a.ncols()).map(|k| &a[(i, k)] * &b[(k, j)]).sum())
}

fn int_identity(n: usize) -> Matrix<BigInt> {
    Matrix::from_fn(n, n, |i, j| if i == j { BigInt::one() } else { BigInt::zero() })
}

/// Smith normal form `U A V = D` with `U`, `V` unimodular and `d_1 | d_2 | ..`, `d_i >= 0`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: Matrix<BigInt>,
    pub d: Vec<BigInt>,
    pub v: Matrix<BigInt>,
}

pub fn smith_normal_form(a: &Matrix<BigInt>) -> Smith {
    let (m, n) = (a.nrows(), a.ncols());
    let mut a = a.clone();
    let mut u = int_identity(m);
    let mut v = int_identity(n);
    let add_row = |x: &mut Matrix<BigInt>, dst: usize, src: usize, f: &BigInt| {
        for c in 0..x.ncols() {
            let t = &x[(src, c)] * f;
            x[(dst, c)] += t;
        }
    };
    let add_col = |x: &mut Matrix<BigInt>, dst: usize, src: usize, f: &BigInt| {
        for r in 0..x.nrows() {
            let t = &x[(r, src)] * f;
            x[(r, dst)] += t;
        }
    };
    let swap_cols = |x: &mut Matrix<BigInt>, i: usize, j: usize| {
        for r in 0..x.nrows() {
            let t = x[(r, i)].clone();
            x[(r, i)] = x[(r, j)].clone();
            x[(r, j)] = t;
        }
    };
    let mut diag = Vec::new();
    for t in 0..m.min(n) {
        loop {
            // smallest nonzero entry of the remaining block becomes the pivot
            let pos = (t..m)
                .flat_map(|i| (t..n).map(move |j| (i, j)))
                .filter(|&p| !a[p].is_zero())
                .min_by(|&p, &q| a[p].abs().cmp(&a[q].abs()));
            let Some((pi, pj)) = pos else { break };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            swap_cols(&mut a, t, pj);
            swap_cols(&mut v, t, pj);
            let mut dirty = false;
            for i in t + 1..m {
                let q = -a[(i, t)].div_floor(&a[(t, t)]);
                if !q.is_zero() {
                    add_row(&mut a, i, t, &q);
                    add_row(&mut u, i, t, &q);
                }
                dirty |= !a[(i, t)].is_zero();
            }
            for j in t + 1..n {
                let q = -a[(t, j)].div_floor(&a[(t, t)]);
                if !q.is_zero() {
                    add_col(&mut a, j, t, &q);
                    add_col(&mut v, j, t, &q);
                }
                dirty |= !a[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !a[(i, j)].is_multiple_of(&a[(t, t)])));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    add_row(&mut a, t, i, &one);
                    add_row(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            for c in 0..n {
                a[(t, c)] = -a[(t, c)].clone();
            }
            for c in 0..m {
                u[(t, c)] = -u[(t, c)].clone();
            }
        }
        diag.push(a[(t, t)].clone());
    }
    Smith { u, d: diag, v }
}

/// `gcd` of the entries of `G v`.
pub fn divisibility(v: &[BigInt], l: &IntegralLattice) -> Result<BigInt, LatticeError> {
    l.check(v)?;
    let g = l.apply(v).iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return Err(LatticeError::Degenerate);
    }
    Ok(g)
}

fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// `L^∨ / L` through the Smith form of the Gram matrix.
#[derive(Clone, Debug)]
pub struct DiscriminantGroup {
    /// Invariant factors greater than 1.
    pub invariants: Vec<BigInt>,
    /// Generators `V e_i / d_i` in rational basis coordinates, one per invariant factor.
    pub generators: Vec<Vec<Q>>,
    /// `q(g) mod 2Z` for even lattices, `b(g, g) mod Z` otherwise.
    pub values: Vec<Q>,
    pub even: bool,
    smith: Smith,
    first: usize,
}

impl DiscriminantGroup {
    pub fn order(&self) -> BigInt {
        self.invariants.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty()
    }
}

fn reduce_mod(x: &Q, m: &BigInt) -> Q {
    let m = Q::from_integer(m.clone());
    let k = (x / &m).floor();
    x - k * m
}

pub fn discriminant_group(l: &IntegralLattice) -> DiscriminantGroup {
    let smith = smith_normal_form(&l.gram);
    let first = smith.d.iter().position(|d| !d.is_one()).unwrap_or(smith.d.len());
    let invariants: Vec<BigInt> = smith.d[first..].to_vec();
    let vq = smith.v.map(|x| Q::from_integer(x.clone()));
    let gq = l.gram.map(|x| Q::from_integer(x.clone()));
    let even = l.is_even();
    let modulus = BigInt::from(if even { 2 } else { 1 });
    let mut generators = Vec::new();
    let mut values = Vec::new();
    for (i, d) in invariants.iter().enumerate() {
        let col = first + i;
        let dq = Q::from_integer(d.clone());
        let g: Vec<Q> = (0..l.rank()).map(|r| vq[(r, col)].clone() / &dq).collect();
        let val = crate::linalg::bilinear(&gq, &g, &g);
        values.push(reduce_mod(&val, &modulus));
        generators.push(g);
    }
    DiscriminantGroup { invariants, generators, values, even, smith, first }
}

/// Class of `v / div(v)` in `L^∨ / L`, as coordinates modulo the invariant factors.
pub fn disc_class(v: &[BigInt], l: &IntegralLattice, group: &DiscriminantGroup) -> Result<Vec<BigInt>, LatticeError> {
    l.check(v)?;
    if !content(v).is_one() {
        return Err(LatticeError::NotPrimitive);
    }
    let div = Q::from_integer(divisibility(v, l)?);
    let x: Vec<Q> = v.iter().map(|c| Q::from_integer(c.clone()) / &div).collect();
    let vinv = group
        .smith
        .v
        .map(|a| Q::from_integer(a.clone()))
        .inverse()
        .expect("unimodular");
    let y = vinv.apply(&x);
    Ok(group
        .invariants
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let c = y[group.first + i].clone() * Q::from_integer(d.clone());
            assert!(c.is_integer(), "v / div(v) lies in the dual lattice");
            c.to_integer().mod_floor(d)
        })
        .collect())
}

/// `v^perp` with its embedding.
#[derive(Clone, Debug)]
pub struct OrthComplement {
    pub lattice: IntegralLattice,
    /// Basis vectors of the complement in coordinates of the ambient lattice.
    pub basis: Vec<LatticeVector>,
    /// The embedding is primitive (its Smith invariants are all 1).
    pub primitive: bool,
}

/// Integer kernel of `w -> <v, w>` via unimodular column reduction of the row `(G v)^T`.
pub fn orth_complement(v: &[BigInt], l: &IntegralLattice) -> Result<OrthComplement, LatticeError> {
    l.check(v)?;
    let row = l.apply(v);
    let n = l.rank();
    let mut r = row;
    let mut basis = int_identity(n);
    // Euclid on the row, mirrored on the columns of `basis`
    loop {
        let nz: Vec<usize> = (0..n).filter(|&i| !r[i].is_zero()).collect();
        if nz.len() <= 1 {
            break;
        }
        let p = *nz.iter().min_by(|&&a, &&b| r[a].abs().cmp(&r[b].abs())).unwrap();
        for &j in &nz {
            if j == p {
                continue;
            }
            let q = r[j].div_floor(&r[p]);
            let step = &q * &r[p];
            r[j] -= step;
            for i in 0..n {
                let t = &basis[(i, p)] * &q;
                basis[(i, j)] -= t;
            }
        }
    }
    let pivot = (0..n).find(|&i| !r[i].is_zero());
    let cols: Vec<usize> = (0..n).filter(|&i| Some(i) != pivot).collect();
    let vectors: Vec<LatticeVector> = cols.iter().map(|&c| (0..n).map(|i| basis[(i, c)].clone()).collect()).collect();
    let b = Matrix::from_fn(n, cols.len(), |i, j| vectors[j][i].clone());
    let gram = int_mul(&int_mul(&b.transpose(), &l.gram), &b);
    let labels = (1..=cols.len()).map(|i| format!("w{i}")).collect();
    let lattice = IntegralLattice::new(gram, labels)?;
    let primitive = smith_normal_form(&b).d.iter().all(One::is_one);
    Ok(OrthComplement { lattice, basis: vectors, primitive })
}

/// `-v^2 disc(L) / div(v)^2`; its absolute value is `disc(v^perp)` for primitive `v`
/// with `v^2 != 0`.
pub fn disc_formula(v: &[BigInt], l: &IntegralLattice) -> Result<BigInt, LatticeError> {
    l.check(v)?;
    if !content(v).is_one() {
        return Err(LatticeError::NotPrimitive);
    }
    let sq = l.square(v);
    if sq.is_zero() {
        return Err(LatticeError::Isotropic);
    }
    let div = divisibility(v, l)?;
    let num = -sq * l.disc();
    let den = &div * &div;
    if !num.is_multiple_of(&den) {
        return Err(LatticeError::NonIntegral);
    }
    Ok(num / den)
}

/// Random primitive vector with entries in `[-bound, bound]` and nonzero square.
pub fn random_primitive_vector<R: rand::Rng + ?Sized>(rng: &mut R, l: &IntegralLattice, bound: i64) -> LatticeVector {
    loop {
        let v: Vec<i64> = (0..l.rank()).map(|_| crate::random::random_int(rng, bound)).collect();
        let g = v.iter().fold(0i64, |a, b| a.gcd(b));
        if g == 0 {
            continue;
        }
        let v = int_vector(&v.iter().map(|x| x / g).collect::<Vec<_>>());
        if !l.square(&v).is_zero() {
            return v;
        }
    }
}

/// Gram matrix of the given vectors.
pub fn gram_of(l: &IntegralLattice, vectors: &[LatticeVector]) -> Matrix<BigInt> {
    let k = vectors.len();
    Matrix::from_fn(k, k, |i, j| l.product(&vectors[i], &vectors[j]))
}

/// Index of `h^perp` basis vectors.
pub mod h_perp {
    /// First hyperbolic summand.
    pub const U: usize = 0;
    pub const V: usize = 1;
    /// The two vectors of square -2.
    pub const K: usize = 20;
    pub const L: usize = 21;
    pub const RANK: usize = 22;
}

/// `M + Zk + Zl` with `M = U + U + E8(-1) + E8(-1)` and `k^2 = l^2 = -2`.
pub fn build_h_perp() -> IntegralLattice {
    let relabel = |l: IntegralLattice, names: &[&str]| IntegralLattice {
        labels: names.iter().map(|s| s.to_string()).collect(),
        ..l
    };
    let u1 = relabel(hyperbolic_u(), &["u", "v"]);
    let u2 = relabel(hyperbolic_u(), &["u2", "v2"]);
    let e_a = IntegralLattice::with_prefix(e8(-1).gram, "a").unwrap();
    let e_b = IntegralLattice::with_prefix(e8(-1).gram, "b").unwrap();
    let m = direct_sum(&direct_sum(&direct_sum(&u1, &u2), &e_a), &e_b);
    direct_sum(&direct_sum(&m, &rank1_labeled(-2, "k").unwrap()), &rank1_labeled(-2, "l").unwrap())
}

/// `β = a (u + t v) + b k + c l` in `h^perp` coordinates.
pub fn beta_vector(a: i64, b: i64, c: i64, t: i64) -> LatticeVector {
    let mut v = vec![BigInt::zero(); h_perp::RANK];
    v[h_perp::U] = BigInt::from(a);
    v[h_perp::V] = BigInt::from(a) * BigInt::from(t);
    v[h_perp::K] = BigInt::from(b);
    v[h_perp::L] = BigInt::from(c);
    v
}

/// Class of `v / div(v)` in `(h^perp)^∨ / h^perp = <k/2> + <l/2>`, as a pair mod 2.
pub fn h_perp_class(v: &[BigInt], l: &IntegralLattice) -> Result<(u8, u8), LatticeError> {
    l.check(v)?;
    if !content(v).is_one() {
        return Err(LatticeError::NotPrimitive);
    }
    let div = divisibility(v, l)?;
    let coord = |i: usize| -> u8 {
        // 2 * (v_i / div) is an integer since v / div lies in the dual lattice
        let twice = BigInt::from(2) * &v[i];
        assert!(twice.is_multiple_of(&div));
        u8::from((twice / &div).is_odd())
    };
    Ok((coord(h_perp::K), coord(h_perp::L)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub t: i64,
}

impl Witness {
    pub fn vector(&self) -> LatticeVector {
        beta_vector(self.a, self.b, self.c, self.t)
    }

    pub fn describe(&self) -> String {
        format!("{}*(u{:+}v){:+}k{:+}l", self.a, self.t, self.b, self.c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeegnerEntry {
    pub e: u64,
    pub nonempty: bool,
    pub div: Option<u64>,
    /// Signed square of the witness (negative).
    pub square: Option<i64>,
    pub class: Option<(u8, u8)>,
    pub witness: Option<Witness>,
}

impl HeegnerEntry {
    pub fn abs_square(&self) -> Option<u64> {
        self.square.map(i64::unsigned_abs)
    }
}

/// Invariants of a primitive vector of negative square in `h^perp`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BetaInvariants {
    pub square: i64,
    pub div: u64,
    pub class: (u8, u8),
    /// `disc(β^perp)`.
    pub disc: Option<i64>,
}

pub fn beta_invariants(v: &[BigInt], l: &IntegralLattice) -> Result<BetaInvariants, LatticeError> {
    let square = l.square(v).to_i64().ok_or(LatticeError::Overflow)?;
    let div = divisibility(v, l)?.to_u64().ok_or(LatticeError::Overflow)?;
    let class = h_perp_class(v, l)?;
    let disc = match disc_formula(v, l) {
        Ok(d) => Some(d.to_i64().ok_or(LatticeError::Overflow)?),
        Err(LatticeError::Isotropic) => None,
        Err(e) => return Err(e),
    };
    Ok(BetaInvariants { square, div, class, disc })
}

/// Heegner divisor of discriminant `2e`: nonempty iff some primitive `β` of negative square
/// has `disc(β^perp) = 2e`. Candidates `β = a(u + t v) + b k + c l` with `a in {1, 2}` and
/// `b, c in {0, 1}` are searched with `t` solved from the required square; the congruence
/// `e ≢ 3 (mod 4)` is necessary, so the search is complete for the existence question.
pub fn heegner_classify(e: u64, l: &IntegralLattice) -> HeegnerEntry {
    assert!(e >= 1);
    let target = 2 * e as i64;
    for a in 1..=2i64 {
        for b in 0..=1i64 {
            for c in 0..=1i64 {
                if a.gcd(&b).gcd(&c) != 1 {
                    continue;
                }
                // β^2 = 2 a^2 t - 2 b^2 - 2 c^2; disc = -β^2 * 4 / div^2 with div = gcd(a, 2)
                let div = if a % 2 == 0 { 2 } else { 1 };
                let sq = -target * div * div / 4;
                if (-target * div * div) % 4 != 0 {
                    continue;
                }
                let num = sq + 2 * b * b + 2 * c * c;
                if num % (2 * a * a) != 0 {
                    continue;
                }
                let w = Witness { a, b, c, t: num / (2 * a * a) };
                let v = w.vector();
                let Ok(inv) = beta_invariants(&v, l) else { continue };
                if inv.disc == Some(target) && inv.square < 0 {
                    return HeegnerEntry {
                        e,
                        nonempty: true,
                        div: Some(inv.div),
                        square: Some(inv.square),
                        class: Some(inv.class),
                        witness: Some(w),
                    };
                }
            }
        }
    }
    HeegnerEntry { e, nonempty: false, div: None, square: None, class: None, witness: None }
}

/// The `(div, square, class)` pattern expected for `2e` when nonempty.
pub fn expected_pattern(e: u64) -> Option<(u64, i64, (u8, u8))> {
    let e = e as i64;
    match e % 4 {
        0 => Some((1, -e / 2, (0, 0))),
        1 => Some((2, -2 * e, (1, 0))),
        2 => Some((2, -2 * e, (1, 1))),
        _ => None,
    }
}

/// Whether an entry agrees with [`expected_pattern`] (the `e ≡ 1` class up to swapping k, l).
pub fn matches_pattern(entry: &HeegnerEntry) -> bool {
    match (expected_pattern(entry.e), entry.nonempty) {
        (None, false) => true,
        (Some((div, sq, class)), true) => {
            let class_ok = entry.class == Some(class) || (entry.e % 4 == 1 && entry.class == Some((class.1, class.0)));
            entry.div == Some(div) && entry.square == Some(sq) && class_ok
        }
        _ => false,
    }
}

pub fn heegner_table(max_e: u64, l: &IntegralLattice) -> Vec<HeegnerEntry> {
    (1..=max_e).map(|e| heegner_classify(e, l)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BetaRow {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub t: i64,
    pub invariants: BetaInvariants,
    /// Positive or zero square: not a Heegner vector; recorded and flagged.
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BetaTable {
    pub rows: Vec<BetaRow>,
    pub violations: Vec<String>,
}

impl BetaTable {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Enumerates `β = a(u + t v) + b k + c l` over `|a| <= ab`, `|b|, |c| <= bc`, `|t| <= tb`
/// with `gcd(a, b, c) = 1`, checking each negative-square row against the case analysis:
/// divisibility 1 forces `e ≡ 0 (mod 4)` and class `(0,0)`; divisibility 2 forces
/// `e ≡ 1` with one odd coefficient among `b, c` or `e ≡ 2` with class `(1,1)`, and never
/// `disc ≡ 6 (mod 8)`.
pub fn beta_search(ab: i64, bc: i64, tb: i64, l: &IntegralLattice) -> BetaTable {
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for a in -ab..=ab {
        for b in -bc..=bc {
            for c in -bc..=bc {
                if a.gcd(&b).gcd(&c) != 1 {
                    continue;
                }
                for t in -tb..=tb {
                    let v = beta_vector(a, b, c, t);
                    let inv = match beta_invariants(&v, l) {
                        Ok(i) => i,
                        Err(err) => {
                            violations.push(format!("({a},{b},{c},{t}): {err}"));
                            continue;
                        }
                    };
                    let flagged = inv.square >= 0;
                    if !flagged {
                        if let Some(msg) = check_row(&inv, b, c) {
                            violations.push(format!("({a},{b},{c},{t}): {msg}"));
                        }
                    }
                    rows.push(BetaRow { a, b, c, t, invariants: inv, flagged });
                }
            }
        }
    }
    BetaTable { rows, violations }
}

fn check_row(inv: &BetaInvariants, b: i64, c: i64) -> Option<String> {
    let disc = inv.disc?;
    if disc <= 0 || disc % 2 != 0 {
        return Some(format!("discriminant {disc} is not a positive even number"));
    }
    let e = disc / 2;
    let odd = u8::from(b % 2 != 0) + u8::from(c % 2 != 0);
    match inv.div {
        1 if e % 4 == 0 && inv.class == (0, 0) => None,
        2 if disc % 8 == 6 => Some("divisibility 2 with disc ≡ 6 mod 8".into()),
        2 if e % 4 == 1 && odd == 1 && inv.class.0 + inv.class.1 == 1 => None,
        2 if e % 4 == 2 && odd == 2 && inv.class == (1, 1) => None,
        d => Some(format!("div {d}, e = {e}, class {:?} outside the case analysis", inv.class)),
    }
}

/// The rank-3 Gram matrix of the non-unimodular part of `β^perp` for `β = 2(u - v) + k + l`.
pub fn t_prime() -> [[i64; 3]; 3] {
    [[2, 0, 1], [0, -4, -2], [1, -2, -2]]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BetaPerpCheck {
    pub gram: Vec<Vec<i64>>,
    pub matches: bool,
    pub orthogonal: bool,
    /// The three vectors span the full complement of `β` in `U + <-2> + <-2>`.
    pub spans_complement: bool,
    /// `disc(β^perp)` inside the rank-22 lattice.
    pub disc_in_h_perp: i64,
}

/// Computes the Gram matrix of `(u + v, k - l, v + k)` and checks it against [`t_prime`].
pub fn beta_perp_gram_check() -> BetaPerpCheck {
    let small = IntegralLattice::from_rows(
        &[vec![0, 1, 0, 0], vec![1, 0, 0, 0], vec![0, 0, -2, 0], vec![0, 0, 0, -2]],
        &["u", "v", "k", "l"],
    )
    .unwrap();
    let beta = int_vector(&[2, -2, 1, 1]);
    let basis = [int_vector(&[1, 1, 0, 0]), int_vector(&[0, 0, 1, -1]), int_vector(&[0, 1, 1, 0])];
    let g = gram_of(&small, &basis);
    let gram: Vec<Vec<i64>> = g.rows_iter().map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect()).collect();
    let tp = t_prime();
    let matches = (0..3).all(|i| (0..3).all(|j| gram[i][j] == tp[i][j]));
    let orthogonal = basis.iter().all(|w| small.product(&beta, w).is_zero());
    let comp = orth_complement(&beta, &small).expect("anisotropic β");
    let spans_complement = orthogonal && int_det(&g).abs() == comp.lattice.disc();
    let h = build_h_perp();
    let full = orth_complement(&beta_vector(2, 1, 1, -1), &h).expect("anisotropic β");
    BetaPerpCheck {
        gram,
        matches,
        orthogonal,
        spans_complement,
        disc_in_h_perp: full.lattice.disc().to_i64().unwrap(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NoK3Transcript {
    pub gram: [[i64; 3]; 3],
    pub bound: i64,
    pub searched: u64,
    /// Nonzero `w` with `w^2 = 0` and divisibility 1 (expected empty).
    pub witnesses: Vec<[i64; 3]>,
    /// `x^2 + z^2 + xz mod 2` for `(x, z) mod 2`, excluding `(0, 0)`.
    pub residue_table: BTreeMap<String, u8>,
    /// `w^2 / 2 ≡ x^2 + z^2 + xz (mod 2)` checked on all residues of `(x, y, z)`.
    pub parity_identity: bool,
    /// `x, z` even forces every entry of `T' w` to be even.
    pub divisibility_forced: bool,
    pub residue_proof: bool,
}

impl NoK3Transcript {
    pub fn ok(&self) -> bool {
        self.witnesses.is_empty() && self.residue_proof
    }
}

/// Shows that the lattice with Gram [`t_prime`] has no primitive isotropic vector of
/// divisibility 1: an exhaustive search over `|x|, |y|, |z| <= bound`, and a complete
/// argument modulo 2.
pub fn no_k3_certificate(bound: i64) -> NoK3Transcript {
    let g = t_prime();
    let apply = |w: [i64; 3]| -> [i64; 3] {
        let mut out = [0; 3];
        for i in 0..3 {
            out[i] = (0..3).map(|j| g[i][j] * w[j]).sum();
        }
        out
    };
    let square = |w: [i64; 3]| -> i64 { apply(w).iter().zip(w).map(|(a, b)| a * b).sum() };
    let mut witnesses = Vec::new();
    let mut searched = 0u64;
    for x in -bound..=bound {
        for y in -bound..=bound {
            for z in -bound..=bound {
                if x == 0 && y == 0 && z == 0 {
                    continue;
                }
                searched += 1;
                let w = [x, y, z];
                if square(w) != 0 {
                    continue;
                }
                let d = apply(w).iter().fold(0i64, |acc, v| acc.gcd(v));
                if d == 1 {
                    witnesses.push(w);
                }
            }
        }
    }
    let mut residue_table = BTreeMap::new();
    for (x, z) in [(1i64, 0i64), (0, 1), (1, 1)] {
        residue_table.insert(format!("({x},{z})"), ((x * x + z * z + x * z) % 2) as u8);
    }
    let all_odd = residue_table.values().all(|&v| v == 1);
    // w^2 / 2 is an integer polynomial, so its parity depends only on residues mod 2
    let parity_identity = (0..2).all(|x| {
        (0..2).all(|y| (0..2).all(|z| (square([x, y, z]) / 2).rem_euclid(2) == (x * x + z * z + x * z) % 2))
    });
    // T'(2x', y, 2z') = 2 T'(x', 0, z') + y T'(0, 1, 0)
    let divisibility_forced = apply([0, 1, 0]).iter().all(|v| v % 2 == 0);
    NoK3Transcript {
        gram: g,
        bound,
        searched,
        witnesses,
        residue_table,
        parity_identity,
        divisibility_forced,
        residue_proof: all_odd && parity_identity && divisibility_forced,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorLabel {
    pub symbol: String,
    pub two_e: u64,
    pub entry: HeegnerEntry,
}

/// The three divisors with their discriminants, each checked nonempty.
pub fn divisor_image_labels(l: &IntegralLattice) -> Vec<DivisorLabel> {
    [("Δ", 10u64), ("Γ", 12), ("Σ", 8)]
        .into_iter()
        .map(|(s, two_e)| DivisorLabel { symbol: s.to_string(), two_e, entry: heegner_classify(two_e / 2, l) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors() {
        assert_eq!(hyperbolic_u().det(), BigInt::from(-1));
        assert_eq!(e8(-1).det(), BigInt::one());
        assert_eq!(e8(1).signature(), (8, 0));
        assert_eq!(e8(-1).signature(), (0, 8));
        assert!(e8(-1).is_even());
        let s = direct_sum(&hyperbolic_u(), &rank1(-4).unwrap());
        assert_eq!(s.disc(), BigInt::from(4));
        assert_eq!(rescale(&hyperbolic_u(), 3).unwrap().det(), BigInt::from(-9));
        assert_eq!(rescale(&hyperbolic_u(), 0), Err(LatticeError::ZeroScale));
        assert_eq!(rank1(0), Err(LatticeError::Degenerate));
    }

    #[test]
    fn smith_forms() {
        let m = Matrix::from_fn(3, 3, |i, j| BigInt::from([[2, 4, 4], [-6, 6, 12], [10, -4, -16]][i][j]));
        let s = smith_normal_form(&m);
        assert_eq!(s.d, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let d = int_mul(&int_mul(&s.u, &m), &s.v);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(d[(i, j)], if i == j { s.d[i].clone() } else { BigInt::zero() });
            }
        }
    }

    #[test]
    fn discriminant_groups() {
        assert!(discriminant_group(&hyperbolic_u()).is_trivial());
        let kl = direct_sum(&rank1(-2).unwrap(), &rank1(-2).unwrap());
        let g = discriminant_group(&kl);
        assert_eq!(g.invariants, vec![BigInt::from(2), BigInt::from(2)]);
        let z4 = discriminant_group(&rank1(-4).unwrap());
        assert_eq!(z4.invariants, vec![BigInt::from(4)]);
        assert_eq!(z4.order(), BigInt::from(4));
    }

    #[test]
    fn divisibilities() {
        let u = hyperbolic_u();
        assert_eq!(divisibility(&int_vector(&[1, 0]), &u).unwrap(), BigInt::one());
        let k = rank1(-2).unwrap();
        assert_eq!(divisibility(&int_vector(&[1]), &k).unwrap(), BigInt::from(2));
        assert_eq!(divisibility(&int_vector(&[0, 0]), &u), Err(LatticeError::ZeroVector));
    }

    #[test]
    fn complements() {
        let u = hyperbolic_u();
        let c = orth_complement(&int_vector(&[1, 1]), &u).unwrap();
        assert_eq!(c.lattice.gram()[(0, 0)], BigInt::from(-2));
        assert!(c.primitive);
    }

    #[test]
    fn h_perp_invariants() {
        let h = build_h_perp();
        assert_eq!(h.rank(), 22);
        assert_eq!(h.disc(), BigInt::from(4));
        assert_eq!(h.signature(), (2, 20));
        let beta = beta_vector(2, 1, 1, -1);
        let inv = beta_invariants(&beta, &h).unwrap();
        assert_eq!((inv.square, inv.div, inv.class, inv.disc), (-12, 2, (1, 1), Some(12)));
        let mut k = vec![BigInt::zero(); 22];
        k[h_perp::K] = BigInt::one();
        assert_eq!(h_perp_class(&k, &h).unwrap(), (1, 0));
        assert_eq!(h_perp_class(&beta_vector(1, 0, 0, 3), &h).unwrap(), (0, 0));
    }

    #[test]
    fn residue_proof_holds() {
        let t = no_k3_certificate(3);
        assert!(t.ok());
        let w = [0i64, 1, 0];
        let g = t_prime();
        let sq: i64 = (0..3).map(|i| (0..3).map(|j| w[i] * g[i][j] * w[j]).sum::<i64>()).sum();
        assert_eq!(sq, -4);
    }
}
