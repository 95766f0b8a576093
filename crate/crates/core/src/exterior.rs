//! Symplectic exterior algebra on the 20-dimensional space of trivectors in six variables.
//!
//! Basis vectors `e_I` are indexed by 3-subsets `I` of `{0..5}` in lexicographic order.
//! The pairing is `omega(e_I, e_J) = sign(I, J)` when `I` and `J` are complementary.

use std::sync::OnceLock;

use num_traits::Zero;
use rand::Rng;
use thiserror::Error;

use crate::field::{q_int, Field};
use crate::form::SymForm;
use crate::linalg::{dot, Matrix, Subspace};
use crate::random::random_symmetric;
use crate::Q;

pub const DIM_V: usize = 6;
pub const DIM: usize = 20;
pub const LAGRANGIAN_DIM: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExteriorError {
    #[error("expected a subspace of dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("expected ambient dimension {expected}, got {got}")]
    WrongAmbient { expected: usize, got: usize },
    #[error("subspace is not isotropic for the wedge pairing")]
    NotIsotropic,
    #[error("form is not symmetric")]
    NotSymmetric,
    #[error("the two subspaces of the chart are not complementary")]
    NotComplementary,
    #[error("the Lagrangian meets the tangent space at infinity")]
    OutsideChart,
    #[error("zero trivector")]
    ZeroVector,
}

/// The 20 lexicographically ordered 3-subsets of `{0..5}`.
pub fn triples() -> &'static [[usize; 3]; DIM] {
    static T: OnceLock<[[usize; 3]; DIM]> = OnceLock::new();
    T.get_or_init(|| {
        let mut out = [[0; 3]; DIM];
        let mut n = 0;
        for a in 0..DIM_V {
            for b in a + 1..DIM_V {
                for c in b + 1..DIM_V {
                    out[n] = [a, b, c];
                    n += 1;
                }
            }
        }
        out
    })
}

/// Position of the sorted triple `{a, b, c}` in [`triples`].
pub fn triple_index(mut t: [usize; 3]) -> usize {
    t.sort_unstable();
    triples().iter().position(|x| *x == t).expect("distinct indices below 6")
}

fn complement(t: &[usize; 3]) -> [usize; 3] {
    let mut out = [0; 3];
    let mut n = 0;
    for i in 0..DIM_V {
        if !t.contains(&i) {
            out[n] = i;
            n += 1;
        }
    }
    out
}

/// Sign of the permutation sorting `seq`, or 0 if an entry repeats.
pub fn permutation_sign(seq: &[usize]) -> i64 {
    let mut sign = 1;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] == seq[j] {
                return 0;
            }
            if seq[i] > seq[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// `(index of I^c, sign(I, I^c))` for each basis index `I`.
fn dual_table() -> &'static [(usize, i64); DIM] {
    static D: OnceLock<[(usize, i64); DIM]> = OnceLock::new();
    D.get_or_init(|| {
        let mut out = [(0, 0); DIM];
        for (i, t) in triples().iter().enumerate() {
            let c = complement(t);
            let seq = [t[0], t[1], t[2], c[0], c[1], c[2]];
            out[i] = (triple_index(c), permutation_sign(&seq));
        }
        out
    })
}

/// Element of the third exterior power, as 20 coordinates in the lexicographic basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TriVector<T> {
    coords: Vec<T>,
}

impl<T: Field> TriVector<T> {
    pub fn new(coords: Vec<T>) -> Self {
        assert_eq!(coords.len(), DIM, "a trivector has 20 coordinates");
        TriVector { coords }
    }

    pub fn zero() -> Self {
        TriVector { coords: vec![T::zero(); DIM] }
    }

    pub fn basis(i: usize) -> Self {
        let mut v = Self::zero();
        v.coords[i] = T::one();
        v
    }

    /// `e_a ^ e_b ^ e_c` for 0-based indices.
    pub fn basis_wedge(a: usize, b: usize, c: usize) -> Self {
        wedge3(&unit(a), &unit(b), &unit(c))
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(T::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        TriVector { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() + b).collect() }
    }

    pub fn scale(&self, s: &T) -> Self {
        TriVector { coords: self.coords.iter().map(|a| a.clone() * s).collect() }
    }
}

pub fn unit<T: Field>(i: usize) -> Vec<T> {
    (0..DIM_V).map(|j| if i == j { T::one() } else { T::zero() }).collect()
}

/// `v1 ^ v2 ^ v3`: coordinate `I` is the 3x3 minor on the columns `I`.
pub fn wedge3<T: Field>(v1: &[T], v2: &[T], v3: &[T]) -> TriVector<T> {
    assert!(v1.len() == DIM_V && v2.len() == DIM_V && v3.len() == DIM_V);
    let coords = triples()
        .iter()
        .map(|&[a, b, c]| {
            let m = |i: usize, j: usize| -> T { v1[i].clone() * &v2[j] };
            let t1 = (m(a, b) - m(b, a)) * &v3[c];
            let t2 = (m(c, a) - m(a, c)) * &v3[b];
            let t3 = (m(b, c) - m(c, b)) * &v3[a];
            t1 + t2 + t3
        })
        .collect();
    TriVector { coords }
}

/// `omega(a, b)`: the coefficient of `e_0 ^ ... ^ e_5` in `a ^ b`.
pub fn symplectic_pairing<T: Field>(a: &[T], b: &[T]) -> T {
    assert!(a.len() == DIM && b.len() == DIM);
    let mut acc = T::zero();
    for (i, &(j, s)) in dual_table().iter().enumerate() {
        if a[i].is_zero() || b[j].is_zero() {
            continue;
        }
        let p = a[i].clone() * &b[j];
        if s > 0 {
            acc += p;
        } else {
            acc -= p;
        }
    }
    acc
}

pub fn pairing<T: Field>(a: &TriVector<T>, b: &TriVector<T>) -> T {
    symplectic_pairing(&a.coords, &b.coords)
}

/// Gram matrix of the pairing on the standard basis.
pub fn pairing_gram<T: Field>() -> Matrix<T> {
    let mut m = Matrix::zeros(DIM, DIM);
    for (i, &(j, s)) in dual_table().iter().enumerate() {
        m[(i, j)] = T::from_int(s);
    }
    m
}

/// `omega(a, -)` as a vector of coefficients against the standard coordinates.
fn pairing_row<T: Field>(a: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); DIM];
    for (i, &(j, s)) in dual_table().iter().enumerate() {
        if !a[i].is_zero() {
            out[j] = if s > 0 { a[i].clone() } else { -a[i].clone() };
        }
    }
    out
}

/// Spanning set `u_i ^ u_j ^ e_k` of `T_U` from a list of three vectors.
pub fn tangent_generators<T: Field>(u: &Matrix<T>) -> Matrix<T> {
    assert_eq!(u.nrows(), 3);
    assert_eq!(u.ncols(), DIM_V);
    let mut gens = Matrix::zeros(0, DIM);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        for k in 0..DIM_V {
            gens.push_row(wedge3(u.row(i), u.row(j), &unit(k)).coords());
        }
    }
    gens
}

/// `T_U`, the span of `u_i ^ u_j ^ v` for a basis `u_1, u_2, u_3` of `U` and all `v`.
pub fn tangent_lagrangian<T: Field>(u: &Subspace<T>) -> Result<Subspace<T>, ExteriorError> {
    if u.ambient_dim() != DIM_V {
        return Err(ExteriorError::WrongAmbient { expected: DIM_V, got: u.ambient_dim() });
    }
    if u.dim() != 3 {
        return Err(ExteriorError::WrongDimension { expected: 3, got: u.dim() });
    }
    // basis: u1^u2^u3 and u_i^u_j^e_c for the non-pivot columns c of the echelon basis
    let b = u.basis();
    let pivots: Vec<usize> = (0..3).map(|r| (0..DIM_V).find(|&c| !b[(r, c)].is_zero()).unwrap()).collect();
    let mut gens = Matrix::zeros(0, DIM);
    gens.push_row(wedge3(b.row(0), b.row(1), b.row(2)).coords());
    for c in (0..DIM_V).filter(|c| !pivots.contains(c)) {
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            gens.push_row(wedge3(b.row(i), b.row(j), &unit(c)).coords());
        }
    }
    Ok(Subspace::from_matrix(&gens))
}

/// Whether the pairing vanishes on all pairs of rows of `basis`.
pub fn is_isotropic<T: Field>(basis: &Matrix<T>) -> bool {
    let rows: Vec<Vec<T>> = basis.rows_iter().map(pairing_row).collect();
    (0..basis.nrows()).all(|i| (i + 1..basis.nrows()).all(|j| dot(&rows[i], basis.row(j)).is_zero()))
}

pub fn is_lagrangian<T: Field>(a: &Subspace<T>) -> bool {
    a.ambient_dim() == DIM && a.dim() == LAGRANGIAN_DIM && is_isotropic(a.basis())
}

pub fn intersection_dim<T: Field>(a: &Subspace<T>, b: &Subspace<T>) -> usize {
    a.intersection_dim(b)
}

/// Symplectic complement `{x : omega(x, k) = 0 for all k in K}`.
pub fn symplectic_complement<T: Field>(k: &Subspace<T>) -> Subspace<T> {
    if k.dim() == 0 {
        return Subspace::full(DIM);
    }
    let rows: Vec<Vec<T>> = k.basis().rows_iter().map(pairing_row).collect();
    Subspace::from_matrix(&Matrix::from_rows(DIM, &rows).kernel())
}

/// Matrix of the induced action on trivectors of the linear map with matrix `g`
/// acting on row vectors: entry `(I, J)` is the minor of `g` on rows `I`, columns `J`.
pub fn wedge3_matrix<T: Field>(g: &Matrix<T>) -> Matrix<T> {
    assert_eq!((g.nrows(), g.ncols()), (DIM_V, DIM_V));
    let t = triples();
    Matrix::from_fn(DIM, DIM, |r, c| {
        let rows = t[r];
        let cols = t[c];
        Matrix::from_fn(3, 3, |i, j| g[(rows[i], cols[j])].clone()).det()
    })
}

/// Indices of the coordinates of `T_{U_0}` for the standard splitting
/// (3-subsets meeting `{0,1,2}` in at least two elements).
pub fn t0_indices() -> &'static [usize; LAGRANGIAN_DIM] {
    static I: OnceLock<[usize; LAGRANGIAN_DIM]> = OnceLock::new();
    I.get_or_init(|| {
        let v: Vec<usize> =
            (0..DIM).filter(|&i| triples()[i].iter().filter(|&&x| x < 3).count() >= 2).collect();
        v.try_into().unwrap()
    })
}

/// Indices of the coordinates of `T_{U_inf}` for the standard splitting.
pub fn tinf_indices() -> &'static [usize; LAGRANGIAN_DIM] {
    static I: OnceLock<[usize; LAGRANGIAN_DIM]> = OnceLock::new();
    I.get_or_init(|| {
        let v: Vec<usize> =
            (0..DIM).filter(|&i| triples()[i].iter().filter(|&&x| x < 3).count() <= 1).collect();
        v.try_into().unwrap()
    })
}

/// A splitting `V = U_0 + U_inf` together with a frame adapted to it.
///
/// Graphs and quadratic forms are computed in frame coordinates, where the splitting
/// becomes the standard one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart<T> {
    u0: Subspace<T>,
    uinf: Subspace<T>,
    frame: Matrix<T>,
    to_frame: Option<(Matrix<T>, Matrix<T>)>,
}

impl<T: Field> Chart<T> {
    /// `U_0 = <e_1, e_2, e_3>`, `U_inf = <e_4, e_5, e_6>`.
    pub fn standard() -> Self {
        Chart {
            u0: Subspace::coordinate(DIM_V, &[0, 1, 2]),
            uinf: Subspace::coordinate(DIM_V, &[3, 4, 5]),
            frame: Matrix::identity(DIM_V),
            to_frame: None,
        }
    }

    pub fn new(u0: Subspace<T>, uinf: Subspace<T>) -> Result<Self, ExteriorError> {
        for s in [&u0, &uinf] {
            if s.ambient_dim() != DIM_V {
                return Err(ExteriorError::WrongAmbient { expected: DIM_V, got: s.ambient_dim() });
            }
            if s.dim() != 3 {
                return Err(ExteriorError::WrongDimension { expected: 3, got: s.dim() });
            }
        }
        let frame = u0.basis().vstack(uinf.basis());
        let Some(inv) = frame.inverse() else {
            return Err(ExteriorError::NotComplementary);
        };
        if frame == Matrix::identity(DIM_V) {
            return Ok(Self::standard());
        }
        let to_frame = (wedge3_matrix(&inv), wedge3_matrix(&frame));
        Ok(Chart { u0, uinf, frame, to_frame: Some(to_frame) })
    }

    pub fn u0(&self) -> &Subspace<T> {
        &self.u0
    }

    pub fn uinf(&self) -> &Subspace<T> {
        &self.uinf
    }

    /// Rows: basis of `U_0` followed by basis of `U_inf`.
    pub fn frame(&self) -> &Matrix<T> {
        &self.frame
    }

    pub fn is_standard(&self) -> bool {
        self.to_frame.is_none()
    }

    /// Standard trivector coordinates to frame coordinates.
    pub fn to_frame_coords(&self, basis: &Matrix<T>) -> Matrix<T> {
        match &self.to_frame {
            None => basis.clone(),
            Some((fwd, _)) => basis.mul(fwd),
        }
    }

    /// Frame coordinates back to standard trivector coordinates.
    pub fn from_frame_coords(&self, basis: &Matrix<T>) -> Matrix<T> {
        match &self.to_frame {
            None => basis.clone(),
            Some((_, back)) => basis.mul(back),
        }
    }

    pub fn t0(&self) -> Subspace<T> {
        tangent_lagrangian(&self.u0).expect("chart subspaces have dimension 3")
    }

    pub fn tinf(&self) -> Subspace<T> {
        tangent_lagrangian(&self.uinf).expect("chart subspaces have dimension 3")
    }
}

/// The graph Lagrangian `{t + phi_q(t)}` over `T_{U_0}`, where `phi_q` sends the `i`-th
/// basis vector `b_i` of `T_{U_0}` to `sum_j q_ij c_j` and `c_j` is the basis of `T_{U_inf}`
/// with `omega(c_j, b_k) = delta_jk`.
pub fn graph_lagrangian<T: Field>(q: &Matrix<T>, chart: &Chart<T>) -> Result<Subspace<T>, ExteriorError> {
    if q.nrows() != LAGRANGIAN_DIM || q.ncols() != LAGRANGIAN_DIM {
        return Err(ExteriorError::WrongDimension { expected: LAGRANGIAN_DIM, got: q.nrows() });
    }
    if !q.is_symmetric() {
        return Err(ExteriorError::NotSymmetric);
    }
    let t0 = t0_indices();
    let dual = dual_table();
    let mut rows = Matrix::zeros(LAGRANGIAN_DIM, DIM);
    for i in 0..LAGRANGIAN_DIM {
        rows[(i, t0[i])] = T::one();
        for (j, &bj) in t0.iter().enumerate() {
            let (cj, s) = dual[bj];
            // c_j = sign(J^c, J) e_{J^c} = sign(J, J^c) e_{J^c} since |J| = 3 is odd
            let v = q[(i, j)].clone();
            rows[(i, cj)] = if s > 0 { -v } else { v };
        }
    }
    Ok(Subspace::from_matrix(&chart.from_frame_coords(&rows)))
}

/// The unique symmetric `q` with `graph_lagrangian(q, chart) = a`.
pub fn q_of_lagrangian<T: Field>(a: &Subspace<T>, chart: &Chart<T>) -> Result<Matrix<T>, ExteriorError> {
    if a.ambient_dim() != DIM {
        return Err(ExteriorError::WrongAmbient { expected: DIM, got: a.ambient_dim() });
    }
    if a.dim() != LAGRANGIAN_DIM {
        return Err(ExteriorError::WrongDimension { expected: LAGRANGIAN_DIM, got: a.dim() });
    }
    let b = chart.to_frame_coords(a.basis());
    let t0 = t0_indices();
    let p = b.select_cols(t0);
    let pinv = p.inverse().ok_or(ExteriorError::OutsideChart)?;
    let r = pinv.mul(&b);
    let dual = dual_table();
    Ok(Matrix::from_fn(LAGRANGIAN_DIM, LAGRANGIAN_DIM, |i, j| {
        let (cj, s) = dual[t0[j]];
        let v = r[(i, cj)].clone();
        if s > 0 {
            -v
        } else {
            v
        }
    }))
}

/// A Lagrangian containing the isotropic subspace `k`: a random graph Lagrangian in the
/// symplectic reduction `K^perp / K`, lifted and added to `K`.
pub fn lagrangian_through<R: Rng + ?Sized>(
    k: &Subspace<Q>,
    rng: &mut R,
    bound: i64,
) -> Result<Subspace<Q>, ExteriorError> {
    if k.ambient_dim() != DIM {
        return Err(ExteriorError::WrongAmbient { expected: DIM, got: k.ambient_dim() });
    }
    if !is_isotropic(k.basis()) {
        return Err(ExteriorError::NotIsotropic);
    }
    if k.dim() == LAGRANGIAN_DIM {
        return Ok(k.clone());
    }
    let perp = symplectic_complement(k);
    // random complement of K inside K^perp
    let target = DIM - 2 * k.dim();
    let mut span = k.basis().clone();
    let mut comp: Vec<Vec<Q>> = Vec::with_capacity(target);
    while comp.len() < target {
        let coeffs: Vec<Q> = (0..perp.dim()).map(|_| q_int(rng.gen_range(-bound..=bound))).collect();
        let v = perp.basis().left_apply(&coeffs);
        let mut trial = span.clone();
        trial.push_row(&v);
        if trial.rank() == trial.nrows() {
            span = trial;
            comp.push(v);
        }
    }
    let (ps, qs) = symplectic_basis(comp);
    let m = ps.len();
    let s = random_symmetric(rng, m, bound);
    let mut rows = k.basis().clone();
    for i in 0..m {
        let mut v = ps[i].clone();
        for j in 0..m {
            if !s[(i, j)].is_zero() {
                for (x, y) in v.iter_mut().zip(&qs[j]) {
                    *x += s[(i, j)].clone() * y;
                }
            }
        }
        rows.push_row(&v);
    }
    Ok(Subspace::from_matrix(&rows))
}

/// Symplectic Gram-Schmidt: pairs `(p_i, q_i)` with `omega(p_i, q_j) = delta_ij` and all
/// other pairings zero. The input must span a symplectic subspace.
fn symplectic_basis(mut vs: Vec<Vec<Q>>) -> (Vec<Vec<Q>>, Vec<Vec<Q>>) {
    let mut ps = Vec::new();
    let mut qs = Vec::new();
    while let Some(p) = vs.pop() {
        let pos = vs
            .iter()
            .position(|w| !symplectic_pairing(&p, w).is_zero())
            .expect("symplectic subspace");
        let w = vs.swap_remove(pos);
        let s = symplectic_pairing(&p, &w).inv();
        let q: Vec<Q> = w.iter().map(|x| x * &s).collect();
        for x in vs.iter_mut() {
            let a = symplectic_pairing(x, &q);
            let b = symplectic_pairing(x, &p);
            for ((xi, pi), qi) in x.iter_mut().zip(&p).zip(&q) {
                *xi = xi.clone() - a.clone() * pi + b.clone() * qi;
            }
        }
        ps.push(p);
        qs.push(q);
    }
    (ps, qs)
}

/// `iota_{e_a^* ^ e_b^*}` applied to `e_I` then wedged: table of
/// `(pair index, 4-subset, I, J, sign)` contributions of `(iota t) ^ t`.
fn contraction_terms() -> &'static Vec<(usize, usize, usize, usize, i64)> {
    static C: OnceLock<Vec<(usize, usize, usize, usize, i64)>> = OnceLock::new();
    C.get_or_init(|| {
        let pairs: Vec<(usize, usize)> = (0..DIM_V).flat_map(|a| (a + 1..DIM_V).map(move |b| (a, b))).collect();
        let quads: Vec<[usize; 4]> = (0..DIM_V)
            .flat_map(|a| {
                (a + 1..DIM_V).flat_map(move |b| {
                    (b + 1..DIM_V).flat_map(move |c| (c + 1..DIM_V).map(move |d| [a, b, c, d]))
                })
            })
            .collect();
        let mut out = Vec::new();
        for (pi, &(a, b)) in pairs.iter().enumerate() {
            for (i, t) in triples().iter().enumerate() {
                // contract e_a then e_b out of e_I, tracking the sign
                if !t.contains(&a) || !t.contains(&b) {
                    continue;
                }
                let rest = t.iter().copied().find(|&x| x != a && x != b).unwrap();
                // e_I = sign * e_a ^ e_b ^ e_rest
                let sign_i = permutation_sign(&[t[0], t[1], t[2]].map(|x| {
                    if x == a {
                        0
                    } else if x == b {
                        1
                    } else {
                        2
                    }
                }));
                for (j, u) in triples().iter().enumerate() {
                    if u.contains(&rest) {
                        continue;
                    }
                    let seq = [rest, u[0], u[1], u[2]];
                    let mut sorted = seq;
                    sorted.sort_unstable();
                    let li = quads.iter().position(|q| *q == sorted).unwrap();
                    out.push((pi, li, i, j, sign_i * permutation_sign(&seq)));
                }
            }
        }
        out
    })
}

/// The 225 quadrics `t -> ((iota_xi t) ^ t)_L` for `xi` in a basis of the dual of the
/// second exterior power and `L` a 4-subset, as symmetric matrices.
pub fn contraction_quadrics<T: Field>() -> Vec<SymForm<T>> {
    let mut mats = vec![Matrix::<T>::zeros(DIM, DIM); 15 * 15];
    let half = T::from_int(2).inv();
    for &(pi, li, i, j, s) in contraction_terms() {
        let m = &mut mats[pi * 15 + li];
        let v = T::from_int(s) * &half;
        m[(i, j)] += v.clone();
        m[(j, i)] += v;
    }
    mats.into_iter().map(|m| SymForm::new(m).expect("symmetrized")).collect()
}

/// Whether a nonzero trivector is decomposable, by the contraction criterion.
pub fn decomposable_witness<T: Field>(t: &TriVector<T>) -> Result<bool, ExteriorError> {
    if t.is_zero() {
        return Err(ExteriorError::ZeroVector);
    }
    let mut vals = vec![T::zero(); 15 * 15];
    let c = t.coords();
    for &(pi, li, i, j, s) in contraction_terms() {
        if c[i].is_zero() || c[j].is_zero() {
            continue;
        }
        let p = c[i].clone() * &c[j];
        if s > 0 {
            vals[pi * 15 + li] += p;
        } else {
            vals[pi * 15 + li] -= p;
        }
    }
    Ok(vals.iter().all(T::is_zero))
}

/// A basis (35 forms, in echelon order on monomial coefficients) of the quadrics in the
/// ideal of the Grassmannian of 3-planes.
pub fn plucker_quadrics() -> &'static Vec<SymForm<Q>> {
    static P: OnceLock<Vec<SymForm<Q>>> = OnceLock::new();
    P.get_or_init(|| {
        let all = contraction_quadrics::<Q>();
        let rows: Vec<Vec<Q>> = all.iter().map(SymForm::monomial_coefficients).collect();
        let span = Subspace::from_matrix(&Matrix::from_rows(DIM * (DIM + 1) / 2, &rows));
        span.basis().rows_iter().map(|r| SymForm::from_monomial_coefficients(DIM, r)).collect()
    })
}

/// Plucker quadrics pulled back to the row space of `basis`.
pub fn restricted_plucker_quadrics(basis: &Matrix<Q>) -> Vec<SymForm<Q>> {
    plucker_quadrics().iter().map(|q| q.restrict(basis)).collect()
}
