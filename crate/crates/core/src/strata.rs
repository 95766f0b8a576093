//! Degeneracy strata `dim(A ∩ T_U) >= k` of a Lagrangian `A`.
//!
//! Over the chart of 3-planes transverse to `U_inf`, both `A` and `T_U` are graphs of
//! quadratic forms on `T_{U_0}` and the corank of `A` at `U` is the corank of
//! `q_U - q_A`. The linear part of `U -> q_U` at `U_0` is given by 2x2 cofactors of the
//! `3 x 3` matrix attached to a point of `T_{U_0}`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::certificate::{emptiness_certificate, Certificate, CertificateError, DEFAULT_MAX_DEGREE};
use crate::exterior::{
    graph_lagrangian, is_lagrangian, lagrangian_through, q_of_lagrangian, restricted_plucker_quadrics,
    t0_indices, tangent_generators, tangent_lagrangian, tinf_indices, triple_index, unit, wedge3, Chart,
    ExteriorError, DIM, DIM_V, LAGRANGIAN_DIM,
};
use crate::field::{primitive_integer_row, q_int, q_to_string, Field, Fp, ReduceMod, PRIME_A};
use crate::form::SymForm;
use crate::linalg::{Matrix, Subspace};
use crate::poly::Poly;
use crate::random::{derive_seed, random_int_matrix, random_symmetric, rng_from_seed};
use crate::{QMatrix, QSubspace, Q};

/// Largest corank allowed on a Lagrangian without decomposable vectors.
pub const MAX_CORANK: usize = 4;
/// Number of evaluation points used to interpolate the line determinant.
pub const LINE_POINTS: usize = 8;
/// Degree bound of the line determinant for the fixed frame.
pub const LINE_DEGREE_BOUND: usize = 6;
/// Default number of attempts when constructing special Lagrangians.
pub const DEFAULT_RETRIES: usize = 20;
const SHARD: usize = 2048;

type Fa = Fp<PRIME_A>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrataError {
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Certificate(#[from] CertificateError),
    #[error("subspace is not Lagrangian")]
    NotLagrangian,
    #[error("no emptiness certificate for decomposable vectors: {0:?}")]
    NotCertified(Certificate),
    #[error("subspace has dimension {0}; the restriction map needs 1..=4")]
    UnsupportedDimension(usize),
    #[error("subspace is not contained in T_{{U_0}}")]
    NotInT0,
    #[error("pencil vectors are linearly dependent")]
    DependentPencil,
    #[error("tangent frame degenerates on the pencil")]
    FrameDegenerate,
    #[error("line determinant exceeds its degree bound")]
    DegreeBoundExceeded,
    #[error("line determinant vanishes identically")]
    VanishingDeterminant,
    #[error("frame factor does not divide the line determinant")]
    FrameFactorMismatch,
    #[error("corank {corank} exceeds the bound {MAX_CORANK}")]
    CorankBoundViolated { corank: usize },
    #[error("no admissible instance after {0} attempts")]
    RetriesExhausted(usize),
}

/// A Lagrangian subspace together with a proof that it contains no decomposable vector.
#[derive(Clone, Debug)]
pub struct CertifiedLagrangian {
    space: QSubspace,
    certificate: Certificate,
    label: String,
    reduced: Matrix<Fa>,
}

impl CertifiedLagrangian {
    pub fn space(&self) -> &QSubspace {
        &self.space
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `dim(A ∩ T_U)` for `U` spanned by the rows of an integer `3 x 6` matrix, using a
    /// modular rank as a filter: full rank mod p already proves corank 0.
    pub fn corank_of_rows(&self, u: &[Vec<i64>]) -> usize {
        let gens = tangent_generators(&Matrix::<Fa>::from_int_rows(u));
        if self.reduced.vstack(&gens).rank() == DIM {
            return 0;
        }
        corank(&self.space, &Subspace::from_matrix(&Matrix::from_int_rows(u)))
    }
}

/// Certifies that `a` is Lagrangian and free of decomposable vectors.
pub fn certify(a: &QSubspace, max_degree: usize) -> Result<CertifiedLagrangian, StrataError> {
    if !is_lagrangian(a) {
        return Err(StrataError::NotLagrangian);
    }
    let certificate = decomposable_free_certificate(a, max_degree)?;
    if !certificate.is_empty_certified() {
        return Err(StrataError::NotCertified(certificate));
    }
    let rows: Vec<Vec<Fa>> = a
        .basis()
        .rows_iter()
        .map(|r| primitive_integer_row(r).iter().map(|x| Fa::new(x.reduce_mod(PRIME_A).unwrap())).collect())
        .collect();
    Ok(CertifiedLagrangian {
        space: a.clone(),
        certificate,
        label: String::from("lagrangian"),
        reduced: Matrix::from_rows(DIM, &rows),
    })
}

/// Emptiness certificate for decomposable vectors in the projectivization of `w`.
pub fn decomposable_free_certificate(w: &QSubspace, max_degree: usize) -> Result<Certificate, StrataError> {
    if w.dim() == 0 {
        return Ok(Certificate::Empty { degree: 2, route: crate::certificate::Route::Exact });
    }
    let quads = restricted_plucker_quadrics(w.basis());
    Ok(emptiness_certificate(&quads, max_degree)?)
}

/// `dim(A ∩ T_U)`.
pub fn corank(a: &QSubspace, u: &QSubspace) -> usize {
    let t = tangent_lagrangian(u).expect("3-dimensional U");
    a.intersection_dim(&t)
}

/// `q_U - q_A` on `T_{U_0}`; its corank equals `dim(A ∩ T_U)`.
pub fn psi(a: &QSubspace, u: &QSubspace, chart: &Chart<Q>) -> Result<SymForm<Q>, StrataError> {
    let tu = tangent_lagrangian(u)?;
    let qu = q_of_lagrangian(&tu, chart)?;
    let qa = q_of_lagrangian(a, chart)?;
    Ok(SymForm::new(qu.sub(&qa)).expect("difference of symmetric forms"))
}

/// Position in the `T_{U_0}` coordinate list and sign of the entry `(k, c)` of the
/// matrix attached to a point of `T_{U_0}`: row `k` indexes `U_inf`, column `c` the
/// element of `U_0` left out of the pair.
fn hom_entry(k: usize, c: usize) -> (usize, i64) {
    let pair: Vec<usize> = (0..3).filter(|&x| x != c).collect();
    let idx = triple_index([pair[0], pair[1], 3 + k]);
    let pos = t0_indices().iter().position(|&i| i == idx).unwrap();
    (pos, if k == 1 { -1 } else { 1 })
}

/// The `3 x 3` matrix attached to a vector of `T_{U_0}` (given in `T_{U_0}` coordinates);
/// the coordinate along `∧³U_0` is dropped.
pub fn hom_of_t0<T: Field>(t: &[T]) -> Matrix<T> {
    assert_eq!(t.len(), LAGRANGIAN_DIM);
    Matrix::from_fn(3, 3, |k, c| {
        let (p, s) = hom_entry(k, c);
        if s > 0 {
            t[p].clone()
        } else {
            -t[p].clone()
        }
    })
}

/// The `2 x 2` minor of `m` obtained by deleting column `i` and row `j`.
pub fn cofactor<T: Field>(m: &Matrix<T>, i: usize, j: usize) -> T {
    let rows: Vec<usize> = (0..3).filter(|&r| r != j).collect();
    let cols: Vec<usize> = (0..3).filter(|&c| c != i).collect();
    m[(rows[0], cols[0])].clone() * &m[(rows[1], cols[1])] - m[(rows[0], cols[1])].clone() * &m[(rows[1], cols[0])]
}

/// The cofactor involution: entry `(i, j)` is [`cofactor`]`(m, i, j)`.
pub fn phi_cofactor<T: Field>(m: &Matrix<T>) -> Matrix<T> {
    assert_eq!((m.nrows(), m.ncols()), (3, 3));
    Matrix::from_fn(3, 3, |i, j| cofactor(m, i, j))
}

/// The nine quadrics `x -> cofactor(x, i, j)` on `3 x 3` matrices (variables `x_{rc}` in
/// row-major order), listed by `(i, j)` row-major.
pub fn cofactor_quadrics() -> Vec<SymForm<Q>> {
    cofactor_forms(|r, c| (r * 3 + c, 1), 9)
}

/// The cofactor quadrics pulled back to `T_{U_0}` coordinates.
pub fn cofactor_quadrics_t0() -> Vec<SymForm<Q>> {
    cofactor_forms(hom_entry, LAGRANGIAN_DIM)
}

fn cofactor_forms(var: impl Fn(usize, usize) -> (usize, i64), n: usize) -> Vec<SymForm<Q>> {
    let mut out = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            let rows: Vec<usize> = (0..3).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..3).filter(|&c| c != i).collect();
            let mut m = Matrix::<Q>::zeros(n, n);
            let half = Q::new(1.into(), 2.into());
            for (a, b, sign) in [
                ((rows[0], cols[0]), (rows[1], cols[1]), 1),
                ((rows[0], cols[1]), (rows[1], cols[0]), -1),
            ] {
                let (p, sp) = var(a.0, a.1);
                let (q, sq) = var(b.0, b.1);
                let v = q_int(sign * sp * sq);
                if p == q {
                    m[(p, p)] += v;
                } else {
                    m[(p, q)] += v.clone() * &half;
                    m[(q, p)] += v * &half;
                }
            }
            out.push(SymForm::new(m).unwrap());
        }
    }
    out
}

/// Linear term in `b` of `q_U` for the graph `U = <e_i + sum_j b_ij e_{3+j}>`:
/// the polarization of `sum_ij b_ij cofactor(M, i, j)`.
pub fn theta(b: &QMatrix) -> SymForm<Q> {
    let quads = cofactor_quadrics_t0();
    let mut acc = SymForm::zero(LAGRANGIAN_DIM);
    for i in 0..3 {
        for j in 0..3 {
            if !b[(i, j)].is_zero() {
                acc = acc.add(&quads[i * 3 + j].scale(&(b[(i, j)].clone() * q_int(2))));
            }
        }
    }
    acc
}

/// Basis of a subspace of `T_{U_0}` in `T_{U_0}` coordinates (frame coordinates of the chart).
pub fn t0_coordinates(k: &QSubspace, chart: &Chart<Q>) -> Result<QMatrix, StrataError> {
    let b = chart.to_frame_coords(k.basis());
    if tinf_indices().iter().any(|&c| b.rows_iter().any(|r| !r[c].is_zero())) {
        return Err(StrataError::NotInT0);
    }
    Ok(b.select_cols(t0_indices()))
}

/// Upper-triangular coordinates `(S_00, S_01, .., S_11, ..)` of a symmetric matrix.
fn upper_coords(s: &QMatrix) -> Vec<Q> {
    let n = s.nrows();
    (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).map(|(i, j)| s[(i, j)].clone()).collect()
}

/// The restriction of the cofactor quadrics to `K`, as a linear map from the 9-dimensional
/// span of cofactors to quadratic forms on `K`.
#[derive(Clone, Debug)]
pub struct RestrictionMap {
    pub k: usize,
    /// `k(k+1)/2 x 9`; column `3i + j` holds the upper-triangular coordinates of the
    /// restricted cofactor quadric `(i, j)`.
    pub matrix: QMatrix,
    pub rank: usize,
    /// For `k = 4`: the symmetric tensor on `K^∨` annihilating the image, and its rank.
    pub annihilator: Option<(QMatrix, usize)>,
}

pub fn restriction_map(k: &QSubspace, chart: &Chart<Q>) -> Result<RestrictionMap, StrataError> {
    let dim = k.dim();
    if !(1..=4).contains(&dim) {
        return Err(StrataError::UnsupportedDimension(dim));
    }
    let kb = t0_coordinates(k, chart)?;
    let cols: Vec<Vec<Q>> = cofactor_quadrics_t0().iter().map(|q| upper_coords(q.restrict(&kb).matrix())).collect();
    let matrix = Matrix::from_rows(dim * (dim + 1) / 2, &cols).transpose();
    let rank = matrix.rank();
    let annihilator = if dim == 4 {
        let ker = matrix.left_kernel();
        if ker.nrows() == 1 {
            let w = ker.row(0);
            let mut p = Matrix::zeros(4, 4);
            let mut n = 0;
            let half = Q::new(1.into(), 2.into());
            for i in 0..4 {
                for j in i..4 {
                    if i == j {
                        p[(i, i)] = w[n].clone();
                    } else {
                        p[(i, j)] = w[n].clone() * &half;
                        p[(j, i)] = w[n].clone() * &half;
                    }
                    n += 1;
                }
            }
            let r = p.rank();
            Some((p, r))
        } else {
            None
        }
    } else {
        None
    };
    Ok(RestrictionMap { k: dim, matrix, rank, annihilator })
}

/// Outcome of comparing the first-order variation of `psi` with the cofactor map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentCheck {
    pub k: usize,
    pub directions_checked: usize,
    pub agrees: bool,
}

/// The 3-plane spanned by `f_i + eps * sum_j b_ij f_{3+j}` in the chart frame.
pub fn chart_plane(b: &QMatrix, eps: &Q, chart: &Chart<Q>) -> QSubspace {
    let f = chart.frame();
    let rows: Vec<Vec<Q>> = (0..3)
        .map(|i| {
            (0..DIM_V)
                .map(|c| {
                    let mut v = f[(i, c)].clone();
                    for j in 0..3 {
                        if !b[(i, j)].is_zero() {
                            v += eps.clone() * &b[(i, j)] * &f[(3 + j, c)];
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();
    Subspace::span(DIM_V, &rows)
}

/// For each of the nine directions `b = E_ij`, interpolates the `K`-block of
/// `psi(A, U_0 + eps b)` in `eps` and compares its linear coefficient with the
/// restriction of `theta(b)` to `K = A ∩ T_{U_0}`.
pub fn tangent_map_check(a: &QSubspace, chart: &Chart<Q>) -> Result<TangentCheck, StrataError> {
    let k = a.intersection(&chart.t0());
    let dim = k.dim();
    if dim == 0 {
        return Ok(TangentCheck { k: 0, directions_checked: 0, agrees: true });
    }
    let kb = t0_coordinates(&k, chart)?;
    let qa = q_of_lagrangian(a, chart)?;
    let npts = dim + 3;
    let eps: Vec<Q> = (0..npts).map(|e| q_int(e as i64)).collect();
    let check = q_int(npts as i64 + 7);
    let mut agrees = true;
    for i in 0..3 {
        for j in 0..3 {
            let mut b = Matrix::<Q>::zeros(3, 3);
            b[(i, j)] = Q::one();
            let block = |e: &Q| -> Result<QMatrix, StrataError> {
                let u = chart_plane(&b, e, chart);
                let qu = q_of_lagrangian(&tangent_lagrangian(&u)?, chart)?;
                Ok(kb.mul(&qu.sub(&qa)).mul(&kb.transpose()))
            };
            let samples: Vec<QMatrix> = eps.iter().map(&block).collect::<Result<_, _>>()?;
            let at_check = block(&check)?;
            let expected = theta(&b).restrict(&kb).into_matrix();
            for r in 0..dim {
                for c in 0..dim {
                    let ys: Vec<Q> = samples.iter().map(|m| m[(r, c)].clone()).collect();
                    let p = Poly::interpolate(&eps, &ys);
                    if p.eval(&check) != at_check[(r, c)] || p.coeff(1) != expected[(r, c)] || !p.coeff(0).is_zero()
                    {
                        agrees = false;
                    }
                }
            }
        }
    }
    Ok(TangentCheck { k: dim, directions_checked: 9, agrees })
}

/// A line `U(t) = <u1, u2, x + t y>` in the Grassmannian.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pencil {
    pub u1: Vec<Q>,
    pub u2: Vec<Q>,
    pub x: Vec<Q>,
    pub y: Vec<Q>,
}

impl Pencil {
    pub fn new(u1: Vec<Q>, u2: Vec<Q>, x: Vec<Q>, y: Vec<Q>) -> Result<Self, StrataError> {
        let m = Matrix::from_rows(DIM_V, &[u1.clone(), u2.clone(), x.clone(), y.clone()]);
        if m.rank() != 4 {
            return Err(StrataError::DependentPencil);
        }
        Ok(Pencil { u1, u2, x, y })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Self {
        loop {
            let m = random_int_matrix(rng, 4, DIM_V, bound);
            let v: Vec<Vec<Q>> = m.iter().map(|r| r.iter().map(|&x| q_int(x)).collect()).collect();
            if let Ok(p) = Pencil::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()) {
                return p;
            }
        }
    }

    pub fn u3(&self, t: &Q) -> Vec<Q> {
        self.x.iter().zip(&self.y).map(|(a, b)| a.clone() + t.clone() * b).collect()
    }

    pub fn plane(&self, t: &Q) -> QSubspace {
        Subspace::span(DIM_V, &[self.u1.clone(), self.u2.clone(), self.u3(t)])
    }
}

/// The fixed spanning vectors `u1^u2^e_k`, `u1^u3^e_k`, `u2^u3^e_k` chosen greedily at
/// `t = 0`; entries are `(group, k)`.
fn line_frame(p: &Pencil) -> Result<Vec<(usize, usize)>, StrataError> {
    let zero = Q::zero();
    let mut chosen = Vec::new();
    let mut span = Matrix::<Q>::zeros(0, DIM);
    for (group, need) in [(0, 4), (1, 3), (2, 3)] {
        let mut got = 0;
        for k in 0..DIM_V {
            if got == need {
                break;
            }
            let v = frame_vector(p, &zero, group, k);
            let mut trial = span.clone();
            trial.push_row(&v);
            if trial.rank() == trial.nrows() {
                span = trial;
                chosen.push((group, k));
                got += 1;
            }
        }
        if got != need {
            return Err(StrataError::FrameDegenerate);
        }
    }
    let check = frame_at(p, &chosen, &Q::one());
    if check.rank() != LAGRANGIAN_DIM {
        return Err(StrataError::FrameDegenerate);
    }
    Ok(chosen)
}

fn frame_vector(p: &Pencil, t: &Q, group: usize, k: usize) -> Vec<Q> {
    let u3 = p.u3(t);
    let e = unit::<Q>(k);
    let tv = match group {
        0 => wedge3(&p.u1, &p.u2, &e),
        1 => wedge3(&p.u1, &u3, &e),
        _ => wedge3(&p.u2, &u3, &e),
    };
    tv.into_coords()
}

fn frame_at(p: &Pencil, frame: &[(usize, usize)], t: &Q) -> QMatrix {
    let rows: Vec<Vec<Q>> = frame.iter().map(|&(g, k)| frame_vector(p, t, g, k)).collect();
    Matrix::from_rows(DIM, &rows)
}

fn line_poly(a: &QSubspace, p: &Pencil, frame: &[(usize, usize)]) -> Result<Poly<Q>, StrataError> {
    let ts: Vec<Q> = (0..LINE_POINTS).map(|t| q_int(t as i64)).collect();
    let vals: Vec<Q> = ts.iter().map(|t| a.basis().vstack(&frame_at(p, frame, t)).det()).collect();
    let poly = Poly::interpolate(&ts, &vals);
    if poly.degree().is_some_and(|d| d > LINE_DEGREE_BOUND) {
        return Err(StrataError::DegreeBoundExceeded);
    }
    Ok(poly)
}

/// `d_A(t) = det [A; frame(t)]` for any Lagrangian `A`, including ones with decomposable vectors.
pub fn line_determinant(a: &QSubspace, p: &Pencil) -> Result<Poly<Q>, StrataError> {
    if !is_lagrangian(a) {
        return Err(StrataError::NotLagrangian);
    }
    let frame = line_frame(p)?;
    line_poly(a, p, &frame)
}

#[derive(Clone, Debug)]
pub struct LineDegree {
    pub degree: usize,
    pub determinant: Poly<Q>,
    pub frame_factor: Poly<Q>,
    pub auxiliary: Vec<Poly<Q>>,
}

/// Degree of the hypersurface `{U : A ∩ T_U ≠ 0}` along a line, after removing the frame
/// factor `gcd(d_{A_1}, d_{A_2}, d_{A_3})` computed from three random Lagrangians.
pub fn line_degree<R: Rng + ?Sized>(
    a: &CertifiedLagrangian,
    p: &Pencil,
    rng: &mut R,
) -> Result<LineDegree, StrataError> {
    let frame = line_frame(p)?;
    let determinant = line_poly(a.space(), p, &frame)?;
    if determinant.is_zero() {
        return Err(StrataError::VanishingDeterminant);
    }
    let chart = Chart::standard();
    let mut auxiliary = Vec::with_capacity(3);
    while auxiliary.len() < 3 {
        let q = random_symmetric(rng, LAGRANGIAN_DIM, crate::random::DEFAULT_ENTRY_BOUND);
        let aux = graph_lagrangian(&q, &chart)?;
        let d = line_poly(&aux, p, &frame)?;
        if !d.is_zero() {
            auxiliary.push(d);
        }
    }
    let frame_factor = auxiliary[0].gcd(&auxiliary[1]).gcd(&auxiliary[2]);
    let (_, rem) = determinant.div_rem(&frame_factor);
    if !rem.is_zero() {
        return Err(StrataError::FrameFactorMismatch);
    }
    let degree = determinant.degree().unwrap() - frame_factor.degree().unwrap();
    Ok(LineDegree { degree, determinant, frame_factor, auxiliary })
}

/// Random `k`-dimensional subspace of `T_{U_0}` with small integer coordinates.
pub fn random_t0_subspace<R: Rng + ?Sized>(rng: &mut R, k: usize, bound: i64, chart: &Chart<Q>) -> QSubspace {
    let t0 = chart.t0();
    loop {
        let c = Matrix::from_int_rows(&random_int_matrix(rng, k, LAGRANGIAN_DIM, bound));
        if c.rank() == k {
            return Subspace::from_matrix(&c.mul(t0.basis()));
        }
    }
}

/// Random `k`-dimensional subspace of `T_{U_0}` with a certificate that it contains no
/// decomposable vector.
pub fn certified_t0_subspace<R: Rng + ?Sized>(
    rng: &mut R,
    k: usize,
    bound: i64,
    chart: &Chart<Q>,
    retries: usize,
) -> Result<QSubspace, StrataError> {
    for _ in 0..retries {
        let s = random_t0_subspace(rng, k, bound, chart);
        if decomposable_free_certificate(&s, DEFAULT_MAX_DEGREE)?.is_empty_certified() {
            return Ok(s);
        }
    }
    Err(StrataError::RetriesExhausted(retries))
}

/// A Lagrangian `A` with `A ∩ T_{U_0} = K` exactly and `A ∩ T_{U_inf} = 0`.
#[derive(Clone, Debug)]
pub struct ConstructedInstance {
    pub a: QSubspace,
    pub k: QSubspace,
    pub attempts: usize,
}

/// Builds `A ⊇ K` for a random certified `k`-dimensional `K ⊂ T_{U_0}`, rejecting
/// candidates whose intersection with `T_{U_0}` is larger than `K`.
pub fn construct_instance<R: Rng + ?Sized>(
    rng: &mut R,
    k: usize,
    bound: i64,
    chart: &Chart<Q>,
    retries: usize,
) -> Result<ConstructedInstance, StrataError> {
    let t0 = chart.t0();
    let tinf = chart.tinf();
    for attempt in 1..=retries {
        let ks = certified_t0_subspace(rng, k, bound, chart, retries)?;
        let a = lagrangian_through(&ks, rng, bound)?;
        if a.intersection_dim(&t0) == k && a.intersection_dim(&tinf) == 0 {
            return Ok(ConstructedInstance { a, k: ks, attempts: attempt });
        }
    }
    Err(StrataError::RetriesExhausted(retries))
}

/// A certified Lagrangian with corank exactly 4 at `U_0`.
pub fn construct_gamma<R: Rng + ?Sized>(
    rng: &mut R,
    bound: i64,
    retries: usize,
    max_degree: usize,
) -> Result<(CertifiedLagrangian, ConstructedInstance), StrataError> {
    let chart = Chart::standard();
    for _ in 0..retries {
        let inst = construct_instance(rng, 4, bound, &chart, retries)?;
        if let Ok(c) = certify(&inst.a, max_degree) {
            return Ok((c, inst));
        }
    }
    Err(StrataError::RetriesExhausted(retries))
}

/// A certified random graph Lagrangian.
pub fn random_certified<R: Rng + ?Sized>(
    rng: &mut R,
    bound: i64,
    retries: usize,
    max_degree: usize,
) -> Result<CertifiedLagrangian, StrataError> {
    let chart = Chart::standard();
    for _ in 0..retries {
        let q = random_symmetric(rng, LAGRANGIAN_DIM, bound);
        let a = graph_lagrangian(&q, &chart)?;
        if let Ok(c) = certify(&a, max_degree) {
            return Ok(c);
        }
    }
    Err(StrataError::RetriesExhausted(retries))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SamplePoint {
    pub label: String,
    /// Rows spanning `U`, as exact rationals.
    pub u: Vec<Vec<String>>,
    pub corank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumSample {
    pub seed: u64,
    pub lagrangian: String,
    pub samples: usize,
    pub corank_histogram: BTreeMap<usize, u64>,
    pub max_corank: usize,
    /// Constructed points followed by every sampled point of positive corank.
    pub special_points: Vec<SamplePoint>,
}

impl StratumSample {
    pub fn total(&self) -> u64 {
        self.corank_histogram.values().sum()
    }
}

fn matrix_strings(m: &QMatrix) -> Vec<Vec<String>> {
    m.rows_iter().map(|r| r.iter().map(q_to_string).collect()).collect()
}

/// Corank histogram over `n_samples` random 3-planes plus the given special points.
/// Work is split into fixed-size shards with derived seeds, so the result does not
/// depend on the number of threads.
pub fn stratum_sample(
    a: &CertifiedLagrangian,
    n_samples: usize,
    seed: u64,
    special: &[(String, QSubspace)],
) -> Result<StratumSample, StrataError> {
    let shards = n_samples.div_ceil(SHARD);
    let results: Vec<(BTreeMap<usize, u64>, Vec<SamplePoint>)> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = rng_from_seed(derive_seed(seed, s as u64));
            let count = SHARD.min(n_samples - s * SHARD);
            let mut hist = BTreeMap::new();
            let mut points = Vec::new();
            for i in 0..count {
                let u = loop {
                    let m = random_int_matrix(&mut rng, 3, DIM_V, crate::random::DEFAULT_ENTRY_BOUND);
                    if Matrix::<Q>::from_int_rows(&m).rank() == 3 {
                        break m;
                    }
                };
                let c = a.corank_of_rows(&u);
                *hist.entry(c).or_insert(0) += 1;
                if c > 0 {
                    points.push(SamplePoint {
                        label: format!("sample {}", s * SHARD + i),
                        u: u.iter().map(|r| r.iter().map(i64::to_string).collect()).collect(),
                        corank: c,
                    });
                }
            }
            (hist, points)
        })
        .collect();
    let mut histogram = BTreeMap::new();
    let mut special_points = Vec::new();
    for (label, u) in special {
        let c = corank(a.space(), u);
        *histogram.entry(c).or_insert(0) += 1;
        special_points.push(SamplePoint { label: label.clone(), u: matrix_strings(u.basis()), corank: c });
    }
    for (hist, points) in results {
        for (c, n) in hist {
            *histogram.entry(c).or_insert(0) += n;
        }
        special_points.extend(points);
    }
    let max_corank = histogram.keys().copied().max().unwrap_or(0);
    let out = StratumSample {
        seed,
        lagrangian: a.label().to_string(),
        samples: n_samples + special.len(),
        corank_histogram: histogram,
        max_corank,
        special_points,
    };
    if max_corank > MAX_CORANK {
        return Err(StrataError::CorankBoundViolated { corank: max_corank });
    }
    Ok(out)
}

/// [`stratum_sample`] for an arbitrary subspace: certifies it first and refuses otherwise.
pub fn stratum_sample_uncertified(
    a: &QSubspace,
    n_samples: usize,
    seed: u64,
    max_degree: usize,
) -> Result<StratumSample, StrataError> {
    let c = certify(a, max_degree)?;
    stratum_sample(&c, n_samples, seed, &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_full_rank, rng_from_seed};

    fn std_chart() -> Chart<Q> {
        Chart::standard()
    }

    #[test]
    fn corank_extremes() {
        let c = std_chart();
        assert_eq!(corank(&c.tinf(), c.uinf()), 10);
        assert_eq!(corank(&c.tinf(), c.u0()), 0);
    }

    #[test]
    fn psi_agrees_with_corank() {
        let c = std_chart();
        let mut rng = rng_from_seed(21);
        let q = random_symmetric(&mut rng, 10, 5);
        let a = graph_lagrangian(&q, &c).unwrap();
        assert_eq!(psi(&a, c.u0(), &c).unwrap().into_matrix(), q.scale(&q_int(-1)));
        let u = Subspace::from_matrix(&Matrix::from_int_rows(&[
            vec![1, 0, 0, 2, 1, 0],
            vec![0, 1, 0, -1, 0, 3],
            vec![0, 0, 1, 0, 1, 1],
        ]));
        let tu = tangent_lagrangian(&u).unwrap();
        assert!(psi(&tu, &u, &c).unwrap().is_zero());
        assert_eq!(psi(&a, &u, &c).unwrap().corank(), corank(&a, &u));
    }

    #[test]
    fn cofactor_basics() {
        let id = Matrix::<Q>::identity(3);
        assert_eq!(phi_cofactor(&id), id);
        let ones = Matrix::<Q>::from_int_rows(&[vec![1, 1, 1], vec![1, 1, 1], vec![1, 1, 1]]);
        assert!(phi_cofactor(&ones).is_zero());
        let quads = cofactor_quadrics();
        let span = Subspace::span(45, &quads.iter().map(SymForm::monomial_coefficients).collect::<Vec<_>>());
        assert_eq!(span.dim(), 9);
        let x = [q_int(2), q_int(-1), q_int(3)];
        let y = [q_int(1), q_int(4), q_int(-2)];
        let r1: Vec<Q> = (0..9).map(|n| x[n / 3].clone() * &y[n % 3]).collect();
        assert!(quads.iter().all(|q| q.eval(&r1).is_zero()));
        let m = Matrix::<Q>::from_int_rows(&[vec![2, 1, 0], vec![-1, 3, 4], vec![5, 0, 1]]);
        let flat: Vec<Q> = m.rows_iter().flatten().cloned().collect();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(quads[i * 3 + j].eval(&flat), cofactor(&m, i, j));
            }
        }
    }

    #[test]
    fn theta_matches_first_order_variation() {
        let c = std_chart();
        let mut rng = rng_from_seed(8);
        let inst = construct_instance(&mut rng, 2, 10, &c, 10).unwrap();
        let check = tangent_map_check(&inst.a, &c).unwrap();
        assert_eq!(check.k, 2);
        assert!(check.agrees);
    }

    #[test]
    fn restriction_ranks_small() {
        let c = std_chart();
        let mut rng = rng_from_seed(9);
        for (k, r) in [(1, 1), (2, 3)] {
            let ks = certified_t0_subspace(&mut rng, k, 10, &c, 10).unwrap();
            assert_eq!(restriction_map(&ks, &c).unwrap().rank, r);
        }
        assert!(matches!(
            restriction_map(&random_t0_subspace(&mut rng, 5, 10, &c), &c),
            Err(StrataError::UnsupportedDimension(5))
        ));
        let outside = Subspace::span(DIM, &[unit_tri(19)]);
        assert_eq!(restriction_map(&outside, &c).unwrap_err(), StrataError::NotInT0);
    }

    fn unit_tri(i: usize) -> Vec<Q> {
        (0..DIM).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()
    }

    #[test]
    fn general_chart_tangent_check() {
        let mut rng = rng_from_seed(31);
        let f = random_full_rank(&mut rng, 6, 6, 2);
        let chart = Chart::new(
            Subspace::from_matrix(&f.select_rows(&[0, 1, 2])),
            Subspace::from_matrix(&f.select_rows(&[3, 4, 5])),
        )
        .unwrap();
        let inst = construct_instance(&mut rng, 2, 10, &chart, 10).unwrap();
        assert!(tangent_map_check(&inst.a, &chart).unwrap().agrees);
    }

    #[test]
    fn line_determinant_vanishes_at_self_intersection() {
        let c = std_chart();
        let p = Pencil::new(unit(0), unit(1), unit(2), unit(3)).unwrap();
        let d = line_determinant(&c.t0(), &p).unwrap();
        assert!(d.eval(&Q::zero()).is_zero());
        assert!(Pencil::new(unit(0), unit(0), unit(2), unit(3)).is_err());
    }
}
