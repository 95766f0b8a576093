use epw_core::double_cover::*;
use epw_core::field::q_int;
use epw_core::random::{random_vector, rng_from_seed};
use epw_core::{Matrix, QMatrix, Q};
use num_traits::Zero;

fn minors3(s: &QMatrix) -> Vec<Q> {
    let n = s.nrows();
    let mut out = Vec::new();
    let subsets: Vec<[usize; 3]> = (0..n)
        .flat_map(|a| (a + 1..n).flat_map(move |b| (b + 1..n).map(move |c| [a, b, c])))
        .collect();
    for r in &subsets {
        for c in &subsets {
            let m = |i: usize, j: usize| s[(r[i], c[j])].clone();
            let det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
            out.push(det);
        }
    }
    out
}

#[test]
fn images_have_vanishing_minors() {
    let mut rng = rng_from_seed(1);
    for n in [3, 4, 5] {
        for _ in 0..40 {
            let x = random_vector(&mut rng, n, 6);
            let y = random_vector(&mut rng, n, 6);
            let s = g2(&outer(&x, &y)).unwrap();
            assert!(minors3(s.matrix()).iter().all(Zero::is_zero));
        }
    }
}

#[test]
fn generic_jacobian_rank() {
    let mut rng = rng_from_seed(2);
    for _ in 0..20 {
        let x = random_vector(&mut rng, 4, 6);
        let y = random_vector(&mut rng, 4, 6);
        if epw_core::Subspace::span(4, &[x.clone(), y.clone()]).dim() == 2 {
            assert_eq!(jacobian_rank_g2(&x, &y).unwrap(), 7);
            assert_eq!(jacobian_rank_at(&outer(&x, &y)).unwrap(), 7);
        }
    }
}

#[test]
fn coordinate_ring_dimensions() {
    for n in 1..=3 {
        for j in 0..=3 {
            let c = verify_coord_ring(n, j).unwrap();
            assert!(c.ok, "n = {n}, j = {j}: {c:?}");
            assert_eq!((c.plus, c.minus), graded_dims(n, j));
        }
    }
}

#[test]
fn trace_pullback_is_the_incidence_form() {
    let tr = hyperplane_pullback(&Matrix::<Q>::identity(4));
    assert_eq!(proportionality(&tr, &Matrix::identity(4)), Some(q_int(2)));
    let mut rng = rng_from_seed(3);
    for _ in 0..20 {
        let (x, y) = random_incidence_pair(&mut rng, 4, 5);
        let s = g2(&outer(&x, &y)).unwrap();
        assert!(hyperplane_value(&Matrix::identity(4), s.matrix()).is_zero());
    }
}

#[test]
fn flop_graphs_are_hypercubes() {
    for r in 0..=6 {
        let g = flop_graph(r);
        assert_eq!(g.vertices.len(), 1 << r);
        assert_eq!(g.edges.len(), r * (1usize << r) / 2);
        assert!(g.is_connected());
        assert!(g.is_regular());
        assert!(g.vertices.iter().all(|&v| g.degree(v) == r));
    }
}
