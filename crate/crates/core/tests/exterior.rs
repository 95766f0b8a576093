use epw_core::exterior::*;
use epw_core::field::q_int;
use epw_core::random::{random_full_rank, random_symmetric, rng_from_seed};
use epw_core::{Matrix, QMatrix, QSubspace, Subspace, Q};
use num_traits::Zero;
use proptest::prelude::*;

fn plane(rows: &[i64]) -> Option<QSubspace> {
    let m = QMatrix::from_int_rows(&rows.chunks(6).map(<[i64]>::to_vec).collect::<Vec<_>>());
    (m.rank() == 3).then(|| Subspace::from_matrix(&m))
}

fn random_chart(seed: u64) -> Chart<Q> {
    let mut rng = rng_from_seed(seed);
    let f = random_full_rank(&mut rng, 6, 6, 3);
    Chart::new(
        Subspace::from_matrix(&f.select_rows(&[0, 1, 2])),
        Subspace::from_matrix(&f.select_rows(&[3, 4, 5])),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tangent_spaces_are_lagrangian(rows in prop::collection::vec(-4i64..=4, 18)) {
        if let Some(u) = plane(&rows) {
            let t = tangent_lagrangian(&u).unwrap();
            prop_assert_eq!(t.dim(), LAGRANGIAN_DIM);
            prop_assert!(is_lagrangian(&t));
            prop_assert_eq!(&t, &Subspace::from_matrix(&tangent_generators(u.basis())));
            let top = wedge3(u.basis().row(0), u.basis().row(1), u.basis().row(2));
            prop_assert!(t.contains(top.coords()));
        }
    }

    #[test]
    fn wedges_are_decomposable(rows in prop::collection::vec(-4i64..=4, 18)) {
        let v: Vec<Vec<Q>> = rows.chunks(6).map(|c| c.iter().map(|&x| q_int(x)).collect()).collect();
        let w = wedge3(&v[0], &v[1], &v[2]);
        prop_assume!(!w.is_zero());
        prop_assert!(decomposable_witness(&w).unwrap());
        for q in plucker_quadrics() {
            prop_assert!(q.eval(w.coords()).is_zero());
        }
    }

    #[test]
    fn wedge_is_alternating(rows in prop::collection::vec(-4i64..=4, 18)) {
        let v: Vec<Vec<Q>> = rows.chunks(6).map(|c| c.iter().map(|&x| q_int(x)).collect()).collect();
        let a = wedge3(&v[0], &v[1], &v[2]);
        let b = wedge3(&v[1], &v[0], &v[2]);
        prop_assert_eq!(a.add(&b), TriVector::zero());
        prop_assert!(wedge3(&v[0], &v[0], &v[2]).is_zero());
    }
}

#[test]
fn pairing_is_nondegenerate_and_alternating() {
    let g: QMatrix = pairing_gram();
    assert_eq!(g.rank(), DIM);
    assert_eq!(g.transpose(), g.scale(&q_int(-1)));
    assert!(is_lagrangian(&Chart::<Q>::standard().t0()));
    assert!(is_lagrangian(&Chart::<Q>::standard().tinf()));
}

#[test]
fn pairing_matches_wedge_in_the_top_power() {
    let e = |i: usize| -> Vec<Q> { unit(i) };
    let a = wedge3(&e(0), &e(1), &e(2));
    let b = wedge3(&e(3), &e(4), &e(5));
    assert_eq!(pairing(&a, &b), q_int(1));
    assert_eq!(pairing(&b, &a), q_int(-1));
    assert!(pairing(&a, &a).is_zero());
}

#[test]
fn classic_decomposability_examples() {
    let e = |i: usize| -> Vec<Q> { unit(i) };
    let sum = wedge3(&e(0), &e(1), &e(2)).add(&wedge3(&e(3), &e(4), &e(5)));
    assert!(!decomposable_witness(&sum).unwrap());
    assert!(plucker_quadrics().iter().any(|q| !q.eval(sum.coords()).is_zero()));
    assert_eq!(plucker_quadrics().len(), 35);
}

#[test]
fn graph_round_trip_on_general_charts() {
    for seed in 0..4 {
        let chart = random_chart(seed);
        let mut rng = rng_from_seed(100 + seed);
        let q = random_symmetric(&mut rng, LAGRANGIAN_DIM, 5);
        let a = graph_lagrangian(&q, &chart).unwrap();
        assert!(is_lagrangian(&a));
        assert_eq!(intersection_dim(&a, &chart.tinf()), 0);
        assert_eq!(q_of_lagrangian(&a, &chart).unwrap(), q);
    }
}

#[test]
fn graph_rejects_non_symmetric() {
    let mut q = Matrix::<Q>::zeros(LAGRANGIAN_DIM, LAGRANGIAN_DIM);
    q[(0, 1)] = q_int(1);
    assert!(graph_lagrangian(&q, &Chart::standard()).is_err());
    let t0 = Chart::<Q>::standard().tinf();
    assert!(q_of_lagrangian(&t0, &Chart::standard()).is_err());
}

#[test]
fn lagrangians_through_isotropic_subspaces() {
    let mut rng = rng_from_seed(5);
    let chart = Chart::<Q>::standard();
    let t0 = chart.t0();
    let k = Subspace::from_matrix(&random_full_rank(&mut rng, 3, LAGRANGIAN_DIM, 4).mul(t0.basis()));
    let a = lagrangian_through(&k, &mut rng, 5).unwrap();
    assert!(is_lagrangian(&a));
    assert!(a.contains_subspace(&k));
    assert_eq!(symplectic_complement(&a), a);
}

#[test]
fn frame_coordinates_invert() {
    let chart = random_chart(9);
    let mut rng = rng_from_seed(10);
    let m = random_full_rank(&mut rng, 4, DIM, 5);
    assert_eq!(chart.from_frame_coords(&chart.to_frame_coords(&m)), m);
    let g = random_full_rank(&mut rng, 6, 6, 3);
    let h = g.inverse().unwrap();
    assert_eq!(wedge3_matrix(&g).mul(&wedge3_matrix(&h)), Matrix::identity(DIM));
}

#[test]
fn index_tables() {
    assert_eq!(triples().len(), 20);
    for (i, t) in triples().iter().enumerate() {
        assert_eq!(triple_index(*t), i);
    }
    assert_eq!(permutation_sign(&[1, 0, 2]), -1);
    let mut all: Vec<usize> = t0_indices().iter().chain(tinf_indices()).copied().collect();
    all.sort();
    assert_eq!(all, (0..DIM).collect::<Vec<_>>());
}
