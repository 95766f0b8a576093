use epw_core::certificate::Certificate;
use epw_core::exterior::*;
use epw_core::random::{random_full_rank, random_matrix, rng_from_seed};
use epw_core::strata::*;
use epw_core::{Matrix, QMatrix, Subspace, Q};
use num_traits::Zero;

/// Cofactor expansion along the first row, independent of elimination.
fn det3(m: &QMatrix) -> Q {
    let mut acc = Q::zero();
    for c in 0..3 {
        let minor = cofactor(m, c, 0);
        let s = if c % 2 == 0 { m[(0, c)].clone() } else { -m[(0, c)].clone() };
        acc += s * minor;
    }
    acc
}

#[test]
fn cofactor_involution_identities() {
    let mut rng = rng_from_seed(1);
    for _ in 0..200 {
        let m = random_matrix(&mut rng, 3, 3, 9);
        let det = m.det();
        assert_eq!(det3(&m), det);
        assert_eq!(phi_cofactor(&phi_cofactor(&m)), m.scale(&det));
    }
    for r in [1usize, 2] {
        for _ in 0..50 {
            let m = random_full_rank(&mut rng, r, 3, 9).transpose().mul(&random_full_rank(&mut rng, r, 3, 9));
            assert_eq!(phi_cofactor(&m).rank(), r - 1);
        }
    }
}

#[test]
fn certification_rejects_tangent_spaces() {
    let u = Subspace::from_matrix(&Matrix::from_int_rows(&[
        vec![1, 0, 0, 1, 0, 0],
        vec![0, 1, 0, 0, 1, 0],
        vec![0, 0, 1, 0, 0, 1],
    ]));
    let t = tangent_lagrangian(&u).unwrap();
    assert!(matches!(certify(&t, 4), Err(StrataError::NotCertified(Certificate::Inconclusive { .. }))));
}

#[test]
fn restriction_ranks_per_dimension() {
    let chart = Chart::standard();
    let mut rng = rng_from_seed(2);
    for (k, rank) in [(1, 1), (2, 3), (3, 6), (4, 9)] {
        for _ in 0..3 {
            let inst = construct_instance(&mut rng, k, 10, &chart, 10).unwrap();
            let r = restriction_map(&inst.k, &chart).unwrap();
            assert_eq!(r.rank, rank);
            assert_eq!(corank(&inst.a, chart.u0()), k);
            if k == 4 {
                assert_eq!(r.annihilator.as_ref().map(|a| a.1), Some(4));
            }
        }
    }
}

#[test]
fn quartic_along_lines() {
    let mut rng = rng_from_seed(3);
    for _ in 0..3 {
        let a = random_certified(&mut rng, 10, 10, 6).unwrap();
        let p = Pencil::random(&mut rng, 10);
        let ld = line_degree(&a, &p, &mut rng).unwrap();
        assert_eq!(ld.degree, 4);
        assert_eq!(ld.auxiliary.len(), 3);
        for aux in &ld.auxiliary {
            assert!(aux.div_rem(&ld.frame_factor).1.is_zero());
        }
    }
}

#[test]
fn line_determinant_detects_intersections() {
    let mut rng = rng_from_seed(4);
    let a = random_certified(&mut rng, 10, 10, 6).unwrap();
    let p = Pencil::random(&mut rng, 10);
    let d = line_determinant(a.space(), &p).unwrap();
    for t in 0..4 {
        let t = Q::from_integer(t.into());
        let meets = corank(a.space(), &p.plane(&t)) > 0;
        assert_eq!(d.eval(&t).is_zero(), meets);
    }
}

#[test]
fn sampling_is_deterministic_and_bounded() {
    let mut rng = rng_from_seed(5);
    let (g, inst) = construct_gamma(&mut rng, 10, 10, 6).unwrap();
    let special = [("U0".to_string(), Chart::<Q>::standard().u0().clone())];
    let s1 = stratum_sample(&g, 3000, 11, &special).unwrap();
    let s2 = stratum_sample(&g, 3000, 11, &special).unwrap();
    assert_eq!(s1, s2);
    assert_eq!(s1.total(), 3001);
    assert_eq!(s1.max_corank, 4);
    assert_eq!(s1.special_points[0].corank, 4);
    assert_eq!(corank(&inst.a, Chart::<Q>::standard().u0()), 4);
}

#[test]
fn psi_kernel_is_corank() {
    let chart = Chart::standard();
    let mut rng = rng_from_seed(6);
    let inst = construct_instance(&mut rng, 3, 10, &chart, 10).unwrap();
    let form = psi(&inst.a, chart.u0(), &chart).unwrap();
    assert_eq!(form.corank(), 3);
}

#[test]
fn tangent_identity_for_each_corank() {
    let chart = Chart::standard();
    let mut rng = rng_from_seed(7);
    for k in [2, 3] {
        let inst = construct_instance(&mut rng, k, 10, &chart, 10).unwrap();
        let check = tangent_map_check(&inst.a, &chart).unwrap();
        assert_eq!(check.k, k);
        assert!(check.agrees);
    }
}

#[test]
fn theta_is_symmetric_in_the_hom_coordinates() {
    let mut rng = rng_from_seed(8);
    let b = random_matrix(&mut rng, 3, 3, 5);
    let form = theta(&b);
    assert_eq!(form.dim(), LAGRANGIAN_DIM);
    assert!(form.matrix().is_symmetric());
    let t0 = t0_coordinates(&Chart::<Q>::standard().t0(), &Chart::standard()).unwrap();
    assert_eq!(t0.rank(), LAGRANGIAN_DIM);
    let m = hom_of_t0(t0.row(0));
    assert_eq!((m.nrows(), m.ncols()), (3, 3));
}
