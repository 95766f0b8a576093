use epw_core::lattices::*;
use epw_core::random::rng_from_seed;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[test]
fn disc_formula_matches_complement_on_h_perp() {
    let h = build_h_perp();
    let mut rng = rng_from_seed(7);
    for _ in 0..200 {
        let v = random_primitive_vector(&mut rng, &h, 3);
        let comp = orth_complement(&v, &h).unwrap();
        assert!(comp.primitive);
        assert_eq!(comp.lattice.rank(), 21);
        for w in &comp.basis {
            assert!(h.product(&v, w).is_zero());
        }
        let f = disc_formula(&v, &h).unwrap();
        assert_eq!(f.abs(), comp.lattice.disc());
        let div = divisibility(&v, &h).unwrap();
        assert_eq!(comp.lattice.det().abs() * &div * &div, (h.square(&v) * h.disc()).abs());
    }
}

#[test]
fn discriminant_group_order_is_disc() {
    let h = build_h_perp();
    let lattices = vec![
        hyperbolic_u(),
        e8(-1),
        rank1(-4).unwrap(),
        h.clone(),
        direct_sum(&rescale(&hyperbolic_u(), 3).unwrap(), &rank1(6).unwrap()),
        IntegralLattice::from_rows(&[vec![2, 0, 1], vec![0, -4, -2], vec![1, -2, -2]], &["x", "y", "z"]).unwrap(),
    ];
    for l in &lattices {
        assert_eq!(discriminant_group(l).order(), l.disc());
    }
    let g = discriminant_group(&h);
    assert_eq!(g.invariants, vec![BigInt::from(2), BigInt::from(2)]);
    assert!(g.even);
}

#[test]
fn disc_class_in_invariant_generators() {
    let kl = direct_sum(&rank1_labeled(-2, "k").unwrap(), &rank1_labeled(-2, "l").unwrap());
    let g = discriminant_group(&kl);
    let k = int_vector(&[1, 0]);
    let c = disc_class(&k, &kl, &g).unwrap();
    assert_eq!(c.iter().filter(|x| x.is_one()).count(), 1);
    assert_eq!(disc_class(&int_vector(&[2, 0]), &kl, &g), Err(LatticeError::NotPrimitive));
    let u = hyperbolic_u();
    assert!(disc_class(&int_vector(&[1, 0]), &u, &discriminant_group(&u)).unwrap().is_empty());
    let h = build_h_perp();
    assert_eq!(h_perp_class(&beta_vector(2, 1, 1, -1), &h).unwrap(), (1, 1));
}

#[test]
fn divisibility_examples() {
    let small = IntegralLattice::from_rows(
        &[vec![0, 1, 0, 0], vec![1, 0, 0, 0], vec![0, 0, -2, 0], vec![0, 0, 0, -2]],
        &["u", "v", "k", "l"],
    )
    .unwrap();
    assert_eq!(divisibility(&int_vector(&[2, -2, 1, 1]), &small).unwrap(), BigInt::from(2));
    assert_eq!(direct_sum(&hyperbolic_u(), &rank1(-4).unwrap()).disc(), BigInt::from(4));
}

#[test]
fn heegner_table_up_to_100() {
    let h = build_h_perp();
    for entry in heegner_table(100, &h) {
        assert_eq!(entry.nonempty, entry.e % 4 != 3, "e = {}", entry.e);
        assert!(matches_pattern(&entry), "e = {}: {entry:?}", entry.e);
        if let Some(w) = &entry.witness {
            let v = w.vector();
            let inv = beta_invariants(&v, &h).unwrap();
            assert_eq!(inv.disc, Some(2 * entry.e as i64));
            assert_eq!(Some(inv.square), entry.square);
        }
    }
    let e6 = heegner_classify(6, &h);
    assert_eq!(e6.witness, Some(Witness { a: 2, b: 1, c: 1, t: -1 }));
    assert_eq!((e6.div, e6.abs_square(), e6.class), (Some(2), Some(12), Some((1, 1))));
    let e4 = heegner_classify(4, &h);
    assert_eq!((e4.div, e4.square), (Some(1), Some(-2)));
    let e5 = heegner_classify(5, &h);
    assert_eq!((e5.div, e5.abs_square()), (Some(2), Some(10)));
    assert!(!heegner_classify(3, &h).nonempty);
}

#[test]
fn beta_search_full_scan() {
    let h = build_h_perp();
    let table = beta_search(4, 4, 4, &h);
    assert!(table.ok(), "{:?}", &table.violations[..table.violations.len().min(5)]);
    assert!(!table
        .rows
        .iter()
        .any(|r| r.invariants.div == 2 && r.invariants.disc.is_some_and(|d| d.rem_euclid(8) == 6)));
    let row = table.rows.iter().find(|r| (r.a, r.b, r.c, r.t) == (2, 1, 1, -1)).unwrap();
    assert_eq!(
        (row.invariants.square, row.invariants.div, row.invariants.class, row.invariants.disc),
        (-12, 2, (1, 1), Some(12))
    );
    let pos = table.rows.iter().find(|r| (r.a, r.b, r.c, r.t) == (1, 0, 0, 1)).unwrap();
    assert_eq!(pos.invariants.square, 2);
    assert!(pos.flagged);
}

#[test]
fn beta_perp_gram() {
    let c = beta_perp_gram_check();
    assert_eq!(c.gram, vec![vec![2, 0, 1], vec![0, -4, -2], vec![1, -2, -2]]);
    assert!(c.matches && c.orthogonal && c.spans_complement);
    assert_eq!(c.disc_in_h_perp, 12);
}

#[test]
fn no_k3_certificates() {
    for b in [1, 5, 20] {
        let t = no_k3_certificate(b);
        assert!(t.ok());
        assert!(t.residue_table.values().all(|&v| v == 1));
        assert_eq!(t.residue_table.len(), 3);
    }
}

#[test]
fn divisor_labels() {
    let h = build_h_perp();
    let labels = divisor_image_labels(&h);
    let got: Vec<(&str, u64)> = labels.iter().map(|l| (l.symbol.as_str(), l.two_e)).collect();
    assert_eq!(got, vec![("Δ", 10), ("Γ", 12), ("Σ", 8)]);
    assert!(labels.iter().all(|l| l.entry.nonempty));
    assert_eq!(labels[2].entry.div, Some(1));
}

#[test]
fn lattice_file_round_trip() {
    let h = build_h_perp();
    let f = h.to_file().unwrap();
    let json = serde_json::to_string(&f).unwrap();
    let back: LatticeFile = serde_json::from_str(&json).unwrap();
    assert_eq!(IntegralLattice::from_file(&back).unwrap(), h);
}
