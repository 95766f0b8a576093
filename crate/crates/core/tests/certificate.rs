use epw_core::certificate::*;
use epw_core::field::q_int;
use epw_core::monomial::Monomials;
use epw_core::{Field, Fp, SymForm, PRIME_A, Q};
use proptest::prelude::*;

fn exponent(n: usize, i: usize, j: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[i] += 1;
    e[j] += 1;
    e
}

fn squares(n: usize) -> Vec<SymForm<Q>> {
    (0..n).map(|i| SymForm::from_terms(n, &[(exponent(n, i, i), q_int(1))]).unwrap()).collect()
}

#[test]
fn coordinate_squares_need_degree_n_plus_one() {
    for n in 1..=4 {
        let c = emptiness_certificate(&squares(n), 8).unwrap();
        assert_eq!(c.degree(), Some(n + 1), "n = {n}");
    }
}

#[test]
fn small_degree_bound_is_inconclusive() {
    let c = emptiness_certificate(&squares(4), 3).unwrap();
    assert!(!c.is_empty_certified());
}

#[test]
fn common_zeros_are_never_certified() {
    // a conic and a line meeting at a rational point
    let forms = vec![
        SymForm::from_terms(3, &[(exponent(3, 0, 1), q_int(1)), (exponent(3, 2, 2), q_int(-1))]).unwrap(),
        SymForm::from_terms(3, &[(exponent(3, 0, 0), q_int(1)), (exponent(3, 1, 1), q_int(-1))]).unwrap(),
    ];
    let c = emptiness_certificate(&forms, 8).unwrap();
    assert!(!c.is_empty_certified());
}

#[test]
fn monomial_indices_round_trip() {
    let m = Monomials::new(3, 2);
    assert_eq!(m.len(), 6);
    for (i, e) in m.iter().enumerate() {
        assert_eq!(m.index_of(e), Some(i));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn inverse_system_matches_macaulay(coeffs in prop::collection::vec(-3i64..=3, 30)) {
        let n = 4;
        let rows: Vec<Vec<Fp<PRIME_A>>> = coeffs
            .chunks(10)
            .map(|c| c.iter().map(|&x| <Fp<PRIME_A> as Field>::from_int(x)).collect())
            .collect();
        let h = inverse_system_hilbert(n, &rows, 5);
        for (i, &v) in h.iter().enumerate() {
            prop_assert_eq!(v, macaulay_hilbert(n, &rows, i + 2));
        }
    }
}
