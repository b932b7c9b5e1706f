use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use wittcob::arith::{hilbert_symbol, int, p_adic_split, rat, square_class, Place, Rational};
use wittcob::forms::{
    diagonalize, invariants, metabolic_reduce, radical_split, replay, symplectic_reduce, BilinearForm,
    BlockMetabolicForm, Symmetry,
};
use wittcob::linalg::{congruent, Matrix};
use wittcob::witt::{equivalent, fp_class_of, hasse_equivalent, psi, witt_class_of, FpPayload, WittClassFp, WittClassQ};
use wittcob::Error;

fn b(n: i64) -> BigInt {
    BigInt::from(n)
}

fn sym(rows: &[&[i64]]) -> BilinearForm {
    BilinearForm::from_int_rows(Symmetry::Symmetric, rows).unwrap()
}

/// Whether a x^2 + b y^2 = z^2 has a primitive solution mod p^k.
fn solvable_mod(a: i64, b: i64, p: i64, k: u32) -> bool {
    let m = p.pow(k);
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                if x % p == 0 && y % p == 0 && z % p == 0 {
                    continue;
                }
                if (a * x * x + b * y * y - z * z).rem_euclid(m) == 0 {
                    return true;
                }
            }
        }
    }
    false
}

#[test]
fn square_class_examples() {
    assert_eq!(square_class(&rat(1, 2)).unwrap().representative(), &b(2));
    assert_eq!(square_class(&int(-2)).unwrap().representative(), &b(-2));
    assert_eq!(square_class(&int(18)).unwrap().representative(), &b(2));
    assert_eq!(square_class(&int(0)), Err(Error::ZeroSquareClass));
}

#[test]
fn p_adic_split_examples() {
    let d = p_adic_split(&int(-2), &b(2)).unwrap();
    assert_eq!((d.valuation, d.unit_residue, d.unit), (1, b(1), int(-1)));
    let d = p_adic_split(&int(-2), &b(3)).unwrap();
    assert_eq!((d.valuation, d.unit_residue), (0, b(1)));
    let d = p_adic_split(&rat(9, 4), &b(3)).unwrap();
    assert_eq!((d.valuation, d.unit_residue), (2, b(1)));
    assert!(p_adic_split(&int(5), &b(9)).is_err());
}

#[test]
fn hilbert_symbols_against_local_search() {
    assert_eq!(hilbert_symbol(&int(1), &int(7), &Place::Real).unwrap(), 1);
    assert_eq!(hilbert_symbol(&int(1), &int(-7), &Place::prime(5)).unwrap(), 1);
    assert_eq!(hilbert_symbol(&int(2), &int(2), &Place::prime(2)).unwrap(), 1);
    assert!(solvable_mod(2, 2, 2, 4));
    assert_eq!(hilbert_symbol(&int(3), &int(3), &Place::prime(3)).unwrap(), -1);
    assert!(!solvable_mod(3, 3, 3, 3));
    assert_eq!(hilbert_symbol(&int(-1), &int(-1), &Place::Real).unwrap(), -1);
}

#[test]
fn diagonalization_examples() {
    let d = diagonalize(&sym(&[&[5]])).unwrap();
    assert_eq!(d.entries, vec![int(5)]);
    for f in [sym(&[&[0, 1], &[1, 0]]), sym(&[&[1, 2], &[2, 1]])] {
        let d = diagonalize(&f).unwrap();
        assert_eq!(congruent(f.gram(), &d.congruence), Matrix::diagonal(&d.entries));
    }
    assert_eq!(diagonalize(&sym(&[&[1, 2], &[2, 1]])).unwrap().entries, vec![int(1), int(-3)]);
    let skew = BilinearForm::from_int_rows(Symmetry::Skew, &[&[0, 1], &[-1, 0]]).unwrap();
    assert!(diagonalize(&skew).is_err());
}

#[test]
fn invariants_examples() {
    let inv = invariants(&BilinearForm::diagonal_ints(&[1, 1])).unwrap();
    assert_eq!((inv.rank, inv.signature, inv.discriminant.representative().clone()), (2, (2, 0), b(1)));
    assert!(inv.hasse.is_empty());
    let inv = invariants(&BilinearForm::diagonal_ints(&[-2])).unwrap();
    assert_eq!((inv.signature, inv.discriminant.representative().clone()), ((0, 1), b(-2)));
    let inv = invariants(&BilinearForm::diagonal_ints(&[3, 3])).unwrap();
    assert_eq!(inv.discriminant.representative(), &b(1));
    assert_eq!(inv.hasse_at(&Place::prime(3)), -1);
    assert_eq!(invariants(&sym(&[&[1, 0], &[0, 0]])), Err(Error::Degenerate));
}

#[test]
fn radical_and_symplectic_examples() {
    let r = radical_split(&sym(&[&[0, 0], &[0, 0]]));
    assert_eq!((r.nondegenerate.dim(), r.radical_dim), (0, 2));
    let r = radical_split(&sym(&[&[1, 1], &[1, 1]]));
    assert_eq!((r.nondegenerate.gram().clone(), r.radical_dim), (Matrix::diagonal(&[int(1)]), 1));
    for rows in [[[0, 1], [-1, 0]], [[0, 2], [-2, 0]]] {
        let f = BilinearForm::from_int_rows(Symmetry::Skew, &[&rows[0], &rows[1]]).unwrap();
        let red = symplectic_reduce(&f).unwrap();
        assert_eq!(red.hyperbolic_count, 1);
        assert_eq!(congruent(f.gram(), &red.congruence), BilinearForm::standard_symplectic(1).gram().clone());
    }
}

#[test]
fn metabolic_examples() {
    let one = BilinearForm::diagonal_ints(&[1]);
    let m = BlockMetabolicForm::new(one.clone(), Matrix::zeros(1, 1), Matrix::zeros(1, 1)).unwrap();
    let red = metabolic_reduce(&m).unwrap();
    assert_eq!((red.core.clone(), red.hyperbolic_count), (one.clone(), 1));
    let m = BlockMetabolicForm::new(one.clone(), Matrix::diagonal(&[int(4)]), Matrix::diagonal(&[int(2)])).unwrap();
    let red = metabolic_reduce(&m).unwrap();
    assert_eq!((red.core.clone(), red.hyperbolic_count), (one.clone(), 1));
    assert!(replay(&m, &red));
    let stab = one.direct_sum(&BilinearForm::hyperbolic(1)).unwrap();
    assert_eq!(invariants(&m.assemble()).unwrap(), invariants(&stab).unwrap());
    assert!(BlockMetabolicForm::new(one, Matrix::zeros(2, 2), Matrix::zeros(1, 1)).is_err());
}

#[test]
fn finite_field_classes() {
    let c = fp_class_of(&[b(1)], &b(3)).unwrap();
    assert_eq!((c.payload(), c.order()), (FpPayload::Z4 { value: 1 }, 4));
    // x^2 + y^2 is isotropic over F_5, hence hyperbolic
    assert!((1..5).any(|y: i64| (1 + y * y) % 5 == 0));
    assert!(fp_class_of(&[b(1), b(1)], &b(5)).unwrap().is_zero());
    let c = fp_class_of(&[b(1), b(1)], &b(3)).unwrap();
    assert_eq!(c.payload(), FpPayload::Z4 { value: 2 });
    assert_eq!(fp_class_of(&[b(1)], &b(2)), Err(Error::UseRankParity));
    assert!(fp_class_of(&[b(3)], &b(3)).is_err());
}

#[test]
fn residue_examples() {
    let f = BilinearForm::diagonal_ints(&[-2]);
    assert!(!psi(&f, &b(2), 1).unwrap().is_zero());
    assert_eq!(psi(&f, &b(3), 0).unwrap(), WittClassFp::one(&b(3)).unwrap());
    for p in [3, 5, 7, 11] {
        assert!(psi(&BilinearForm::diagonal_ints(&[p]), &b(p), 0).unwrap().is_zero());
    }
}

#[test]
fn rational_class_examples() {
    assert!(witt_class_of(&BilinearForm::hyperbolic(1)).unwrap().is_zero());
    let c = witt_class_of(&BilinearForm::diagonal_ints(&[-2])).unwrap();
    assert_eq!(c.signature(), -1);
    assert!(!c.residue(&b(2)).unwrap().is_zero());
    let c = witt_class_of(&BilinearForm::diagonal_ints(&[1, 1])).unwrap();
    assert_eq!(c.signature(), 2);
    assert!(c.residues().is_empty());
    assert!(equivalent(&BilinearForm::hyperbolic(1), &BilinearForm::diagonal_ints(&[1, -1])).unwrap());
    assert!(!equivalent(&BilinearForm::diagonal_ints(&[1]), &BilinearForm::diagonal_ints(&[3])).unwrap());
}

#[test]
fn json_round_trips() {
    let f = BilinearForm::diagonal(&[rat(3, 4), int(-2)]);
    let s = serde_json::to_string(&f).unwrap();
    assert_eq!(serde_json::from_str::<BilinearForm>(&s).unwrap(), f);
    let c = witt_class_of(&f).unwrap();
    let s = serde_json::to_string(&c).unwrap();
    assert_eq!(serde_json::from_str::<WittClassQ>(&s).unwrap(), c);
    let parsed: BilinearForm = serde_json::from_str(r#"{"symmetry":"symmetric","gram":[[1,"1/2"],["1/2",3]]}"#).unwrap();
    assert_eq!(parsed.gram()[(0, 1)], rat(1, 2));
    assert!(serde_json::from_str::<BilinearForm>(r#"{"symmetry":"symmetric","gram":[[1,2],[3,4]]}"#).is_err());
}

fn arb_entries(max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec((1i64..40).prop_flat_map(|n| prop_oneof![Just(n), Just(-n)]), 1..=max_len)
}

fn arb_unimodular(n: usize) -> impl Strategy<Value = Matrix<Rational>> {
    prop::collection::vec((0..n, 0..n, -3i64..=3), 0..3 * n).prop_map(move |ops| {
        let mut m = Matrix::identity(n);
        for (a, c, f) in ops {
            if a != c {
                for k in 0..n {
                    let x = &m[(k, c)] * int(f);
                    m[(k, a)] = &m[(k, a)] + &x;
                }
            }
        }
        m
    })
}

fn form_and_congruence() -> impl Strategy<Value = (Vec<i64>, Matrix<Rational>)> {
    arb_entries(5).prop_flat_map(|e| {
        let n = e.len();
        (Just(e), arb_unimodular(n))
    })
}

/// Signature from leading principal minors: sign changes in 1, D_1, ..., D_n
/// count the negative eigenvalues when no minor vanishes.
fn minors_signature(g: &Matrix<Rational>) -> Option<i64> {
    let minors = g.leading_minors();
    if minors.iter().any(Zero::is_zero) {
        return None;
    }
    let mut prev = Rational::one();
    let mut neg = 0i64;
    for m in &minors {
        if (&prev * m) < Rational::zero() {
            neg += 1;
        }
        prev = m.clone();
    }
    Some(g.rows() as i64 - 2 * neg)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn class_is_congruence_invariant((e, p) in form_and_congruence()) {
        let f = BilinearForm::diagonal_ints(&e);
        let g = f.congruent(&p);
        prop_assert_eq!(witt_class_of(&f).unwrap(), witt_class_of(&g).unwrap());
        prop_assert_eq!(invariants(&f).unwrap(), invariants(&g).unwrap());
        if let Some(sig) = minors_signature(g.gram()) {
            prop_assert_eq!(witt_class_of(&g).unwrap().signature(), sig);
        }
    }

    #[test]
    fn class_is_additive(a in arb_entries(4), c in arb_entries(4)) {
        let f = BilinearForm::diagonal_ints(&a);
        let g = BilinearForm::diagonal_ints(&c);
        let sum = witt_class_of(&f.direct_sum(&g).unwrap()).unwrap();
        prop_assert_eq!(sum, witt_class_of(&f).unwrap().add(&witt_class_of(&g).unwrap()));
        prop_assert!(witt_class_of(&f.direct_sum(&f.neg()).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn two_equality_tests_agree(a in arb_entries(6), c in arb_entries(6)) {
        let f = BilinearForm::diagonal_ints(&a);
        let g = BilinearForm::diagonal_ints(&c);
        let by_class = witt_class_of(&f).unwrap() == witt_class_of(&g).unwrap();
        prop_assert_eq!(by_class, hasse_equivalent(&f, &g).unwrap());
    }

    #[test]
    fn hilbert_product_formula(x in -200i64..200, y in -200i64..200) {
        prop_assume!(x != 0 && y != 0);
        let (a, c) = (int(x), int(y));
        let mut product = hilbert_symbol(&a, &c, &Place::Real).unwrap();
        for p in (2u64..=200).filter(|&n| (2..n).all(|d| n % d != 0)) {
            product *= hilbert_symbol(&a, &c, &Place::prime(p)).unwrap();
        }
        prop_assert_eq!(product, 1);
    }
}
