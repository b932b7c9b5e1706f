use proptest::prelude::*;
use wittcob::arith::{int, Rational};
use wittcob::cobordism::CobordismClass;
use wittcob::forms::{signature, BilinearForm, Symmetry};
use wittcob::gen;
use wittcob::genus::{
    bundled_surfaces, chi_y, double_point_example, epsilon, example_drivers, lefschetz_cancellation_check,
    sign_dictionary_check, specialize, HodgeDiamond, PrimitivePiece,
};
use wittcob::hodge::{
    compare_polarizations, compare_polarizations_with, fixtures, gaussian, is_polarization, pol_class, weil_operator,
    Gaussian, HodgePiece, HodgeStructure,
};
use wittcob::linalg::Matrix;
use wittcob::poly::Poly;

fn g(re: i64, im: i64) -> Gaussian {
    gaussian(int(re), int(im))
}

fn piece(p: i32, q: i32, cols: &[&[(i64, i64)]]) -> HodgePiece {
    let n = cols[0].len();
    HodgePiece { p, q, basis: Matrix::from_fn(n, cols.len(), |i, j| g(cols[j][i].0, cols[j][i].1)) }
}

fn elliptic() -> HodgeStructure {
    HodgeStructure::new(1, 2, vec![piece(1, 0, &[&[(1, 0), (0, 1)]]), piece(0, 1, &[&[(1, 0), (0, -1)]])]).unwrap()
}

fn weight_two() -> HodgeStructure {
    HodgeStructure::new(
        2,
        3,
        vec![
            piece(2, 0, &[&[(1, 0), (0, 1), (0, 0)]]),
            piece(1, 1, &[&[(0, 0), (0, 0), (1, 0)]]),
            piece(0, 2, &[&[(1, 0), (0, -1), (0, 0)]]),
        ],
    )
    .unwrap()
}

fn ints(rows: &[&[i64]]) -> Matrix<Rational> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
}

#[test]
fn weil_operator_examples() {
    let h = HodgeStructure::pure_middle(0, 3).unwrap();
    assert_eq!(weil_operator(&h).unwrap(), Matrix::identity(3));
    let c = weil_operator(&elliptic()).unwrap();
    assert_eq!(c, ints(&[&[0, 1], &[-1, 0]]));
    assert_eq!(&c * &c, Matrix::identity(2).scale(&int(-1)));
    assert_eq!(weil_operator(&weight_two()).unwrap(), Matrix::diagonal(&[int(-1), int(-1), int(1)]));
}

#[test]
fn polarization_examples() {
    let h0 = HodgeStructure::pure_middle(0, 1).unwrap();
    assert!(is_polarization(&h0, &BilinearForm::diagonal_ints(&[1])).unwrap().is_polarization);
    let h0_2 = HodgeStructure::pure_middle(0, 2).unwrap();
    assert!(!is_polarization(&h0_2, &BilinearForm::diagonal_ints(&[1, -1])).unwrap().is_polarization);

    let good = BilinearForm::skew(ints(&[&[0, -1], &[1, 0]])).unwrap();
    let r = is_polarization(&elliptic(), &good).unwrap();
    assert!(r.is_polarization, "{:?}", r.checks);
    assert_eq!(r.s_c, Matrix::identity(2));
    let bad = BilinearForm::skew(ints(&[&[0, 1], &[-1, 0]])).unwrap();
    let r = is_polarization(&elliptic(), &bad).unwrap();
    assert!(!r.is_polarization);
    assert_eq!(r.s_c, Matrix::identity(2).scale(&int(-1)));
}

#[test]
fn comparison_examples() {
    let h = HodgeStructure::pure_middle(0, 1).unwrap();
    let cmp = compare_polarizations_with(&h, &BilinearForm::diagonal_ints(&[1]), &BilinearForm::diagonal_ints(&[3]), true)
        .unwrap();
    assert_eq!(cmp.phi, Matrix::diagonal(&[int(3)]));
    assert_eq!(cmp.eigenspaces.as_ref().map(|e| e[0].eigenvalue.clone()), Some(int(3)));
    assert!(cmp.signatures_equal && cmp.holds);
    assert_eq!(cmp.rational_classes_equal, Some(false));

    let h = HodgeStructure::pure_middle(0, 2).unwrap();
    let s2 = BilinearForm::symmetric(ints(&[&[2, 1], &[1, 3]])).unwrap();
    let cmp = compare_polarizations(&h, &BilinearForm::diagonal_ints(&[1, 1]), &s2).unwrap();
    assert_eq!(cmp.phi, ints(&[&[2, 1], &[1, 3]]));
    assert_eq!(cmp.charpoly, Poly::from_ints(&[5, -5, 1]));
    assert!(cmp.sturm.all_real && cmp.sturm.all_positive && cmp.sturm.squarefree);
    assert_eq!(cmp.sturm.positive_roots, 2);
    assert!(cmp.eigenspaces.is_none());
    assert!(cmp.holds);

    let s = BilinearForm::skew(ints(&[&[0, -1], &[1, 0]])).unwrap();
    let cmp = compare_polarizations(&elliptic(), &s, &s.scale(&int(2))).unwrap();
    assert_eq!(cmp.phi, Matrix::identity(2).scale(&int(2)));
    assert!(cmp.semisimple && !cmp.sturm.squarefree && cmp.holds);

    let indefinite = BilinearForm::diagonal_ints(&[1, -1]);
    assert!(compare_polarizations(&h, &indefinite, &indefinite).is_err());
}

#[test]
fn pol_class_examples() {
    let h = HodgeStructure::pure_middle(0, 1).unwrap();
    match pol_class(&h, &BilinearForm::diagonal_ints(&[1])).unwrap() {
        CobordismClass::Symmetric { class } => assert_eq!(class.signature(), 1),
        other => panic!("{other:?}"),
    }
    let s = BilinearForm::diagonal_ints(&[-1, -1, 1]);
    assert!(is_polarization(&weight_two(), &s).unwrap().is_polarization);
    match pol_class(&weight_two(), &s).unwrap() {
        CobordismClass::Symmetric { class } => assert_eq!(class.signature(), 1),
        other => panic!("{other:?}"),
    }
    let skew = BilinearForm::skew(ints(&[&[0, -1], &[1, 0]])).unwrap();
    assert!(pol_class(&elliptic(), &skew).unwrap().is_zero());
    assert_eq!(epsilon(2), -1);
}

#[test]
fn hodge_json_round_trip() {
    let text = r#"{"weight": 1, "pieces": [
        {"p": 1, "q": 0, "basis": [[[1, 0], [0, 1]]]},
        {"p": 0, "q": 1, "basis": [[[1, 0], [0, -1]]]}
    ]}"#;
    let h: HodgeStructure = serde_json::from_str(text).unwrap();
    assert_eq!(h, elliptic());
    let s = serde_json::to_string(&h).unwrap();
    assert_eq!(serde_json::from_str::<HodgeStructure>(&s).unwrap(), h);
}

#[test]
fn chi_y_examples() {
    for (d, poly, values) in [
        (HodgeDiamond::point(), "1", (1, 1, 1)),
        (HodgeDiamond::projective_space(2), "1 - y + y^2", (3, 1, 1)),
        (HodgeDiamond::k3(), "2 - 20y + 2y^2", (24, 2, -16)),
    ] {
        let chi = chi_y(&d);
        assert_eq!(chi.to_string(), poly);
        let s = specialize(&chi, d.dim());
        assert_eq!((s.euler, s.arithmetic_genus, s.signature), values);
        assert!(s.even_dimension);
    }
    assert!(HodgeDiamond::new(1, vec![vec![1, 2], vec![1, 1]]).is_err());
    let d: HodgeDiamond = serde_json::from_str(r#"{"dim": 1, "h": [[1, 3], [3, 1]]}"#).unwrap();
    assert_eq!(specialize(&chi_y(&d), 1).euler, -4);
}

#[test]
fn sign_calculus_examples() {
    assert_eq!([0, 1, 2, 3, 4].map(epsilon), [1, -1, -1, 1, 1]);
    let one = |j, sig| PrimitivePiece { j, weight: 3 - j as i32, signature: sig };
    let r = lefschetz_cancellation_check(&[one(0, 4)], 3).unwrap();
    assert!(r.equal);
    assert_eq!(r.lhs_signature, epsilon(3) as i64 * 4);
    let r = lefschetz_cancellation_check(&[one(1, 7)], 3).unwrap();
    assert_eq!((r.lhs_signature, r.rhs_signature, r.equal), (0, 0, true));
    assert!(lefschetz_cancellation_check(&[one(1, 1), one(1, 2)], 3).is_err());

    let d = sign_dictionary_check(3, 1);
    assert_eq!((d.lhs, d.rhs, d.holds), (5, 5, true));
    assert!(sign_dictionary_check(7, 7).holds);
}

#[test]
fn example_driver_reports() {
    let r = double_point_example().unwrap();
    assert!(r.verdict && r.nonzero_by_residue_at_2 && r.nonzero_by_residue_at_3);
    assert_eq!(r.first_residue_at_3_order, 2);

    let table = bundled_surfaces();
    let ms: Vec<u32> = table.surfaces.iter().map(|s| s.m).collect();
    assert_eq!(ms, vec![2, 3, 4]);
    let report = example_drivers(&table.surfaces).unwrap();
    assert!(report.verdict);
    let quadric = &report.ordinary_points[0];
    assert_eq!(quadric.primitive_signature, -1);
    assert!(quadric.residual_nonzero);
    // h20 = (m-1)(m-2)(m-3)/6 and h11 = (2m^3 - 6m^2 + 7m)/3 for a smooth degree-m surface
    for s in &table.surfaces {
        let m = s.m as u64;
        assert_eq!(s.h20, (m - 1) * (m - 2) * (m.max(3) - 3) / 6);
        assert_eq!(s.h11, (2 * m * m * m + 7 * m - 6 * m * m) / 3);
    }
}

fn arb_diamond() -> impl Strategy<Value = HodgeDiamond> {
    prop_oneof![
        (0u64..4, 0u64..5, 1u64..30).prop_map(|(a, b, c)| HodgeDiamond::surface(a, b, c).unwrap()),
        (0usize..5).prop_map(HodgeDiamond::projective_space),
        (0u64..6).prop_map(|g| HodgeDiamond::new(1, vec![vec![1, g], vec![g, 1]]).unwrap()),
    ]
}

proptest! {
    #[test]
    fn euler_characteristic_identity(d in arb_diamond()) {
        let n = d.dim();
        let direct: i64 = (0..=n)
            .flat_map(|p| (0..=n).map(move |q| (p, q)))
            .map(|(p, q)| if (p + q) % 2 == 0 { d.h(p, q) as i64 } else { -(d.h(p, q) as i64) })
            .sum();
        prop_assert_eq!(specialize(&chi_y(&d), n).euler, direct);
    }

    #[test]
    fn serre_symmetry(d in arb_diamond()) {
        let n = d.dim();
        let chi = chi_y(&d);
        let sign = if n % 2 == 0 { 1 } else { -1 };
        for p in 0..=n {
            prop_assert_eq!(chi.coeff(n - p), sign * chi.coeff(p));
        }
    }

    #[test]
    fn epsilon_recurrence(m in -5000i64..5000) {
        let s = if m % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(epsilon(m), epsilon(m - 1) * s);
    }

    #[test]
    fn random_fixtures_satisfy_the_comparison(seed in any::<u64>(), weight in 0i32..4, half in 1usize..4) {
        let mut rng = gen::rng(seed);
        let dim = if weight % 2 == 1 { 2 * half } else { half + 1 };
        let fx = fixtures::random(&mut rng, weight, dim).unwrap();
        let cmp = compare_polarizations(&fx.hodge, &fx.s, &fx.s_prime).unwrap();
        prop_assert!(cmp.holds && cmp.identity_chain && cmp.semisimple);
        if fx.s.symmetry() == Symmetry::Symmetric {
            prop_assert_eq!(signature(&fx.s).unwrap(), signature(&fx.s_prime).unwrap());
        }
        let c = weil_operator(&fx.hodge).unwrap();
        let sign = if weight % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(&c * &c, Matrix::identity(dim).scale(&int(sign)));
    }
}
