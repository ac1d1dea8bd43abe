use num_traits::{One, Zero};
use proptest::prelude::*;
use qv_core::ring::{int, monomial_value, ratio, Coeff, DenomFactor, HalfExponent, LaurentPoly, LocalizedElem};

const M: usize = 2;

const CHARACTERS: [[i32; 2]; 6] = [[2, 0], [0, 2], [2, -2], [-2, 0], [2, 2], [1, 0]];

fn poly_strategy() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec(((-3i32..=3, -3i32..=3), -4i64..=4), 0..4).prop_map(|terms| {
        LaurentPoly::from_terms(M, terms.into_iter().map(|((a, b), c)| (HalfExponent::from_slice(&[a, b]), int(c))))
    })
}

fn raw_strategy() -> impl Strategy<Value = (LaurentPoly, Vec<DenomFactor>)> {
    (poly_strategy(), prop::collection::vec((0usize..CHARACTERS.len(), 1u32..=2), 0..3)).prop_map(|(num, den)| {
        let den = den
            .into_iter()
            .map(|(i, k)| DenomFactor { character: HalfExponent::from_slice(&CHARACTERS[i]), multiplicity: k })
            .collect();
        (num, den)
    })
}

fn elem_strategy() -> impl Strategy<Value = LocalizedElem> {
    raw_strategy().prop_map(|(n, d)| LocalizedElem::new(n, d))
}

fn point_strategy() -> impl Strategy<Value = Vec<Coeff>> {
    prop::collection::vec((1i64..=9, 1i64..=7, any::<bool>()), M)
        .prop_map(|v| v.into_iter().map(|(a, b, neg)| ratio(if neg { -a } else { a }, b)).collect())
}

fn raw_value(num: &LaurentPoly, den: &[DenomFactor], point: &[Coeff]) -> Option<Coeff> {
    let mut d = Coeff::one();
    for f in den {
        let base = Coeff::one() - monomial_value(&f.character, point);
        for _ in 0..f.multiplicity {
            d *= &base;
        }
    }
    (!d.is_zero()).then(|| num.eval(point) / d)
}

fn q(i: usize) -> HalfExponent {
    HalfExponent::axis(M, i, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_is_commutative_and_associative(a in elem_strategy(), b in elem_strategy(), c in elem_strategy()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
    }

    #[test]
    fn multiplication_distributes(a in elem_strategy(), b in elem_strategy(), c in elem_strategy()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn identities_and_negation(a in elem_strategy()) {
        prop_assert_eq!(&LocalizedElem::zero(M) + &a, a.clone());
        prop_assert_eq!(&LocalizedElem::one(M) * &a, a.clone());
        prop_assert!((&a - &a).is_zero());
        prop_assert!((&a + &(-&a)).is_zero());
    }

    #[test]
    fn canonical_form_invariants((num, den) in raw_strategy()) {
        let e = LocalizedElem::new(num, den);
        let factors = e.denominator();
        for f in factors {
            prop_assert!(f.character.is_normalized());
            prop_assert!(f.multiplicity >= 1);
            prop_assert!(e.numerator().exact_divide(&f.character).is_none());
        }
        prop_assert!(factors.windows(2).all(|w| w[0].character < w[1].character));
        prop_assert!(e.numerator().terms().iter().all(|(_, c)| !c.is_zero()));
    }

    #[test]
    fn canonicalize_preserves_value((num, den) in raw_strategy(), points in prop::collection::vec(point_strategy(), 20)) {
        let e = LocalizedElem::new(num.clone(), den.clone());
        for p in &points {
            if let Some(v) = raw_value(&num, &den, p) {
                prop_assert_eq!(e.eval_rational(p).unwrap(), v);
            }
        }
    }

    #[test]
    fn canonicalize_is_idempotent(a in elem_strategy()) {
        let b = a.canonicalize();
        prop_assert_eq!(b.numerator(), a.numerator());
        prop_assert_eq!(b.denominator(), a.denominator());
        let c = b.canonicalize();
        prop_assert_eq!(c.numerator(), b.numerator());
        prop_assert_eq!(c.denominator(), b.denominator());
    }

    #[test]
    fn equal_elements_evaluate_equal(a in elem_strategy(), b in elem_strategy(), points in prop::collection::vec(point_strategy(), 20)) {
        let lhs = &(&a + &b) * &(&a - &b);
        let rhs = &(&a * &a) - &(&b * &b);
        prop_assert_eq!(&lhs, &rhs);
        for p in &points {
            if let (Ok(x), Ok(y)) = (lhs.eval_rational(p), rhs.eval_rational(p)) {
                prop_assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn adams_is_a_ring_homomorphism(a in elem_strategy(), b in elem_strategy(), k in 1u32..=3) {
        prop_assert_eq!((&a * &b).adams(k), &a.adams(k) * &b.adams(k));
        prop_assert_eq!((&a + &b).adams(k), &a.adams(k) + &b.adams(k));
        prop_assert_eq!(a.adams(2).adams(k), a.adams(2 * k));
    }

    #[test]
    fn json_round_trip(a in elem_strategy()) {
        let back = LocalizedElem::from_json(&a.to_json()).unwrap();
        prop_assert_eq!(back.numerator(), a.numerator());
        prop_assert_eq!(back.denominator(), a.denominator());
    }
}

#[test]
fn one_minus_q_times_its_inverse() {
    let one_minus = LocalizedElem::from_poly(LaurentPoly::one_minus(&q(0)));
    assert!((&one_minus * &LocalizedElem::inv_one_minus(&q(0))).is_one());
}

#[test]
fn exact_divide_examples() {
    let q1 = HalfExponent::from_slice(&[2]);
    let q1sq = HalfExponent::from_slice(&[4]);
    assert_eq!(LaurentPoly::one_minus(&q1).exact_divide(&q1), Some(LaurentPoly::one(1)));
    let expected = &LaurentPoly::one(1) + &LaurentPoly::monomial(q1.clone(), int(1));
    assert_eq!(LaurentPoly::one_minus(&q1sq).exact_divide(&q1), Some(expected));
    let one_plus = &LaurentPoly::one(1) + &LaurentPoly::monomial(q1.clone(), int(1));
    assert_eq!(one_plus.eval(&[int(1)]), int(2));
    assert_eq!(one_plus.exact_divide(&q1), None);
}

#[test]
fn common_factor_cancels() {
    let num = LaurentPoly::one_minus(&q(0));
    let den = vec![
        DenomFactor { character: q(0), multiplicity: 1 },
        DenomFactor { character: q(1), multiplicity: 1 },
    ];
    let e = LocalizedElem::new(num, den);
    assert_eq!(e.numerator(), &LaurentPoly::one(M));
    assert_eq!(e.denominator(), &[DenomFactor { character: q(1), multiplicity: 1 }]);
}

#[test]
fn inverted_character_is_normalized() {
    let e = LocalizedElem::new(
        LaurentPoly::one(1),
        vec![DenomFactor { character: HalfExponent::from_slice(&[-2]), multiplicity: 1 }],
    );
    assert_eq!(e.denominator(), &[DenomFactor { character: HalfExponent::from_slice(&[2]), multiplicity: 1 }]);
    assert_eq!(e.numerator(), &LaurentPoly::monomial(HalfExponent::from_slice(&[2]), int(-1)));
}

#[test]
fn adams_examples() {
    let root = LocalizedElem::monomial(HalfExponent::from_slice(&[1]), int(1));
    assert_eq!(root.adams(2), LocalizedElem::monomial(HalfExponent::from_slice(&[2]), int(1)));
    let inv = LocalizedElem::inv_one_minus(&HalfExponent::from_slice(&[2]));
    assert_eq!(inv.adams(3), LocalizedElem::inv_one_minus(&HalfExponent::from_slice(&[6])));
}

#[test]
fn evaluation_examples() {
    let q1 = LocalizedElem::monomial(HalfExponent::from_slice(&[2]), int(1));
    assert_eq!(q1.eval_rational(&[int(3)]).unwrap(), int(9));
    let inv = LocalizedElem::inv_one_minus(&HalfExponent::from_slice(&[2]));
    assert_eq!(inv.eval_rational(&[int(2)]).unwrap(), ratio(-1, 3));
    assert!(inv.eval_rational(&[int(1)]).is_err());
}

#[test]
fn integrality_examples() {
    let e = LocalizedElem::inv_one_minus(&HalfExponent::from_slice(&[2, -2]));
    assert!(e.integrality_report().in_r_integer);
    let half = LocalizedElem::monomial(HalfExponent::from_slice(&[1, 0]), ratio(3, 2));
    let r = half.integrality_report();
    assert!(!r.in_r_integer);
    assert!(r.denominators_of_two);
}

#[test]
fn half_power_difference_is_invertible() {
    let x = HalfExponent::from_slice(&[1]);
    let d = LocalizedElem::from_poly(
        &LaurentPoly::monomial(x.clone(), int(1)) - &LaurentPoly::monomial(x.scale(-1), int(1)),
    );
    let inv = d.inverse().unwrap();
    assert!((&d * &inv).is_one());
    assert!(LocalizedElem::from_poly(&LaurentPoly::one(1) + &LaurentPoly::monomial(x, int(2)))
        .inverse()
        .is_err());
}
