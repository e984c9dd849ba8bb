use defectchain::scalar::{Scalar, ScalarError};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn arb_scalar(order: u32) -> impl Strategy<Value = Scalar> {
    let phi = Scalar::zero(order).coeffs().len();
    prop::collection::vec((-6i64..=6, 1i64..=4), phi).prop_map(move |cs| {
        let coeffs = cs.into_iter().map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d))).collect();
        Scalar::from_coeffs(order, coeffs).unwrap()
    })
}

fn arb_pair_and_order() -> impl Strategy<Value = (Scalar, Scalar, Scalar)> {
    prop_oneof![Just(8u32), Just(24u32), Just(40u32)]
        .prop_flat_map(|n| (arb_scalar(n), arb_scalar(n), arb_scalar(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms((a, b, c) in arb_pair_and_order()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Scalar::zero(a.order()));
        prop_assert_eq!(&a * &Scalar::one(a.order()), a.clone());
    }

    #[test]
    fn inverses((a, _, _) in arb_pair_and_order()) {
        if a.is_zero() {
            prop_assert!(matches!(a.try_inv(), Err(ScalarError::DivisionByZero)));
        } else {
            let inv = a.try_inv().unwrap();
            prop_assert!((&a * &inv).is_one());
        }
    }

    #[test]
    fn conjugation((a, b, _) in arb_pair_and_order()) {
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        prop_assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
        prop_assert_eq!(a.conj().conj(), a.clone());
        let n = a.abs_squared();
        prop_assert_eq!(n.conj(), n.clone());
        prop_assert_eq!(n.to_float().im, 0.0);
        prop_assert!((n.to_float().re - a.to_float().norm_sqr()).abs() < 1e-9 * (1.0 + n.to_float().re));
    }

    #[test]
    fn float_image_is_a_homomorphism((a, b, _) in arb_pair_and_order()) {
        let (fa, fb) = (a.to_float(), b.to_float());
        prop_assert!(((&a * &b).to_float() - fa * fb).norm() < 1e-9 * (1.0 + fa.norm() * fb.norm()));
        prop_assert!(((&a + &b).to_float() - (fa + fb)).norm() < 1e-9 * (1.0 + fa.norm() + fb.norm()));
    }

    #[test]
    fn embedding_preserves_arithmetic(a in arb_scalar(8), b in arb_scalar(8)) {
        let (ea, eb) = (a.embed(40).unwrap(), b.embed(40).unwrap());
        prop_assert_eq!((&a * &b).embed(40).unwrap(), &ea * &eb);
        prop_assert_eq!((&a + &b).embed(40).unwrap(), &ea + &eb);
    }

    #[test]
    fn json_round_trip((a, _, _) in arb_pair_and_order()) {
        let s = serde_json::to_string(&a).unwrap();
        let back: Scalar = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, a);
    }
}

#[test]
fn roots_of_unity() {
    for n in [1u32, 2, 3, 5, 8, 24, 40] {
        let z = Scalar::zeta_pow(n, 1);
        assert!(z.pow(n).is_one(), "zeta_{n}^{n}");
        for k in 1..n {
            assert!(!z.pow(k).is_one(), "zeta_{n}^{k}");
        }
        assert_eq!(Scalar::zeta_pow(n, -1), z.try_inv().unwrap());
    }
    // e^{2 pi i / 3} + e^{4 pi i / 3} = -1
    let w = Scalar::root_of_unity(24, 1, 3).unwrap();
    assert_eq!(&w + &w.pow(2), Scalar::from_int(-1, 24));
}

#[test]
fn square_roots() {
    let r2 = Scalar::sqrt2(8).unwrap();
    assert_eq!(&r2 * &r2, Scalar::from_int(2, 8));
    assert!((r2.to_float().re - std::f64::consts::SQRT_2).abs() < 1e-15);
    let r8 = Scalar::sqrt_rational(&BigRational::from_integer(8.into()), 8).unwrap();
    assert_eq!(r8, &r2 * &Scalar::from_int(2, 8));
    let r9 = Scalar::sqrt_rational(&BigRational::new(9.into(), 4.into()), 8).unwrap();
    assert_eq!(r9, Scalar::from_ratio(3, 2, 8));
    assert!(Scalar::sqrt_rational(&BigRational::from_integer(3.into()), 8).is_err());
    assert!(Scalar::sqrt2(3).is_err());
}

#[test]
fn order_mismatch_is_an_error() {
    let a = Scalar::one(8);
    let b = Scalar::one(24);
    assert!(matches!(a.try_add(&b), Err(ScalarError::OrderMismatch(8, 24))));
    assert!(a.embed(12).is_err());
}

#[test]
fn real_values_have_no_imaginary_noise() {
    let v = Scalar::sign(1, 8) / Scalar::sqrt2(8).unwrap();
    assert_eq!(v.to_float().im, 0.0);
}
