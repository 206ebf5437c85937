use gamma237::group::heptagonal_field;
use gamma237::numerics::{certified_sign, Elem, Expr, NumSign, Precision, Tower};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn field() -> Tower {
    heptagonal_field()
}

fn elem(coords: &[i64]) -> Elem {
    let t = field();
    t.from_coords(coords.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect())
}

/// An element that is zero only through the defining relations.
fn hidden_zero(r: &[i64]) -> Elem {
    let t = field();
    let l = t.generator(0);
    let m = t.generator(1);
    let cubic = &(&(&l.pow(3) - &l.square()) - &l.scale(&BigRational::from_integer(BigInt::from(2)))) + &t.one();
    let quad = &(&m.square() - &l.square()) + &t.int(3);
    &(&elem(r) * &cubic) + &(&elem(&r[..6].iter().rev().copied().collect::<Vec<_>>()) * &quad)
}

fn lo_le(a: &gamma237::numerics::FixedInterval, b: &gamma237::numerics::FixedInterval) -> bool {
    a.lo_rational() <= b.lo_rational() && b.hi_rational() <= a.hi_rational()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn zero_iff_enclosures_never_certify(coords in prop::collection::vec(-20i64..=20, 6), zero in any::<bool>()) {
        let x = if zero { hidden_zero(&coords) } else { elem(&coords) };
        let never_certified = [64u32, 256, 1024, 4096].iter().all(|&b| x.enclose(b).contains_zero());
        prop_assert_eq!(x.is_zero(), never_certified);
        let s = certified_sign(&Expr::algebraic(x.clone()), Precision::default()).unwrap();
        prop_assert_eq!(s == NumSign::Zero, x.is_zero());
        prop_assert_eq!(s, x.sign());
    }

    #[test]
    fn refinement_is_monotone(coords in prop::collection::vec(-50i64..=50, 6)) {
        let x = elem(&coords);
        let (a, b, c) = (x.enclose(64), x.enclose(128), x.enclose(512));
        prop_assert!(lo_le(&a, &b) && lo_le(&b, &c));
        if let Some(s) = a.sign() {
            prop_assert_eq!(c.sign(), Some(s));
        }
    }

    #[test]
    fn field_arithmetic_is_exact(u in prop::collection::vec(-9i64..=9, 6), v in prop::collection::vec(-9i64..=9, 6)) {
        let (x, y) = (elem(&u), elem(&v));
        prop_assume!(!y.is_zero());
        let yi = y.inv().unwrap();
        prop_assert_eq!(&(&x * &y) * &yi, x.clone());
        prop_assert_eq!(&(&x + &y) - &y, x.clone());
        let f = (x.to_f64(), y.to_f64());
        prop_assert!(((&x * &y).to_f64() - f.0 * f.1).abs() <= 1e-9 * (1.0 + (f.0 * f.1).abs()));
    }
}
