use gamma237::group::{Class, FixedKind, Gamma, LiftPoint, Stabilizer};
use gamma237::orders::{order_sign, OrderOracle, Side, Sign};
use gamma237::realization::{
    build_realization, check_semiconjugacy, BlownPoint, BlowupError, BlowupMap, RealizationError, StandardAction,
    TableSource,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn free_point() -> LiftPoint {
    LiftPoint::from_rational(0, q(3, 7), q(5, 11))
}

#[test]
fn stage_zero() {
    let g = Gamma::standard();
    let o = OrderOracle::standard(free_point(), vec![Side::Left]);
    let r = build_realization(&o, g, 0, None).unwrap();
    assert_eq!(r.elements().len(), 1);
    assert!(r.placement(0).is_zero());
}

#[test]
fn placements_follow_orbit_order() {
    let g = Gamma::standard();
    let p = free_point();
    let o = OrderOracle::standard(p.clone(), vec![Side::Left]);
    let r = build_realization(&o, g, 3, None).unwrap();
    let els = r.elements();
    for i in 0..els.len() {
        for j in 0..els.len() {
            let orbit = els[i].apply(&p).cmp_exact(&els[j].apply(&p));
            assert_eq!(r.placement(i).cmp(r.placement(j)), orbit);
        }
    }
}

#[test]
fn round_trip_and_equivariance() {
    let g = Gamma::standard();
    let k = g.parse("bCC").unwrap();
    for o in [
        OrderOracle::standard(free_point(), vec![Side::Right]),
        OrderOracle::standard(k.fixed_point(FixedKind::Attracting, 0).unwrap(), vec![Side::Left]),
    ] {
        let r = build_realization(&o, g, 3, None).unwrap();
        for h in g.punctured_ball(2) {
            assert_eq!(r.sign_of(h.word()), Some(order_sign(&o, &h).unwrap()), "{h}");
        }
        let els = r.elements();
        let idx = |e: &gamma237::LiftedElement| els.iter().position(|x| x.same_element(e)).unwrap();
        for (i, h) in g.ball(2).iter().enumerate() {
            for s in [g.generators().0, g.generators().1, g.generators().2] {
                let x = r.apply_word(s.word(), r.placement(i));
                assert_eq!(&x, r.placement(idx(&s.compose(h))));
            }
        }
    }
}

#[test]
fn corrupted_table_is_inconsistent() {
    let g = Gamma::standard();
    let o = OrderOracle::standard(free_point(), vec![Side::Left]);
    let f = g.punctured_ball(2);
    let mut t = TableSource::new(f.iter().map(|h| (h.clone(), order_sign(&o, h).unwrap())));
    // Flip a product of two positives, breaking semigroup closure only.
    let (x, y) = f
        .iter()
        .flat_map(|x| f.iter().map(move |y| (x, y)))
        .find(|(x, y)| {
            order_sign(&o, x).unwrap() == Sign::Pos
                && order_sign(&o, y).unwrap() == Sign::Pos
                && x.compose(y).word().len() == 2
        })
        .unwrap();
    let xy = x.compose(y);
    t.set(&xy, Sign::Neg);
    t.set(&xy.inverse(), Sign::Pos);
    assert!(matches!(build_realization(&t, g, 2, None), Err(RealizationError::InconsistentOracle(_))));
}

#[test]
fn empty_blowup_is_identity() {
    let g = Gamma::standard();
    let b = BlowupMap::new(vec![], vec![]).unwrap();
    assert!(b.total_length().is_zero());
    let x = BlownPoint::new(free_point(), None).unwrap();
    for h in g.ball(2) {
        assert_eq!(b.collapse(&b.act(&h, &x).unwrap()), h.apply(&free_point()));
    }
    assert_eq!(BlowupMap::new(vec![free_point()], vec![q(0, 1)]).unwrap_err(), BlowupError::BadLengths);
    assert_eq!(
        BlowupMap::new(vec![free_point(), free_point()], vec![q(1, 2), q(1, 4)]).unwrap_err(),
        BlowupError::DuplicatePoint
    );
}

#[test]
fn blowup_is_semiconjugate() {
    let g = Gamma::standard();
    let p = free_point();
    let b = BlowupMap::orbit_sample(&p, &g.ball(4));
    assert_eq!(b.len(), g.ball(4).len());
    let n = b.len() as u32;
    let expected = q(1, 1) - BigRational::new(BigInt::from(1), BigInt::from(1) << n);
    assert_eq!(b.total_length(), expected);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut sample: Vec<BlownPoint> = g
        .ball(2)
        .iter()
        .map(|h| BlownPoint::new(h.apply(&p), Some(q(rng.gen_range(0..=8), 8))).unwrap())
        .collect();
    for _ in 0..10 {
        let x = LiftPoint::from_rational(0, q(rng.gen_range(-99..=99), 100), q(rng.gen_range(1..=99), 100));
        sample.push(BlownPoint::new(x, None).unwrap());
    }
    let d = check_semiconjugacy(|x: &BlownPoint| b.collapse(x), &StandardAction::default(), &b, &sample, &g.ball(2))
        .unwrap();
    assert!(d.exact_zero);
    assert_eq!(d.max, 0.0);
    // Order of the orbit of a gap point matches the base orbit.
    let qpt = BlownPoint::new(p.clone(), Some(q(1, 2))).unwrap();
    let els = g.ball(2);
    for u in &els {
        for v in &els {
            let blown = b.act(u, &qpt).unwrap().cmp_exact(&b.act(v, &qpt).unwrap());
            assert_eq!(blown, u.apply(&p).cmp_exact(&v.apply(&p)));
        }
    }
    // Leaving the sample is reported.
    let far = g.parse("abcbcbcbc").unwrap();
    assert_eq!(b.act(&far, &qpt), Err(BlowupError::LeavesSample));
}

#[test]
fn translation_breaks_semiconjugacy() {
    let g = Gamma::standard();
    let sample: Vec<LiftPoint> = (1..5).map(|k| LiftPoint::from_rational(0, q(k, 5), q(1, 3))).collect();
    let d = check_semiconjugacy(
        |x: &LiftPoint| x.clone(),
        &StandardAction::default(),
        &StandardAction { shift: 1 },
        &sample,
        &g.ball(1),
    )
    .unwrap();
    assert!(!d.exact_zero);
    assert_eq!(d.max, 1.0);
    let id = check_semiconjugacy(
        |x: &LiftPoint| x.clone(),
        &StandardAction::default(),
        &StandardAction::default(),
        &sample,
        &g.ball(2),
    )
    .unwrap();
    assert!(id.exact_zero);
}

#[test]
fn gap_stabilizer_is_cyclic() {
    let g = Gamma::standard();
    let k = g.parse("bCC").unwrap();
    assert_eq!(k.classify(), Class::Hyperbolic);
    let p = k.fixed_point(FixedKind::Attracting, 0).unwrap();
    let b = BlowupMap::orbit_sample(&p, &g.ball(3));
    assert!(b.is_blown_up(&p));
    // k maps the gap at p onto itself.
    let kk = k.compose(&g.central(-k.shift_at(p.direction())));
    let end = BlownPoint::new(p.clone(), Some(q(0, 1))).unwrap();
    assert_eq!(b.act(&kk, &end).unwrap(), end);
    let Stabilizer::Cyclic { generator, .. } = g.point_stabilizer(&p, 4) else { panic!("expected cyclic") };
    let mut pw = generator.clone();
    assert!((0..6).any(|_| {
        let hit = pw.same_element(&kk);
        pw = pw.compose(&generator);
        hit
    }));
}
