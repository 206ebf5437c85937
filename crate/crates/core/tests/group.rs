use gamma237::group::{Class, FixedKind, Gamma, LiftPoint, Stabilizer};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn random_point(rng: &mut ChaCha8Rng) -> LiftPoint {
    let u = rng.gen_range(-1000i64..=1000);
    let v = rng.gen_range(1i64..=1000);
    LiftPoint::from_rational(rng.gen_range(-3..=3), q(u, 1000), q(v, 1000))
}

#[test]
fn relations_as_lifted_elements() {
    let g = Gamma::standard();
    let (a, b, c) = g.generators();
    let abc = g.abc();
    for lhs in [a.pow(2), b.pow(3), c.pow(7)] {
        assert!(lhs.compose(&abc.inverse()).is_identity());
    }
    assert!(!g.parse("abAB").unwrap().is_identity());
    assert!(abc.compose(&abc.inverse()).is_identity());
    assert_eq!(abc.pow(2).winding(), 2 * abc.winding());
}

#[test]
fn abc_is_central_on_ball_5() {
    let g = Gamma::standard();
    let abc = g.abc();
    for h in g.ball(5) {
        assert!(h.compose(abc).same_element(&abc.compose(&h)), "{h}");
    }
}

#[test]
fn abc_translates_by_one() {
    let g = Gamma::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let x = random_point(&mut rng);
        assert_eq!(g.abc().apply(&x), x.shifted(1));
        let (a, _, _) = g.generators();
        assert_eq!(a.apply(&a.apply(&x)), x.shifted(1));
    }
    assert_eq!(g.identity().apply(&LiftPoint::from_rational(0, q(1, 1), q(1, 1))).to_f64(), 0.25);
}

#[test]
fn monotone_and_equivariant_on_ball_4() {
    let g = Gamma::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pairs: Vec<(LiftPoint, LiftPoint)> = (0..50)
        .map(|_| {
            let (x, y) = (random_point(&mut rng), random_point(&mut rng));
            if x < y { (x, y) } else { (y, x) }
        })
        .filter(|(x, y)| x != y)
        .collect();
    for h in g.ball(4) {
        for (x, y) in &pairs {
            assert!(h.apply(x) < h.apply(y));
            assert_eq!(h.apply(&x.shifted(1)), h.apply(x).shifted(1));
        }
    }
}

#[test]
fn inverses_and_composition_agree_with_action() {
    let g = Gamma::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ball = g.ball(4);
    for _ in 0..40 {
        let x = random_point(&mut rng);
        let u = &ball[rng.gen_range(0..ball.len())];
        let v = &ball[rng.gen_range(0..ball.len())];
        assert!(u.compose(&u.inverse()).is_identity());
        assert_eq!(u.compose(v).apply(&x), u.apply(&v.apply(&x)));
        assert_eq!(u.inverse().apply(&u.apply(&x)), x);
    }
}

#[test]
fn translation_numbers() {
    let g = Gamma::standard();
    let (a, b, c) = g.generators();
    assert_eq!(a.translation_number().unwrap(), q(1, 2));
    assert_eq!(b.translation_number().unwrap(), q(1, 3));
    assert_eq!(c.translation_number().unwrap(), q(1, 7));
    assert_eq!(g.abc().translation_number().unwrap(), q(1, 1));
    for e in [&a, &b, &c] {
        for n in 1..=7 {
            let t = e.pow(n).translation_number().unwrap();
            assert_eq!(t, e.translation_number().unwrap() * q(n, 1));
        }
    }
}

#[test]
fn classification() {
    let g = Gamma::standard();
    let (a, _, _) = g.generators();
    assert_eq!(g.abc().classify(), Class::CentralPower);
    assert_eq!(a.classify(), Class::Elliptic);
    let w = g.parse("abcbcbacbcac").unwrap();
    let t = w.mat().trace().to_f64().abs();
    assert_eq!(w.classify(), if t > 2.0 { Class::Hyperbolic } else { Class::Elliptic });
    assert_eq!(g.parse("bCC").unwrap().classify(), Class::Hyperbolic);
    let counts = g.ball(6).iter().filter(|e| e.classify() == Class::Parabolic).count();
    assert_eq!(counts, 0);
}

#[test]
fn fixed_points_swap_and_transport() {
    let g = Gamma::standard();
    let hyp: Vec<_> = g.ball(5).into_iter().filter(|e| e.classify() == Class::Hyperbolic).take(20).collect();
    assert!(!hyp.is_empty());
    let h = g.parse("bc").unwrap();
    for e in &hyp {
        let fp = e.fixed_points().unwrap();
        let inv = e.inverse().fixed_points().unwrap();
        let att = LiftPoint::new(0, fp[0].direction.clone());
        let rep = LiftPoint::new(0, fp[1].direction.clone());
        assert!(att.same_direction(&LiftPoint::new(0, inv[1].direction.clone())));
        assert!(rep.same_direction(&LiftPoint::new(0, inv[0].direction.clone())));
        assert_eq!(e.derivative_cmp_one(&att), std::cmp::Ordering::Less);
        assert_eq!(e.derivative_cmp_one(&rep), std::cmp::Ordering::Greater);
        // Conjugate by h: fixed points move by h.
        let conj = h.conjugate(e);
        let moved = h.apply(&att);
        let cfp = conj.fixed_point(FixedKind::Attracting, 0).unwrap();
        assert!(conj.fixes_direction(&moved));
        assert!(cfp.same_direction(&moved));
    }
}

#[test]
fn stabilizers() {
    let g = Gamma::standard();
    let x = LiftPoint::from_rational(0, q(3, 7), q(5, 11));
    assert!(matches!(g.point_stabilizer(&x, 6), Stabilizer::TrivialUpToDepth(6)));
    let k = g.parse("bCC").unwrap();
    assert_eq!(k.classify(), Class::Hyperbolic);
    let p = k.fixed_point(FixedKind::Attracting, 0).unwrap();
    let Stabilizer::Cyclic { generator, .. } = g.point_stabilizer(&p, 4) else { panic!("expected cyclic") };
    assert_eq!(generator.apply(&p), p);
    // Contracting from both sides.
    let off = |dx: f64| LiftPoint::near_f64(p.to_f64() + dx, 60);
    assert!(generator.apply(&off(-1e-6)) > off(-1e-6));
    assert!(generator.apply(&off(1e-6)) < off(1e-6));
    // k (shifted to fix p) is a power of the generator.
    let kk = k.compose(&g.central(-k.shift_at(p.direction())));
    let mut pw = generator.clone();
    let mut ok = false;
    for _ in 0..6 {
        if pw.same_element(&kk) || pw.same_element(&kk.inverse()) {
            ok = true;
            break;
        }
        pw = pw.compose(&generator);
    }
    assert!(ok);
}
