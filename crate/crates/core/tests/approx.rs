use gamma237::approx::{
    component_scan, exhaustive_search, find_conjugator_bfs, find_conjugator_guided, find_point_mover,
    uniform_sign_interval, ApproxError, GuidedCase, ScanCell, SearchBudget, Strategy, Target, UniformSign,
};
use gamma237::group::{FixedKind, Gamma, LiftPoint};
use gamma237::orders::{conjugate_order, in_neighborhood, order_sign, OrderOracle, Side, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn free(u: i64, v: i64) -> OrderOracle {
    OrderOracle::standard(LiftPoint::from_rational(0, q(u, 100), q(v, 100)), vec![Side::Left])
}

fn fixed(word: &str, side: Side) -> OrderOracle {
    let k = Gamma::standard().parse(word).unwrap();
    OrderOracle::standard(k.fixed_point(FixedKind::Attracting, 0).unwrap(), vec![side])
}

fn budget() -> SearchBudget {
    SearchBudget { max_word_length: 8, ..SearchBudget::default() }
}

#[test]
fn abc_alone_gives_the_whole_line() {
    let g = Gamma::standard();
    let p = LiftPoint::from_rational(0, q(1, 3), q(1, 2));
    match uniform_sign_interval(&p, &[g.abc().clone()], 64) {
        UniformSign::Interval(v) => assert!(v.is_whole_line()),
        other => panic!("{other:?}"),
    }
}

#[test]
fn sides_at_an_attracting_point() {
    let g = Gamma::standard();
    let k = g.parse("bCC").unwrap();
    let k = k.compose(&g.central(-k.shift_at(&k.fixed_points().unwrap()[0].direction)));
    let p = k.fixed_point(FixedKind::Attracting, 0).unwrap();
    let UniformSign::Sides(r) = uniform_sign_interval(&p, &[k.clone()], 64) else { panic!("expected sides") };
    assert_eq!(r.fixing, vec![k.word().clone()]);
    let left = r.left.unwrap();
    let right = r.right.unwrap();
    assert_eq!(left.signs, vec![(k.word().clone(), Sign::Pos)]);
    assert_eq!(right.signs, vec![(k.word().clone(), Sign::Neg)]);
    assert!(left.end < p && p < right.end);
}

#[test]
fn certified_interval_keeps_signs() {
    let g = Gamma::standard();
    let f = g.punctured_ball(3);
    let UniformSign::Interval(v) = uniform_sign_interval(&LiftPoint::origin(), &g.punctured_ball(2), 64) else {
        panic!()
    };
    assert!(v.is_whole_line());
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let p = LiftPoint::from_rational(0, q(rng.gen_range(-99..=99), 100), q(rng.gen_range(1..=99), 100));
        let UniformSign::Interval(v) = uniform_sign_interval(&p, &f, 64) else { panic!("free point") };
        assert!(v.radius_left > 0.0 && v.radius_right > 0.0);
        let (lo, hi) = (v.lo.clone().unwrap(), v.hi.clone().unwrap());
        assert!(lo < p && p < hi);
        // Sample rational points strictly inside.
        for t in 1..10 {
            let x = lo.to_f64() + (hi.to_f64() - lo.to_f64()) * f64::from(t) / 10.0;
            let y = LiftPoint::near_f64(x, 50);
            if !v.contains(&y) {
                continue;
            }
            for h in &f {
                assert_eq!(h.apply(&y).cmp_exact(&y), h.apply(&p).cmp_exact(&p), "{h} at {x}");
            }
        }
    }
}

#[test]
fn bfs_basics() {
    let g = Gamma::standard();
    let f = g.punctured_ball(2);
    let o = free(31, 77);
    let r = find_conjugator_bfs(g, &o, &o, &f, &budget()).unwrap();
    assert!(r.found);
    assert_eq!(r.word_length, Some(0));
    let w = g.parse("bcA").unwrap();
    let planted = conjugate_order(&o, &w);
    let r = find_conjugator_bfs(g, &o, &planted, &f, &budget()).unwrap();
    assert!(r.found && r.word_length.unwrap() <= 3);
    assert!(in_neighborhood(&conjugate_order(&planted, r.element.as_ref().unwrap()), &o, &f).unwrap());
    assert_eq!(r.strategy, Strategy::Bfs);
    assert_eq!(r.certificates.len(), f.len());
    let err = find_conjugator_bfs(g, &o, &o.reversed(), &[g.abc().clone()], &budget()).unwrap_err();
    assert_eq!(err, ApproxError::HypothesisViolated { left: Sign::Pos, right: Sign::Neg });
}

#[test]
fn guided_free_basepoints() {
    let g = Gamma::standard();
    let f = g.punctured_ball(3);
    let (o, o2) = (free(-40, 13), free(85, 50));
    for (a, b) in [(&o, &o2), (&o2, &o)] {
        let r = find_conjugator_guided(g, a, b, &f, &budget()).unwrap();
        assert!(r.found);
        assert!(matches!(r.case, Some(GuidedCase::Free { .. })));
        assert!(in_neighborhood(&conjugate_order(b, r.element.as_ref().unwrap()), a, &f).unwrap());
        let bfs = find_conjugator_bfs(g, a, b, &f, &budget()).unwrap();
        assert!(bfs.found && bfs.word_length <= r.word_length);
    }
}

#[test]
fn guided_stabilizer_cases() {
    let g = Gamma::standard();
    let f = g.punctured_ball(3);
    let o2 = free(12, 34);
    for side in [Side::Left, Side::Right] {
        let o = fixed("bCC", side);
        let k = g.parse("bCC").unwrap();
        assert_eq!(order_sign(&o, &k).unwrap(), if side == Side::Left { Sign::Pos } else { Sign::Neg });
        let r = find_conjugator_guided(g, &o, &o2, &f, &budget()).unwrap();
        assert!(r.found, "{side:?}");
        match &r.case {
            Some(GuidedCase::Fixed { side: s, fixing, .. }) => {
                assert_eq!(*s, side);
                assert!(!fixing.is_empty());
            }
            other => panic!("{other:?}"),
        }
        assert!(in_neighborhood(&conjugate_order(&o2, r.element.as_ref().unwrap()), &o, &f).unwrap());
        // And the other direction, where the moved basepoint has a stabilizer.
        let back = find_conjugator_guided(g, &o2, &o, &f, &budget()).unwrap();
        assert!(back.found);
        assert!(back.k_prime_bound.is_some());
        assert!(in_neighborhood(&conjugate_order(&o, back.element.as_ref().unwrap()), &o2, &f).unwrap());
    }
}

#[test]
fn reversed_pairs() {
    let g = Gamma::standard();
    let f = g.punctured_ball(2);
    let (o, o2) = (free(-40, 13).reversed(), free(85, 50).reversed());
    let r = find_conjugator_guided(g, &o, &o2, &f, &budget()).unwrap();
    assert!(r.found);
    assert!(in_neighborhood(&conjugate_order(&o2, r.element.as_ref().unwrap()), &o, &f).unwrap());
}

#[test]
fn point_mover() {
    let g = Gamma::standard();
    let p = LiftPoint::from_rational(0, q(1, 2), q(1, 3));
    let t = Target { lo: LiftPoint::near_f64(p.to_f64() - 0.01, 40), hi: LiftPoint::near_f64(p.to_f64() + 0.01, 40), periodic: false };
    let m = find_point_mover(g, &p, &t, &budget(), |_| true).unwrap();
    assert!(m.element.is_identity());
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..5 {
        let c: f64 = rng.gen_range(0.0..1.0);
        let t = Target { lo: LiftPoint::near_f64(c, 40), hi: LiftPoint::near_f64(c + 0.01, 40), periodic: false };
        let m = find_point_mover(g, &p, &t, &SearchBudget::default(), |_| true).unwrap();
        assert!(t.lo < m.image && m.image < t.hi);
        assert_eq!(m.element.apply(&p), m.image);
        // The same target one sheet up is reached by the abc-shifted mover.
        let up = Target { lo: t.lo.shifted(1), hi: t.hi.shifted(1), periodic: false };
        let m2 = find_point_mover(g, &p, &up, &SearchBudget::default(), |_| true).unwrap();
        assert_eq!(m2.image, m.image.shifted(1));
    }
    let tiny = SearchBudget { max_word_length: 1, ..SearchBudget::default() };
    let t = Target { lo: LiftPoint::near_f64(0.3, 40), hi: LiftPoint::near_f64(0.3001, 40), periodic: false };
    assert!(matches!(find_point_mover(g, &p, &t, &tiny, |_| true), Err(ApproxError::BudgetExhausted { .. })));
}

#[test]
fn obstruction_is_exact() {
    let g = Gamma::standard();
    let f = vec![g.abc().clone(), g.parse("ab").unwrap()];
    let small = SearchBudget { max_word_length: 5, ..SearchBudget::default() };
    let r = exhaustive_search(g, &free(1, 2), &free(3, 4).reversed(), &f, &small).unwrap();
    assert!(!r.found);
    assert_eq!(r.candidates_examined, g.ball(5).len());
}

#[test]
fn scan_two_blocks() {
    let g = Gamma::standard();
    let f = g.punctured_ball(2);
    let os = vec![free(10, 20), free(-30, 70), fixed("bCC", Side::Right), free(55, 5).reversed(), free(-5, 9).reversed()];
    let labels: Vec<String> = (0..os.len()).map(|i| format!("o{i}")).collect();
    let r = component_scan(g, &labels, &os, &f, &budget()).unwrap();
    assert!(r.two_blocks);
    assert_eq!(r.cells[0][3], ScanCell::Obstructed);
    assert!(r.cells[0][1].reachable() && r.cells[3][4].reachable());
    assert_eq!(r.histogram.values().sum::<usize>(), 3 * 2 + 2);
    let one = component_scan(g, &labels[..1], &os[..1], &f, &budget()).unwrap();
    assert_eq!(one.cells, vec![vec![ScanCell::Diagonal]]);
}
