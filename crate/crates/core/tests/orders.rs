use gamma237::group::{FixedKind, Gamma, LiftPoint};
use gamma237::orders::{
    abc_sign, cone_table, cone_violations, conjugate_order, in_neighborhood, order_sign, signs_over, OrderError,
    OrderOracle, ProductTable, Realization, Side, Sign,
};
use gamma237::realization::BlownPoint;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn free_oracle(rng: &mut ChaCha8Rng) -> OrderOracle {
    let p = LiftPoint::from_rational(rng.gen_range(-2..=2), q(rng.gen_range(-999..=999), 1000), q(rng.gen_range(1..=999), 1000));
    OrderOracle::standard(p, vec![Side::Left])
}

fn fixed_oracle(word: &str, side: Side) -> OrderOracle {
    let k = Gamma::standard().parse(word).unwrap();
    OrderOracle::standard(k.fixed_point(FixedKind::Attracting, 0).unwrap(), vec![side])
}

#[test]
fn cone_axioms_on_ball_4() {
    let g = Gamma::standard();
    let table = ProductTable::new(&g.punctured_ball(4));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut oracles: Vec<OrderOracle> = (0..4).map(|_| free_oracle(&mut rng)).collect();
    oracles.push(fixed_oracle("bCC", Side::Left));
    oracles.push(fixed_oracle("bCC", Side::Right));
    oracles.push(free_oracle(&mut rng).reversed());
    for o in &oracles {
        let signs = signs_over(o, &table).unwrap();
        assert!(cone_violations(&table, &signs).is_empty());
    }
}

#[test]
fn corrupted_signs_are_caught() {
    let g = Gamma::standard();
    let table = ProductTable::new(&g.punctured_ball(3));
    let o = OrderOracle::standard(LiftPoint::from_rational(0, q(3, 7), q(5, 11)), vec![Side::Left]);
    let mut signs = signs_over(&o, &table).unwrap();
    signs[0] = signs[0].flip();
    assert!(!cone_violations(&table, &signs).is_empty());
}

#[test]
fn conjugation_matches_conjugated_elements() {
    let g = Gamma::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let ball3 = g.ball(3);
    let ball2 = g.punctured_ball(2);
    let oracles = [free_oracle(&mut rng), fixed_oracle("bCC", Side::Right)];
    for o in &oracles {
        for _ in 0..4 {
            let w = &ball3[rng.gen_range(0..ball3.len())];
            let ow = conjugate_order(o, w);
            for h in &ball2 {
                let conj = w.inverse().compose(h).compose(w);
                assert_eq!(order_sign(&ow, h).unwrap(), order_sign(o, &conj).unwrap(), "{w} {h}");
            }
        }
    }
}

#[test]
fn conjugation_by_identity_and_abc_sign() {
    let g = Gamma::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let o = free_oracle(&mut rng);
    let f = g.punctured_ball(3);
    assert_eq!(cone_table(&conjugate_order(&o, g.identity()), &f), cone_table(&o, &f));
    assert_eq!(abc_sign(&o, g), Sign::Pos);
    assert_eq!(abc_sign(&o.reversed(), g), Sign::Neg);
    for w in g.ball(3) {
        assert_eq!(abc_sign(&conjugate_order(&o, &w), g), Sign::Pos);
        assert_eq!(abc_sign(&conjugate_order(&o.reversed(), &w), g), Sign::Neg);
    }
}

#[test]
fn antisymmetry_and_identity() {
    let g = Gamma::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let o = free_oracle(&mut rng);
    for h in g.punctured_ball(3) {
        assert_eq!(order_sign(&o, &h).unwrap(), order_sign(&o, &h.inverse()).unwrap().flip());
    }
    assert_eq!(order_sign(&o, g.identity()), Err(OrderError::Identity));
}

#[test]
fn neighborhoods() {
    let g = Gamma::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (o1, o2) = (free_oracle(&mut rng), free_oracle(&mut rng));
    let f = g.punctured_ball(2);
    assert!(in_neighborhood(&o1, &o1, &f).unwrap());
    let abc = [g.abc().clone()];
    assert!(in_neighborhood(&o1, &o2, &abc).unwrap());
    assert!(!in_neighborhood(&o1.reversed(), &o2, &abc).unwrap());
    // The identity is ignored.
    assert!(in_neighborhood(&o1, &o2, &[g.identity().clone(), g.abc().clone()]).unwrap());
}

#[test]
fn stabilizer_signs_follow_tiebreak() {
    let g = Gamma::standard();
    let k = g.parse("bCC").unwrap();
    let left = fixed_oracle("bCC", Side::Left);
    let right = fixed_oracle("bCC", Side::Right);
    // k fixes its attracting point with derivative < 1.
    assert_eq!(k.apply(left.basepoint()), *left.basepoint());
    assert_eq!(order_sign(&left, &k).unwrap(), Sign::Pos);
    assert_eq!(order_sign(&right, &k).unwrap(), Sign::Neg);
    let none = OrderOracle::standard(left.basepoint().clone(), vec![]);
    assert!(matches!(order_sign(&none, &k), Err(OrderError::TiebreakExhausted(_))));
    // Elements not fixing the point agree between the two sides.
    for h in g.punctured_ball(3) {
        if h.apply(left.basepoint()) != *left.basepoint() {
            assert_eq!(order_sign(&left, &h).unwrap(), order_sign(&right, &h).unwrap());
        }
    }
}

#[test]
fn same_gap_same_table() {
    let g = Gamma::standard();
    let p = LiftPoint::from_rational(0, q(1, 3), q(2, 3));
    let mk = |f: BigRational| OrderOracle {
        realization: Realization::Blowup(BlownPoint::new(p.clone(), Some(f)).unwrap()),
        tiebreak: vec![Side::Right],
        reversed: false,
    };
    let f = g.punctured_ball(3);
    assert_eq!(cone_table(&mk(q(1, 4)), &f).unwrap(), cone_table(&mk(q(3, 4)), &f).unwrap());
    let std = OrderOracle::standard(p.clone(), vec![Side::Right]);
    assert_eq!(cone_table(&mk(q(1, 2)), &f).unwrap(), cone_table(&std, &f).unwrap());
}

#[test]
fn cone_table_serialization() {
    let g = Gamma::standard();
    let o = OrderOracle::standard(LiftPoint::from_rational(0, q(1, 1), q(1, 1)), vec![Side::Left]);
    let t = cone_table(&o, &[g.abc().clone()]).unwrap();
    assert_eq!(t.get(g.abc().word()), Some(Sign::Pos));
    let json = serde_json::to_string(&t).unwrap();
    assert_eq!(json, format!("{{\"{}\":\"+\"}}", g.abc().word()));
    let back: gamma237::ConeTable = serde_json::from_str(&json).unwrap();
    assert_eq!(back, t);
    assert!(cone_table(&o, &[]).unwrap().is_empty());
    let rows: Vec<_> = t.rows().collect();
    assert_eq!(rows[0].1, 3);
}

#[test]
fn compare_is_a_total_order() {
    let g = Gamma::standard();
    let o = fixed_oracle("bCC", Side::Left);
    let mut els = g.ball(3);
    els.sort_by(|x, y| o.compare(x, y).unwrap());
    for w in els.windows(2) {
        let d = w[0].inverse().compose(&w[1]);
        assert_eq!(order_sign(&o, &d).unwrap(), Sign::Pos);
    }
}
