//! Acceptance suite: one PASS/FAIL line per criterion; exits nonzero if any
//! criterion fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use gamma237::approx::{exhaustive_search, find_conjugator_guided, GuidedCase, SearchBudget};
use gamma237::group::{Gamma, LiftPoint, LiftedElement};
use gamma237::harness::{sample_fixed_oracles, sample_free_oracles};
use gamma237::orders::{
    abc_sign, cone_table, cone_violations, conjugate_order, in_neighborhood, order_sign, signs_over, OrderOracle,
    ProductTable, Side, Sign,
};
use gamma237::realization::{build_realization, check_semiconjugacy, BlownPoint, BlowupMap, StandardAction};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    ensure(start.elapsed() < limit, || format!("runtime {:?} exceeds {limit:?}", start.elapsed()))
}

fn random_point(rng: &mut ChaCha8Rng) -> LiftPoint {
    let u = rng.gen_range(-10_000i64..=10_000);
    let v = rng.gen_range(1i64..=10_000);
    LiftPoint::from_rational(rng.gen_range(-5..=5), q(u, 10_000), q(v, 10_000))
}

fn relation_suite() -> Outcome {
    let t = Instant::now();
    let g = Gamma::standard();
    let (a, b, c) = g.generators();
    let abc = g.abc();
    let powers = [a.pow(2), b.pow(3), c.pow(7), abc.clone()];
    for x in &powers {
        for y in &powers {
            ensure(x.compose(&y.inverse()).is_identity(), || format!("{x} and {y} differ"))?;
        }
    }
    let ball = g.ball(5);
    for h in &ball {
        ensure(h.compose(abc).same_element(&abc.compose(h)), || format!("abc does not commute with {h}"))?;
    }
    within(t, Duration::from_secs(60))?;
    Ok(format!("a^2 = b^3 = c^7 = abc exact; abc central on |ball(5)| = {} ({:.2?})", ball.len(), t.elapsed()))
}

fn central_translation() -> Outcome {
    let g = Gamma::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut pts: Vec<LiftPoint> = (0..90).map(|_| random_point(&mut rng)).collect();
    // Algebraic points too: fixed points of hyperbolic elements.
    for w in ["bCC", "aBC", "acb", "bcbA", "CBcb", "abcb", "cAbC", "acBc", "AcBc", "BcBc"] {
        let h = g.parse(w).map_err(|e| e.to_string())?;
        if let Ok(p) = h.fixed_point(gamma237::group::FixedKind::Attracting, rng.gen_range(-3..=3)) {
            pts.push(p);
        }
    }
    while pts.len() < 100 {
        pts.push(random_point(&mut rng));
    }
    for x in &pts {
        ensure(g.abc().apply(x) == x.shifted(1), || format!("abc(x) != x + 1 at {}", x.to_f64()))?;
    }
    Ok(format!("rho(abc)(x) = x + 1 exactly at {} points", pts.len()))
}

fn translation_numbers() -> Outcome {
    let g = Gamma::standard();
    let (a, b, c) = g.generators();
    let abc = g.abc();
    let tau_abc = abc.translation_number().map_err(|e| e.to_string())?;
    ensure(tau_abc == q(1, 1), || format!("tau(abc) = {tau_abc}"))?;
    for (name, e, n) in [("a", &a, 2), ("b", &b, 3), ("c", &c, 7)] {
        // Power identity: e^n = abc, so tau(e) = tau(abc) / n by homogeneity.
        ensure(e.pow(n).same_element(abc), || format!("{name}^{n} != abc"))?;
        let from_identity = &tau_abc / BigRational::from_integer(BigInt::from(n));
        let direct = e.translation_number().map_err(|err| err.to_string())?;
        ensure(direct == from_identity && direct == q(1, n), || format!("tau({name}) = {direct}"))?;
    }
    Ok("tau(a) = 1/2, tau(b) = 1/3, tau(c) = 1/7, tau(abc) = 1 (exact)".into())
}

fn cone_axioms(table: &ProductTable) -> Outcome {
    let t = Instant::now();
    let g = Gamma::standard();
    let mut oracles: Vec<OrderOracle> = sample_free_oracles(g, 40, 14, 8).into_iter().map(|x| x.1).collect();
    oracles.extend(sample_fixed_oracles(g, 41, 6, 4).into_iter().map(|x| x.1));
    let mut total = 0;
    for o in &oracles {
        let signs = signs_over(o, table).map_err(|e| e.to_string())?;
        let v = cone_violations(table, &signs);
        ensure(v.is_empty(), || format!("{} violations, first {:?}", v.len(), v[0]))?;
        total += signs.len();
    }
    within(t, Duration::from_secs(300))?;
    Ok(format!("{} oracles x {} elements of ball(5), 0 violations ({:.2?})", oracles.len(), total / oracles.len(), t.elapsed()))
}

fn conjugation_consistency() -> Outcome {
    let g = Gamma::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut oracles: Vec<OrderOracle> = sample_free_oracles(g, 50, 3, 8).into_iter().map(|x| x.1).collect();
    oracles.extend(sample_fixed_oracles(g, 51, 2, 4).into_iter().map(|x| x.1));
    let ball3 = g.punctured_ball(3);
    let pool = g.ball(6);
    let mut checked = 0;
    for o in &oracles {
        for _ in 0..10 {
            let w = &pool[rng.gen_range(0..pool.len())];
            let ow = conjugate_order(o, w);
            for h in &ball3 {
                let lhs = order_sign(&ow, h).map_err(|e| e.to_string())?;
                let rhs = order_sign(o, &w.inverse().compose(h).compose(w)).map_err(|e| e.to_string())?;
                ensure(lhs == rhs, || format!("conjugation by {w} disagrees at {h}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} comparisons (5 oracles x 10 g x ball(3)), 0 violations"))
}

fn approximation(f: &[LiftedElement]) -> Outcome {
    let t = Instant::now();
    let g = Gamma::standard();
    let budget = SearchBudget { max_word_length: 12, ..SearchBudget::default() };
    let free: Vec<OrderOracle> = sample_free_oracles(g, 60, 40, 8).into_iter().map(|x| x.1).collect();
    let fixed: Vec<OrderOracle> = sample_fixed_oracles(g, 61, 40, 4).into_iter().map(|x| x.1).collect();
    let left: Vec<&OrderOracle> = fixed.iter().filter(|o| o.tiebreak[0] == Side::Left).take(6).collect();
    let right: Vec<&OrderOracle> = fixed.iter().filter(|o| o.tiebreak[0] == Side::Right).take(6).collect();
    ensure(left.len() == 6 && right.len() == 6, || "not enough stabilizer oracles sampled".into())?;
    let mut pairs: Vec<(OrderOracle, OrderOracle)> = Vec::new();
    for i in 0..6 {
        pairs.push((left[i].clone(), free[i].clone()));
        pairs.push((right[i].clone(), free[6 + i].clone()));
    }
    for i in 0..6 {
        pairs.push((free[12 + i].clone(), fixed[20 + i].clone()));
    }
    for i in 0..6 {
        pairs.push((free[18 + i].reversed(), free[24 + i].reversed()));
    }
    let mut i = 0;
    while pairs.len() < 50 {
        pairs.push((free[30 + i % 10].clone(), free[(31 + 3 * i) % 40].clone()));
        i += 1;
    }
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    let mut one_sided = 0;
    for (o, o2) in &pairs {
        ensure(abc_sign(o, g) == abc_sign(o2, g), || "pair with opposite signs".into())?;
        let r = find_conjugator_guided(g, o, o2, f, &budget).map_err(|e| e.to_string())?;
        let w = r.element.as_ref().ok_or_else(|| format!("no conjugator within budget for {:?}", o.basepoint().to_f64()))?;
        // Independent re-verification through the order oracles only.
        let witness = g.element(w.word());
        let ok = in_neighborhood(&conjugate_order(o2, &witness), o, f).map_err(|e| e.to_string())?;
        ensure(ok, || format!("witness {w} fails re-verification"))?;
        ensure(r.certificates.iter().all(|c| order_sign(o, &g.element(&c.element)) == Ok(c.sign)), || "bad certificate".into())?;
        *hist.entry(w.word().len()).or_insert(0) += 1;
        if matches!(r.case, Some(GuidedCase::Fixed { .. })) {
            one_sided += 1;
        }
    }
    within(t, Duration::from_secs(1800))?;
    let h: Vec<String> = hist.iter().map(|(k, v)| format!("{k}:{v}")).collect();
    Ok(format!(
        "{} / {} pairs verified (12 stabilizer basepoints, 6 per side; {one_sided} one-sided targets); lengths {{{}}} ({:.2?})",
        pairs.len(),
        pairs.len(),
        h.join(", "),
        t.elapsed()
    ))
}

fn two_blocks(f: &[LiftedElement]) -> Outcome {
    let g = Gamma::standard();
    let mut oracles: Vec<OrderOracle> = sample_free_oracles(g, 70, 3, 8).into_iter().map(|x| x.1).collect();
    oracles.push(sample_fixed_oracles(g, 71, 1, 4).remove(0).1);
    let reversed: Vec<OrderOracle> = oracles.iter().map(|o| o.reversed()).collect();
    oracles.extend(reversed);
    let budget = SearchBudget { max_word_length: 8, ..SearchBudget::default() };
    let families: [Vec<LiftedElement>; 2] = [vec![g.abc().clone()], f.to_vec()];
    let mut pairs = 0;
    let mut merges = 0;
    let conj = g.ball(8);
    for o in &oracles {
        let s = abc_sign(o, g);
        for w in &conj {
            ensure(abc_sign(&conjugate_order(o, w), g) == s, || format!("conjugation by {w} changes the abc sign"))?;
        }
        for o2 in &oracles {
            if abc_sign(o2, g) == s {
                continue;
            }
            for fam in &families {
                pairs += 1;
                if exhaustive_search(g, o, o2, fam, &budget).map_err(|e| e.to_string())?.found {
                    merges += 1;
                }
            }
        }
    }
    ensure(merges == 0, || format!("{merges} false merges"))?;
    Ok(format!(
        "{pairs} opposite-sign searches over ball(8), 0 merges; abc sign invariant under {} conjugations",
        conj.len() * oracles.len()
    ))
}

fn blowup_fidelity() -> Outcome {
    let t = Instant::now();
    let g = Gamma::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let els = g.ball(3);
    let mut report = Vec::new();
    let bases = [
        sample_free_oracles(g, 80, 1, 8).remove(0).1.basepoint().clone(),
        sample_fixed_oracles(g, 81, 1, 4).remove(0).1.basepoint().clone(),
    ];
    for p in &bases {
        let b = BlowupMap::orbit_sample(p, &g.ball(6));
        let mut sample: Vec<BlownPoint> = (0..60)
            .map(|_| {
                let h = &els[rng.gen_range(0..els.len())];
                BlownPoint::new(h.apply(p), Some(q(rng.gen_range(0..=16), 16))).expect("fraction in range")
            })
            .collect();
        while sample.len() < 100 {
            let x = random_point(&mut rng);
            if !b.is_blown_up(&x) {
                sample.push(BlownPoint::new(x, None).expect("no gap"));
            }
        }
        let d = check_semiconjugacy(|x: &BlownPoint| b.collapse(x), &StandardAction::default(), &b, &sample, &els)
            .map_err(|e| e.to_string())?;
        ensure(d.exact_zero && d.checked == 100 * els.len(), || format!("defect {}", d.max))?;
        let qp = BlownPoint::new(p.clone(), Some(q(1, 2))).expect("fraction in range");
        for u in &els {
            for v in &els {
                let blown = b.act(u, &qp).map_err(|e| e.to_string())?.cmp_exact(&b.act(v, &qp).map_err(|e| e.to_string())?);
                ensure(blown == u.apply(p).cmp_exact(&v.apply(p)), || format!("orbit order differs at {u}, {v}"))?;
            }
        }
        report.push(d.checked);
    }
    within(t, Duration::from_secs(120))?;
    Ok(format!("defect 0 on 2 x 100 points x ball(3) ({} checks); orbit order preserved ({:.2?})", report.iter().sum::<usize>(), t.elapsed()))
}

fn realization_round_trip(table: &ProductTable) -> Outcome {
    let g = Gamma::standard();
    let oracles = sample_free_oracles(g, 90, 10, 8);
    let f = g.punctured_ball(4);
    for (spec, o) in &oracles {
        let r = build_realization(o, g, 5, Some(table)).map_err(|e| e.to_string())?;
        let expected = cone_table(o, &f).map_err(|e| e.to_string())?;
        for h in &f {
            let s: Option<Sign> = r.sign_of(h.word());
            ensure(s == expected.get(h.word()), || format!("{}: {h} reads {s:?}", spec.basepoint))?;
        }
    }
    Ok(format!("stage 5 realizations of {} oracles reproduce their tables on ball(4)", oracles.len()))
}

fn main() {
    let g = Gamma::standard();
    let products = ProductTable::new(&g.punctured_ball(5));
    let f3 = g.punctured_ball(3);
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("C1 relation suite", Box::new(relation_suite)),
        ("C2 central translation", Box::new(central_translation)),
        ("C3 translation numbers", Box::new(translation_numbers)),
        ("C4 cone axioms", Box::new(|| cone_axioms(&products))),
        ("C5 conjugation consistency", Box::new(conjugation_consistency)),
        ("C6 approximation by conjugates", Box::new(|| approximation(&f3))),
        ("C7 two-block obstruction", Box::new(|| two_blocks(&f3))),
        ("C8 blow-up fidelity", Box::new(blowup_fidelity)),
        ("C9 realization round trip", Box::new(|| realization_round_trip(&products))),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
