use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::group::{Class, ElementKey, Gamma, LiftPoint, LiftedElement, Stabilizer, Word};
use crate::orders::{abc_sign, conjugate_order, in_neighborhood, order_sign, OrderOracle, Side, Sign};

use super::mover::{find_point_mover, Target};
use super::neighborhood::{inner_point, uniform_sign_interval, UniformSign};
use super::{ApproxError, SearchBudget};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Guided,
    Bfs,
}

/// `f` has sign `sign` in both the target order and the found conjugate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SignCertificate {
    pub element: Word,
    pub sign: Sign,
}

/// How the guided search chose its target interval.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GuidedCase {
    /// No element of `F` can fix points.
    WholeLine,
    /// The basepoint is not fixed by `F`; a two-sided interval.
    Free { radius_left: f64, radius_right: f64 },
    /// Some elements of `F` fix the basepoint; one side was used.
    Fixed { stabilizer: Option<Word>, fixing: Vec<Word>, side: Side, radius: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConjugatorReport {
    pub found: bool,
    pub witness: Option<Word>,
    pub word_length: Option<usize>,
    pub strategy: Strategy,
    pub candidates_examined: usize,
    pub certificates: Vec<SignCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<GuidedCase>,
    /// Powers `|j| ≤ B` of the stabilizer generator of the moved basepoint
    /// checked against `F`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_prime_bound: Option<u32>,
    #[serde(skip)]
    pub element: Option<LiftedElement>,
}

impl ConjugatorReport {
    fn empty(strategy: Strategy, examined: usize) -> Self {
        ConjugatorReport {
            found: false,
            witness: None,
            word_length: None,
            strategy,
            candidates_examined: examined,
            certificates: Vec::new(),
            case: None,
            k_prime_bound: None,
            element: None,
        }
    }

    fn success(
        strategy: Strategy,
        g: &LiftedElement,
        examined: usize,
        o: &OrderOracle,
        f: &[LiftedElement],
    ) -> Result<Self, ApproxError> {
        let certificates = f
            .iter()
            .filter(|h| !h.is_identity())
            .map(|h| Ok(SignCertificate { element: h.word().clone(), sign: order_sign(o, h)? }))
            .collect::<Result<_, ApproxError>>()?;
        Ok(ConjugatorReport {
            found: true,
            witness: Some(g.word().clone()),
            word_length: Some(g.word().len()),
            certificates,
            element: Some(g.clone()),
            ..ConjugatorReport::empty(strategy, examined)
        })
    }
}

fn check_hypothesis(gamma: &Gamma, o: &OrderOracle, o_prime: &OrderOracle) -> Result<(), ApproxError> {
    let (left, right) = (abc_sign(o, gamma), abc_sign(o_prime, gamma));
    if left != right {
        return Err(ApproxError::HypothesisViolated { left, right });
    }
    Ok(())
}

/// Float pre-test of the signs of `F` at the moved basepoint: `false` only
/// when some sign certainly disagrees.
fn float_plausible(g: &LiftedElement, p_angle: f64, reversed: bool, expected: &[(LiftedElement, Sign)]) -> bool {
    let t = g.image_angle_f64(p_angle);
    expected.iter().all(|(f, s)| match f.displacement_f64(t) {
        Some(d) if d.abs() > 1e-7 => {
            let raw = if d > 0.0 { Sign::Pos } else { Sign::Neg };
            (if reversed { raw.flip() } else { raw }) == *s
        }
        _ => true,
    })
}

/// Breadth-first search over balls of increasing radius, without checking
/// the `abc` hypothesis; used to exhibit the obstruction.
pub fn exhaustive_search(
    gamma: &Gamma,
    o: &OrderOracle,
    o_prime: &OrderOracle,
    f: &[LiftedElement],
    budget: &SearchBudget,
) -> Result<ConjugatorReport, ApproxError> {
    let f: Vec<LiftedElement> = f.iter().filter(|h| !h.is_identity()).cloned().collect();
    let expected: Vec<(LiftedElement, Sign)> =
        f.iter().map(|h| Ok((h.clone(), order_sign(o, h)?))).collect::<Result<_, ApproxError>>()?;
    let angle = o_prime.basepoint().angle_f64();
    let mut examined = 0;
    for n in 0..=budget.max_word_length {
        for g in gamma.sphere(n) {
            if examined >= budget.max_candidates {
                return Ok(ConjugatorReport::empty(Strategy::Bfs, examined));
            }
            examined += 1;
            if !float_plausible(&g, angle, o_prime.reversed, &expected) {
                continue;
            }
            if in_neighborhood(&conjugate_order(o_prime, &g), o, &f)? {
                return ConjugatorReport::success(Strategy::Bfs, &g, examined, o, &f);
            }
        }
    }
    Ok(ConjugatorReport::empty(Strategy::Bfs, examined))
}

/// Shortest `g` (up to the budget) with `≺′_g` in the `F`-neighbourhood of
/// `≺`, by breadth-first enumeration.
pub fn find_conjugator_bfs(
    gamma: &Gamma,
    o: &OrderOracle,
    o_prime: &OrderOracle,
    f: &[LiftedElement],
    budget: &SearchBudget,
) -> Result<ConjugatorReport, ApproxError> {
    check_hypothesis(gamma, o, o_prime)?;
    exhaustive_search(gamma, o, o_prime, f, budget)
}

fn translation_length(g: &LiftedElement) -> f64 {
    let t = g.mat().trace().to_f64().abs();
    2.0 * (t / 2.0).max(1.0).acosh()
}

/// `B` such that `g k′ʲ g⁻¹ ∈ F` forces `|j| ≤ B`: conjugation preserves
/// translation length and `ℓ(k′ʲ) = |j| ℓ(k′)`.
fn power_bound(k: &LiftedElement, f: &[LiftedElement]) -> u32 {
    let lk = translation_length(k);
    let lmax = f.iter().map(translation_length).fold(0.0, f64::max);
    if lk <= 0.0 {
        return 0;
    }
    (lmax / lk + 1e-9).floor() as u32 + 1
}

fn strip_reversal(o: &OrderOracle, o_prime: &OrderOracle) -> (OrderOracle, OrderOracle) {
    if o.reversed && o_prime.reversed {
        (o.reversed(), o_prime.reversed())
    } else {
        (o.clone(), o_prime.clone())
    }
}

/// Conjugator search steered by the dynamics at the basepoint.
///
/// A neighbourhood of the basepoint `p` of `≺` (or one side of it, chosen
/// by the tie-break, when `p` is fixed by part of `F`) on which every
/// element of `F` has its `≺`-sign is certified; then a `g` moving the
/// basepoint of `≺′` into it is searched for, and the answer verified
/// exactly.
pub fn find_conjugator_guided(
    gamma: &Gamma,
    o: &OrderOracle,
    o_prime: &OrderOracle,
    f: &[LiftedElement],
    budget: &SearchBudget,
) -> Result<ConjugatorReport, ApproxError> {
    check_hypothesis(gamma, o, o_prime)?;
    let f: Vec<LiftedElement> = f.iter().filter(|h| !h.is_identity()).cloned().collect();
    let (ou, opu) = strip_reversal(o, o_prime);
    let p = ou.basepoint().clone();
    let p_prime = opu.basepoint().clone();

    let (target, case) = match uniform_sign_interval(&p, &f, budget.max_halvings()) {
        UniformSign::Interval(v) if v.is_whole_line() => {
            let g = gamma.identity().clone();
            if in_neighborhood(&conjugate_order(o_prime, &g), o, &f)? {
                let mut r = ConjugatorReport::success(Strategy::Guided, &g, 1, o, &f)?;
                r.case = Some(GuidedCase::WholeLine);
                return Ok(r);
            }
            return Ok(ConjugatorReport::empty(Strategy::Guided, 1));
        }
        UniformSign::Interval(v) => {
            let (Some(lo), Some(hi)) = (v.lo.clone(), v.hi.clone()) else { unreachable!("bounded") };
            if v.radius_left == 0.0 || v.radius_right == 0.0 {
                return Err(ApproxError::Uncertified(budget.max_halvings()));
            }
            (Target { lo, hi, periodic: true }, GuidedCase::Free { radius_left: v.radius_left, radius_right: v.radius_right })
        }
        UniformSign::Sides(report) => {
            let side = tiebreak_side(&ou, &p, &f, &report.fixing)?;
            let chosen = match side {
                Side::Left => report.left.clone(),
                Side::Right => report.right.clone(),
            }
            .ok_or(ApproxError::Uncertified(budget.max_halvings()))?;
            let inner = inner_point(&p, &chosen.end, chosen.radius, 8)
                .ok_or(ApproxError::Uncertified(budget.max_halvings()))?;
            let (lo, hi) = match side {
                Side::Left => (chosen.end.clone(), inner),
                Side::Right => (inner, chosen.end.clone()),
            };
            let stabilizer = match gamma.point_stabilizer(&p, budget.stabilizer_depth) {
                Stabilizer::Cyclic { generator, .. } => Some(generator.word().clone()),
                Stabilizer::TrivialUpToDepth(_) => None,
            };
            let case = GuidedCase::Fixed { stabilizer, fixing: report.fixing.clone(), side, radius: chosen.radius };
            (Target { lo, hi, periodic: true }, case)
        }
    };

    // Stabilizer of the basepoint of ≺′, for the conjugate check.
    let k_prime = match gamma.point_stabilizer(&p_prime, budget.stabilizer_depth) {
        Stabilizer::Cyclic { generator, .. } => Some(generator),
        Stabilizer::TrivialUpToDepth(_) => None,
    };
    let bound = k_prime.as_ref().map(|k| power_bound(k, &f));
    let keys: HashSet<ElementKey> = f.iter().map(|h| h.key().clone()).collect();
    let mut verify_error = None;
    let accept = |g: &LiftedElement| {
        if let (Some(k), Some(b)) = (&k_prime, bound) {
            let c = g.conjugate(k);
            let mut pw = c.clone();
            for _ in 1..=b {
                if keys.contains(pw.key()) || keys.contains(pw.inverse().key()) {
                    return false;
                }
                pw = pw.compose(&c);
            }
        }
        match in_neighborhood(&conjugate_order(o_prime, g), o, &f) {
            Ok(ok) => ok,
            Err(e) => {
                verify_error = Some(e);
                false
            }
        }
    };
    match find_point_mover(gamma, &p_prime, &target, budget, accept) {
        Ok(m) => {
            let mut r = ConjugatorReport::success(Strategy::Guided, &m.element, m.candidates_examined, o, &f)?;
            r.case = Some(case);
            r.k_prime_bound = bound;
            Ok(r)
        }
        Err(ApproxError::BudgetExhausted { candidates, .. }) => {
            if let Some(e) = verify_error {
                return Err(e.into());
            }
            let mut r = ConjugatorReport::empty(Strategy::Guided, candidates);
            r.case = Some(case);
            r.k_prime_bound = bound;
            Ok(r)
        }
        Err(e) => Err(e),
    }
}

/// The side of `p` whose germs decide the signs of elements fixing `p`: a
/// contracting element is positive exactly when the left side is used.
fn tiebreak_side(o: &OrderOracle, p: &LiftPoint, f: &[LiftedElement], fixing: &[Word]) -> Result<Side, ApproxError> {
    for h in f.iter().filter(|h| fixing.contains(h.word())) {
        if h.classify() != Class::Hyperbolic {
            continue;
        }
        let contracting = match h.derivative_cmp_one(p) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => continue,
        };
        let pos = (order_sign(o, h)? == Sign::Pos) != o.reversed;
        return Ok(if pos == contracting { Side::Left } else { Side::Right });
    }
    Err(ApproxError::Uncertified(0))
}
