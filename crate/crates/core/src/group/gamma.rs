//! The (2,3,7) triangle group lifted to the line, with ball enumeration.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::element::{ElementKey, LiftedElement, Mat2};
use super::word::{Letter, Word};
use super::GroupError;
use crate::numerics::{Elem, Tower};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The field `Q(λ, μ)` with `λ = 2cos(π/7)` and `μ = √(λ² − 3)`, built
/// once per process so that all its elements can be combined.
pub fn heptagonal_field() -> Tower {
    static FIELD: OnceLock<Tower> = OnceLock::new();
    FIELD
        .get_or_init(|| {
            let k = Tower::adjoin_root("l", vec![q(1, 1), q(-2, 1), q(-1, 1), q(1, 1)], q(9, 5), q(181, 100));
            let l = k.generator(0);
            let rad = &l.square() - &k.int(3);
            k.adjoin_sqrt("m", &rad, true)
        })
        .clone()
}

/// Generator matrices: `A` is the half turn about the origin of the disk,
/// `B` the order-3 rotation with trace 1 and `C = B⁻¹A` the order-7 one
/// with trace `λ`.
pub fn generator_matrices(field: &Tower) -> (Mat2, Mat2, Mat2) {
    let l = field.generator(0);
    let m = field.generator(1);
    let half = q(1, 2);
    let a = Mat2::new(field.zero(), field.int(-1), field.one(), field.zero());
    let b = Mat2::new(
        field.rational(half.clone()),
        (&m - &l).scale(&half),
        (&l + &m).scale(&half),
        field.rational(half),
    );
    let c = b.adj().mul(&a);
    (a, b, c)
}

/// Outcome of one relation check.
#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub holds: bool,
}

#[derive(Default)]
struct BallCache {
    spheres: Vec<Vec<LiftedElement>>,
    index: HashMap<ElementKey, (usize, usize)>,
}

/// The lifted triangle group with its generators and a cache of balls.
pub struct Gamma {
    field: Tower,
    letters: [LiftedElement; 6],
    abc: LiftedElement,
    identity: LiftedElement,
    balls: Mutex<BallCache>,
}

impl Gamma {
    /// The standard instance, built and verified once.
    pub fn standard() -> &'static Gamma {
        static G: OnceLock<Gamma> = OnceLock::new();
        G.get_or_init(|| Gamma::new().expect("generator construction verified"))
    }

    pub fn new() -> Result<Gamma, GroupError> {
        let field = heptagonal_field();
        let (a, b, c) = generator_matrices(&field);
        Gamma::from_matrices(field, a, b, c)
    }

    /// Lift the three matrices canonically and verify every relation.
    pub fn from_matrices(field: Tower, a: Mat2, b: Mat2, c: Mat2) -> Result<Gamma, GroupError> {
        let g = Gamma::unchecked(field, a, b, c);
        let failed: Vec<String> = g.relation_checks().into_iter().filter(|r| !r.holds).map(|r| r.relation).collect();
        if failed.is_empty() {
            Ok(g)
        } else {
            Err(GroupError::ConstructionFailure(failed.join(", ")))
        }
    }

    /// Lift without verification, for inspecting a broken construction.
    pub fn unchecked(field: Tower, a: Mat2, b: Mat2, c: Mat2) -> Gamma {
        let lift = |m: Mat2, l: Letter| LiftedElement::from_parts(m, 0, Word::letter(l));
        let (ea, eb, ec) = (lift(a, Letter::A), lift(b, Letter::B), lift(c, Letter::C));
        let letters = [ea.clone(), ea.inverse(), eb.clone(), eb.inverse(), ec.clone(), ec.inverse()];
        let abc = ea.compose(&eb).compose(&ec);
        let identity = LiftedElement::from_parts(Mat2::identity(&field), 0, Word::identity());
        let mut cache = BallCache::default();
        cache.index.insert(identity.key().clone(), (0, 0));
        cache.spheres.push(vec![identity.clone()]);
        Gamma { field, letters, abc, identity, balls: Mutex::new(cache) }
    }

    pub fn relation_checks(&self) -> Vec<RelationCheck> {
        let [a, _, b, _, c, _] = &self.letters;
        let abc = &self.abc;
        let unit = |m: &Mat2| m.det().is_one();
        let is_translation_by_one = abc.mat().is_central() && abc.winding() == 1;
        let rel = |name: &str, holds: bool| RelationCheck { relation: name.to_string(), holds };
        vec![
            rel("det a = det b = det c = 1", unit(a.mat()) && unit(b.mat()) && unit(c.mat())),
            rel("a^2 = abc", a.pow(2).compose(&abc.inverse()).is_identity()),
            rel("b^3 = abc", b.pow(3).compose(&abc.inverse()).is_identity()),
            rel("c^7 = abc", c.pow(7).compose(&abc.inverse()).is_identity()),
            rel("abc is translation by 1", is_translation_by_one),
        ]
    }

    pub fn field(&self) -> &Tower {
        &self.field
    }

    pub fn generator(&self, l: Letter) -> &LiftedElement {
        &self.letters[Letter::ALL.iter().position(|x| *x == l).expect("letter")]
    }

    pub fn generators(&self) -> (LiftedElement, LiftedElement, LiftedElement) {
        (self.letters[0].clone(), self.letters[2].clone(), self.letters[4].clone())
    }

    /// The central element `abc`, spelled `abc`.
    pub fn abc(&self) -> &LiftedElement {
        &self.abc
    }

    pub fn identity(&self) -> &LiftedElement {
        &self.identity
    }

    /// The element spelled by `w`, keeping `w` as its witness.
    pub fn element(&self, w: &Word) -> LiftedElement {
        let mut acc = self.identity.clone();
        for &l in w.letters() {
            acc = acc.compose(self.generator(l));
        }
        acc.with_word(w.clone())
    }

    pub fn parse(&self, s: &str) -> Result<LiftedElement, GroupError> {
        let w: Word = s.parse().map_err(|e| GroupError::BadWord(format!("{e}")))?;
        Ok(self.element(&w))
    }

    /// `abc^n`.
    pub fn central(&self, n: i64) -> LiftedElement {
        self.abc.pow(n).with_word(self.abc.word().pow(n))
    }

    fn grow(&self, n: usize) {
        let mut cache = self.balls.lock().expect("ball cache poisoned");
        while cache.spheres.len() <= n {
            let k = cache.spheres.len();
            let mut next = Vec::new();
            let prev = cache.spheres[k - 1].clone();
            for g in &prev {
                for &l in &Letter::ALL {
                    if g.word().letters().last() == Some(&l.inverse()) {
                        continue;
                    }
                    let h = g.compose(self.generator(l));
                    if cache.index.contains_key(h.key()) {
                        continue;
                    }
                    cache.index.insert(h.key().clone(), (k, next.len()));
                    next.push(h);
                }
            }
            cache.spheres.push(next);
        }
    }

    /// Elements of word length exactly `n`, by shortlex-minimal spelling.
    pub fn sphere(&self, n: usize) -> Vec<LiftedElement> {
        self.grow(n);
        self.balls.lock().expect("ball cache poisoned").spheres[n].clone()
    }

    /// One representative per element of length `≤ n`, in (length, lex)
    /// order of the shortlex-minimal spelling.
    pub fn ball(&self, n: usize) -> Vec<LiftedElement> {
        self.grow(n);
        let cache = self.balls.lock().expect("ball cache poisoned");
        cache.spheres[..=n].iter().flatten().cloned().collect()
    }

    /// `ball(n)` without the identity.
    pub fn punctured_ball(&self, n: usize) -> Vec<LiftedElement> {
        self.ball(n).into_iter().skip(1).collect()
    }

    /// Word length and shortlex spelling of `g`, if it lies in `ball(n)`.
    pub fn lookup(&self, g: &LiftedElement, n: usize) -> Option<LiftedElement> {
        self.grow(n);
        let cache = self.balls.lock().expect("ball cache poisoned");
        cache.index.get(g.key()).filter(|(k, _)| *k <= n).map(|&(k, i)| cache.spheres[k][i].clone())
    }

    /// Exact matrix entries of the generators, as tower coordinates.
    pub fn exact_matrices(&self) -> Vec<(String, Vec<Vec<String>>)> {
        let (a, b, c) = self.generators();
        [a, b, c]
            .iter()
            .map(|g| (g.word().to_string(), g.mat().m.iter().flatten().map(Elem::coordinate_strings).collect()))
            .collect()
    }
}
