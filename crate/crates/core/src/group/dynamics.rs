//! Classification, translation numbers, fixed points and stabilizers.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::element::LiftedElement;
use super::gamma::Gamma;
use super::point::{cross, dir_cmp, norm_sq, normalize, LiftPoint, Vec2};
use super::GroupError;
use crate::numerics::{Elem, NumSign, Tower};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Class {
    /// Projectively trivial: a power of `abc`.
    CentralPower,
    Elliptic,
    /// Trace ±2 but not ±I; absent from a cocompact group, kept for
    /// completeness.
    Parabolic,
    Hyperbolic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixedKind {
    Attracting,
    Repelling,
}

/// A fixed point on the circle, as a normalized direction.
#[derive(Clone, Debug)]
pub struct FixedPoint {
    pub direction: Vec2,
    pub kind: FixedKind,
}

#[derive(Clone, Debug)]
pub(crate) struct Analysis {
    class: Class,
    /// Attracting and repelling directions of a hyperbolic element.
    fixed: Option<(Vec2, Vec2)>,
}

/// Stabilizer of a point of the line within the searched ball.
#[derive(Clone, Debug)]
pub enum Stabilizer {
    /// Nothing in `ball(depth)` fixes the point; larger elements might.
    TrivialUpToDepth(usize),
    /// Generated by `generator`, which fixes the point with derivative < 1
    /// there: points just left of it move right, points just right move left.
    Cyclic { generator: LiftedElement, depth: usize },
}

fn analyze(g: &LiftedElement) -> Analysis {
    let m = g.mat();
    if m.is_central() {
        return Analysis { class: Class::CentralPower, fixed: None };
    }
    let t = m.trace();
    let disc = &t.square() - &t.tower().int(4);
    match disc.sign() {
        NumSign::Negative => Analysis { class: Class::Elliptic, fixed: None },
        NumSign::Zero => Analysis { class: Class::Parabolic, fixed: None },
        NumSign::Positive => {
            let s = match disc.sqrt_exact() {
                Some(s) if s.sign() == NumSign::Negative => -&s,
                Some(s) => s,
                None => {
                    let ext = extension_for(&disc);
                    ext.generator(ext.depth() - 1)
                }
            };
            let half = BigRational::new(BigInt::from(1), BigInt::from(2));
            let st = if t.sign() == NumSign::Positive { s.clone() } else { -&s };
            // |e_out| > 1 > |e_in|.
            let e_out = (&t + &st).scale(&half);
            let e_in = (&t - &st).scale(&half);
            Analysis { class: Class::Hyperbolic, fixed: Some((eigenvector(g, &e_out), eigenvector(g, &e_in))) }
        }
    }
}

/// One shared extension per discriminant, so that fixed points of
/// conjugate elements (equal traces) can be compared with each other.
fn extension_for(disc: &Elem) -> Tower {
    static CACHE: OnceLock<Mutex<HashMap<Elem, Tower>>> = OnceLock::new();
    let mut cache = CACHE.get_or_init(Default::default).lock().expect("extension cache poisoned");
    cache.entry(disc.clone()).or_insert_with(|| disc.tower().adjoin_sqrt("s", disc, true)).clone()
}

fn eigenvector(g: &LiftedElement, e: &Elem) -> Vec2 {
    let [[a, b], [c, d]] = &g.mat().m;
    let v = [b.clone(), e - a];
    if !(v[0].is_zero() && v[1].is_zero()) {
        return normalize(v);
    }
    normalize([e - d, c.clone()])
}

fn analysis(g: &LiftedElement) -> &Analysis {
    g.analysis_cell().get_or_init(|| analyze(g))
}

impl LiftedElement {
    /// Exact trace classification of the projective image.
    pub fn classify(&self) -> Class {
        analysis(self).class
    }

    /// Fixed points on the circle, labelled by the derivative there.
    pub fn fixed_points(&self) -> Result<Vec<FixedPoint>, GroupError> {
        match &analysis(self).fixed {
            Some((att, rep)) => Ok(vec![
                FixedPoint { direction: att.clone(), kind: FixedKind::Attracting },
                FixedPoint { direction: rep.clone(), kind: FixedKind::Repelling },
            ]),
            None => Err(GroupError::NotHyperbolic(self.word().to_string())),
        }
    }

    /// The fixed point of the given kind on sheet `sheet`.
    pub fn fixed_point(&self, kind: FixedKind, sheet: i64) -> Result<LiftPoint, GroupError> {
        let fp = self.fixed_points()?;
        let d = fp.into_iter().find(|f| f.kind == kind).expect("both kinds present").direction;
        Ok(LiftPoint::new(sheet, d))
    }

    /// Integer `k` with `ρ(g)(y) = y + k` at every lift `y` of a fixed
    /// direction `d`.
    pub fn shift_at(&self, d: &Vec2) -> i64 {
        self.apply(&LiftPoint::new(0, d.clone())).sheet()
    }

    /// Exact translation number `lim ρ(g)ⁿ(x)/n`.
    pub fn translation_number(&self) -> Result<BigRational, GroupError> {
        let int = |k: i64| BigRational::from_integer(BigInt::from(k));
        match self.classify() {
            Class::CentralPower => Ok(int(self.winding())),
            Class::Hyperbolic => {
                let (att, _) = analysis(self).fixed.as_ref().expect("hyperbolic");
                Ok(int(self.shift_at(att)))
            }
            Class::Parabolic => {
                let t = self.mat().trace();
                let e = t.scale(&BigRational::new(BigInt::from(1), BigInt::from(2)));
                Ok(int(self.shift_at(&eigenvector(self, &e))))
            }
            Class::Elliptic => {
                // A finite-order projective image: gᵐ is central.
                let mut p = self.clone();
                for m in 1..=MAX_ELLIPTIC_ORDER {
                    if p.mat().is_central() {
                        return Ok(BigRational::new(BigInt::from(p.winding()), BigInt::from(m)));
                    }
                    p = p.compose(self);
                }
                Err(GroupError::IterationBudgetExceeded(MAX_ELLIPTIC_ORDER))
            }
        }
    }

    /// Whether the projective image fixes the direction of `x`.
    pub fn fixes_direction(&self, x: &LiftPoint) -> bool {
        let d = x.direction();
        cross(&self.mat().apply(d), d).is_zero()
    }

    /// Compare the derivative of `ρ(g)` at a point it fixes with 1.
    pub fn derivative_cmp_one(&self, x: &LiftPoint) -> Ordering {
        let d = x.direction();
        // derivative = |d|² / |M d|²
        let num = norm_sq(d);
        let den = norm_sq(&self.mat().apply(d));
        match (&num - &den).sign() {
            NumSign::Negative => Ordering::Less,
            NumSign::Zero => Ordering::Equal,
            NumSign::Positive => Ordering::Greater,
        }
    }
}

/// Elliptic elements of the triangle group have order at most 7.
const MAX_ELLIPTIC_ORDER: u32 = 64;

impl Gamma {
    /// Cyclic stabilizer of `x` in the lifted group, found by searching
    /// `ball(depth)`. The generator is reduced by a Euclidean descent on
    /// derivatives at `x`, so it is primitive among the found elements.
    pub fn point_stabilizer(&self, x: &LiftPoint, depth: usize) -> Stabilizer {
        let (u, v) = (x.direction()[0].to_f64(), x.direction()[1].to_f64());
        let nrm = (u * u + v * v).sqrt();
        let mut found: Vec<LiftedElement> = Vec::new();
        for g in self.punctured_ball(depth) {
            if g.mat().is_central() {
                continue;
            }
            let [[a, b], [c, d]] = *g.approx();
            let cr = u * (c * u + d * v) - v * (a * u + b * v);
            let scale = (a.abs() + b.abs() + c.abs() + d.abs()) * nrm * nrm;
            if cr.abs() > 1e-9 * scale.max(1e-300) || !g.fixes_direction(x) {
                continue;
            }
            let k = g.shift_at(x.direction());
            let h = g.compose(&self.central(-k));
            let h = if h.derivative_cmp_one(x) == Ordering::Greater { h.inverse() } else { h };
            if !h.is_identity() {
                found.push(h);
            }
        }
        let Some(mut gen) = found.pop() else { return Stabilizer::TrivialUpToDepth(depth) };
        for mut h in found {
            loop {
                if gen.same_element(&h) {
                    break;
                }
                // Smaller derivative = higher power of the primitive generator.
                match derivative_cmp(&gen, &h, x) {
                    Ordering::Less => {
                        let r = gen.compose(&h.inverse());
                        gen = h;
                        h = r;
                    }
                    _ => h = h.compose(&gen.inverse()),
                }
                if h.is_identity() {
                    break;
                }
            }
        }
        Stabilizer::Cyclic { generator: gen, depth }
    }
}

/// Compare derivatives at a common fixed point `x`.
fn derivative_cmp(g: &LiftedElement, h: &LiftedElement, x: &LiftPoint) -> Ordering {
    let d = x.direction();
    // derivative_g < derivative_h  ⟺  |M_g d|² > |M_h d|²
    let lg = norm_sq(&g.mat().apply(d));
    let lh = norm_sq(&h.mat().apply(d));
    match (&lh - &lg).sign() {
        NumSign::Negative => Ordering::Less,
        NumSign::Zero => Ordering::Equal,
        NumSign::Positive => Ordering::Greater,
    }
}

/// Position of `d` relative to the arc from `lo` to `hi` (exclusive) on the
/// projective circle, running in the direction of increasing angle.
pub fn in_open_arc(d: &Vec2, lo: &Vec2, hi: &Vec2) -> bool {
    let after_lo = dir_cmp(lo, d) == Ordering::Less;
    let before_hi = dir_cmp(d, hi) == Ordering::Less;
    if dir_cmp(lo, hi) == Ordering::Less {
        after_lo && before_hi
    } else {
        after_lo || before_hi
    }
}
