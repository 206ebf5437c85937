//! Certified neighbourhoods on which elements keep the sign of their
//! displacement.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::group::{cross, dir_cmp, Class, LiftPoint, LiftedElement, Vec2, Word};
use crate::numerics::{Elem, NumSign, Tower};
use crate::orders::Sign;

/// Open interval `(lo, hi)` of the line; `None` endpoints are infinite.
#[derive(Clone, Debug)]
pub struct SignInterval {
    pub lo: Option<LiftPoint>,
    pub hi: Option<LiftPoint>,
    /// Certified radii on each side of the centre, in line units.
    pub radius_left: f64,
    pub radius_right: f64,
}

/// One side of a point fixed by part of `F`.
#[derive(Clone, Debug)]
pub struct SideInterval {
    /// The far end; the near end is the fixed point itself.
    pub end: LiftPoint,
    pub radius: f64,
    /// The sign of every element of `F` on the open side interval.
    pub signs: Vec<(Word, Sign)>,
}

/// Behaviour near a point fixed by some elements of `F`.
#[derive(Clone, Debug)]
pub struct SideReport {
    pub fixing: Vec<Word>,
    pub left: Option<SideInterval>,
    pub right: Option<SideInterval>,
}

#[derive(Clone, Debug)]
pub enum UniformSign {
    /// Every element of `F` keeps its sign at `p` throughout the interval.
    Interval(SignInterval),
    Sides(SideReport),
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RadiusLog {
    pub left: f64,
    pub right: f64,
}

/// Elements whose lift can fix points: hyperbolic (or parabolic) with
/// zero shift at their fixed directions. Every other element moves every
/// point the same way.
fn may_fix_points(f: &LiftedElement) -> bool {
    match f.classify() {
        Class::Hyperbolic => {
            let fp = f.fixed_points().expect("hyperbolic");
            f.shift_at(&fp[0].direction) == 0
        }
        Class::Parabolic => true,
        _ => false,
    }
}

/// `Q(s) = cross(v, Mv)` along `v = d1 + s (d2 − d1)`, as `(α, β, γ)`.
fn quadratic(f: &LiftedElement, d1: &Vec2, d2: &Vec2) -> (Elem, Elem, Elem) {
    let m = f.mat();
    let e = [&d2[0] - &d1[0], &d2[1] - &d1[1]];
    let md1 = m.apply(d1);
    let me = m.apply(&e);
    let gamma = cross(d1, &md1);
    let beta = &cross(d1, &me) + &cross(&e, &md1);
    let alpha = cross(&e, &me);
    (alpha, beta, gamma)
}

fn sgn(e: &Elem) -> NumSign {
    e.sign()
}

fn positive(e: &Elem) -> bool {
    sgn(e) == NumSign::Positive
}

/// No root of `αs² + βs + γ` in `[0, 1]`.
fn root_free_closed(alpha: &Elem, beta: &Elem, gamma: &Elem) -> bool {
    let q0 = sgn(gamma);
    let q1 = sgn(&(&(alpha + beta) + gamma));
    if q0 == NumSign::Zero || q1 == NumSign::Zero || q0 != q1 {
        return false;
    }
    if alpha.is_zero() {
        return true;
    }
    // Vertex strictly inside and real roots.
    let two_a = alpha.scale(&BigRational::from_integer(BigInt::from(2)));
    let inside = positive(&(&(-beta) * alpha)) && positive(&(&(&two_a + beta) * alpha));
    let disc = &beta.square() - &(&alpha.scale(&BigRational::from_integer(BigInt::from(4))) * gamma);
    !(inside && sgn(&disc) != NumSign::Negative)
}

/// Root at `s = 0` only, none in `(0, 1]`, for `αs² + βs` (γ = 0).
fn root_free_after_zero(alpha: &Elem, beta: &Elem) -> bool {
    let q1 = sgn(&(alpha + beta));
    if q1 == NumSign::Zero {
        return false;
    }
    if alpha.is_zero() {
        return true;
    }
    // Other root −β/α must not lie in (0, 1).
    !(positive(&(&(-beta) * alpha)) && positive(&(&(alpha + beta) * alpha)))
}

/// Rational approximation of the direction of `p` at `bits` bits.
fn rational_approx(p: &LiftPoint, bits: u32) -> [BigRational; 2] {
    let d = p.direction();
    let f = |e: &Elem| {
        let iv = e.enclose(bits);
        (iv.lo_rational() + iv.hi_rational()) / BigRational::from_integer(BigInt::from(2))
    };
    [f(&d[0]), f(&d[1])]
}

/// Rotate by `2·atan(t)` (counter-clockwise for `t > 0`).
fn rotate(v: &[BigRational; 2], t: &BigRational) -> [BigRational; 2] {
    let one = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    let n = &one + t * t;
    let c = (&one - t * t) / &n;
    let s = &two * t / &n;
    [&c * &v[0] - &s * &v[1], &s * &v[0] + &c * &v[1]]
}

fn radius_of(t: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    2.0 * t.to_f64().unwrap_or(0.0).atan() / std::f64::consts::PI
}

/// A rational point rotated from `p` by parameter `t` towards `side`
/// (`+1` right, `-1` left), with the raw vector used for the arc, or
/// `None` when rounding put it on the wrong side.
fn offset_point(p: &LiftPoint, t: &BigRational, right: bool, bits: u32) -> Option<(LiftPoint, Vec2)> {
    let base = rational_approx(p, bits);
    let tt = if right { t.clone() } else { -t.clone() };
    let raw = rotate(&base, &tt);
    let q = Tower::rationals();
    let raw_e: Vec2 = [q.rational(raw[0].clone()), q.rational(raw[1].clone())];
    let probe = LiftPoint::new(0, raw_e.clone());
    let order = dir_cmp(probe.direction(), p.direction());
    let sheet = match (right, order) {
        (_, Ordering::Equal) => return None,
        (true, Ordering::Greater) | (false, Ordering::Less) => p.sheet(),
        (true, Ordering::Less) => p.sheet() + 1,
        (false, Ordering::Greater) => p.sheet() - 1,
    };
    let point = LiftPoint::new(sheet, raw_e.clone());
    // Guard against rounding across p.
    let ok = if right { point > *p } else { point < *p };
    ok.then_some((point, raw_e))
}

/// Same orientation as the raw vector, so the segment sweeps the short arc.
fn oriented(d: &Vec2, raw: &Vec2) -> Vec2 {
    let dot = &(&d[0] * &raw[0]) + &(&d[1] * &raw[1]);
    if dot.sign() == NumSign::Negative {
        [-&d[0], -&d[1]]
    } else {
        d.clone()
    }
}

fn sign_at(f: &LiftedElement, x: &LiftPoint) -> Option<Sign> {
    Sign::from_ordering(f.apply(x).cmp_exact(x))
}

/// Largest certified radius (by halving `t` from 1/2) on one side.
fn certify_side(
    p: &LiftPoint,
    movers: &[&LiftedElement],
    fixers: &[&LiftedElement],
    right: bool,
    max_halvings: u32,
) -> Option<(LiftPoint, BigRational)> {
    let mut t = BigRational::new(BigInt::one(), BigInt::from(2));
    for k in 1..=max_halvings {
        let bits = 64 + 2 * k;
        if let Some((end, raw)) = offset_point(p, &t, right, bits) {
            let dp = oriented(p.direction(), &raw);
            let ok = movers.iter().all(|f| {
                let (a, b, c) = quadratic(f, &dp, &raw);
                root_free_closed(&a, &b, &c)
            }) && fixers.iter().all(|f| {
                let (a, b, _) = quadratic(f, &dp, &raw);
                root_free_after_zero(&a, &b)
            });
            if ok {
                return Some((end, t));
            }
        }
        t /= BigRational::from_integer(BigInt::from(2));
    }
    None
}

/// A neighbourhood of `p` on which each `f ∈ F` moves points the same way
/// it moves `p`; when some `f` fixes `p`, the behaviour on each side.
pub fn uniform_sign_interval(p: &LiftPoint, f: &[LiftedElement], max_halvings: u32) -> UniformSign {
    let candidates: Vec<&LiftedElement> = f.iter().filter(|g| !g.is_identity() && may_fix_points(g)).collect();
    let (fixers, movers): (Vec<&LiftedElement>, Vec<&LiftedElement>) =
        candidates.into_iter().partition(|g| g.apply(p) == *p);
    if fixers.is_empty() {
        if movers.is_empty() {
            return UniformSign::Interval(SignInterval {
                lo: None,
                hi: None,
                radius_left: f64::INFINITY,
                radius_right: f64::INFINITY,
            });
        }
        let left = certify_side(p, &movers, &[], false, max_halvings);
        let right = certify_side(p, &movers, &[], true, max_halvings);
        let (radius_left, radius_right) =
            (left.as_ref().map_or(0.0, |(_, t)| radius_of(t)), right.as_ref().map_or(0.0, |(_, t)| radius_of(t)));
        return UniformSign::Interval(SignInterval {
            lo: left.map(|(e, _)| e).or_else(|| Some(p.clone())),
            hi: right.map(|(e, _)| e).or_else(|| Some(p.clone())),
            radius_left,
            radius_right,
        });
    }
    let side = |right: bool| {
        certify_side(p, &movers, &fixers, right, max_halvings).map(|(end, t)| {
            let signs = f
                .iter()
                .filter(|g| !g.is_identity())
                .map(|g| (g.word().clone(), sign_at(g, &end).expect("no fixed point on the side interval")))
                .collect();
            SideInterval { end, radius: radius_of(&t), signs }
        })
    };
    UniformSign::Sides(SideReport {
        fixing: fixers.iter().map(|g| g.word().clone()).collect(),
        left: side(false),
        right: side(true),
    })
}

/// A rational point strictly between `p` and `end`, at `1/2^shrink` of the
/// way in rotation parameter.
pub fn inner_point(p: &LiftPoint, end: &LiftPoint, radius: f64, shrink: u32) -> Option<LiftPoint> {
    let right = end > p;
    let t = (radius * std::f64::consts::PI / 2.0).tan() / f64::from(shrink).exp2();
    let t = BigRational::from_float(t)?;
    let (q, _) = offset_point(p, &t, right, 64 + 2 * shrink + 64)?;
    let between = if right { q > *p && q < *end } else { q < *p && q > *end };
    between.then_some(q)
}

impl SignInterval {
    pub fn is_whole_line(&self) -> bool {
        self.lo.is_none() && self.hi.is_none()
    }

    pub fn contains(&self, x: &LiftPoint) -> bool {
        self.lo.as_ref().is_none_or(|lo| lo < x) && self.hi.as_ref().is_none_or(|hi| x < hi)
    }

    pub fn radii(&self) -> RadiusLog {
        RadiusLog { left: self.radius_left, right: self.radius_right }
    }
}
