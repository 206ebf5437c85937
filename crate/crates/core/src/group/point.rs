//! Points of the real line as lifts of directions in the plane.
//!
//! A point is a sheet index `n` and a direction `d` normalized into the
//! half-open upper half plane; it stands for `n + angle(d)/π`. Directions
//! are exact vectors, never rescaled, so arithmetic stays in the tower.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};

use crate::numerics::{Elem, NumSign, Tower};

pub type Vec2 = [Elem; 2];

pub fn cross(u: &Vec2, v: &Vec2) -> Elem {
    &(&u[0] * &v[1]) - &(&u[1] * &v[0])
}

pub fn norm_sq(v: &Vec2) -> Elem {
    &v[0].square() + &v[1].square()
}

/// Representative of the projective class of `v` with `v1 > 0`, or
/// `v1 = 0, v0 > 0`.
///
/// # Panics
///
/// Panics on the zero vector.
pub fn normalize(v: Vec2) -> Vec2 {
    let flip = match v[1].sign() {
        NumSign::Positive => false,
        NumSign::Negative => true,
        NumSign::Zero => match v[0].sign() {
            NumSign::Positive => false,
            NumSign::Negative => true,
            NumSign::Zero => panic!("zero vector has no direction"),
        },
    };
    if flip {
        [-&v[0], -&v[1]]
    } else {
        v
    }
}

/// Compare the angles of two normalized directions in `[0, π)`.
pub fn dir_cmp(d1: &Vec2, d2: &Vec2) -> Ordering {
    match cross(d1, d2).sign() {
        NumSign::Positive => Ordering::Less,
        NumSign::Zero => Ordering::Equal,
        NumSign::Negative => Ordering::Greater,
    }
}

/// Angle of a direction in units of π, in `[0, 1)`.
pub fn angle_f64(u: f64, v: f64) -> f64 {
    let mut t = v.atan2(u) / std::f64::consts::PI;
    if t < 0.0 {
        t += 1.0;
    }
    if t >= 1.0 {
        t -= 1.0;
    }
    t
}

/// A rational direction close to angle `t·π`, from a dyadic rounding.
pub fn rational_direction(t: f64, bits: u32) -> (BigRational, BigRational) {
    let theta = t * std::f64::consts::PI;
    let scale = f64::from(bits).exp2();
    let num = |x: f64| BigInt::from_f64((x * scale).round()).expect("finite");
    let den = BigInt::one() << bits;
    (BigRational::new(num(theta.cos()), den.clone()), BigRational::new(num(theta.sin()), den))
}

#[derive(Clone)]
pub struct LiftPoint {
    sheet: i64,
    dir: Vec2,
}

impl LiftPoint {
    /// The point `sheet + angle(v)/π` after projective normalization of `v`.
    pub fn new(sheet: i64, v: Vec2) -> LiftPoint {
        LiftPoint { sheet, dir: normalize(v) }
    }

    pub fn origin() -> LiftPoint {
        let q = Tower::rationals();
        LiftPoint { sheet: 0, dir: [q.one(), q.zero()] }
    }

    /// The point whose direction is `(u, v)` with `v > 0`, or `v = 0, u > 0`.
    pub fn from_rational(sheet: i64, u: BigRational, v: BigRational) -> LiftPoint {
        let q = Tower::rationals();
        LiftPoint::new(sheet, [q.rational(u), q.rational(v)])
    }

    /// A point with rational direction within about `2^-bits` of `x`.
    pub fn near_f64(x: f64, bits: u32) -> LiftPoint {
        let sheet = x.floor();
        let (u, v) = rational_direction(x - sheet, bits);
        // An angle rounded up to π is angle 0 on the next sheet.
        if v.is_zero() && u < BigRational::zero() {
            return LiftPoint::from_rational(sheet as i64 + 1, -u, v);
        }
        LiftPoint::from_rational(sheet as i64, u, v)
    }

    pub fn sheet(&self) -> i64 {
        self.sheet
    }

    pub fn direction(&self) -> &Vec2 {
        &self.dir
    }

    pub fn shifted(&self, n: i64) -> LiftPoint {
        LiftPoint { sheet: self.sheet + n, dir: self.dir.clone() }
    }

    pub fn tower(&self) -> Tower {
        let (t0, t1) = (self.dir[0].tower(), self.dir[1].tower());
        if t0.is_prefix_of(t1) {
            t1.clone()
        } else {
            t0.clone()
        }
    }

    /// Angle in units of π, in `[0, 1)`.
    pub fn angle_f64(&self) -> f64 {
        angle_f64(self.dir[0].to_f64(), self.dir[1].to_f64())
    }

    pub fn to_f64(&self) -> f64 {
        self.sheet as f64 + self.angle_f64()
    }

    /// Exact position relative to `other` on the line.
    pub fn cmp_exact(&self, other: &LiftPoint) -> Ordering {
        self.sheet.cmp(&other.sheet).then_with(|| dir_cmp(&self.dir, &other.dir))
    }

    pub fn same_direction(&self, other: &LiftPoint) -> bool {
        cross(&self.dir, &other.dir).is_zero()
    }
}

impl PartialEq for LiftPoint {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_exact(other) == Ordering::Equal
    }
}

impl Eq for LiftPoint {}

impl PartialOrd for LiftPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LiftPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_exact(other)
    }
}

impl fmt::Debug for LiftPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LiftPoint({} ~ {:.12})", self.sheet, self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn quarter_point() {
        let p = LiftPoint::from_rational(0, q(1, 1), q(1, 1));
        assert!((p.to_f64() - 0.25).abs() < 1e-15);
        let r = LiftPoint::from_rational(2, q(-1, 1), q(-1, 1));
        assert!((r.to_f64() - 2.25).abs() < 1e-15);
    }

    #[test]
    fn ordering_within_and_across_sheets() {
        let a = LiftPoint::from_rational(0, q(1, 1), q(1, 10));
        let b = LiftPoint::from_rational(0, q(-1, 1), q(1, 10));
        assert!(a < b);
        assert!(b < a.shifted(1));
        assert_eq!(LiftPoint::from_rational(0, q(2, 1), q(2, 1)), LiftPoint::from_rational(0, q(1, 1), q(1, 1)));
    }

    #[test]
    fn near_f64_roundtrip() {
        for &x in &[-3.7, -0.5, 0.0, 0.001, 0.3, 0.999, 5.25] {
            let p = LiftPoint::near_f64(x, 48);
            assert!((p.to_f64() - x).abs() < 1e-9, "{x} -> {}", p.to_f64());
        }
    }
}
