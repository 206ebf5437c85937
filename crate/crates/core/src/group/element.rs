//! Lifted Möbius elements acting on the real line.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::dynamics::Analysis;
use super::point::{angle_f64, dir_cmp, normalize, LiftPoint, Vec2};
use super::word::Word;
use crate::numerics::{Elem, Tower};

/// A 2×2 matrix over a number-field tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat2 {
    pub m: [[Elem; 2]; 2],
}

impl Mat2 {
    pub fn new(a: Elem, b: Elem, c: Elem, d: Elem) -> Mat2 {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn identity(t: &Tower) -> Mat2 {
        Mat2::new(t.one(), t.zero(), t.zero(), t.one())
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let e = |i: usize, j: usize| &(&self.m[i][0] * &o.m[0][j]) + &(&self.m[i][1] * &o.m[1][j]);
        Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    /// Adjugate; the inverse when the determinant is one.
    pub fn adj(&self) -> Mat2 {
        let [[a, b], [c, d]] = &self.m;
        Mat2::new(d.clone(), -b, -c, a.clone())
    }

    pub fn neg(&self) -> Mat2 {
        let [[a, b], [c, d]] = &self.m;
        Mat2::new(-a, -b, -c, -d)
    }

    pub fn det(&self) -> Elem {
        let [[a, b], [c, d]] = &self.m;
        &(a * d) - &(b * c)
    }

    pub fn trace(&self) -> Elem {
        &self.m[0][0] + &self.m[1][1]
    }

    /// True for `±I`.
    pub fn is_central(&self) -> bool {
        let [[a, b], [c, d]] = &self.m;
        b.is_zero() && c.is_zero() && a == d && a.square().is_one()
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        [
            &(&self.m[0][0] * &v[0]) + &(&self.m[0][1] * &v[1]),
            &(&self.m[1][0] * &v[0]) + &(&self.m[1][1] * &v[1]),
        ]
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        let f = |e: &Elem| e.to_f64();
        [[f(&self.m[0][0]), f(&self.m[0][1])], [f(&self.m[1][0]), f(&self.m[1][1])]]
    }

    /// Exact coordinates of all four entries, negated if needed so the
    /// first nonzero coordinate is positive: equal for `M` and `-M`.
    fn projective_coords(&self) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = Vec::new();
        for e in self.m.iter().flatten() {
            out.push(e.denominator().clone());
            out.extend(e.numerators().iter().cloned());
        }
        let first = self.m.iter().flatten().flat_map(|e| e.numerators()).find(|q| !q.is_zero());
        if first.is_some_and(|q| q.is_negative()) {
            let dim = self.m[0][0].numerators().len() + 1;
            for (i, q) in out.iter_mut().enumerate() {
                if i % dim != 0 {
                    *q = -q.clone();
                }
            }
        }
        out
    }
}

/// Exact identity of a group element: projective matrix plus winding.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ElementKey {
    coords: Vec<BigInt>,
    winding: i64,
}

struct Inner {
    mat: Mat2,
    winding: i64,
    word: Word,
    zero_image: Vec2,
    approx: [[f64; 2]; 2],
    zero_angle: f64,
    key: ElementKey,
    analysis: OnceLock<Analysis>,
}

/// An element of the central extension, acting on the line by
/// `(n, d) ↦ (n + w + [M·d wraps past M·e1], M·d)`: the canonical lift of the
/// projective map (the one sending 0 into `[0, 1)`) followed by the deck
/// translation by `w`.
#[derive(Clone)]
pub struct LiftedElement(Arc<Inner>);

impl LiftedElement {
    pub fn from_parts(mat: Mat2, winding: i64, word: Word) -> LiftedElement {
        let zero_image = normalize([mat.m[0][0].clone(), mat.m[1][0].clone()]);
        let approx = mat.to_f64();
        let zero_angle = angle_f64(zero_image[0].to_f64(), zero_image[1].to_f64());
        let key = ElementKey { coords: mat.projective_coords(), winding };
        LiftedElement(Arc::new(Inner { mat, winding, word, zero_image, approx, zero_angle, key, analysis: OnceLock::new() }))
    }

    pub fn mat(&self) -> &Mat2 {
        &self.0.mat
    }

    pub fn winding(&self) -> i64 {
        self.0.winding
    }

    pub fn word(&self) -> &Word {
        &self.0.word
    }

    pub fn key(&self) -> &ElementKey {
        &self.0.key
    }

    pub fn approx(&self) -> &[[f64; 2]; 2] {
        &self.0.approx
    }

    pub(crate) fn analysis_cell(&self) -> &OnceLock<Analysis> {
        &self.0.analysis
    }

    /// Same element with a different witness spelling.
    pub fn with_word(&self, word: Word) -> LiftedElement {
        let i = &self.0;
        LiftedElement(Arc::new(Inner {
            mat: i.mat.clone(),
            winding: i.winding,
            word,
            zero_image: i.zero_image.clone(),
            approx: i.approx,
            zero_angle: i.zero_angle,
            key: i.key.clone(),
            analysis: OnceLock::new(),
        }))
    }

    /// `ρ(g)(x)`, exactly.
    pub fn apply(&self, x: &LiftPoint) -> LiftPoint {
        let d = normalize(self.0.mat.apply(x.direction()));
        let wrap = i64::from(dir_cmp(&d, &self.0.zero_image) == Ordering::Less);
        LiftPoint::new(x.sheet() + self.0.winding + wrap, d)
    }

    /// Composition `self ∘ h`.
    pub fn compose(&self, h: &LiftedElement) -> LiftedElement {
        let mat = self.0.mat.mul(&h.0.mat);
        let winding = self.apply(&h.apply(&LiftPoint::origin())).sheet();
        LiftedElement::from_parts(mat, winding, self.0.word.concat(&h.0.word))
    }

    pub fn inverse(&self) -> LiftedElement {
        let adj = self.0.mat.adj();
        let pre = LiftPoint::new(0, [adj.m[0][0].clone(), adj.m[1][0].clone()]);
        let winding = -self.apply(&pre).sheet();
        LiftedElement::from_parts(adj, winding, self.0.word.inverse())
    }

    pub fn pow(&self, n: i64) -> LiftedElement {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = self.identity_like();
        for _ in 0..n.unsigned_abs() {
            acc = acc.compose(&base);
        }
        acc
    }

    pub fn identity_like(&self) -> LiftedElement {
        let t = self.0.mat.m[0][0].tower();
        LiftedElement::from_parts(Mat2::identity(t), 0, Word::identity())
    }

    pub fn is_identity(&self) -> bool {
        self.0.winding == 0 && self.0.mat.is_central()
    }

    /// Equality as group elements, independent of the spelling.
    pub fn same_element(&self, other: &LiftedElement) -> bool {
        self.0.key == other.0.key
    }

    /// Conjugate `self · h · self⁻¹`.
    pub fn conjugate(&self, h: &LiftedElement) -> LiftedElement {
        self.compose(h).compose(&self.inverse())
    }

    /// Angle (units of π) of the projective image of a direction of angle
    /// `t`, in double precision.
    pub fn image_angle_f64(&self, t: f64) -> f64 {
        let [[a, b], [c, d]] = self.0.approx;
        let th = t * std::f64::consts::PI;
        let (u, v) = (th.cos(), th.sin());
        angle_f64(a * u + b * v, c * u + d * v)
    }

    /// `ρ(g)(y) − y` for any `y` with angle `t`, in double precision; `None`
    /// when the image is too close to the wrap-around to decide the sheet.
    pub fn displacement_f64(&self, t: f64) -> Option<f64> {
        let phi = self.image_angle_f64(t);
        let gap = phi - self.0.zero_angle;
        if gap.abs() < 1e-9 || (1.0 - gap.abs()) < 1e-9 {
            return None;
        }
        let wrap = if gap < 0.0 { 1.0 } else { 0.0 };
        Some(self.0.winding as f64 + wrap + phi - t)
    }

    /// `ρ(g)(x)` in double precision, see [`Self::displacement_f64`].
    pub fn apply_f64(&self, x: f64) -> Option<f64> {
        let t = x - x.floor();
        self.displacement_f64(t).map(|d| x + d)
    }
}

impl fmt::Debug for LiftedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LiftedElement({}, w={})", self.0.word, self.0.winding)
    }
}

impl fmt::Display for LiftedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.word)
    }
}
