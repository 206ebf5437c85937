//! Blow-ups of the standard action along an orbit, and semi-conjugacy
//! checks.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::group::{LiftPoint, LiftedElement};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum BlowupError {
    #[error("orbit sample contains the same point twice")]
    DuplicatePoint,
    #[error("gap lengths must be positive and match the points")]
    BadLengths,
    #[error("gap fraction must lie in [0, 1]")]
    BadFraction,
    #[error("image of a sampled point leaves the sample")]
    LeavesSample,
}

/// A point of a blown-up line: `base` is its image under the collapse, and
/// `gap` is the relative position inside the interval inserted at `base`
/// (`None` for points that are not blown up).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlownPoint {
    base: LiftPoint,
    gap: Option<BigRational>,
}

impl BlownPoint {
    pub fn new(base: LiftPoint, gap: Option<BigRational>) -> Result<BlownPoint, BlowupError> {
        if let Some(f) = &gap {
            if f.is_negative() || f > &BigRational::one() {
                return Err(BlowupError::BadFraction);
            }
        }
        Ok(BlownPoint { base, gap })
    }

    pub fn base(&self) -> &LiftPoint {
        &self.base
    }

    pub fn gap(&self) -> Option<&BigRational> {
        self.gap.as_ref()
    }

    /// Image under the blown-up action when the whole orbit of `base` is
    /// blown up: gaps are carried affinely onto gaps.
    pub fn moved(&self, g: &LiftedElement) -> BlownPoint {
        BlownPoint { base: g.apply(&self.base), gap: self.gap.clone() }
    }

    /// Lexicographic position: base first, then place inside the gap.
    pub fn cmp_exact(&self, other: &BlownPoint) -> Ordering {
        self.base.cmp_exact(&other.base).then_with(|| match (&self.gap, &other.gap) {
            (Some(a), Some(b)) => a.cmp(b),
            _ => Ordering::Equal,
        })
    }
}

/// The standard action blown up at finitely many points of one orbit, each
/// replaced by an interval of the given length.
#[derive(Clone, Debug)]
pub struct BlowupMap {
    /// Sample points in increasing order with their gap lengths.
    points: Vec<(LiftPoint, BigRational)>,
}

/// Export record: where a gap sits on the blown-up line.
#[derive(Clone, Debug, Serialize)]
pub struct GapRecord {
    pub orbit_point: f64,
    pub gap: [f64; 2],
    pub length: String,
}

impl BlowupMap {
    /// Insert a gap of `lengths[i]` at `points[i]`.
    pub fn new(points: Vec<LiftPoint>, lengths: Vec<BigRational>) -> Result<BlowupMap, BlowupError> {
        if points.len() != lengths.len() || lengths.iter().any(|l| !l.is_positive()) {
            return Err(BlowupError::BadLengths);
        }
        let mut pts: Vec<(LiftPoint, BigRational)> = points.into_iter().zip(lengths).collect();
        pts.sort_by(|a, b| a.0.cmp_exact(&b.0));
        if pts.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(BlowupError::DuplicatePoint);
        }
        Ok(BlowupMap { points: pts })
    }

    /// Blow up `ρ(g)(p)` for `g` in `elements` (repeated points skipped),
    /// with lengths `2^-(k+1)` in enumeration order.
    pub fn orbit_sample(p: &LiftPoint, elements: &[LiftedElement]) -> BlowupMap {
        let mut seen: Vec<LiftPoint> = Vec::new();
        for g in elements {
            let x = g.apply(p);
            if let Err(pos) = seen.binary_search_by(|y| y.cmp_exact(&x)) {
                seen.insert(pos, x);
            }
        }
        // Re-derive the enumeration order for the length schedule.
        let mut order: Vec<LiftPoint> = Vec::new();
        let mut placed = vec![false; seen.len()];
        for g in elements {
            let x = g.apply(p);
            let i = seen.binary_search_by(|y| y.cmp_exact(&x)).expect("present");
            if !placed[i] {
                placed[i] = true;
                order.push(x);
            }
        }
        let lengths = (0..order.len()).map(|k| BigRational::new(BigInt::one(), BigInt::one() << (k + 1))).collect();
        BlowupMap::new(order, lengths).expect("distinct points, positive lengths")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_length(&self) -> BigRational {
        self.points.iter().fold(BigRational::zero(), |acc, (_, l)| acc + l)
    }

    fn find(&self, x: &LiftPoint) -> Option<usize> {
        self.points.binary_search_by(|(y, _)| y.cmp_exact(x)).ok()
    }

    pub fn is_blown_up(&self, x: &LiftPoint) -> bool {
        self.find(x).is_some()
    }

    /// The collapse `h`, sending each gap to its orbit point.
    pub fn collapse(&self, q: &BlownPoint) -> LiftPoint {
        q.base.clone()
    }

    /// `ψ(g)(q)`, defined while images stay inside the sample.
    pub fn act(&self, g: &LiftedElement, q: &BlownPoint) -> Result<BlownPoint, BlowupError> {
        let image = g.apply(&q.base);
        let lands_in_gap = self.is_blown_up(&image);
        match (&q.gap, lands_in_gap) {
            (Some(_), true) | (None, false) => Ok(BlownPoint { base: image, gap: q.gap.clone() }),
            _ => Err(BlowupError::LeavesSample),
        }
    }

    /// Coordinate on the blown-up line: the base coordinate plus the lengths
    /// of all gaps to its left, plus the part of its own gap.
    pub fn coordinate(&self, q: &BlownPoint) -> f64 {
        let before = self.points.partition_point(|(y, _)| y.cmp_exact(&q.base) == Ordering::Less);
        let mut shift: BigRational = self.points[..before].iter().fold(BigRational::zero(), |acc, (_, l)| acc + l);
        if let (Some(f), Some(i)) = (&q.gap, self.find(&q.base)) {
            shift += f * &self.points[i].1;
        }
        q.base.to_f64() + shift.to_f64().unwrap_or(f64::NAN)
    }

    pub fn gaps(&self) -> Vec<GapRecord> {
        let mut offset = BigRational::zero();
        self.points
            .iter()
            .map(|(x, l)| {
                let lo = x.to_f64() + offset.to_f64().unwrap_or(f64::NAN);
                offset += l;
                let len = l.to_f64().unwrap_or(f64::NAN);
                GapRecord { orbit_point: x.to_f64(), gap: [lo, lo + len], length: l.to_string() }
            })
            .collect()
    }
}

/// An action of the group on some line, possibly only partially defined.
pub trait Action {
    type Point: Clone;

    fn act(&self, g: &LiftedElement, x: &Self::Point) -> Result<Self::Point, BlowupError>;

    /// Exact comparison of two points.
    fn cmp_points(&self, x: &Self::Point, y: &Self::Point) -> Ordering;

    /// Coordinate used for reporting distances.
    fn position(&self, x: &Self::Point) -> f64;
}

/// The standard action, optionally followed by a translation (which breaks
/// equivariance on purpose when nonzero).
#[derive(Clone, Copy, Debug, Default)]
pub struct StandardAction {
    pub shift: i64,
}

impl Action for StandardAction {
    type Point = LiftPoint;

    fn act(&self, g: &LiftedElement, x: &LiftPoint) -> Result<LiftPoint, BlowupError> {
        Ok(g.apply(x).shifted(self.shift))
    }

    fn cmp_points(&self, x: &LiftPoint, y: &LiftPoint) -> Ordering {
        x.cmp_exact(y)
    }

    fn position(&self, x: &LiftPoint) -> f64 {
        x.to_f64()
    }
}

impl Action for BlowupMap {
    type Point = BlownPoint;

    fn act(&self, g: &LiftedElement, x: &BlownPoint) -> Result<BlownPoint, BlowupError> {
        BlowupMap::act(self, g, x)
    }

    fn cmp_points(&self, x: &BlownPoint, y: &BlownPoint) -> Ordering {
        x.cmp_exact(y)
    }

    fn position(&self, x: &BlownPoint) -> f64 {
        self.coordinate(x)
    }
}

/// Largest observed `|h(φ′(g)(x)) − φ(g)(h(x))|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Defect {
    /// True when every checked pair agreed exactly.
    pub exact_zero: bool,
    pub max: f64,
    pub checked: usize,
}

/// Check `h ∘ φ′(g) = φ(g) ∘ h` over `sample × elements`.
pub fn check_semiconjugacy<A: Action, B: Action>(
    h: impl Fn(&B::Point) -> A::Point,
    phi: &A,
    phi_prime: &B,
    sample: &[B::Point],
    elements: &[LiftedElement],
) -> Result<Defect, BlowupError> {
    let mut max = 0.0f64;
    let mut exact_zero = true;
    let mut checked = 0;
    for x in sample {
        let hx = h(x);
        for g in elements {
            let lhs = h(&phi_prime.act(g, x)?);
            let rhs = phi.act(g, &hx)?;
            checked += 1;
            if phi.cmp_points(&lhs, &rhs) != Ordering::Equal {
                exact_zero = false;
                max = max.max((phi.position(&lhs) - phi.position(&rhs)).abs());
            }
        }
    }
    Ok(Defect { exact_zero, max, checked })
}
