//! Finite-stage dynamical realizations of abstract sign functions.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::group::{ElementKey, Gamma, Letter, LiftedElement, Word};
use crate::orders::{cone_violations, order_sign, OrderError, OrderOracle, ProductTable, Sign};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RealizationError {
    #[error("inconsistent sign function: {0}")]
    InconsistentOracle(String),
    #[error("no sign known for {0}")]
    MissingSign(String),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// Anything that assigns signs to non-identity elements.
pub trait SignSource {
    fn sign(&self, g: &LiftedElement) -> Result<Sign, RealizationError>;

    /// `g` versus `h` in the induced order, i.e. the sign of `g⁻¹h`.
    fn compare(&self, g: &LiftedElement, h: &LiftedElement) -> Result<Ordering, RealizationError> {
        let d = g.inverse().compose(h);
        if d.is_identity() {
            return Ok(Ordering::Equal);
        }
        Ok(match self.sign(&d)? {
            Sign::Pos => Ordering::Less,
            Sign::Neg => Ordering::Greater,
        })
    }
}

impl SignSource for OrderOracle {
    fn sign(&self, g: &LiftedElement) -> Result<Sign, RealizationError> {
        Ok(order_sign(self, g)?)
    }

    fn compare(&self, g: &LiftedElement, h: &LiftedElement) -> Result<Ordering, RealizationError> {
        Ok(OrderOracle::compare(self, g, h)?)
    }
}

/// A sign function given by a finite table.
#[derive(Clone, Debug, Default)]
pub struct TableSource {
    signs: HashMap<ElementKey, (Word, Sign)>,
}

impl TableSource {
    pub fn new(entries: impl IntoIterator<Item = (LiftedElement, Sign)>) -> TableSource {
        TableSource { signs: entries.into_iter().map(|(g, s)| (g.key().clone(), (g.word().clone(), s))).collect() }
    }

    /// Replace the sign of `g`.
    pub fn set(&mut self, g: &LiftedElement, s: Sign) {
        self.signs.insert(g.key().clone(), (g.word().clone(), s));
    }
}

impl SignSource for TableSource {
    fn sign(&self, g: &LiftedElement) -> Result<Sign, RealizationError> {
        self.signs.get(g.key()).map(|(_, s)| *s).ok_or_else(|| RealizationError::MissingSign(g.word().to_string()))
    }
}

/// Increasing piecewise-linear map through the breakpoints, slope 1 beyond
/// the extreme ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlMap {
    breakpoints: Vec<(BigRational, BigRational)>,
}

impl PlMap {
    fn new(mut pts: Vec<(BigRational, BigRational)>) -> Result<PlMap, RealizationError> {
        pts.sort();
        pts.dedup();
        for w in pts.windows(2) {
            if w[0].0 == w[1].0 || w[0].1 >= w[1].1 {
                return Err(RealizationError::InconsistentOracle("extension is not increasing".into()));
            }
        }
        Ok(PlMap { breakpoints: pts })
    }

    pub fn breakpoints(&self) -> &[(BigRational, BigRational)] {
        &self.breakpoints
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        interpolate(self.breakpoints.iter().map(|(a, b)| (a, b)).collect(), x)
    }

    pub fn eval_inverse(&self, y: &BigRational) -> BigRational {
        interpolate(self.breakpoints.iter().map(|(a, b)| (b, a)).collect(), y)
    }
}

fn interpolate(pts: Vec<(&BigRational, &BigRational)>, x: &BigRational) -> BigRational {
    let Some(first) = pts.first() else { return x.clone() };
    let last = pts.last().expect("nonempty");
    if x <= first.0 {
        return first.1 + (x - first.0);
    }
    if x >= last.0 {
        return last.1 + (x - last.0);
    }
    let i = pts.partition_point(|p| p.0 <= x);
    let ((x0, y0), (x1, y1)) = (pts[i - 1], pts[i]);
    y0 + (x - x0) * (y1 - y0) / (x1 - x0)
}

/// Placement of `ball(n)` on the line with piecewise-linear generators.
#[derive(Clone, Debug)]
pub struct PartialRealization {
    pub stage: usize,
    elements: Vec<LiftedElement>,
    placement: Vec<BigRational>,
    /// Extensions of `a`, `b`, `c`.
    extensions: [PlMap; 3],
}

#[derive(Clone, Debug, Serialize)]
pub struct PlacementRow {
    pub word: String,
    pub placement: String,
    pub approx: f64,
}

impl PartialRealization {
    pub fn elements(&self) -> &[LiftedElement] {
        &self.elements
    }

    pub fn placement(&self, i: usize) -> &BigRational {
        &self.placement[i]
    }

    pub fn extension(&self, l: Letter) -> &PlMap {
        match l {
            Letter::A | Letter::AInv => &self.extensions[0],
            Letter::B | Letter::BInv => &self.extensions[1],
            Letter::C | Letter::CInv => &self.extensions[2],
        }
    }

    /// Apply the extension of a single letter.
    pub fn apply_letter(&self, l: Letter, x: &BigRational) -> BigRational {
        let m = self.extension(l);
        match l {
            Letter::A | Letter::B | Letter::C => m.eval(x),
            _ => m.eval_inverse(x),
        }
    }

    /// The extension of a word, applied right to left.
    pub fn apply_word(&self, w: &Word, x: &BigRational) -> BigRational {
        w.letters().iter().rev().fold(x.clone(), |acc, &l| self.apply_letter(l, &acc))
    }

    /// Sign read from the realization: `+` iff the word moves 0 right.
    pub fn sign_of(&self, w: &Word) -> Option<Sign> {
        Sign::from_ordering(self.apply_word(w, &BigRational::zero()).cmp(&BigRational::zero()))
    }

    pub fn rows(&self) -> Vec<PlacementRow> {
        use num_traits::ToPrimitive;
        self.elements
            .iter()
            .zip(&self.placement)
            .map(|(g, x)| PlacementRow { word: g.word().to_string(), placement: x.to_string(), approx: x.to_f64().unwrap_or(f64::NAN) })
            .collect()
    }
}

/// Build the stage-`n` realization of `source`: place `ball(n)` in the order
/// the source induces (midpoints between neighbours, ±1 past the ends) and
/// interpolate each generator through the placed pairs `(x_g, x_{sg})`.
pub fn build_realization(
    source: &dyn SignSource,
    gamma: &Gamma,
    n: usize,
    products: Option<&ProductTable>,
) -> Result<PartialRealization, RealizationError> {
    let elements = gamma.ball(n);
    let owned;
    let table = match products {
        Some(t) => t,
        None => {
            owned = ProductTable::new(&elements[1..]);
            &owned
        }
    };
    let signs = table.elements().iter().map(|g| source.sign(g)).collect::<Result<Vec<_>, _>>()?;
    let violations = cone_violations(table, &signs);
    if let Some(v) = violations.first() {
        return Err(RealizationError::InconsistentOracle(format!("{} cone violations, first: {v:?}", violations.len())));
    }

    // Sorted insertion, placing each element in its gap.
    let mut sorted: Vec<usize> = Vec::new();
    let mut placement = vec![BigRational::zero(); elements.len()];
    let two = BigRational::from_integer(BigInt::from(2));
    for i in 0..elements.len() {
        let (mut lo, mut hi) = (0usize, sorted.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match source.compare(&elements[sorted[mid]], &elements[i])? {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => {
                    return Err(RealizationError::InconsistentOracle(format!(
                        "{} and {} compare equal",
                        elements[sorted[mid]].word(),
                        elements[i].word()
                    )))
                }
            }
        }
        placement[i] = match (lo.checked_sub(1).map(|k| sorted[k]), sorted.get(lo)) {
            (None, None) => BigRational::zero(),
            (Some(l), None) => &placement[l] + BigRational::one(),
            (None, Some(&r)) => &placement[r] - BigRational::one(),
            (Some(l), Some(&r)) => (&placement[l] + &placement[r]) / &two,
        };
        sorted.insert(lo, i);
    }
    for w in sorted.windows(2) {
        if source.compare(&elements[w[0]], &elements[w[1]])? != Ordering::Less {
            return Err(RealizationError::InconsistentOracle("order is not transitive".into()));
        }
    }

    let index: HashMap<&ElementKey, usize> = elements.iter().enumerate().map(|(i, g)| (g.key(), i)).collect();
    let inner = if n == 0 { 0 } else { gamma.ball(n - 1).len() };
    let mut extensions = Vec::new();
    for l in [Letter::A, Letter::B, Letter::C] {
        let s = gamma.generator(l);
        let s_inv = gamma.generator(l.inverse());
        let mut pts = Vec::new();
        for (i, g) in elements[..inner].iter().enumerate() {
            let sg = index[s.compose(g).key()];
            pts.push((placement[i].clone(), placement[sg].clone()));
            let sig = index[s_inv.compose(g).key()];
            pts.push((placement[sig].clone(), placement[i].clone()));
        }
        extensions.push(PlMap::new(pts)?);
    }
    let extensions: [PlMap; 3] = extensions.try_into().expect("three generators");
    Ok(PartialRealization { stage: n, elements, placement, extensions })
}
