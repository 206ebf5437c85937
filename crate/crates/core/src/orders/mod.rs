//! Left-orders given by a basepoint and a tie-break rule, positive-cone
//! tables on finite sets, and the conjugation action.

mod product;

pub use product::ProductTable;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{LiftPoint, LiftedElement, Word};
use crate::realization::BlownPoint;

/// Sign of an element under a left-order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Neg,
    #[serde(rename = "+")]
    Pos,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn from_ordering(o: Ordering) -> Option<Sign> {
        match o {
            Ordering::Greater => Some(Sign::Pos),
            Ordering::Less => Some(Sign::Neg),
            Ordering::Equal => None,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Pos => "+",
            Sign::Neg => "-",
        })
    }
}

/// Side of a point used to break ties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum OrderError {
    #[error("the identity has no sign")]
    Identity,
    #[error("{0} fixes the basepoint and the tie-break list cannot separate it")]
    TiebreakExhausted(String),
}

/// Where the basepoint lives.
#[derive(Clone, Debug)]
pub enum Realization {
    /// A point of the line under the standard action.
    Standard(LiftPoint),
    /// A point of the action blown up along the whole orbit of
    /// `point.base`, sitting inside the inserted gap.
    Blowup(BlownPoint),
}

impl Realization {
    /// The point of the standard action the basepoint collapses to.
    pub fn base(&self) -> &LiftPoint {
        match self {
            Realization::Standard(p) => p,
            Realization::Blowup(q) => q.base(),
        }
    }
}

/// A left-order: `g > id` iff `g` moves the basepoint right, ties broken by
/// the germ of `g` on the first listed side of the basepoint. `reversed`
/// flips every sign.
#[derive(Clone, Debug)]
pub struct OrderOracle {
    pub realization: Realization,
    pub tiebreak: Vec<Side>,
    pub reversed: bool,
}

impl OrderOracle {
    pub fn standard(p: LiftPoint, tiebreak: Vec<Side>) -> OrderOracle {
        OrderOracle { realization: Realization::Standard(p), tiebreak, reversed: false }
    }

    pub fn basepoint(&self) -> &LiftPoint {
        self.realization.base()
    }

    pub fn reversed(&self) -> OrderOracle {
        OrderOracle { reversed: !self.reversed, ..self.clone() }
    }

    /// Sign of `g` when `ρ(g)` fixes the basepoint exactly, read off the
    /// germ on the tie-break side (points outside any inserted gap).
    fn tie_sign(&self, g: &LiftedElement) -> Result<Sign, OrderError> {
        let p = self.basepoint();
        for side in &self.tiebreak {
            // derivative < 1: points just left move up, just right move down.
            let left = match g.derivative_cmp_one(p) {
                Ordering::Less => Sign::Pos,
                Ordering::Greater => Sign::Neg,
                Ordering::Equal => continue,
            };
            return Ok(match side {
                Side::Left => left,
                Side::Right => left.flip(),
            });
        }
        Err(OrderError::TiebreakExhausted(g.word().to_string()))
    }

    /// Sign before applying the reversal flag.
    fn raw_sign(&self, g: &LiftedElement) -> Result<Sign, OrderError> {
        if g.is_identity() {
            return Err(OrderError::Identity);
        }
        let p = self.basepoint();
        match Sign::from_ordering(g.apply(p).cmp_exact(p)) {
            Some(s) => Ok(s),
            None => self.tie_sign(g),
        }
    }

    /// Position of `g` relative to `h` in the order: the sign of `g⁻¹h`
    /// read through orbit positions.
    pub fn compare(&self, g: &LiftedElement, h: &LiftedElement) -> Result<Ordering, OrderError> {
        let p = self.basepoint();
        let ord = match g.apply(p).cmp_exact(&h.apply(p)) {
            Ordering::Equal => {
                let d = g.inverse().compose(h);
                if d.is_identity() {
                    return Ok(Ordering::Equal);
                }
                match self.tie_sign(&d)? {
                    Sign::Pos => Ordering::Less,
                    Sign::Neg => Ordering::Greater,
                }
            }
            o => o,
        };
        Ok(if self.reversed { ord.reverse() } else { ord })
    }
}

pub fn order_sign(o: &OrderOracle, g: &LiftedElement) -> Result<Sign, OrderError> {
    let s = o.raw_sign(g)?;
    Ok(if o.reversed { s.flip() } else { s })
}

pub fn abc_sign(o: &OrderOracle, gamma: &crate::group::Gamma) -> Sign {
    order_sign(o, gamma.abc()).expect("abc moves every point")
}

/// The order `≺_g` with cone `g P g⁻¹`: the basepoint moves to `ρ(g)(p)`.
pub fn conjugate_order(o: &OrderOracle, g: &LiftedElement) -> OrderOracle {
    let realization = match &o.realization {
        Realization::Standard(p) => Realization::Standard(g.apply(p)),
        Realization::Blowup(q) => Realization::Blowup(q.moved(g)),
    };
    OrderOracle { realization, tiebreak: o.tiebreak.clone(), reversed: o.reversed }
}

/// A positive cone restricted to a finite set, keyed by spelling.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConeTable {
    pub signs: BTreeMap<Word, Sign>,
}

impl ConeTable {
    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn get(&self, w: &Word) -> Option<Sign> {
        self.signs.get(w).copied()
    }

    /// Rows `(word, length, sign)`.
    pub fn rows(&self) -> impl Iterator<Item = (String, usize, Sign)> + '_ {
        self.signs.iter().map(|(w, s)| (w.to_string(), w.len(), *s))
    }
}

/// Signs over `F`; the identity is skipped.
pub fn cone_table(o: &OrderOracle, f: &[LiftedElement]) -> Result<ConeTable, OrderError> {
    let mut signs = BTreeMap::new();
    for g in f.iter().filter(|g| !g.is_identity()) {
        signs.insert(g.word().clone(), order_sign(o, g)?);
    }
    Ok(ConeTable { signs })
}

/// Whether `o′` lies in the basic neighbourhood of `o` cut out by `F`.
pub fn in_neighborhood(o_prime: &OrderOracle, o: &OrderOracle, f: &[LiftedElement]) -> Result<bool, OrderError> {
    for g in f.iter().filter(|g| !g.is_identity()) {
        if order_sign(o_prime, g)? != order_sign(o, g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A failure of the cone axioms inside a finite table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConeViolation {
    /// `g` and `g⁻¹` have the same sign.
    Antisymmetry { g: Word, inverse: Word },
    /// `g` and `h` are positive but `gh` is not.
    Semigroup { g: Word, h: Word, product: Word },
}

/// Check inverse antisymmetry and closure under products inside `table`,
/// whose element list must be `signs`' domain.
pub fn cone_violations(table: &ProductTable, signs: &[Sign]) -> Vec<ConeViolation> {
    let els = table.elements();
    let mut out = Vec::new();
    for i in 0..els.len() {
        if let Some(j) = table.inverse(i) {
            if i < j && signs[i] == signs[j] {
                out.push(ConeViolation::Antisymmetry { g: els[i].word().clone(), inverse: els[j].word().clone() });
            }
        }
    }
    let pos: Vec<usize> = (0..els.len()).filter(|&i| signs[i] == Sign::Pos).collect();
    for &i in &pos {
        for &j in &pos {
            if let Some(k) = table.product(i, j) {
                if signs[k] != Sign::Pos {
                    out.push(ConeViolation::Semigroup {
                        g: els[i].word().clone(),
                        h: els[j].word().clone(),
                        product: els[k].word().clone(),
                    });
                }
            }
        }
    }
    out
}

/// Signs of `o` over the elements of `table` (which must exclude the identity).
pub fn signs_over(o: &OrderOracle, table: &ProductTable) -> Result<Vec<Sign>, OrderError> {
    table.elements().iter().map(|g| order_sign(o, g)).collect()
}
