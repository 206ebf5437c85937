//! Certified sign determination.
//!
//! Signs of real quantities are decided by interval enclosures of
//! increasing precision; a quantity is declared zero only after exact
//! arithmetic in a number-field tower proves it.

mod expr;
mod interval;
mod tower;

pub use expr::Expr;
pub use interval::{refine, CertifiedInterval, ExtReal, FixedInterval};
pub use tower::{Elem, Level, LevelKind, Tower};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sign of a real number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NumSign {
    Negative,
    Zero,
    Positive,
}

impl NumSign {
    pub fn flip(self) -> NumSign {
        match self {
            NumSign::Negative => NumSign::Positive,
            NumSign::Zero => NumSign::Zero,
            NumSign::Positive => NumSign::Negative,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum NumericsError {
    #[error("no certification up to {max_bits} bits and no exact form to test for zero")]
    PrecisionExhausted { max_bits: u32 },
}

/// Precision schedule for [`certified_sign`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precision {
    pub start_bits: u32,
    pub max_bits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision { start_bits: 64, max_bits: 4096 }
    }
}

impl Precision {
    pub fn with_max_bits(max_bits: u32) -> Self {
        Precision { max_bits, ..Precision::default() }
    }
}

/// Certified sign of `expr`.
///
/// Enclosures are computed at `start_bits`, doubling up to `max_bits`. If
/// none excludes zero, the expression is evaluated exactly; an exact zero
/// is reported as such, and an exact nonzero value keeps refining (which
/// terminates). Without an exact form the call fails.
pub fn certified_sign(expr: &Expr, precision: Precision) -> Result<NumSign, NumericsError> {
    let mut bits = precision.start_bits.max(1);
    while bits <= precision.max_bits {
        if let Some(s) = expr.evaluate(bits).sign() {
            return Ok(s);
        }
        bits *= 2;
    }
    match expr.exact() {
        Some(e) => Ok(e.sign()),
        None => Err(NumericsError::PrecisionExhausted { max_bits: precision.max_bits }),
    }
}
