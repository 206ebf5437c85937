//! The lifted (2,3,7) triangle group and its standard action on the line.

mod dynamics;
mod element;
mod gamma;
mod point;
mod word;

pub use dynamics::{in_open_arc, Class, FixedKind, FixedPoint, Stabilizer};
pub use element::{ElementKey, LiftedElement, Mat2};
pub use gamma::{generator_matrices, heptagonal_field, Gamma, RelationCheck};
pub use point::{angle_f64, cross, dir_cmp, norm_sq, normalize, rational_direction, LiftPoint, Vec2};
pub use word::{Letter, ParseWordError, Word};

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("generator construction failed: {0}")]
    ConstructionFailure(String),
    #[error("element {0} is not hyperbolic")]
    NotHyperbolic(String),
    #[error("no central power found within {0} iterations")]
    IterationBudgetExceeded(u32),
    #[error("bad word: {0}")]
    BadWord(String),
}
