//! Approximating one left-order by conjugates of another on a finite set.

mod mover;
mod neighborhood;
mod scan;
mod search;

pub use mover::{find_point_mover, Mover, Target};
pub use neighborhood::{inner_point, uniform_sign_interval, SideInterval, SideReport, SignInterval, UniformSign};
pub use scan::{component_scan, ScanCell, ScanReport};
pub use search::{
    exhaustive_search, find_conjugator_bfs, find_conjugator_guided, ConjugatorReport, GuidedCase, SignCertificate,
    Strategy,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::orders::{OrderError, Sign};

/// Limits on a conjugator search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchBudget {
    pub max_word_length: usize,
    pub max_candidates: usize,
    /// Precision cap for certified neighbourhoods; bounds the number of
    /// radius halvings to `max_bits / 64`.
    pub max_bits: u32,
    /// Radius of the ball searched for point stabilizers.
    pub stabilizer_depth: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_word_length: 12, max_candidates: 1_000_000, max_bits: 4096, stabilizer_depth: 8 }
    }
}

impl SearchBudget {
    pub fn max_halvings(&self) -> u32 {
        (self.max_bits / 64).max(1)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ApproxError {
    #[error("abc is {left} in one order and {right} in the other; no conjugate can approximate")]
    HypothesisViolated { left: Sign, right: Sign },
    #[error("search budget exhausted after {candidates} candidates (word length {length})")]
    BudgetExhausted { candidates: usize, length: usize },
    #[error("no certified neighbourhood within {0} halvings")]
    Uncertified(u32),
    #[error(transparent)]
    Order(#[from] OrderError),
}
