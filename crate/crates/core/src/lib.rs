//! Left-orders on the lifted (2,3,7) triangle group: exact action on the
//! line, cone tables, dynamical realizations, blow-ups and conjugator search.

pub mod approx;
pub mod group;
pub mod harness;
pub mod numerics;
pub mod orders;
pub mod realization;

pub use group::{Gamma, LiftPoint, LiftedElement, Word};
pub use orders::{ConeTable, OrderOracle, Side, Sign};
