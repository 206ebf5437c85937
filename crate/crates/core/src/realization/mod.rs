//! Dynamical realizations and blow-ups.

mod blowup;
mod partial;

pub use blowup::{check_semiconjugacy, Action, BlownPoint, BlowupError, BlowupMap, Defect, GapRecord, StandardAction};
pub use partial::{build_realization, PartialRealization, PlMap, PlacementRow, RealizationError, SignSource, TableSource};
