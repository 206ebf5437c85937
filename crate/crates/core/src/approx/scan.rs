use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::group::{Gamma, LiftedElement};
use crate::orders::{abc_sign, OrderOracle, Sign};

use super::search::{find_conjugator_bfs, find_conjugator_guided, ConjugatorReport, Strategy};
use super::{ApproxError, SearchBudget};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ScanCell {
    Diagonal,
    Found { length: usize, strategy: Strategy },
    NotFound,
    /// `abc` has opposite signs; no conjugate can approximate.
    Obstructed,
}

impl ScanCell {
    pub fn reachable(&self) -> bool {
        matches!(self, ScanCell::Diagonal | ScanCell::Found { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub labels: Vec<String>,
    pub abc_signs: Vec<Sign>,
    /// `cells[i][j]`: can conjugates of order `j` approximate order `i`?
    pub cells: Vec<Vec<ScanCell>>,
    /// Reachability coincides with equality of `abc` signs.
    pub two_blocks: bool,
    /// Witness word length → number of pairs.
    pub histogram: BTreeMap<usize, usize>,
    #[serde(skip)]
    pub reports: Vec<(usize, usize, ConjugatorReport)>,
}

/// Pairwise approximation over a finite family: guided search first,
/// breadth-first search as a fallback.
pub fn component_scan(
    gamma: &Gamma,
    labels: &[String],
    orders: &[OrderOracle],
    f: &[LiftedElement],
    budget: &SearchBudget,
) -> Result<ScanReport, ApproxError> {
    let signs: Vec<Sign> = orders.iter().map(|o| abc_sign(o, gamma)).collect();
    let n = orders.len();
    let mut cells = vec![vec![ScanCell::Diagonal; n]; n];
    let mut histogram = BTreeMap::new();
    let mut reports = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if signs[i] != signs[j] {
                cells[i][j] = ScanCell::Obstructed;
                continue;
            }
            let mut r = find_conjugator_guided(gamma, &orders[i], &orders[j], f, budget)?;
            if !r.found {
                r = find_conjugator_bfs(gamma, &orders[i], &orders[j], f, budget)?;
            }
            cells[i][j] = match r.word_length {
                Some(length) => {
                    *histogram.entry(length).or_insert(0) += 1;
                    ScanCell::Found { length, strategy: r.strategy }
                }
                None => ScanCell::NotFound,
            };
            reports.push((i, j, r));
        }
    }
    let two_blocks =
        (0..n).all(|i| (0..n).all(|j| cells[i][j].reachable() == (signs[i] == signs[j])));
    Ok(ScanReport { labels: labels.to_vec(), abc_signs: signs, cells, two_blocks, histogram, reports })
}
