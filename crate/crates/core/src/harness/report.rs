use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::approx::{ConjugatorReport, ScanCell};
use crate::group::Gamma;
use crate::orders::{conjugate_order, in_neighborhood, order_sign, Sign};

use super::{ExperimentConfig, OracleSpec, SpecError};

/// One conjugator search: approximate `oracles[target]` by conjugates of
/// `oracles[source]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairRecord {
    pub target: usize,
    pub source: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<ConjugatorReport>,
}

/// The part of an `approximate` or `scan` report needed to re-verify its
/// witnesses.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairsReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub f_radius: usize,
    pub oracles: Vec<OracleSpec>,
    pub pairs: Vec<PairRecord>,
    pub histogram: BTreeMap<usize, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Matrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Matrix {
    pub labels: Vec<String>,
    pub abc_signs: Vec<Sign>,
    pub cells: Vec<Vec<ScanCell>>,
    pub two_blocks: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifySummary {
    pub witnesses: usize,
    pub verified: usize,
    pub failures: Vec<String>,
}

impl VerifySummary {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Re-check every witness of `report` from its oracle specifications alone.
pub fn verify_pairs(gamma: &Gamma, report: &PairsReport) -> Result<VerifySummary, SpecError> {
    let oracles = report.oracles.iter().map(OracleSpec::build).collect::<Result<Vec<_>, _>>()?;
    let f = gamma.punctured_ball(report.f_radius);
    let mut out = VerifySummary::default();
    for pair in &report.pairs {
        let Some(r) = &pair.report else { continue };
        let Some(w) = &r.witness else { continue };
        out.witnesses += 1;
        let tag = format!("{} <- {} via {w}", pair.target, pair.source);
        let (Some(o), Some(o2)) = (oracles.get(pair.target), oracles.get(pair.source)) else {
            out.failures.push(format!("{tag}: oracle index out of range"));
            continue;
        };
        let g = gamma.element(w);
        match in_neighborhood(&conjugate_order(o2, &g), o, &f) {
            Ok(true) => {}
            Ok(false) => {
                out.failures.push(format!("{tag}: conjugate leaves the neighbourhood"));
                continue;
            }
            Err(e) => {
                out.failures.push(format!("{tag}: {e}"));
                continue;
            }
        }
        let bad = r.certificates.iter().find(|c| order_sign(o, &gamma.element(&c.element)) != Ok(c.sign));
        if let Some(c) = bad {
            out.failures.push(format!("{tag}: certificate for {} is wrong", c.element));
            continue;
        }
        if r.word_length != Some(w.len()) {
            out.failures.push(format!("{tag}: recorded length disagrees with the witness"));
            continue;
        }
        out.verified += 1;
    }
    Ok(out)
}
