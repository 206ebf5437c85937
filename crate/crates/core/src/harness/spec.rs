use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{FixedKind, Gamma, LiftPoint};
use crate::orders::{OrderOracle, Realization, Side};
use crate::realization::BlownPoint;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SpecError {
    #[error("bad basepoint `{0}`: expected near:X, dir:U,V@SHEET, fix:WORD:attracting|repelling@SHEET or move:WORD|SPEC")]
    Basepoint(String),
    #[error("basepoint `{0}` is not a fixed point: {1}")]
    NotFixed(String, String),
    #[error("bad gap fraction `{0}`")]
    Gap(String),
    #[error("empty tie-break list")]
    NoTiebreak,
}

/// A serializable description of an [`OrderOracle`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    pub basepoint: String,
    #[serde(default = "default_tiebreak")]
    pub tiebreak: Vec<Side>,
    #[serde(default)]
    pub reversed: bool,
    /// Position in `[0, 1]` inside the gap of a blow-up along the orbit of
    /// the basepoint.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<String>,
}

fn default_tiebreak() -> Vec<Side> {
    vec![Side::Left]
}

/// Parse a basepoint:
/// - `near:X` — a rational direction within `2^-40` of position `X`;
/// - `dir:U,V@S` — the direction of the rational vector `(U, V)` on sheet `S`;
/// - `fix:WORD:attracting@S` (or `repelling`) — a fixed point of a
///   hyperbolic element;
/// - `move:WORD|SPEC` — the image of another basepoint under `ρ(WORD)`.
pub fn parse_basepoint(s: &str) -> Result<LiftPoint, SpecError> {
    let err = || SpecError::Basepoint(s.to_string());
    if let Some(rest) = s.strip_prefix("move:") {
        let (word, inner) = rest.split_once('|').ok_or_else(err)?;
        let g = Gamma::standard().parse(word.trim()).map_err(|_| err())?;
        return Ok(g.apply(&parse_basepoint(inner)?));
    }
    if let Some(x) = s.strip_prefix("near:") {
        let x: f64 = x.trim().parse().map_err(|_| err())?;
        if !x.is_finite() {
            return Err(err());
        }
        return Ok(LiftPoint::near_f64(x, 40));
    }
    let (body, sheet) = s.rsplit_once('@').ok_or_else(err)?;
    let sheet: i64 = sheet.trim().parse().map_err(|_| err())?;
    if let Some(uv) = body.strip_prefix("dir:") {
        let (u, v) = uv.split_once(',').ok_or_else(err)?;
        let u = BigRational::from_str(u.trim()).map_err(|_| err())?;
        let v = BigRational::from_str(v.trim()).map_err(|_| err())?;
        if num_traits::Zero::is_zero(&u) && num_traits::Zero::is_zero(&v) {
            return Err(err());
        }
        return Ok(LiftPoint::from_rational(sheet, u, v));
    }
    if let Some(rest) = body.strip_prefix("fix:") {
        let (word, kind) = rest.split_once(':').ok_or_else(err)?;
        let kind = match kind.trim() {
            "attracting" => FixedKind::Attracting,
            "repelling" => FixedKind::Repelling,
            _ => return Err(err()),
        };
        let g = Gamma::standard().parse(word.trim()).map_err(|_| err())?;
        return g.fixed_point(kind, sheet).map_err(|e| SpecError::NotFixed(s.to_string(), e.to_string()));
    }
    Err(err())
}

impl OracleSpec {
    pub fn build(&self) -> Result<OrderOracle, SpecError> {
        if self.tiebreak.is_empty() {
            return Err(SpecError::NoTiebreak);
        }
        let p = parse_basepoint(&self.basepoint)?;
        let realization = match &self.gap {
            None => Realization::Standard(p),
            Some(f) => {
                let q = BigRational::from_str(f.trim()).map_err(|_| SpecError::Gap(f.clone()))?;
                Realization::Blowup(BlownPoint::new(p, Some(q)).map_err(|_| SpecError::Gap(f.clone()))?)
            }
        };
        Ok(OrderOracle { realization, tiebreak: self.tiebreak.clone(), reversed: self.reversed })
    }

    /// The same order conjugated by `word`: the basepoint moves by `ρ(word)`.
    pub fn moved(&self, word: &str) -> OracleSpec {
        OracleSpec { basepoint: format!("move:{word}|{}", self.basepoint), ..self.clone() }
    }

    pub fn label(&self) -> String {
        let mut s = self.basepoint.clone();
        if let Some(g) = &self.gap {
            s.push_str(&format!("[gap {g}]"));
        }
        let sides: Vec<&str> = self.tiebreak.iter().map(|t| if *t == Side::Left { "L" } else { "R" }).collect();
        s.push_str(&format!(" {}", sides.join("")));
        if self.reversed {
            s.push_str(" rev");
        }
        s
    }
}
