//! Experiment configuration, oracle specifications and seeded sampling.

mod report;
mod spec;

pub use report::{verify_pairs, Matrix, PairRecord, PairsReport, VerifySummary};
pub use spec::{parse_basepoint, OracleSpec, SpecError};

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::SearchBudget;
use crate::group::{Class, FixedKind, Gamma, Stabilizer};
use crate::orders::{OrderOracle, Side};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsConfig {
    pub max_bits: u32,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig { max_bits: 4096 }
    }
}

/// Everything that determines an experiment's output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Radius of the ball whose non-identity elements form `F`.
    pub ball_radius: usize,
    pub sample_size: usize,
    /// Largest ball radius any command may enumerate.
    pub ball_cap: usize,
    pub output_dir: PathBuf,
    pub budget: SearchBudget,
    pub numerics: NumericsConfig,
    /// Explicit oracles; when empty, `sample_size` oracles are sampled.
    pub oracles: Vec<OracleSpec>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            ball_radius: 3,
            sample_size: 6,
            ball_cap: 12,
            output_dir: PathBuf::from("out"),
            budget: SearchBudget::default(),
            numerics: NumericsConfig::default(),
            oracles: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<ExperimentConfig, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<ExperimentConfig, ConfigError> {
        ExperimentConfig::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |what: &str| Err(ConfigError::Invalid(format!("{what} must be positive")));
        if self.seed == 0 {
            return bad("seed");
        }
        if self.sample_size == 0 {
            return bad("sample_size");
        }
        if self.budget.max_word_length == 0 || self.budget.max_candidates == 0 || self.budget.stabilizer_depth == 0 {
            return bad("budget fields");
        }
        if self.numerics.max_bits == 0 || self.budget.max_bits == 0 {
            return bad("max_bits");
        }
        if self.ball_radius > self.ball_cap {
            return Err(ConfigError::Invalid(format!(
                "ball_radius {} exceeds ball_cap {}",
                self.ball_radius, self.ball_cap
            )));
        }
        if self.budget.max_word_length > self.ball_cap {
            return Err(ConfigError::Invalid("budget.max_word_length exceeds ball_cap".into()));
        }
        for o in &self.oracles {
            o.build()?;
        }
        Ok(())
    }

    /// The budget with the precision cap of the numerics section applied.
    pub fn effective_budget(&self) -> SearchBudget {
        SearchBudget { max_bits: self.budget.max_bits.min(self.numerics.max_bits), ..self.budget }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// The configured oracles, or a seeded sample of free basepoints.
    pub fn oracles(&self, gamma: &Gamma) -> Result<Vec<(OracleSpec, OrderOracle)>, ConfigError> {
        if self.oracles.is_empty() {
            return Ok(sample_free_oracles(gamma, self.seed, self.sample_size, self.budget.stabilizer_depth));
        }
        self.oracles.iter().map(|s| Ok((s.clone(), s.build()?))).collect()
    }
}

fn random_side(rng: &mut ChaCha8Rng) -> Side {
    if rng.gen_bool(0.5) {
        Side::Left
    } else {
        Side::Right
    }
}

/// `count` oracles at rational basepoints with denominator 1000, rejecting
/// any basepoint with a nontrivial stabilizer in `ball(depth)`.
pub fn sample_free_oracles(gamma: &Gamma, seed: u64, count: usize, depth: usize) -> Vec<(OracleSpec, OrderOracle)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u: i64 = rng.gen_range(-1000..=1000);
        let v: i64 = rng.gen_range(1..=1000);
        let sheet: i64 = rng.gen_range(-1..=1);
        let spec = OracleSpec {
            basepoint: format!("dir:{u}/1000,{v}/1000@{sheet}"),
            tiebreak: vec![random_side(&mut rng)],
            reversed: false,
            gap: None,
        };
        let o = spec.build().expect("well-formed sample spec");
        if matches!(gamma.point_stabilizer(o.basepoint(), depth), Stabilizer::TrivialUpToDepth(_)) {
            out.push((spec, o));
        }
    }
    out
}

/// `count` oracles at attracting fixed points of hyperbolic elements of
/// `ball(radius)`, with random tie-break sides.
pub fn sample_fixed_oracles(gamma: &Gamma, seed: u64, count: usize, radius: usize) -> Vec<(OracleSpec, OrderOracle)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hyp: Vec<_> = gamma.ball(radius).into_iter().filter(|g| g.classify() == Class::Hyperbolic).collect();
    (0..count)
        .map(|_| {
            let h = &hyp[rng.gen_range(0..hyp.len())];
            let side = random_side(&mut rng);
            let spec = OracleSpec {
                basepoint: format!("fix:{}:attracting@0", h.word()),
                tiebreak: vec![side, side.opposite()],
                reversed: false,
                gap: None,
            };
            let o = spec.build().expect("hyperbolic element");
            debug_assert!(h.fixed_point(FixedKind::Attracting, 0).is_ok());
            (spec, o)
        })
        .collect()
}
