//! Seeded Monte Carlo comparison of shrinkage rules in the coefficient domain.
//!
//! Each replication draws a sparse coefficient vector θ from a point-mass +
//! scaled-beta mixture, adds Gaussian noise at a target SNR, shrinks with
//! every configured rule (σ known) and scores MSE and MAE against θ.
//!
//! Randomness comes from ChaCha8 keyed by `(seed, replication)` with a
//! separate stream per purpose, so any replication can be regenerated on its
//! own and parallel runs reproduce sequential ones bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MixturePrior, NoiseModel};
use crate::rules::{shrink_all, QuadratureSpec, RuleKind, DEFAULT_TRUNCATION};

const COEFFICIENT_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

/// Counter-based generator for `(seed, replication, stream)`.
pub fn keyed_rng(seed: u64, replication: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&replication.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Shape of the sparse coefficient distribution: zero with probability
/// `sparsity_weight`, otherwise `lo + (hi − lo) · Beta(shape1, shape2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureShape {
    pub sparsity_weight: f64,
    pub beta_shape1: f64,
    pub beta_shape2: f64,
    pub support: (f64, f64),
}

impl MixtureShape {
    pub fn validate(&self) -> Result<()> {
        if !(self.sparsity_weight > 0.0 && self.sparsity_weight < 1.0) {
            return Err(Error::param(format!(
                "sparsity_weight must lie in (0, 1), got {}",
                self.sparsity_weight
            )));
        }
        if !(self.beta_shape1 > 0.0 && self.beta_shape2 > 0.0) {
            return Err(Error::param("beta shapes must be positive"));
        }
        let (lo, hi) = self.support;
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::param(format!("support ({lo}, {hi}) must satisfy lo < hi")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientGenerator {
    pub n: usize,
    pub shape: MixtureShape,
    pub seed: u64,
}

/// Draws θ. Deterministic in `gen.seed`.
pub fn generate_coefficients(gen: &CoefficientGenerator) -> Result<Vec<f64>> {
    gen.shape.validate()?;
    if gen.n < 2 || !gen.n.is_power_of_two() {
        return Err(Error::param(format!("sample size must be dyadic, got {}", gen.n)));
    }
    let s = gen.shape;
    let beta = Beta::new(s.beta_shape1, s.beta_shape2).map_err(|e| Error::param(e.to_string()))?;
    let (lo, hi) = s.support;
    let mut rng = keyed_rng(gen.seed, 0, COEFFICIENT_STREAM);
    Ok((0..gen.n)
        .map(|_| {
            if rng.gen::<f64>() < s.sparsity_weight {
                0.0
            } else {
                lo + (hi - lo) * beta.sample(&mut rng)
            }
        })
        .collect())
}

/// Population standard deviation.
fn population_sd(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// `d = θ + N(0, σ²)` with `σ = sd(θ) / snr`.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn add_noise(theta: &[f64], snr: f64, seed: u64) -> Result<(Vec<f64>, f64)> {
    if !(snr > 0.0 && snr.is_finite()) {
        return Err(Error::param(format!("snr must be positive, got {snr}")));
    }
    if theta.is_empty() {
        return Err(Error::input("empty coefficient vector"));
    }
    let sd = population_sd(theta);
    if !(sd > 0.0) {
        return Err(Error::param("coefficient vector is constant; noise level undefined"));
    }
    let sigma = sd / snr;
    let mut rng = keyed_rng(seed, 0, NOISE_STREAM);
    let d = theta
        .iter()
        .map(|t| t + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok((d, sigma))
}

/// A rule entered in a study. `identity` (no shrinkage) and `oracle` (returns
/// the true θ) are reference estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StudyRule {
    LinexLogistic { a: f64 },
    PosteriorMean,
    SoftUniversal,
    SoftSure,
    Identity,
    Oracle,
}

impl StudyRule {
    fn as_kind(&self) -> Option<RuleKind> {
        match *self {
            Self::LinexLogistic { a } => Some(RuleKind::LinexLogistic { a }),
            Self::PosteriorMean => Some(RuleKind::PosteriorMean),
            Self::SoftUniversal => Some(RuleKind::SoftUniversal),
            Self::SoftSure => Some(RuleKind::SoftSure),
            Self::Identity | Self::Oracle => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::LinexLogistic { a } => format!("linex_logistic(a={a})"),
            Self::PosteriorMean => "posterior_mean".into(),
            Self::SoftUniversal => "soft_universal".into(),
            Self::SoftSure => "soft_sure".into(),
            Self::Identity => "identity".into(),
            Self::Oracle => "oracle".into(),
        }
    }
}

fn default_alpha() -> f64 {
    0.9
}

fn default_tau() -> f64 {
    5.0
}

fn default_nodes() -> usize {
    crate::rules::DEFAULT_NODE_COUNT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub scenario: String,
    pub n: usize,
    pub snr: f64,
    pub replications: usize,
    pub seed: u64,
    pub rules: Vec<StudyRule>,
    pub generator: MixtureShape,
    /// Prior weight used by the Bayesian rules (level-independent).
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_nodes")]
    pub quadrature_nodes: usize,
}

impl StudyConfig {
    /// Reconstructed scenarios: 80% zeros, nonzero part `3 · Beta(2, 5)`
    /// (scenario 1) or `3 · Beta(1, 8)` (scenario 2). Rules: LINEX (a = 1),
    /// SURE and universal soft thresholding.
    pub fn preset(scenario: u8, n: usize, snr: f64, seed: u64) -> Result<Self> {
        let (s1, s2) = match scenario {
            1 => (2.0, 5.0),
            2 => (1.0, 8.0),
            other => return Err(Error::param(format!("unknown scenario preset {other}"))),
        };
        Ok(Self {
            scenario: format!("scenario-{scenario}"),
            n,
            snr,
            replications: 200,
            seed,
            rules: vec![
                StudyRule::LinexLogistic { a: 1.0 },
                StudyRule::SoftSure,
                StudyRule::SoftUniversal,
            ],
            generator: MixtureShape {
                sparsity_weight: 0.8,
                beta_shape1: s1,
                beta_shape2: s2,
                support: (0.0, 3.0),
            },
            alpha: default_alpha(),
            tau: default_tau(),
            quadrature_nodes: default_nodes(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || !self.n.is_power_of_two() {
            return Err(Error::param(format!("n must be dyadic, got {}", self.n)));
        }
        if !(self.snr > 0.0 && self.snr.is_finite()) {
            return Err(Error::param(format!("snr must be positive, got {}", self.snr)));
        }
        if self.replications == 0 {
            return Err(Error::param("replications must be at least 1"));
        }
        if self.rules.is_empty() {
            return Err(Error::param("a study needs at least one rule"));
        }
        for rule in &self.rules {
            if let StudyRule::LinexLogistic { a } = rule {
                if *a == 0.0 || !a.is_finite() {
                    return Err(Error::param(format!("LINEX a must be nonzero, got {a}")));
                }
            }
        }
        self.generator.validate()?;
        MixturePrior::new(self.alpha, self.tau)?;
        QuadratureSpec::new(self.quadrature_nodes, DEFAULT_TRUNCATION)?;
        Ok(())
    }

    fn replication_seed(&self, replication: usize) -> u64 {
        // SplitMix64 finaliser over (seed, replication)
        let mut z = self
            .seed
            .wrapping_add((replication as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationScore {
    pub mse: f64,
    pub mae: f64,
}

/// One replication: per-rule MSE and MAE, in `config.rules` order.
pub fn run_replication(config: &StudyConfig, replication: usize) -> Result<Vec<ReplicationScore>> {
    config.validate()?;
    let quadrature = QuadratureSpec::new(config.quadrature_nodes, DEFAULT_TRUNCATION)?;
    replicate(config, replication, &quadrature)
}

fn replicate(
    config: &StudyConfig,
    replication: usize,
    quadrature: &QuadratureSpec,
) -> Result<Vec<ReplicationScore>> {
    let seed = config.replication_seed(replication);
    let theta = generate_coefficients(&CoefficientGenerator {
        n: config.n,
        shape: config.generator,
        seed,
    })?;
    let (d, sigma) = add_noise(&theta, config.snr, seed)?;
    let noise = NoiseModel::new(sigma)?;
    let prior = MixturePrior::new(config.alpha, config.tau)?;

    config
        .rules
        .iter()
        .map(|rule| {
            let estimate = match rule {
                StudyRule::Identity => d.clone(),
                StudyRule::Oracle => theta.clone(),
                other => {
                    let kind = other.as_kind().expect("shrinkage rule");
                    let resolved = kind.resolve(&d, config.n, prior, noise, quadrature)?;
                    shrink_all(&resolved, &d)?
                }
            };
            Ok(score(&estimate, &theta))
        })
        .collect()
}

fn score(estimate: &[f64], truth: &[f64]) -> ReplicationScore {
    let n = truth.len() as f64;
    let (mut se, mut ae) = (0.0, 0.0);
    for (e, t) in estimate.iter().zip(truth) {
        se += (e - t) * (e - t);
        ae += (e - t).abs();
    }
    ReplicationScore {
        mse: se / n,
        mae: ae / n,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub scenario: String,
    pub rules: Vec<String>,
    pub amse: Vec<f64>,
    pub amae: Vec<f64>,
    /// `mse[r][k]`: replication `r`, rule `k`.
    pub mse: Vec<Vec<f64>>,
    pub mae: Vec<Vec<f64>>,
}

impl StudyResult {
    pub fn amse_of(&self, label: &str) -> Option<f64> {
        self.rules.iter().position(|r| r == label).map(|i| self.amse[i])
    }
}

/// Runs every replication (in parallel) and averages in replication order.
pub fn run_study(config: &StudyConfig) -> Result<StudyResult> {
    config.validate()?;
    let quadrature = QuadratureSpec::new(config.quadrature_nodes, DEFAULT_TRUNCATION)?;
    let scores: Vec<Vec<ReplicationScore>> = (0..config.replications)
        .into_par_iter()
        .map(|r| replicate(config, r, &quadrature))
        .collect::<Result<_>>()?;

    let k = config.rules.len();
    let reps = config.replications as f64;
    let mut amse = vec![0.0; k];
    let mut amae = vec![0.0; k];
    for row in &scores {
        for (i, s) in row.iter().enumerate() {
            amse[i] += s.mse;
            amae[i] += s.mae;
        }
    }
    amse.iter_mut().for_each(|v| *v /= reps);
    amae.iter_mut().for_each(|v| *v /= reps);

    Ok(StudyResult {
        scenario: config.scenario.clone(),
        rules: config.rules.iter().map(StudyRule::label).collect(),
        amse,
        amae,
        mse: scores.iter().map(|row| row.iter().map(|s| s.mse).collect()).collect(),
        mae: scores.iter().map(|row| row.iter().map(|s| s.mae).collect()).collect(),
    })
}
