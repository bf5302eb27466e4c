//! Model settings: TOML file, then command-line overrides, then the
//! subcommand's defaults.
//!
//! ```toml
//! rule = "linex_logistic"
//! a = 1.0
//! b = 1.0
//! alpha = 0.9
//! alpha_policy = "level_dependent"
//! gamma = 2.0
//! tau = 5.0
//! sigma = 0.5
//! primary_level = 3
//! filter_moments = 10
//! sample_size = 1024
//!
//! [quadrature]
//! nodes = 64
//! truncation = 10.0
//! ```

use std::path::Path;

use clap::ValueEnum;
use linex_shrink::rules::{DEFAULT_NODE_COUNT, DEFAULT_TRUNCATION};
use linex_shrink::transform::DEFAULT_PRIMARY_LEVEL;
use linex_shrink::{AlphaPolicy, LinexLoss, MixturePrior, QuadratureSpec, RuleKind};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum RuleName {
    LinexLogistic,
    PosteriorMean,
    SoftUniversal,
    SoftSure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum PolicyName {
    Global,
    LevelDependent,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub nodes: Option<usize>,
    pub truncation: Option<f64>,
}

/// Every field optional; unset fields fall through to the next layer.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub rule: Option<RuleName>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub alpha: Option<f64>,
    pub alpha_policy: Option<PolicyName>,
    pub gamma: Option<f64>,
    pub tau: Option<f64>,
    pub sigma: Option<f64>,
    pub primary_level: Option<usize>,
    pub filter_moments: Option<usize>,
    pub sample_size: Option<usize>,
    pub quadrature: Option<QuadratureConfig>,
}

impl ModelConfig {
    fn template() -> Self {
        Self {
            rule: Some(RuleName::LinexLogistic),
            a: Some(0.0),
            b: Some(0.0),
            alpha: Some(0.0),
            alpha_policy: Some(PolicyName::Global),
            gamma: Some(0.0),
            tau: Some(0.0),
            sigma: Some(0.0),
            primary_level: Some(0),
            filter_moments: Some(0),
            sample_size: Some(0),
            quadrature: Some(QuadratureConfig {
                nodes: Some(0),
                truncation: Some(0.0),
            }),
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = read_text(path)?;
        parse_checked(&text, &Self::template(), path)
    }

    /// `other`'s set fields win.
    pub fn overlay(self, other: Self) -> Self {
        let q0 = self.quadrature.unwrap_or_default();
        let q1 = other.quadrature.unwrap_or_default();
        Self {
            rule: other.rule.or(self.rule),
            a: other.a.or(self.a),
            b: other.b.or(self.b),
            alpha: other.alpha.or(self.alpha),
            alpha_policy: other.alpha_policy.or(self.alpha_policy),
            gamma: other.gamma.or(self.gamma),
            tau: other.tau.or(self.tau),
            sigma: other.sigma.or(self.sigma),
            primary_level: other.primary_level.or(self.primary_level),
            filter_moments: other.filter_moments.or(self.filter_moments),
            sample_size: other.sample_size.or(self.sample_size),
            quadrature: Some(QuadratureConfig {
                nodes: q1.nodes.or(q0.nodes),
                truncation: q1.truncation.or(q0.truncation),
            }),
        }
    }

    pub fn resolve(self, defaults: &Defaults) -> CliResult<Model> {
        let q = self.quadrature.unwrap_or_default();
        let quadrature = QuadratureSpec::new(
            q.nodes.unwrap_or(DEFAULT_NODE_COUNT),
            q.truncation.unwrap_or(DEFAULT_TRUNCATION),
        )?;
        let gamma = self.gamma.unwrap_or(linex_shrink::model::DEFAULT_GAMMA);
        let policy = match self.alpha_policy.unwrap_or(defaults.alpha_policy) {
            PolicyName::Global => AlphaPolicy::Global,
            PolicyName::LevelDependent => AlphaPolicy::LevelDependent { gamma },
        };
        let model = Model {
            rule: self.rule.unwrap_or(RuleName::LinexLogistic),
            a: self.a.unwrap_or(1.0),
            b: self.b.unwrap_or(1.0),
            alpha: self.alpha.unwrap_or(defaults.alpha),
            policy,
            tau: self.tau.unwrap_or(defaults.tau),
            sigma: self.sigma.or(defaults.sigma),
            primary_level: self.primary_level.unwrap_or(DEFAULT_PRIMARY_LEVEL),
            filter_moments: self.filter_moments.unwrap_or(10),
            sample_size: self.sample_size,
            quadrature,
        };
        // surface parameter errors before any input is read
        model.prior()?;
        model.loss()?;
        if let Some(s) = model.sigma {
            linex_shrink::NoiseModel::new(s)?;
        }
        if let AlphaPolicy::LevelDependent { gamma } = policy {
            if !(gamma > 0.0 && gamma.is_finite()) {
                return Err(CliError::usage(format!("gamma must be positive, got {gamma}")));
            }
        }
        Ok(model)
    }
}

/// Per-subcommand fallbacks for the settings whose natural value differs
/// between denoising real data and drawing the reference curves.
#[derive(Debug, Clone, Copy)]
pub struct Defaults {
    pub alpha: f64,
    pub alpha_policy: PolicyName,
    pub tau: f64,
    pub sigma: Option<f64>,
}

impl Defaults {
    pub const DENOISE: Self = Self {
        alpha: 0.9,
        alpha_policy: PolicyName::LevelDependent,
        tau: linex_shrink::model::DEFAULT_TAU,
        sigma: None,
    };

    /// Unit noise, unit prior scale, α = 0.9.
    pub const REFERENCE: Self = Self {
        alpha: 0.9,
        alpha_policy: PolicyName::Global,
        tau: 1.0,
        sigma: Some(1.0),
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub rule: RuleName,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub policy: AlphaPolicy,
    pub tau: f64,
    pub sigma: Option<f64>,
    pub primary_level: usize,
    pub filter_moments: usize,
    pub sample_size: Option<usize>,
    pub quadrature: QuadratureSpec,
}

impl Model {
    pub fn prior(&self) -> CliResult<MixturePrior> {
        Ok(MixturePrior::new(self.alpha, self.tau)?)
    }

    pub fn loss(&self) -> CliResult<LinexLoss> {
        Ok(LinexLoss::new(self.a, self.b)?)
    }

    pub fn rule_kind(&self) -> RuleKind {
        match self.rule {
            RuleName::LinexLogistic => RuleKind::LinexLogistic { a: self.a },
            RuleName::PosteriorMean => RuleKind::PosteriorMean,
            RuleName::SoftUniversal => RuleKind::SoftUniversal,
            RuleName::SoftSure => RuleKind::SoftSure,
        }
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

/// Deserialises `text`, first reporting every key that `template` (a fully
/// populated instance of `T`) does not know about.
pub fn parse_checked<T>(text: &str, template: &T, path: &Path) -> CliResult<T>
where
    T: Serialize + for<'de> Deserialize<'de>,
{
    let value: toml::Value =
        toml::from_str(text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let known = toml::Value::try_from(template).map_err(|e| CliError::usage(e.to_string()))?;
    let mut unknown = Vec::new();
    unknown_keys(&value, &known, "", &mut unknown);
    if !unknown.is_empty() {
        return Err(CliError::usage(format!(
            "{}: unknown key(s): {}",
            path.display(),
            unknown.join(", ")
        )));
    }
    value
        .try_into()
        .map_err(|e: toml::de::Error| CliError::usage(format!("{}: {}", path.display(), e.message())))
}

fn unknown_keys(value: &toml::Value, known: &toml::Value, prefix: &str, out: &mut Vec<String>) {
    match (value, known) {
        (toml::Value::Table(t), toml::Value::Table(k)) => {
            for (key, v) in t {
                let path = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
                match k.get(key) {
                    Some(kv) => unknown_keys(v, kv, &path, out),
                    None => out.push(path),
                }
            }
        }
        (toml::Value::Array(items), toml::Value::Array(templates)) => {
            // array elements are checked against the union of the template elements
            let mut merged = toml::map::Map::new();
            for t in templates {
                if let toml::Value::Table(tt) = t {
                    for (k, v) in tt {
                        merged.entry(k.clone()).or_insert_with(|| v.clone());
                    }
                }
            }
            if merged.is_empty() {
                return;
            }
            let merged = toml::Value::Table(merged);
            for (i, item) in items.iter().enumerate() {
                unknown_keys(item, &merged, &format!("{prefix}[{i}]"), out);
            }
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_unknown_key_is_listed() {
        let text = "a = 2.0\nbogus = 1\n[quadrature]\nnodes = 32\nextra = true\n";
        let err = parse_checked::<ModelConfig>(text, &ModelConfig::template(), Path::new("m.toml")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus") && msg.contains("quadrature.extra"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn flags_override_file() {
        let file = ModelConfig {
            a: Some(2.0),
            tau: Some(3.0),
            ..Default::default()
        };
        let flags = ModelConfig {
            a: Some(0.5),
            ..Default::default()
        };
        let m = file.overlay(flags).resolve(&Defaults::REFERENCE).unwrap();
        assert_eq!((m.a, m.tau, m.sigma), (0.5, 3.0, Some(1.0)));
    }

    #[test]
    fn denoise_defaults() {
        let m = ModelConfig::default().resolve(&Defaults::DENOISE).unwrap();
        assert_eq!(m.tau, 5.0);
        assert_eq!(m.filter_moments, 10);
        assert_eq!(m.primary_level, 3);
        assert_eq!(m.policy, AlphaPolicy::LevelDependent { gamma: 2.0 });
        assert!(m.sigma.is_none());
    }

    #[test]
    fn invalid_parameters_are_usage_errors() {
        for bad in [
            ModelConfig { a: Some(0.0), ..Default::default() },
            ModelConfig { alpha: Some(1.0), ..Default::default() },
            ModelConfig { sigma: Some(-1.0), ..Default::default() },
            ModelConfig {
                quadrature: Some(QuadratureConfig { nodes: Some(4), truncation: None }),
                ..Default::default()
            },
        ] {
            assert_eq!(bad.resolve(&Defaults::REFERENCE).unwrap_err().exit_code(), 2);
        }
    }
}
