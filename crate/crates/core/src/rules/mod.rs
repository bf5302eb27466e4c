//! Coefficient-wise shrinkage rules.
//!
//! [`ShrinkageRule`] is a fully parameterised estimator `d ↦ δ(d)`.
//! [`RuleKind`] is the unresolved choice read from configuration; it turns
//! into a rule once the noise level and the coefficients are known (the
//! soft-thresholding policies need them to pick λ).

mod bayes;
mod quadrature;
mod threshold;

pub use bayes::{linex_posterior_exp, linex_rule, log_linex_posterior_exp, posterior_mean_rule};
pub use quadrature::{
    gauss_hermite, gauss_legendre, gauss_weighted_integral, truncated_normal_integral,
    QuadratureSpec, DEFAULT_NODE_COUNT, DEFAULT_TRUNCATION,
};
pub use threshold::{soft_threshold, sure_threshold, universal_threshold, universal_threshold_real};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{elicit_alpha, MixturePrior, NoiseModel};
use crate::transform::WaveletDecomposition;

/// Anything that maps an empirical coefficient to an estimate.
pub trait CoefficientRule: Sync {
    fn shrink(&self, d: f64) -> Result<f64>;
}

/// Adapts an infallible closure to [`CoefficientRule`].
pub struct FnRule<F>(pub F);

impl<F> CoefficientRule for FnRule<F>
where
    F: Fn(f64) -> f64 + Sync,
{
    fn shrink(&self, d: f64) -> Result<f64> {
        Ok((self.0)(d))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShrinkageRule {
    /// LINEX Bayes rule under the mixture prior.
    LinexLogistic {
        a: f64,
        prior: MixturePrior,
        noise: NoiseModel,
        quadrature: QuadratureSpec,
    },
    /// Posterior mean under the mixture prior.
    PosteriorMean {
        prior: MixturePrior,
        noise: NoiseModel,
        quadrature: QuadratureSpec,
    },
    /// Soft thresholding at the universal threshold.
    SoftUniversal { lambda: f64 },
    /// Soft thresholding at the SURE threshold.
    SoftSure { lambda: f64 },
}

impl ShrinkageRule {
    pub fn linex(a: f64, prior: MixturePrior, noise: NoiseModel, quadrature: QuadratureSpec) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::param(format!("LINEX a must be finite and nonzero, got {a}")));
        }
        Ok(Self::LinexLogistic {
            a,
            prior,
            noise,
            quadrature,
        })
    }

    pub fn posterior_mean(prior: MixturePrior, noise: NoiseModel, quadrature: QuadratureSpec) -> Self {
        Self::PosteriorMean {
            prior,
            noise,
            quadrature,
        }
    }

    pub fn evaluate(&self, d: f64) -> Result<f64> {
        match self {
            Self::LinexLogistic {
                a,
                prior,
                noise,
                quadrature,
            } => linex_rule(d, *a, prior, noise, quadrature),
            Self::PosteriorMean {
                prior,
                noise,
                quadrature,
            } => posterior_mean_rule(d, prior, noise, quadrature),
            Self::SoftUniversal { lambda } | Self::SoftSure { lambda } => {
                if !d.is_finite() {
                    return Err(Error::input(format!("coefficient {d} is not finite")));
                }
                Ok(soft_threshold(d, *lambda))
            }
        }
    }

    /// Same rule with the prior weight replaced; thresholding rules are
    /// returned unchanged.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Ok(match self {
            Self::LinexLogistic {
                a,
                prior,
                noise,
                quadrature,
            } => Self::LinexLogistic {
                a: *a,
                prior: prior.with_alpha(alpha)?,
                noise: *noise,
                quadrature: quadrature.clone(),
            },
            Self::PosteriorMean {
                prior,
                noise,
                quadrature,
            } => Self::PosteriorMean {
                prior: prior.with_alpha(alpha)?,
                noise: *noise,
                quadrature: quadrature.clone(),
            },
            other => other.clone(),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::LinexLogistic { .. } => "linex_logistic",
            Self::PosteriorMean { .. } => "posterior_mean",
            Self::SoftUniversal { .. } => "soft_universal",
            Self::SoftSure { .. } => "soft_sure",
        }
    }

    pub fn noise(&self) -> Option<&NoiseModel> {
        match self {
            Self::LinexLogistic { noise, .. } | Self::PosteriorMean { noise, .. } => Some(noise),
            _ => None,
        }
    }
}

impl CoefficientRule for ShrinkageRule {
    fn shrink(&self, d: f64) -> Result<f64> {
        self.evaluate(d)
    }
}

/// A rule choice before its data-dependent parameters are fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RuleKind {
    LinexLogistic { a: f64 },
    PosteriorMean,
    SoftUniversal,
    SoftSure,
}

impl RuleKind {
    /// Fixes the rule for a coefficient vector. `sample_size` enters the
    /// universal threshold; `coefficients` feed SURE.
    pub fn resolve(
        &self,
        coefficients: &[f64],
        sample_size: usize,
        prior: MixturePrior,
        noise: NoiseModel,
        quadrature: &QuadratureSpec,
    ) -> Result<ShrinkageRule> {
        Ok(match *self {
            Self::LinexLogistic { a } => ShrinkageRule::linex(a, prior, noise, quadrature.clone())?,
            Self::PosteriorMean => ShrinkageRule::posterior_mean(prior, noise, quadrature.clone()),
            Self::SoftUniversal => ShrinkageRule::SoftUniversal {
                lambda: universal_threshold(&noise, sample_size)?,
            },
            Self::SoftSure => ShrinkageRule::SoftSure {
                lambda: sure_threshold(coefficients, &noise)?,
            },
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::LinexLogistic { .. } => "linex_logistic",
            Self::PosteriorMean => "posterior_mean",
            Self::SoftUniversal => "soft_universal",
            Self::SoftSure => "soft_sure",
        }
    }
}

/// How the prior weight α is chosen per resolution level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum AlphaPolicy {
    /// Use the rule's own α everywhere.
    Global,
    /// `α(j) = 1 − (j − J0 + 1)^(−γ)`.
    LevelDependent { gamma: f64 },
}

impl AlphaPolicy {
    /// α for level `j`, or `None` under the global policy.
    pub fn alpha_for(&self, level: usize, primary_level: usize) -> Result<Option<f64>> {
        match self {
            Self::Global => Ok(None),
            Self::LevelDependent { gamma } => elicit_alpha(level, primary_level, *gamma).map(Some),
        }
    }
}

/// Evaluates `rule` on every coefficient, in parallel. Output order and
/// values do not depend on the thread count.
pub fn shrink_all<R: CoefficientRule + ?Sized>(rule: &R, coefficients: &[f64]) -> Result<Vec<f64>> {
    coefficients.par_iter().map(|&d| rule.shrink(d)).collect()
}

/// Shrinks every detail coefficient; smooth coefficients pass through.
pub fn apply_rule(
    decomposition: &WaveletDecomposition,
    rule: &ShrinkageRule,
    policy: AlphaPolicy,
) -> Result<WaveletDecomposition> {
    let j0 = decomposition.primary_level();
    let mut details = Vec::new();
    for (j, coeffs) in decomposition.levels() {
        let level_rule = match policy.alpha_for(j, j0)? {
            Some(alpha) => rule.with_alpha(alpha)?,
            None => rule.clone(),
        };
        details.push(shrink_all(&level_rule, coeffs)?);
    }
    WaveletDecomposition::from_parts(decomposition.smooth().to_vec(), details, j0)
}

/// `(d, δ(d))` over `grid`.
pub fn rule_curve<R: CoefficientRule + ?Sized>(rule: &R, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    let values = shrink_all(rule, grid)?;
    Ok(grid.iter().copied().zip(values).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{daubechies_filter, dwt, Signal};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn unit() -> (MixturePrior, NoiseModel, QuadratureSpec) {
        (
            MixturePrior::new(0.9, 1.0).unwrap(),
            NoiseModel::new(1.0).unwrap(),
            QuadratureSpec::default(),
        )
    }

    fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
        (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect()
    }

    #[test]
    fn sign_reflection_identity() {
        let (p, n, q) = unit();
        for a in [0.5, 1.0, 2.0, 4.0] {
            for d in grid(-10.0, 10.0, 101) {
                let lhs = linex_rule(-d, -a, &p, &n, &q).unwrap();
                let rhs = -linex_rule(d, a, &p, &n, &q).unwrap();
                assert!((lhs - rhs).abs() < 1e-10, "a={a} d={d}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn small_a_tracks_posterior_mean() {
        let (p, n, q) = unit();
        let mut gap: f64 = 0.0;
        for d in grid(-10.0, 10.0, 2001) {
            let l = linex_rule(d, 1e-3, &p, &n, &q).unwrap();
            let m = posterior_mean_rule(d, &p, &n, &q).unwrap();
            gap = gap.max((l - m).abs());
        }
        assert!(gap < 1e-3, "sup gap {gap}");
    }

    #[test]
    fn posterior_mean_nondecreasing() {
        let (p, n, q) = unit();
        let g = grid(-10.0, 10.0, 1001);
        let vals: Vec<f64> = g.iter().map(|&d| posterior_mean_rule(d, &p, &n, &q).unwrap()).collect();
        for w in vals.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn linex_rule_monotone_for_defaults() {
        // observed, not guaranteed in general
        let (p, n, q) = unit();
        for a in [0.5, 1.0, 2.5] {
            let g = grid(-10.0, 10.0, 1001);
            let vals: Vec<f64> = g.iter().map(|&d| linex_rule(d, a, &p, &n, &q).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[1] >= w[0] - 1e-12), "a={a}");
        }
    }

    #[test]
    fn quadrature_converged_at_default_nodes() {
        let (p, n, q) = unit();
        let fine = QuadratureSpec::new(128, DEFAULT_TRUNCATION).unwrap();
        for a in [-2.0, 0.5, 1.0, 4.0] {
            for d in grid(-10.0, 10.0, 81) {
                let coarse = linex_rule(d, a, &p, &n, &q).unwrap();
                let refined = linex_rule(d, a, &p, &n, &fine).unwrap();
                assert!((coarse - refined).abs() < 1e-8, "a={a} d={d}");
            }
        }
    }

    #[test]
    fn zero_decomposition_stays_zero() {
        let (p, n, q) = unit();
        let w = WaveletDecomposition::from_parts(vec![0.0; 8], vec![vec![0.0; 8], vec![0.0; 16]], 3).unwrap();
        for rule in [
            ShrinkageRule::posterior_mean(p, n, q.clone()),
            ShrinkageRule::SoftUniversal { lambda: 1.0 },
        ] {
            let out = apply_rule(&w, &rule, AlphaPolicy::LevelDependent { gamma: 2.0 }).unwrap();
            assert!(out.detail_coefficients().iter().all(|v| v.abs() < 1e-15));
        }
    }

    #[test]
    fn soft_universal_kills_noise() {
        let f = daubechies_filter(4).unwrap();
        let noise = NoiseModel::new(1.0).unwrap();
        let rule = RuleKind::SoftUniversal
            .resolve(&[], 1024, MixturePrior::new(0.9, 1.0).unwrap(), noise, &QuadratureSpec::default())
            .unwrap();
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = Signal::new((0..1024).map(|_| rng.sample(StandardNormal)).collect()).unwrap();
            let out = apply_rule(&dwt(&s, &f, 3).unwrap(), &rule, AlphaPolicy::Global).unwrap();
            let finest = out.level(9).unwrap();
            let zeros = finest.iter().filter(|&&v| v == 0.0).count();
            assert!(zeros as f64 >= 0.9 * finest.len() as f64, "seed {seed}: {zeros}");
        }
    }

    #[test]
    fn level_dependent_alpha_shrinks_primary_level_least() {
        let n = NoiseModel::new(1.0).unwrap();
        let rule = ShrinkageRule::linex(1.0, MixturePrior::new(0.9, 1.0).unwrap(), n, QuadratureSpec::default()).unwrap();
        let level = vec![1.5; 8];
        let w = WaveletDecomposition::from_parts(vec![7.0; 8], vec![level.clone(), vec![1.5; 16], vec![1.5; 32]], 3)
            .unwrap();
        let out = apply_rule(&w, &rule, AlphaPolicy::LevelDependent { gamma: 2.0 }).unwrap();
        assert_eq!(out.smooth(), w.smooth());
        let shrink = |j| 1.5 - out.level(j).unwrap()[0];
        assert!(shrink(3) < shrink(4) && shrink(4) < shrink(5));
        // α(J0) = 0 is the pure logistic prior
        let pure = ShrinkageRule::linex(1.0, MixturePrior::new(0.0, 1.0).unwrap(), n, QuadratureSpec::default())
            .unwrap()
            .evaluate(1.5)
            .unwrap();
        assert_eq!(out.level(3).unwrap()[0], pure);
    }

    #[test]
    fn parallel_matches_sequential() {
        let (p, n, q) = unit();
        let rule = ShrinkageRule::linex(1.0, p, n, q).unwrap();
        let g = grid(-6.0, 6.0, 333);
        let par = shrink_all(&rule, &g).unwrap();
        let seq: Vec<f64> = g.iter().map(|&d| rule.evaluate(d).unwrap()).collect();
        assert_eq!(par, seq);
    }

    #[test]
    fn rule_kind_config_names() {
        let k: RuleKind = serde_json::from_str(r#"{"kind":"linex_logistic","a":2.0}"#).unwrap();
        assert_eq!(k, RuleKind::LinexLogistic { a: 2.0 });
        let k: RuleKind = serde_json::from_str(r#"{"kind":"soft_sure"}"#).unwrap();
        assert_eq!(k.name(), "soft_sure");
        assert!(serde_json::from_str::<RuleKind>(r#"{"kind":"hard"}"#).is_err());
    }
}
