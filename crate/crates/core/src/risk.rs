//! Frequentist and Bayesian diagnostics of a shrinkage rule.
//!
//! Sampling moments at fixed θ are Gauss–Hermite integrals over
//! `d = θ + σu`. The Bayes risk adds an outer integral over the logistic
//! slab, done with composite Gauss–Legendre panels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{linex_loss, logistic_density, LinexLoss, MixturePrior, NoiseModel};
use crate::rules::{gauss_legendre, CoefficientRule, QuadratureSpec};

/// Slab integral starts on `[−T, T]` with `T = TAIL_SPAN · τ`.
pub const TAIL_SPAN: f64 = 40.0;
const PANEL_NODES: usize = 10;
const PANEL_TOLERANCE: f64 = 1e-15;
const MAX_EXTRA_PANELS: usize = 20_000;
const VARIANCE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskProfile {
    pub theta_grid: Vec<f64>,
    pub squared_bias: Vec<f64>,
    pub variance: Vec<f64>,
    pub frequentist_risk: Vec<f64>,
}

impl RiskProfile {
    pub fn len(&self) -> usize {
        self.theta_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta_grid.is_empty()
    }

    /// `(θ, bias², var, risk)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        (0..self.len()).map(move |i| {
            (
                self.theta_grid[i],
                self.squared_bias[i],
                self.variance[i],
                self.frequentist_risk[i],
            )
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskMethod {
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesRiskResult {
    pub value: f64,
    pub method: RiskMethod,
    /// Zero for quadrature.
    pub standard_error: f64,
}

/// `(E[δ(d)], E[δ(d)²])` for `d ~ N(θ, σ²)`.
pub fn rule_moments<R: CoefficientRule + ?Sized>(
    theta: f64,
    rule: &R,
    noise: &NoiseModel,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let mut mean = 0.0;
    let mut second = 0.0;
    for (u, w) in spec.pairs() {
        let v = rule.shrink(theta + noise.sigma() * u)?;
        mean += w * v;
        second += w * v * v;
    }
    if !(mean.is_finite() && second.is_finite()) {
        return Err(Error::numeric(format!("rule moments are not finite at θ = {theta:e}")));
    }
    Ok((mean, second))
}

/// `(E[δ(d)] − θ)²`.
pub fn squared_bias<R: CoefficientRule + ?Sized>(
    theta: f64,
    rule: &R,
    noise: &NoiseModel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let (mean, _) = rule_moments(theta, rule, noise, spec)?;
    Ok((mean - theta).powi(2))
}

fn variance_from_moments(theta: f64, mean: f64, second: f64) -> Result<f64> {
    let v = second - mean * mean;
    if v < -VARIANCE_SLACK * second.max(1.0) {
        return Err(Error::numeric(format!("negative variance {v} at θ = {theta:e}")));
    }
    Ok(v.max(0.0))
}

/// `E[δ²] − E[δ]²`, clamped at zero within rounding slack.
pub fn variance<R: CoefficientRule + ?Sized>(
    theta: f64,
    rule: &R,
    noise: &NoiseModel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let (mean, second) = rule_moments(theta, rule, noise, spec)?;
    variance_from_moments(theta, mean, second)
}

/// `E[L(δ(d), θ)]` under the LINEX loss.
pub fn frequentist_risk<R: CoefficientRule + ?Sized>(
    theta: f64,
    rule: &R,
    loss: &LinexLoss,
    noise: &NoiseModel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let mut total = 0.0;
    for (u, w) in spec.pairs() {
        let delta = rule.shrink(theta + noise.sigma() * u)?;
        total += w * linex_loss(delta, theta, loss);
    }
    if !total.is_finite() {
        return Err(Error::numeric(format!("frequentist risk overflowed at θ = {theta:e}")));
    }
    Ok(total)
}

/// All three diagnostics at each grid point, evaluated in parallel and
/// returned in grid order.
pub fn risk_profile<R: CoefficientRule + ?Sized>(
    grid: &[f64],
    rule: &R,
    loss: &LinexLoss,
    noise: &NoiseModel,
    spec: &QuadratureSpec,
) -> Result<RiskProfile> {
    if let Some(bad) = grid.iter().find(|t| !t.is_finite()) {
        return Err(Error::input(format!("grid point {bad} is not finite")));
    }
    let rows: Vec<(f64, f64, f64)> = grid
        .par_iter()
        .map(|&theta| {
            let (mean, second) = rule_moments(theta, rule, noise, spec)?;
            let var = variance_from_moments(theta, mean, second)?;
            let risk = frequentist_risk(theta, rule, loss, noise, spec)?;
            Ok(((mean - theta).powi(2), var, risk))
        })
        .collect::<Result<_>>()?;
    Ok(RiskProfile {
        theta_grid: grid.to_vec(),
        squared_bias: rows.iter().map(|r| r.0).collect(),
        variance: rows.iter().map(|r| r.1).collect(),
        frequentist_risk: rows.iter().map(|r| r.2).collect(),
    })
}

/// Integrates `f(θ) g(θ; τ)` over `[lo, lo + width]` with one Gauss–Legendre panel.
fn slab_panel<F>(f: &F, lo: f64, width: f64, tau: f64, x: &[f64], w: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mid = lo + 0.5 * width;
    let mut total = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        let theta = mid + 0.5 * width * xi;
        total += wi * f(theta)? * logistic_density(theta, tau);
    }
    Ok(0.5 * width * total)
}

/// `∫ f(θ) g(θ; τ) dθ`. Panels of width `min(τ, σ)` cover `[−40τ, 40τ]`, and
/// further panels are appended on both sides until each new one contributes
/// less than `1e-15` of the running total.
pub fn slab_integral<F>(f: F, tau: f64, panel_width: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let (x, w) = gauss_legendre(PANEL_NODES);
    let span = TAIL_SPAN * tau;
    let panels = (2.0 * span / panel_width).ceil() as usize;
    let width = 2.0 * span / panels as f64;
    let parts: Vec<f64> = (0..panels)
        .into_par_iter()
        .map(|p| slab_panel(&f, -span + p as f64 * width, width, tau, &x, &w))
        .collect::<Result<_>>()?;
    let mut total: f64 = parts.iter().sum();

    let mut extra = 0;
    loop {
        let right = slab_panel(&f, span + extra as f64 * width, width, tau, &x, &w)?;
        let left = slab_panel(&f, -span - (extra + 1) as f64 * width, width, tau, &x, &w)?;
        total += right + left;
        extra += 1;
        if right.abs().max(left.abs()) <= PANEL_TOLERANCE * total.abs() {
            break;
        }
        if extra >= MAX_EXTRA_PANELS {
            return Err(Error::numeric("slab integral tails did not decay"));
        }
    }
    if !total.is_finite() {
        return Err(Error::numeric("slab integral is not finite"));
    }
    Ok(total)
}

/// `r = α R(0) + (1 − α) ∫ R(θ) g(θ; τ) dθ` by quadrature.
pub fn bayes_risk<R: CoefficientRule + ?Sized>(
    rule: &R,
    loss: &LinexLoss,
    prior: &MixturePrior,
    noise: &NoiseModel,
    spec: &QuadratureSpec,
) -> Result<BayesRiskResult> {
    let atom = frequentist_risk(0.0, rule, loss, noise, spec)?;
    let panel = prior.tau().min(noise.sigma());
    let slab = slab_integral(|theta| frequentist_risk(theta, rule, loss, noise, spec), prior.tau(), panel)?;
    Ok(BayesRiskResult {
        value: prior.alpha() * atom + (1.0 - prior.alpha()) * slab,
        method: RiskMethod::Quadrature,
        standard_error: 0.0,
    })
}

/// Bayes risk by simulation: `θ ~ π`, `d ~ N(θ, σ²)`, average `L(δ(d), θ)`.
pub fn bayes_risk_monte_carlo<R: CoefficientRule + ?Sized>(
    rule: &R,
    loss: &LinexLoss,
    prior: &MixturePrior,
    noise: &NoiseModel,
    draws: usize,
    seed: u64,
) -> Result<BayesRiskResult> {
    if draws < 2 {
        return Err(Error::param("Monte Carlo Bayes risk needs at least 2 draws"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..draws {
        let theta = if rng.gen::<f64>() < prior.alpha() {
            0.0
        } else {
            let u: f64 = rng.gen_range(f64::EPSILON..1.0);
            prior.tau() * (u / (1.0 - u)).ln()
        };
        let z: f64 = rng.sample(StandardNormal);
        let l = linex_loss(rule.shrink(theta + noise.sigma() * z)?, theta, loss);
        sum += l;
        sum_sq += l * l;
    }
    let n = draws as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok(BayesRiskResult {
        value: mean,
        method: RiskMethod::MonteCarlo,
        standard_error: (var / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{posterior_mean_rule, FnRule, ShrinkageRule};

    fn unit() -> (MixturePrior, NoiseModel, QuadratureSpec) {
        (
            MixturePrior::new(0.9, 1.0).unwrap(),
            NoiseModel::new(1.0).unwrap(),
            QuadratureSpec::default(),
        )
    }

    #[test]
    fn identity_and_zero_rules() {
        let (_, n, q) = unit();
        let sigma = NoiseModel::new(1.7).unwrap();
        let id = FnRule(|d| d);
        let (m, s) = rule_moments(2.5, &id, &sigma, &q).unwrap();
        assert!((m - 2.5).abs() < 1e-12 && (s - (6.25 + 1.7 * 1.7)).abs() < 1e-10);
        assert!((variance(-4.0, &id, &sigma, &q).unwrap() - 1.7 * 1.7).abs() < 1e-10);
        let zero = FnRule(|_| 0.0);
        assert_eq!(rule_moments(3.0, &zero, &n, &q).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn oracle_constant_rule_has_zero_risk() {
        let (_, n, q) = unit();
        let loss = LinexLoss::new(1.0, 1.0).unwrap();
        let theta = 1.25;
        assert_eq!(frequentist_risk(theta, &FnRule(move |_| theta), &loss, &n, &q).unwrap(), 0.0);
    }

    #[test]
    fn zero_rule_profile_point() {
        let (_, n, q) = unit();
        let loss = LinexLoss::new(1.0, 1.0).unwrap();
        let p = risk_profile(&[0.0], &FnRule(|_| 0.0), &loss, &n, &q).unwrap();
        assert_eq!(p.squared_bias, vec![0.0]);
        assert_eq!(p.variance, vec![0.0]);
        assert!(risk_profile(&[], &FnRule(|_| 0.0), &loss, &n, &q).unwrap().is_empty());
        assert!(risk_profile(&[f64::NAN], &FnRule(|_| 0.0), &loss, &n, &q).is_err());
    }

    #[test]
    fn linex_defaults_bias_peak_and_tails() {
        let (p, n, q) = unit();
        let rule = ShrinkageRule::linex(1.0, p, n, q.clone()).unwrap();
        let grid: Vec<f64> = (0..=400).map(|i| -10.0 + 0.05 * i as f64).collect();
        let loss = LinexLoss::new(1.0, 1.0).unwrap();
        let prof = risk_profile(&grid, &rule, &loss, &n, &q).unwrap();
        let (imax, bmax) = prof
            .squared_bias
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        assert!((grid[imax] - 3.12).abs() <= 0.1, "argmax {}", grid[imax]);
        assert!((bmax - 3.77).abs() <= 0.05, "{bmax}");
        // variance at the bias peak
        let v = variance(3.12, &rule, &n, &q).unwrap();
        assert!((v - 1.12).abs() < 0.01, "{v}");

        // far tails: δ(d) ≈ d − σ²/τ − aσ²/2 on the right, d + σ²/τ − aσ²/2 on the left
        let right = squared_bias(20.0, &rule, &n, &q).unwrap();
        let left = squared_bias(-20.0, &rule, &n, &q).unwrap();
        assert!((right - 2.25).abs() < 1e-3, "{right}");
        assert!((left - 0.25).abs() < 1e-3, "{left}");
        for t in [-20.0, 20.0] {
            assert!((variance(t, &rule, &n, &q).unwrap() - 1.0).abs() < 1e-3);
        }
        // LINEX risk of a Gaussian error with mean shift m: e^{m + 1/2} − m − 1
        let tail = |m: f64| (m + 0.5).exp() - m - 1.0;
        let r_right = frequentist_risk(20.0, &rule, &loss, &n, &q).unwrap();
        let r_left = frequentist_risk(-20.0, &rule, &loss, &n, &q).unwrap();
        assert!((r_right - tail(-1.5)).abs() < 1e-3, "{r_right}");
        assert!((r_left - tail(0.5)).abs() < 1e-3, "{r_left}");
    }

    #[test]
    fn posterior_mean_diagnostics_are_even() {
        let (p, n, q) = unit();
        let rule = ShrinkageRule::posterior_mean(p, n, q.clone());
        for t in [0.3, 1.0, 2.5, 4.0, 7.0] {
            let b = squared_bias(t, &rule, &n, &q).unwrap() - squared_bias(-t, &rule, &n, &q).unwrap();
            let v = variance(t, &rule, &n, &q).unwrap() - variance(-t, &rule, &n, &q).unwrap();
            assert!(b.abs() < 1e-8 && v.abs() < 1e-8, "θ={t}");
        }
    }

    #[test]
    fn zero_rule_bayes_risk_matches_logistic_mgf() {
        let n = NoiseModel::new(1.0).unwrap();
        let q = QuadratureSpec::default();
        for tau in [1.0, 2.0] {
            for at in [0.1, 0.5, 0.9] {
                let a = at / tau;
                let prior = MixturePrior::new(0.9, tau).unwrap();
                let loss = LinexLoss::new(a, 1.0).unwrap();
                let r = bayes_risk(&FnRule(|_| 0.0), &loss, &prior, &n, &q).unwrap();
                let x = std::f64::consts::PI * at;
                let closed = 0.1 * (x / x.sin() - 1.0);
                assert!((r.value - closed).abs() < 1e-6, "aτ={at} τ={tau}: {} vs {closed}", r.value);
            }
        }
    }

    #[test]
    fn bayes_risk_of_bayes_rule_matches_marginal_route() {
        // For the LINEX Bayes rule the posterior expected loss at δ* is
        // a b (E[θ|d] − δ*(d)); averaging it over the marginal of d gives r.
        let (p, n, q) = unit();
        let a = 1.0;
        let rule = ShrinkageRule::linex(a, p, n, q.clone()).unwrap();
        let loss = LinexLoss::new(a, 1.0).unwrap();
        let direct = bayes_risk(&rule, &loss, &p, &n, &q).unwrap().value;

        let gap = |d: f64| -> Result<f64> {
            Ok(a * (posterior_mean_rule(d, &p, &n, &q)? - rule.evaluate(d)?))
        };
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        // marginal of d: α φ(d) + (1 − α) ∫ g(θ) φ(d − θ) dθ
        let (x, w) = gauss_legendre(20);
        let mut total = 0.0;
        let (lo, hi, panels) = (-45.0, 45.0, 180);
        let width = (hi - lo) / panels as f64;
        for k in 0..panels {
            let mid = lo + (k as f64 + 0.5) * width;
            for (xi, wi) in x.iter().zip(&w) {
                let d = mid + 0.5 * width * xi;
                let slab = slab_integral(|t| Ok(phi(d - t)), 1.0, 1.0).unwrap();
                let marginal = 0.9 * phi(d) + 0.1 * slab;
                total += 0.5 * width * wi * gap(d).unwrap() * marginal;
            }
        }
        assert!((direct - total).abs() < 1e-6, "{direct} vs {total}");
        assert!((direct - 0.0896).abs() < 1e-3);
    }

    #[test]
    fn bayes_risk_quadrature_agrees_with_monte_carlo() {
        let (p, n, q) = unit();
        let rule = ShrinkageRule::SoftUniversal { lambda: 2.0 };
        let loss = LinexLoss::new(0.5, 1.0).unwrap();
        let quad = bayes_risk(&rule, &loss, &p, &n, &q).unwrap();
        let mc = bayes_risk_monte_carlo(&rule, &loss, &p, &n, 400_000, 3).unwrap();
        assert_eq!(mc.method, RiskMethod::MonteCarlo);
        assert!((quad.value - mc.value).abs() < 3.0 * mc.standard_error, "{quad:?} {mc:?}");
    }
}
