//! Posterior functionals under the point-mass + logistic prior.
//!
//! With `d | θ ~ N(θ, σ²)` the posterior splits into the atom at zero, with
//! unnormalised weight `(α/σ) φ(d/σ)`, and the slab, whose integrals are
//! taken over `θ = σu + d` against `φ(u)`:
//!
//! ```text
//! E[h(θ) | d] = ((α/σ) φ(d/σ) h(0) + (1−α) ∫ h(σu+d) g(σu+d; τ) φ(u) du)
//!             / ((α/σ) φ(d/σ)      + (1−α) ∫        g(σu+d; τ) φ(u) du)
//! ```
//!
//! Every term is accumulated in log space with a running max shift, since
//! `exp(−aθ)` overflows long before the ratio does.

use crate::error::{Error, Result};
use crate::model::{log_logistic_density, MixturePrior, NoiseModel};
use crate::rules::QuadratureSpec;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Streaming `log Σ exp(x_i)`.
#[derive(Debug, Clone, Copy)]
struct LogSumExp {
    max: f64,
    scaled: f64,
}

impl LogSumExp {
    fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    fn push(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.scaled += (x - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    fn value(&self) -> f64 {
        self.max + self.scaled.ln()
    }
}

fn check_coefficient(d: f64) -> Result<()> {
    if d.is_finite() {
        Ok(())
    } else {
        Err(Error::input(format!("coefficient {d} is not finite")))
    }
}

/// `log((α/σ) φ(d/σ))`, `−∞` when `α = 0`.
fn log_atom(d: f64, prior: &MixturePrior, noise: &NoiseModel) -> f64 {
    let z = d / noise.sigma();
    prior.alpha().ln() - noise.sigma().ln() - 0.5 * z * z - LN_SQRT_2PI
}

/// Calls `f(θ_i, log((1−α) v_i g(θ_i; τ)))` for every slab node.
fn for_each_slab_node(
    d: f64,
    prior: &MixturePrior,
    noise: &NoiseModel,
    spec: &QuadratureSpec,
    mut f: impl FnMut(f64, f64),
) {
    let log_slab = (1.0 - prior.alpha()).ln();
    for (u, v) in spec.pairs() {
        let theta = noise.sigma() * u + d;
        f(theta, log_slab + v.ln() + log_logistic_density(theta, prior.tau()));
    }
}

/// `log E[exp(−aθ) | d]`.
pub fn log_linex_posterior_exp(
    d: f64,
    a: f64,
    prior: &MixturePrior,
    noise: &NoiseModel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_coefficient(d)?;
    if a == 0.0 || !a.is_finite() {
        return Err(Error::param(format!("LINEX a must be finite and nonzero, got {a}")));
    }
    let atom = log_atom(d, prior, noise);
    let mut num = LogSumExp::new();
    let mut den = LogSumExp::new();
    // the atom contributes exp(-a * 0) = 1 to the numerator
    num.push(atom);
    den.push(atom);
    for_each_slab_node(d, prior, noise, spec, |theta, log_w| {
        num.push(log_w - a * theta);
        den.push(log_w);
    });
    let value = num.value() - den.value();
    if !value.is_finite() {
        return Err(Error::numeric(format!(
            "log posterior exponential moment is {value} at d = {d}, a = {a}"
        )));
    }
    Ok(value)
}

/// `E[exp(−aθ) | d]`; strictly positive.
pub fn linex_posterior_exp(
    d: f64,
    a: f64,
    prior: &MixturePrior,
    noise: &NoiseModel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let v = log_linex_posterior_exp(d, a, prior, noise, spec)?.exp();
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::numeric(format!(
            "posterior exponential moment {v} out of range at d = {d}, a = {a}"
        )));
    }
    Ok(v)
}

/// LINEX Bayes rule `δ*(d) = −log(E[exp(−aθ) | d]) / a`. Independent of
/// the loss magnitude `b`.
pub fn linex_rule(
    d: f64,
    a: f64,
    prior: &MixturePrior,
    noise: &NoiseModel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    Ok(-log_linex_posterior_exp(d, a, prior, noise, spec)? / a)
}

/// Posterior mean `E[θ | d]`, the Bayes rule under squared error.
pub fn posterior_mean_rule(
    d: f64,
    prior: &MixturePrior,
    noise: &NoiseModel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_coefficient(d)?;
    let atom = log_atom(d, prior, noise);
    let mut shift = atom;
    for_each_slab_node(d, prior, noise, spec, |_, log_w| shift = shift.max(log_w));
    let mut num = 0.0;
    let mut den = (atom - shift).exp();
    for_each_slab_node(d, prior, noise, spec, |theta, log_w| {
        let w = (log_w - shift).exp();
        num += theta * w;
        den += w;
    });
    let value = num / den;
    if !value.is_finite() {
        return Err(Error::numeric(format!("posterior mean is {value} at d = {d}")));
    }
    Ok(value)
}
