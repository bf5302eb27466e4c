//! Prior, loss and noise components of the coefficient model `d = θ + ε`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arguments of `exp` in the LINEX loss are clamped to this value.
pub const LINEX_EXP_CLAMP: f64 = 700.0;

/// Default logistic scale of the slab component.
pub const DEFAULT_TAU: f64 = 5.0;

/// Default exponent of the level-dependent weight elicitation.
pub const DEFAULT_GAMMA: f64 = 2.0;

/// `π(θ) = α δ₀(θ) + (1 − α) g(θ; τ)` with `g` the logistic density of
/// scale `τ`.
///
/// `α = 0` is admitted: the level-dependent elicitation assigns it to the
/// primary level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixturePrior {
    alpha: f64,
    tau: f64,
}

impl MixturePrior {
    pub fn new(alpha: f64, tau: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::param(format!("alpha must lie in [0, 1), got {alpha}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::param(format!("tau must be positive, got {tau}")));
        }
        Ok(Self { alpha, tau })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.tau)
    }
}

/// `L(δ, θ) = b [exp(a(δ − θ)) − a(δ − θ) − 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinexLoss {
    a: f64,
    b: f64,
}

impl LinexLoss {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::param(format!("LINEX a must be finite and nonzero, got {a}")));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::param(format!("LINEX b must be positive, got {b}")));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn eval(&self, delta: f64, theta: f64) -> f64 {
        linex_loss(delta, theta, self)
    }
}

/// Gaussian noise with known standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    sigma: f64,
}

impl NoiseModel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::param(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Logistic density `exp(−θ/τ) / (τ (1 + exp(−θ/τ))²)`, evaluated through
/// `exp(−|θ|/τ)` so it never overflows.
pub fn logistic_density(theta: f64, tau: f64) -> f64 {
    let z = (-theta.abs() / tau).exp();
    z / (tau * (1.0 + z) * (1.0 + z))
}

/// Natural log of [`logistic_density`].
pub fn log_logistic_density(theta: f64, tau: f64) -> f64 {
    let x = -theta.abs() / tau;
    x - tau.ln() - 2.0 * x.exp().ln_1p()
}

/// LINEX loss of estimate `delta` against truth `theta`.
///
/// Saturation: the exponential argument is clamped at [`LINEX_EXP_CLAMP`],
/// so the result stays finite (about `b · 1e304`) far outside any region a
/// risk integral visits.
pub fn linex_loss(delta: f64, theta: f64, loss: &LinexLoss) -> f64 {
    let x = loss.a * (delta - theta);
    let value = if x > LINEX_EXP_CLAMP {
        LINEX_EXP_CLAMP.exp() - x - 1.0
    } else {
        x.exp_m1() - x
    };
    // exp_m1(x) - x >= 0 analytically; rounding can leave -0 or a few ulps below
    loss.b * value.max(0.0)
}

/// `α(j) = 1 − 1 / (j − J0 + 1)^γ`.
pub fn elicit_alpha(level: usize, primary_level: usize, gamma: f64) -> Result<f64> {
    if level < primary_level {
        return Err(Error::param(format!(
            "level {level} is below the primary level {primary_level}"
        )));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::param(format!("gamma must be positive, got {gamma}")));
    }
    let base = (level - primary_level + 1) as f64;
    Ok(1.0 - base.powf(-gamma))
}
