//! Soft thresholding and its two threshold policies.

use crate::error::{Error, Result};
use crate::model::NoiseModel;

/// `sign(d) · max(|d| − λ, 0)`.
pub fn soft_threshold(d: f64, lambda: f64) -> f64 {
    let shrunk = d.abs() - lambda;
    if shrunk > 0.0 {
        shrunk.copysign(d)
    } else {
        0.0
    }
}

/// Universal threshold `σ √(2 ln n)`.
pub fn universal_threshold(noise: &NoiseModel, n: usize) -> Result<f64> {
    universal_threshold_real(noise, n as f64)
}

/// [`universal_threshold`] for a real-valued sample size.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
pub fn universal_threshold_real(noise: &NoiseModel, n: f64) -> Result<f64> {
    if !(n >= 2.0) {
        return Err(Error::param(format!("sample size must be at least 2, got {n}")));
    }
    Ok(noise.sigma() * (2.0 * n.ln()).sqrt())
}

/// SURE-minimising threshold for soft thresholding, in the units of the
/// coefficients.
///
/// Works on `x_k = |d_k| / σ`. Candidates are `0` and every `x_k` clamped to
/// `√(2 ln n)`; the risk estimate is
/// `n − 2 #{k : x_k ≤ λ} + Σ min(x_k, λ)²`, and ties go to the smaller λ.
pub fn sure_threshold(coefficients: &[f64], noise: &NoiseModel) -> Result<f64> {
    if coefficients.is_empty() {
        return Err(Error::input("SURE needs at least one coefficient"));
    }
    let sigma = noise.sigma();
    let n = coefficients.len();
    let cap = if n >= 2 { (2.0 * (n as f64).ln()).sqrt() } else { 0.0 };
    let mut mags: Vec<f64> = coefficients.iter().map(|d| (d / sigma).abs()).collect();
    if mags.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("coefficients must be finite"));
    }
    mags.sort_by(f64::total_cmp);

    // prefix[k] = Σ_{i<k} mags[i]²
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for m in &mags {
        prefix.push(prefix.last().copied().unwrap_or(0.0) + m * m);
    }
    let risk = |lambda: f64| {
        let killed = mags.partition_point(|&m| m <= lambda);
        n as f64 - 2.0 * killed as f64 + prefix[killed] + (n - killed) as f64 * lambda * lambda
    };

    let mut best_lambda = 0.0;
    let mut best_risk = risk(0.0);
    for &m in &mags {
        let lambda = m.min(cap);
        let r = risk(lambda);
        if r < best_risk {
            best_risk = r;
            best_lambda = lambda;
        }
    }
    Ok(best_lambda * sigma)
}
