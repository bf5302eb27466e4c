//! Gaussian quadrature against the standard normal density.
//!
//! Gauss–Hermite nodes `t_i` and weights `w_i` for the weight `exp(−t²)` are
//! mapped to `u_i = √2 t_i`, `v_i = w_i / √π`, so that
//! `Σ v_i h(u_i) ≈ ∫ h(u) φ(u) du`.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use crate::error::{Error, Result};

pub const DEFAULT_NODE_COUNT: usize = 64;
pub const DEFAULT_TRUNCATION: f64 = 10.0;
const MIN_NODE_COUNT: usize = 16;
const MIN_TRUNCATION: f64 = 6.0;
// the Newton seeds stop separating the nodes just below 200
const MAX_NODE_COUNT: usize = 192;

/// Node/weight table for normal-weighted integrals, plus the half-width used
/// by the truncated (Gauss–Legendre) cross-check.
#[derive(Debug, Clone)]
pub struct QuadratureSpec {
    node_count: usize,
    truncation: f64,
    table: Arc<NormalRule>,
}

#[derive(Debug)]
struct NormalRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl PartialEq for QuadratureSpec {
    fn eq(&self, other: &Self) -> bool {
        self.node_count == other.node_count && self.truncation == other.truncation
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::new(DEFAULT_NODE_COUNT, DEFAULT_TRUNCATION).expect("default quadrature is valid")
    }
}

impl QuadratureSpec {
    pub fn new(node_count: usize, truncation: f64) -> Result<Self> {
        if !(MIN_NODE_COUNT..=MAX_NODE_COUNT).contains(&node_count) {
            return Err(Error::param(format!(
                "node count must be in {MIN_NODE_COUNT}..={MAX_NODE_COUNT}, got {node_count}"
            )));
        }
        if !(truncation >= MIN_TRUNCATION && truncation.is_finite()) {
            return Err(Error::param(format!(
                "truncation must be at least {MIN_TRUNCATION}, got {truncation}"
            )));
        }
        let (t, w) = gauss_hermite(node_count)?;
        let table = NormalRule {
            nodes: t.iter().map(|x| SQRT_2 * x).collect(),
            weights: w.iter().map(|x| x / PI.sqrt()).collect(),
        };
        Ok(Self {
            node_count,
            truncation,
            table: Arc::new(table),
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    /// Standard-normal-scaled nodes `u_i`.
    pub fn nodes(&self) -> &[f64] {
        &self.table.nodes
    }

    /// Weights `v_i`, summing to one.
    pub fn weights(&self) -> &[f64] {
        &self.table.weights
    }

    /// `(u_i, v_i)` pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.table.nodes.iter().copied().zip(self.table.weights.iter().copied())
    }
}

/// `∫ h(u) φ(u) du` by Gauss–Hermite quadrature.
pub fn gauss_weighted_integral<F>(integrand: F, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut total = 0.0;
    for (u, w) in spec.pairs() {
        let v = integrand(u);
        if !v.is_finite() {
            return Err(Error::numeric(format!("integrand is {v} at node u = {u}")));
        }
        total += w * v;
    }
    Ok(total)
}

/// `∫_{−T}^{T} h(u) φ(u) du` with `T = spec.truncation()`, by composite
/// 16-point Gauss–Legendre on unit panels. Used to cross-check the
/// Hermite rule on integrands that are not polynomial-like.
pub fn truncated_normal_integral<F>(integrand: F, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let t = spec.truncation();
    let panels = (2.0 * t).ceil() as usize;
    let width = 2.0 * t / panels as f64;
    let (x, w) = gauss_legendre(16);
    let mut total = 0.0;
    for p in 0..panels {
        let lo = -t + p as f64 * width;
        let mid = lo + 0.5 * width;
        for (xi, wi) in x.iter().zip(&w) {
            let u = mid + 0.5 * width * xi;
            let v = integrand(u);
            if !v.is_finite() {
                return Err(Error::numeric(format!("integrand is {v} at u = {u}")));
            }
            total += 0.5 * width * wi * v * (-0.5 * u * u).exp() / (2.0 * PI).sqrt();
        }
    }
    Ok(total)
}

/// Gauss–Hermite nodes and weights for weight `exp(−t²)`, ascending.
///
/// Newton iteration on the orthonormal Hermite recurrence with the usual
/// asymptotic starting guesses; nodes are mirrored so the table is exactly
/// symmetric.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^(−1/4)
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut converged = false;
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let step = p1 / pp;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::numeric(format!("Gauss–Hermite node {i} of {n} did not converge")));
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[m - 1] = 0.0;
    }
    x.reverse();
    w.reverse();
    let mass: f64 = w.iter().sum::<f64>() / PI.sqrt();
    if (mass - 1.0).abs() > 1e-10 || x.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::numeric(format!("Gauss–Hermite table for n = {n} is degenerate")));
    }
    Ok((x, w))
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let step = p1 / pp;
            z -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[m - 1] = 0.0;
    }
    (x, w)
}
