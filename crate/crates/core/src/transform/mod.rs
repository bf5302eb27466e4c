//! Periodic pyramidal discrete wavelet transform.
//!
//! Coefficients are laid out smooth-first, then detail levels from the
//! coarsest (`J0`) to the finest (`J - 1`). Level `j` holds `2^j` detail
//! coefficients, so the whole decomposition of a length-`2^J` signal has
//! exactly `2^J` entries and the transform is an orthogonal matrix.

mod filters;

pub use filters::{daubechies_filter, FilterPair};

use crate::error::{Error, Result};

/// Primary resolution level used when none is given.
pub const DEFAULT_PRIMARY_LEVEL: usize = 3;

/// Consistency constant of the MAD estimator under Gaussian noise.
const MAD_NORMAL_CONSTANT: f64 = 0.6745;

/// Dyadic-length, finite-valued sample vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    levels: usize,
}

impl Signal {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        let n = samples.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::input(format!(
                "signal length must be 2^J with J >= 1, got {n}"
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!("sample {i} is not finite")));
        }
        Ok(Self {
            levels: n.trailing_zeros() as usize,
            samples,
        })
    }

    /// Keeps the first `2^⌊log2 n⌋` samples. Returns the signal and the
    /// number of samples dropped.
    pub fn truncate_to_dyadic(mut samples: Vec<f64>) -> Result<(Self, usize)> {
        let n = samples.len();
        if n < 2 {
            return Err(Error::input(format!("need at least 2 samples, got {n}")));
        }
        let keep = 1usize << (usize::BITS - 1 - n.leading_zeros());
        samples.truncate(keep);
        Ok((Self::new(samples)?, n - keep))
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `J = log2(len)`.
    pub fn levels(&self) -> usize {
        self.levels
    }
}

/// Smooth coefficients at the primary level plus one detail vector per
/// resolution level `J0..J`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletDecomposition {
    smooth: Vec<f64>,
    details: Vec<Vec<f64>>,
    primary_level: usize,
    total_levels: usize,
}

impl WaveletDecomposition {
    /// Assembles a decomposition, checking `|smooth| = 2^J0` and
    /// `|details[j]| = 2^j` for every level.
    pub fn from_parts(
        smooth: Vec<f64>,
        details: Vec<Vec<f64>>,
        primary_level: usize,
    ) -> Result<Self> {
        if smooth.len() != 1 << primary_level {
            return Err(Error::input(format!(
                "smooth part has {} coefficients, expected 2^{primary_level}",
                smooth.len()
            )));
        }
        for (offset, level) in details.iter().enumerate() {
            let j = primary_level + offset;
            if level.len() != 1 << j {
                return Err(Error::input(format!(
                    "detail level {j} has {} coefficients, expected 2^{j}",
                    level.len()
                )));
            }
        }
        Ok(Self {
            total_levels: primary_level + details.len(),
            smooth,
            details,
            primary_level,
        })
    }

    pub fn smooth(&self) -> &[f64] {
        &self.smooth
    }

    /// Detail coefficients at resolution level `j`, if present.
    pub fn level(&self, j: usize) -> Option<&[f64]> {
        j.checked_sub(self.primary_level)
            .and_then(|i| self.details.get(i))
            .map(Vec::as_slice)
    }

    pub fn level_mut(&mut self, j: usize) -> Option<&mut [f64]> {
        j.checked_sub(self.primary_level)
            .and_then(|i| self.details.get_mut(i))
            .map(Vec::as_mut_slice)
    }

    /// `(level, coefficients)` pairs from coarse to fine.
    pub fn levels(&self) -> impl Iterator<Item = (usize, &[f64])> {
        self.details
            .iter()
            .enumerate()
            .map(move |(i, d)| (self.primary_level + i, d.as_slice()))
    }

    pub fn primary_level(&self) -> usize {
        self.primary_level
    }

    pub fn total_levels(&self) -> usize {
        self.total_levels
    }

    /// Total number of coefficients, `2^J`.
    pub fn len(&self) -> usize {
        1 << self.total_levels
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All coefficients in storage order: smooth, then details coarse to fine.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        out.extend_from_slice(&self.smooth);
        for d in &self.details {
            out.extend_from_slice(d);
        }
        out
    }

    /// All detail coefficients, coarse to fine.
    pub fn detail_coefficients(&self) -> Vec<f64> {
        self.details.iter().flatten().copied().collect()
    }

    /// Rows `(level, index, value)` with level `-1` for the smooth part.
    pub fn rows(&self) -> impl Iterator<Item = (i64, usize, f64)> + '_ {
        let smooth = self.smooth.iter().enumerate().map(|(k, &v)| (-1, k, v));
        let details = self.levels().flat_map(|(j, d)| {
            d.iter().enumerate().map(move |(k, &v)| (j as i64, k, v))
        });
        smooth.chain(details)
    }
}

/// One analysis step: `approx[k] = Σ h[m] x[(2k+m) mod n]`, same for detail
/// with the highpass.
fn analysis_step(x: &[f64], filter: &FilterPair) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let half = n / 2;
    let mut approx = vec![0.0; half];
    let mut detail = vec![0.0; half];
    for k in 0..half {
        let mut a = 0.0;
        let mut d = 0.0;
        for (m, (&h, &g)) in filter.lowpass().iter().zip(filter.highpass()).enumerate() {
            let v = x[(2 * k + m) % n];
            a += h * v;
            d += g * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
    (approx, detail)
}

/// Transpose of [`analysis_step`].
fn synthesis_step(approx: &[f64], detail: &[f64], filter: &FilterPair) -> Vec<f64> {
    let n = 2 * approx.len();
    let mut x = vec![0.0; n];
    for (k, (&a, &d)) in approx.iter().zip(detail).enumerate() {
        for (m, (&h, &g)) in filter.lowpass().iter().zip(filter.highpass()).enumerate() {
            x[(2 * k + m) % n] += h * a + g * d;
        }
    }
    x
}

/// Forward transform down to `primary_level`.
pub fn dwt(signal: &Signal, filter: &FilterPair, primary_level: usize) -> Result<WaveletDecomposition> {
    let total = signal.levels();
    if primary_level >= total {
        return Err(Error::param(format!(
            "primary level {primary_level} must be below J = {total}"
        )));
    }
    let mut approx = signal.samples().to_vec();
    let mut details = Vec::with_capacity(total - primary_level);
    for _ in primary_level..total {
        let (a, d) = analysis_step(&approx, filter);
        details.push(d);
        approx = a;
    }
    details.reverse();
    WaveletDecomposition::from_parts(approx, details, primary_level)
}

/// Inverse transform.
pub fn idwt(decomposition: &WaveletDecomposition, filter: &FilterPair) -> Result<Signal> {
    let mut approx = decomposition.smooth().to_vec();
    for (_, detail) in decomposition.levels() {
        if detail.len() != approx.len() {
            return Err(Error::input("detail level size does not match smooth part"));
        }
        approx = synthesis_step(&approx, detail, filter);
    }
    Signal::new(approx)
}

/// `median(|d_{J-1,k}|) / 0.6745` over the finest detail level.
///
/// Returns 0 when the finest level is identically zero; callers must guard
/// against dividing by it.
pub fn estimate_sigma(decomposition: &WaveletDecomposition) -> Result<f64> {
    let finest = decomposition
        .level(decomposition.total_levels() - 1)
        .filter(|d| !d.is_empty())
        .ok_or_else(|| Error::input("decomposition has no finest detail level"))?;
    let mut mags: Vec<f64> = finest.iter().map(|v| v.abs()).collect();
    Ok(median(&mut mags) / MAD_NORMAL_CONSTANT)
}

/// Median with the midpoint convention for even lengths. Reorders `values`.
pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
