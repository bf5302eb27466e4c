//! Bayesian wavelet shrinkage under the asymmetric LINEX loss.
//!
//! The crate is organised bottom-up:
//!
//! - [`transform`]: Daubechies filter banks, the periodic pyramidal DWT/IDWT
//!   and the MAD noise-scale estimator.
//! - [`model`]: the point-mass + logistic mixture prior, the LINEX loss and
//!   level-dependent elicitation of the mixture weight.
//! - [`rules`]: coefficient-wise shrinkage rules (LINEX Bayes rule, posterior
//!   mean, soft thresholding with universal or SURE thresholds) and the
//!   Gauss–Hermite machinery they share.
//! - [`risk`]: squared bias, variance, frequentist and Bayes risk of a rule.
//! - [`sim`]: seeded Monte Carlo studies in the coefficient domain.
//! - [`export`]: the CSV/JSON layouts written by the command-line tool.

pub mod error;
pub mod export;
pub mod model;
pub mod risk;
pub mod rules;
pub mod sim;
pub mod transform;

pub use error::{Error, Result};
pub use model::{LinexLoss, MixturePrior, NoiseModel};
pub use rules::{AlphaPolicy, QuadratureSpec, RuleKind, ShrinkageRule};
pub use transform::{FilterPair, Signal, WaveletDecomposition};
