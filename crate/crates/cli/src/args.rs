use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ModelConfig, PolicyName, QuadratureConfig, RuleName};

/// Bayesian wavelet shrinkage under LINEX loss.
#[derive(Debug, Parser)]
#[command(name = "linex-shrink", version)]
pub struct Cli {
    /// Worker threads for parallel sections (0 = one per core)
    #[arg(long, global = true, env = "LINEX_SHRINK_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Denoise a CSV signal: DWT, shrink the details, inverse DWT
    Denoise(DenoiseArgs),
    /// Tabulate a shrinkage rule δ(d) on a grid
    RuleCurve(RuleCurveArgs),
    /// Risk profile on a θ grid plus the Bayes risk
    Risk(RiskArgs),
    /// Bayes risk only
    BayesRisk(BayesRiskArgs),
    /// Run a seeded simulation study
    Simulate(SimulateArgs),
}

/// Model settings shared by every subcommand except `simulate`.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// TOML file with model settings; flags given here override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Shrinkage rule
    #[arg(long, value_enum)]
    pub rule: Option<RuleName>,
    /// LINEX shape (nonzero; sign picks the costly side)
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// LINEX scale
    #[arg(long)]
    pub b: Option<f64>,
    /// Prior weight of the point mass at zero
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Logistic prior scale
    #[arg(long)]
    pub tau: Option<f64>,
    /// Noise standard deviation (denoise estimates it when omitted)
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Sample size entering the universal threshold
    #[arg(long)]
    pub sample_size: Option<usize>,
    /// Gauss–Hermite node count
    #[arg(long)]
    pub quadrature_nodes: Option<usize>,
    /// Half-width of the truncated cross-check rule, in noise units
    #[arg(long)]
    pub truncation: Option<f64>,
}

impl ModelArgs {
    pub fn overrides(&self) -> ModelConfig {
        let quadrature = (self.quadrature_nodes.is_some() || self.truncation.is_some()).then_some(QuadratureConfig {
            nodes: self.quadrature_nodes,
            truncation: self.truncation,
        });
        ModelConfig {
            rule: self.rule,
            a: self.a,
            b: self.b,
            alpha: self.alpha,
            tau: self.tau,
            sigma: self.sigma,
            sample_size: self.sample_size,
            quadrature,
            ..Default::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    /// Input CSV: one value column or (x, y) pairs, optional header
    pub input: PathBuf,
    /// Output CSV (stdout when omitted)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Daubechies filter: number of vanishing moments, 1..=10
    #[arg(long)]
    pub filter_moments: Option<usize>,
    /// Primary resolution level J0
    #[arg(long)]
    pub primary_level: Option<usize>,
    /// Prior-weight policy across levels
    #[arg(long, value_enum)]
    pub alpha_policy: Option<PolicyName>,
    /// Decay exponent of the level-dependent prior weight
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Write the empirical wavelet coefficients here
    #[arg(long)]
    pub coefficients: Option<PathBuf>,
    /// Write the shrunk wavelet coefficients here
    #[arg(long)]
    pub shrunk_coefficients: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
}

impl DenoiseArgs {
    pub fn overrides(&self) -> ModelConfig {
        ModelConfig {
            filter_moments: self.filter_moments,
            primary_level: self.primary_level,
            alpha_policy: self.alpha_policy,
            gamma: self.gamma,
            ..self.model.overrides()
        }
    }
}

#[derive(Debug, Args)]
pub struct RuleCurveArgs {
    /// Output CSV (stdout when omitted)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = -6.0, allow_negative_numbers = true)]
    pub min: f64,
    #[arg(long, default_value_t = 6.0, allow_negative_numbers = true)]
    pub max: f64,
    /// Grid size (a single point evaluates at --min)
    #[arg(long, default_value_t = 241)]
    pub points: usize,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BayesRiskOptions {
    /// Estimate by Monte Carlo with this many draws instead of quadrature
    #[arg(long)]
    pub monte_carlo: Option<usize>,
    /// Seed for --monte-carlo
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct RiskArgs {
    /// Risk profile CSV
    #[arg(short, long)]
    pub output: PathBuf,
    /// Bayes-risk JSON (stdout when omitted)
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long, default_value_t = -20.0, allow_negative_numbers = true)]
    pub min: f64,
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    pub max: f64,
    /// Grid size; 0 writes the header only
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    #[command(flatten)]
    pub bayes: BayesRiskOptions,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct BayesRiskArgs {
    /// JSON output (stdout when omitted)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub bayes: BayesRiskOptions,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["config", "preset"]))]
pub struct SimulateArgs {
    /// Study configuration (TOML)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in scenario instead of a file
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub preset: Option<u8>,
    /// Directory for summary.json, mse.csv and mae.csv
    #[arg(short, long)]
    pub output_dir: PathBuf,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub snr: Option<f64>,
    #[arg(long)]
    pub replications: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}
