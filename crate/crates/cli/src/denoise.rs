use std::fs::File;
use std::io::{BufReader, Write};

use linex_shrink::export::{format_float, read_signal_csv, write_coefficients_csv};
use linex_shrink::rules::{apply_rule, CoefficientRule};
use linex_shrink::transform::{daubechies_filter, dwt, estimate_sigma, idwt};
use linex_shrink::{NoiseModel, ShrinkageRule, Signal, WaveletDecomposition};

use crate::args::DenoiseArgs;
use crate::config::{Defaults, Model, ModelConfig};
use crate::error::{CliError, CliResult};
use crate::output::{sink, warn};

/// Noise estimates at or below this fraction of the signal's magnitude are
/// rounding residue, not noise.
const SIGMA_FLOOR: f64 = 1e-12;
const CHANGE_TOLERANCE: f64 = 1e-12;

pub fn run(args: &DenoiseArgs) -> CliResult<()> {
    let file = match &args.model.config {
        Some(p) => ModelConfig::load(p)?,
        None => ModelConfig::default(),
    };
    let model = file.overlay(args.overrides()).resolve(&Defaults::DENOISE)?;

    let reader = File::open(&args.input)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", args.input.display())))?;
    let table = read_signal_csv(BufReader::new(reader))?;
    let (signal, dropped) = Signal::truncate_to_dyadic(table.values)?;
    if dropped > 0 {
        warn(format!(
            "input length is not a power of two; dropped the last {dropped} sample(s), keeping {}",
            signal.len()
        ));
    }

    let filter = daubechies_filter(model.filter_moments)?;
    let coeffs = dwt(&signal, &filter, model.primary_level)?;
    if let Some(path) = &args.coefficients {
        write_coefficients_csv(sink(Some(path))?, &coeffs)?;
    }

    let sigma = match model.sigma {
        Some(s) => {
            eprintln!("sigma = {} (fixed)", format_float(s));
            s
        }
        None => {
            let s = estimate_sigma(&coeffs)?;
            eprintln!("sigma_hat = {}", format_float(s));
            s
        }
    };
    let scale = signal.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let shrunk = if sigma <= SIGMA_FLOOR * scale.max(f64::MIN_POSITIVE) {
        warn("estimated noise level is zero; returning the input unchanged");
        coeffs.clone()
    } else {
        shrink(&model, &coeffs, sigma, signal.len())?
    };

    let changed = coeffs
        .flatten()
        .iter()
        .zip(shrunk.flatten())
        .filter(|(a, b)| (*a - b).abs() > CHANGE_TOLERANCE)
        .count();
    eprintln!("coefficients changed: {changed} of {}", coeffs.len() - coeffs.smooth().len());

    if let Some(path) = &args.shrunk_coefficients {
        write_coefficients_csv(sink(Some(path))?, &shrunk)?;
    }
    let denoised = idwt(&shrunk, &filter)?;
    write_signal(args, table.x.as_deref(), denoised.samples())
}

fn shrink(model: &Model, coeffs: &WaveletDecomposition, sigma: f64, n: usize) -> CliResult<WaveletDecomposition> {
    let noise = NoiseModel::new(sigma)?;
    let prior = model.prior()?;
    let rule = model
        .rule_kind()
        .resolve(&coeffs.detail_coefficients(), n, prior, noise, &model.quadrature)?;

    let mut non_shrinking = Vec::new();
    for (j, _) in coeffs.levels() {
        let level_rule = match model.policy.alpha_for(j, coeffs.primary_level())? {
            Some(alpha) => rule.with_alpha(alpha)?,
            None => rule.clone(),
        };
        match &level_rule {
            ShrinkageRule::LinexLogistic { prior, .. } | ShrinkageRule::PosteriorMean { prior, .. } => {
                eprintln!("level {j}: alpha = {}", format_float(prior.alpha()));
            }
            ShrinkageRule::SoftUniversal { lambda } | ShrinkageRule::SoftSure { lambda } => {
                eprintln!("level {j}: lambda = {}", format_float(*lambda));
            }
        }
        if level_rule.shrink(0.0)?.abs() > 1e-3 * sigma {
            non_shrinking.push(j.to_string());
        }
    }
    if !non_shrinking.is_empty() {
        warn(format!(
            "rule does not map 0 to 0 at level(s) {}; it is not acting as a shrinker",
            non_shrinking.join(", ")
        ));
    }
    Ok(apply_rule(coeffs, &rule, model.policy)?)
}

fn write_signal(args: &DenoiseArgs, x: Option<&[f64]>, values: &[f64]) -> CliResult<()> {
    let mut out = sink(args.output.as_deref())?;
    match x {
        Some(x) => {
            writeln!(out, "x,denoised")?;
            for (xi, v) in x.iter().zip(values) {
                writeln!(out, "{},{}", format_float(*xi), format_float(*v))?;
            }
        }
        None => {
            writeln!(out, "denoised")?;
            for v in values {
                writeln!(out, "{}", format_float(*v))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}
