//! Commands that evaluate a rule away from data: `rule-curve`, `risk` and
//! `bayes-risk`.

use linex_shrink::export::{write_risk_profile_csv, write_rule_curve_csv};
use linex_shrink::risk::{bayes_risk, bayes_risk_monte_carlo, risk_profile, BayesRiskResult, RiskMethod};
use linex_shrink::rules::{rule_curve, CoefficientRule};
use linex_shrink::{NoiseModel, ShrinkageRule};
use serde::Serialize;

use crate::args::{BayesRiskArgs, BayesRiskOptions, ModelArgs, RiskArgs, RuleCurveArgs};
use crate::config::{Defaults, Model, ModelConfig, RuleName};
use crate::error::{CliError, CliResult};
use crate::output::{linear_grid, sink, warn, write_json};

fn load(args: &ModelArgs) -> CliResult<Model> {
    let file = match &args.config {
        Some(p) => ModelConfig::load(p)?,
        None => ModelConfig::default(),
    };
    file.overlay(args.overrides()).resolve(&Defaults::REFERENCE)
}

fn build_rule(model: &Model) -> CliResult<(ShrinkageRule, NoiseModel)> {
    let noise = NoiseModel::new(model.sigma.unwrap_or(1.0))?;
    let n = match model.rule {
        RuleName::SoftSure => {
            return Err(CliError::usage(
                "soft_sure picks its threshold from data; use it with denoise or simulate",
            ))
        }
        RuleName::SoftUniversal => model
            .sample_size
            .ok_or_else(|| CliError::usage("soft_universal needs --sample-size"))?,
        _ => 0,
    };
    let rule = model.rule_kind().resolve(&[], n, model.prior()?, noise, &model.quadrature)?;
    Ok((rule, noise))
}

fn check_origin(rule: &ShrinkageRule, noise: &NoiseModel) -> CliResult<()> {
    let at_zero = rule.shrink(0.0)?;
    if at_zero.abs() > 1e-3 * noise.sigma() {
        warn(format!(
            "delta(0) = {at_zero:.6}; the rule does not pass through the origin and is not a shrinker here"
        ));
    }
    Ok(())
}

pub fn rule_curve_cmd(args: &RuleCurveArgs) -> CliResult<()> {
    let model = load(&args.model)?;
    if args.points == 0 {
        return Err(CliError::usage("--points must be at least 1"));
    }
    let grid = linear_grid(args.min, args.max, args.points)?;
    let (rule, noise) = build_rule(&model)?;
    check_origin(&rule, &noise)?;
    let curve = rule_curve(&rule, &grid)?;
    write_rule_curve_csv(sink(args.output.as_deref())?, &curve)?;
    Ok(())
}

/// Everything needed to reproduce a Bayes-risk figure.
#[derive(Debug, Serialize)]
struct BayesRiskReport {
    rule: RuleName,
    a: f64,
    b: f64,
    alpha: f64,
    tau: f64,
    sigma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    sample_size: Option<usize>,
    quadrature_nodes: usize,
    truncation: f64,
    method: RiskMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    draws: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    bayes_risk: f64,
    standard_error: f64,
}

fn compute_bayes_risk(
    model: &Model,
    rule: &ShrinkageRule,
    noise: &NoiseModel,
    opts: &BayesRiskOptions,
) -> CliResult<BayesRiskReport> {
    let loss = model.loss()?;
    let prior = model.prior()?;
    let result: BayesRiskResult = match opts.monte_carlo {
        Some(draws) => bayes_risk_monte_carlo(rule, &loss, &prior, noise, draws, opts.seed)?,
        None => bayes_risk(rule, &loss, &prior, noise, &model.quadrature)?,
    };
    eprintln!("bayes_risk = {:.6}", result.value);
    Ok(BayesRiskReport {
        rule: model.rule,
        a: model.a,
        b: model.b,
        alpha: model.alpha,
        tau: model.tau,
        sigma: noise.sigma(),
        sample_size: model.sample_size.filter(|_| model.rule == RuleName::SoftUniversal),
        quadrature_nodes: model.quadrature.node_count(),
        truncation: model.quadrature.truncation(),
        method: result.method,
        draws: opts.monte_carlo,
        seed: opts.monte_carlo.map(|_| opts.seed),
        bayes_risk: result.value,
        standard_error: result.standard_error,
    })
}

pub fn risk_cmd(args: &RiskArgs) -> CliResult<()> {
    let model = load(&args.model)?;
    let grid = linear_grid(args.min, args.max, args.points)?;
    let (rule, noise) = build_rule(&model)?;
    let profile = risk_profile(&grid, &rule, &model.loss()?, &noise, &model.quadrature)?;
    write_risk_profile_csv(sink(Some(&args.output))?, &profile)?;
    let report = compute_bayes_risk(&model, &rule, &noise, &args.bayes)?;
    write_json(args.summary.as_deref(), &report)
}

pub fn bayes_risk_cmd(args: &BayesRiskArgs) -> CliResult<()> {
    let model = load(&args.model)?;
    let (rule, noise) = build_rule(&model)?;
    let report = compute_bayes_risk(&model, &rule, &noise, &args.bayes)?;
    write_json(args.output.as_deref(), &report)
}
