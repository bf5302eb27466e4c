use linex_shrink::risk::{bayes_risk, bayes_risk_monte_carlo, frequentist_risk, risk_profile};
use linex_shrink::rules::CoefficientRule;
use linex_shrink::{LinexLoss, MixturePrior, NoiseModel, QuadratureSpec, ShrinkageRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn setup(a: f64) -> (ShrinkageRule, LinexLoss, MixturePrior, NoiseModel) {
    let prior = MixturePrior::new(0.9, 1.0).unwrap();
    let noise = NoiseModel::new(1.0).unwrap();
    let rule = ShrinkageRule::linex(a, prior, noise, QuadratureSpec::default()).unwrap();
    (rule, LinexLoss::new(a, 1.0).unwrap(), prior, noise)
}

#[test]
fn frequentist_risk_agrees_with_simulation() {
    let (rule, loss, _, noise) = setup(1.0);
    let spec = QuadratureSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let draws = 200_000;
    for theta in [-2.5, 0.0, 1.5] {
        let exact = frequentist_risk(theta, &rule, &loss, &noise, &spec).unwrap();
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..draws {
            let z: f64 = rng.sample(StandardNormal);
            let l = loss.eval(rule.shrink(theta + z).unwrap(), theta);
            s += l;
            s2 += l * l;
        }
        let mean = s / draws as f64;
        let se = ((s2 / draws as f64 - mean * mean) / draws as f64).sqrt();
        assert!((exact - mean).abs() < 4.0 * se, "θ = {theta}: {exact} vs {mean} ± {se}");
    }
}

#[test]
fn quadrature_and_simulated_bayes_risk_agree() {
    for a in [-1.0, 1.0] {
        let (rule, loss, prior, noise) = setup(a);
        let exact = bayes_risk(&rule, &loss, &prior, &noise, &QuadratureSpec::default()).unwrap();
        let mc = bayes_risk_monte_carlo(&rule, &loss, &prior, &noise, 100_000, 9).unwrap();
        assert!(
            (exact.value - mc.value).abs() < 4.0 * mc.standard_error,
            "a = {a}: {} vs {} ± {}",
            exact.value,
            mc.value,
            mc.standard_error
        );
    }
}

#[test]
fn small_a_risk_is_scaled_mean_squared_error() {
    // For small a, LINEX risk ≈ (b a²/2) E[(δ − θ)²].
    let a = 1e-3;
    let (rule, loss, _, noise) = setup(a);
    let grid: Vec<f64> = (-20..=20).map(|k| k as f64 * 0.5).collect();
    let profile = risk_profile(&grid, &rule, &loss, &noise, &QuadratureSpec::default()).unwrap();
    for (theta, bias2, var, risk) in profile.rows() {
        let mse = bias2 + var;
        let scaled = risk / (0.5 * a * a);
        assert!((scaled - mse).abs() < 5e-3 * mse.max(1e-2), "θ = {theta}: {scaled} vs {mse}");
    }
}
