use linex_shrink::rules::{apply_rule, CoefficientRule};
use linex_shrink::sim::{run_replication, run_study, StudyConfig, StudyRule};
use linex_shrink::transform::{daubechies_filter, dwt, estimate_sigma, idwt};
use linex_shrink::{AlphaPolicy, MixturePrior, NoiseModel, QuadratureSpec, RuleKind, Signal};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn blocks(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            match t {
                t if t < 0.25 => 0.0,
                t if t < 0.4 => 4.0,
                t if t < 0.7 => -2.0,
                _ => 1.0,
            }
        })
        .collect()
}

fn noisy(truth: &[f64], sigma: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    truth
        .iter()
        .map(|t| {
            let z: f64 = StandardNormal.sample(&mut rng);
            t + sigma * z
        })
        .collect()
}

fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64
}

#[test]
fn linex_denoising_beats_the_raw_observations() {
    let n = 1024;
    let truth = blocks(n);
    let observed = noisy(&truth, 0.5, 11);
    let filter = daubechies_filter(4).unwrap();
    let coeffs = dwt(&Signal::new(observed.clone()).unwrap(), &filter, 3).unwrap();

    let sigma = estimate_sigma(&coeffs).unwrap();
    assert!((sigma - 0.5).abs() < 0.08, "sigma_hat = {sigma}");

    let noise = NoiseModel::new(sigma).unwrap();
    let prior = MixturePrior::new(0.9, 5.0).unwrap();
    let rule = RuleKind::LinexLogistic { a: 1.0 }
        .resolve(&coeffs.detail_coefficients(), n, prior, noise, &QuadratureSpec::default())
        .unwrap();
    let shrunk = apply_rule(&coeffs, &rule, AlphaPolicy::LevelDependent { gamma: 2.0 }).unwrap();
    let denoised = idwt(&shrunk, &filter).unwrap();

    let before = mse(&observed, &truth);
    let after = mse(denoised.samples(), &truth);
    assert!(after < 0.5 * before, "mse {after} vs {before}");
}

#[test]
fn every_rule_kind_shrinks_pure_noise_towards_zero() {
    let n = 512;
    let observed = noisy(&vec![0.0; n], 1.0, 5);
    let noise = NoiseModel::new(1.0).unwrap();
    let prior = MixturePrior::new(0.9, 1.0).unwrap();
    for kind in [
        RuleKind::LinexLogistic { a: 0.5 },
        RuleKind::PosteriorMean,
        RuleKind::SoftUniversal,
        RuleKind::SoftSure,
    ] {
        let rule = kind
            .resolve(&observed, n, prior, noise, &QuadratureSpec::default())
            .unwrap();
        let energy: f64 = observed.iter().map(|d| rule.shrink(*d).unwrap().powi(2)).sum();
        let raw: f64 = observed.iter().map(|d| d * d).sum();
        assert!(energy < 0.25 * raw, "{}: {energy} vs {raw}", kind.name());
    }
}

#[test]
fn study_matrix_rows_match_single_replications() {
    let mut config = StudyConfig::preset(2, 256, 5.0, 77).unwrap();
    config.replications = 6;
    config.rules.push(StudyRule::Identity);
    config.rules.push(StudyRule::Oracle);
    let study = run_study(&config).unwrap();

    for r in [0, 3, 5] {
        let single = run_replication(&config, r).unwrap();
        for (k, s) in single.iter().enumerate() {
            assert_eq!(study.mse[r][k].to_bits(), s.mse.to_bits());
            assert_eq!(study.mae[r][k].to_bits(), s.mae.to_bits());
        }
    }
    assert_eq!(study.amse_of("oracle"), Some(0.0));
    let identity = study.amse_of("identity").unwrap();
    assert!(study.amse_of("linex_logistic(a=1)").unwrap() < identity);
}

#[test]
fn study_is_identical_across_thread_pools() {
    let mut config = StudyConfig::preset(1, 256, 9.0, 3).unwrap();
    config.replications = 8;
    let run_on = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_study(&config).unwrap())
    };
    assert_eq!(run_on(1), run_on(4));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decomposition_round_trips(
        moments in 1usize..=10,
        log_n in 5u32..=9,
        level in 0usize..=4,
        seed in any::<u64>(),
    ) {
        let n = 1usize << log_n;
        let filter = daubechies_filter(moments).unwrap();
        prop_assume!(filter.len() <= n >> level);
        let x = noisy(&vec![0.0; n], 1.0, seed);
        let coeffs = dwt(&Signal::new(x.clone()).unwrap(), &filter, level).unwrap();
        let energy: f64 = x.iter().map(|v| v * v).sum();
        let coeff_energy: f64 = coeffs.flatten().iter().map(|v| v * v).sum();
        prop_assert!((energy - coeff_energy).abs() < 1e-9 * energy);
        let back = idwt(&coeffs, &filter).unwrap();
        for (a, b) in x.iter().zip(back.samples()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }
}
