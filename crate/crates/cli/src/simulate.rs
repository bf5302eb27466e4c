use std::path::Path;

use linex_shrink::export::write_matrix_csv;
use linex_shrink::sim::{run_study, StudyConfig};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::SimulateArgs;
use crate::config::{parse_checked, read_text};
use crate::error::{CliError, CliResult};
use crate::output::{sink, write_json};

const PRESET_N: usize = 512;
const PRESET_SNR: f64 = 9.0;
const PRESET_SEED: u64 = 1;

#[derive(Debug, Serialize)]
struct RuleSummary {
    label: String,
    amse: f64,
    amae: f64,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    scenario: &'a str,
    seed: u64,
    replications: usize,
    /// SHA-256 of the resolved configuration in compact JSON.
    config_sha256: String,
    config: &'a StudyConfig,
    rules: Vec<RuleSummary>,
}

pub fn load_config(args: &SimulateArgs) -> CliResult<StudyConfig> {
    let mut config = match (&args.config, args.preset) {
        (Some(path), _) => {
            let template = StudyConfig::preset(1, PRESET_N, PRESET_SNR, PRESET_SEED)?;
            parse_checked(&read_text(path)?, &template, path)?
        }
        (None, Some(p)) => StudyConfig::preset(p, PRESET_N, PRESET_SNR, PRESET_SEED)?,
        (None, None) => return Err(CliError::usage("either --config or --preset is required")),
    };
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(snr) = args.snr {
        config.snr = snr;
    }
    if let Some(r) = args.replications {
        config.replications = r;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    config.validate()?;
    Ok(config)
}

pub fn config_hash(config: &StudyConfig) -> CliResult<String> {
    let canonical = serde_json::to_string(config).map_err(|e| CliError::Numeric(e.to_string()))?;
    Ok(format!("{:x}", Sha256::digest(canonical.as_bytes())))
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let config = load_config(args)?;
    let result = run_study(&config)?;

    let dir: &Path = &args.output_dir;
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::usage(format!("cannot create {}: {e}", dir.display())))?;
    write_matrix_csv(sink(Some(&dir.join("mse.csv")))?, &result.rules, &result.mse)?;
    write_matrix_csv(sink(Some(&dir.join("mae.csv")))?, &result.rules, &result.mae)?;

    let rules: Vec<RuleSummary> = result
        .rules
        .iter()
        .zip(result.amse.iter().zip(&result.amae))
        .map(|(label, (&amse, &amae))| RuleSummary {
            label: label.clone(),
            amse,
            amae,
        })
        .collect();
    for r in &rules {
        eprintln!("{:<28} AMSE {:.6e}  AMAE {:.6e}", r.label, r.amse, r.amae);
    }
    let summary = Summary {
        scenario: &config.scenario,
        seed: config.seed,
        replications: config.replications,
        config_sha256: config_hash(&config)?,
        config: &config,
        rules,
    };
    write_json(Some(&dir.join("summary.json")), &summary)
}
