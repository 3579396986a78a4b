//! Run directories: `config.json`, `trials.csv`, `summary.json`, `manifest.json`.
//!
//! The manifest records the master seed, the crate version and a SHA-256 of
//! every artifact, so a rerun can be checked byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::{read_json, read_text};

use super::comparison::{run_comparison, ComparisonRun, ExperimentConfig, TrialOutcome};

pub const CONFIG_FILE: &str = "config.json";
pub const TRIALS_FILE: &str = "trials.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub artifact: String,
    pub version: String,
    pub seed: u64,
    pub trials: usize,
    /// SHA-256 (hex) of each artifact file, keyed by file name.
    pub sha256: BTreeMap<String, String>,
}

/// One `trials.csv` row. Failed trials keep their row with empty values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub trial: usize,
    pub eps_erm: Option<f64>,
    pub eps_ig: Option<f64>,
    pub eps_u: Option<f64>,
    pub true_err_erm: Option<f64>,
    pub true_err_pr: Option<f64>,
    pub b_erm: Option<f64>,
    pub b_pr: Option<f64>,
    pub covered_erm: Option<bool>,
    pub covered_pr: Option<bool>,
}

impl From<&TrialOutcome> for CsvRow {
    fn from(o: &TrialOutcome) -> Self {
        let r = o.record.as_ref();
        CsvRow {
            trial: o.trial,
            eps_erm: r.map(|r| r.eps_erm),
            eps_ig: r.map(|r| r.eps_ig),
            eps_u: r.map(|r| r.eps_u),
            true_err_erm: r.map(|r| r.true_err_erm),
            true_err_pr: r.map(|r| r.true_err_pr),
            b_erm: r.map(|r| r.b_erm),
            b_pr: r.map(|r| r.b_pr),
            covered_erm: r.map(|r| r.covered_erm),
            covered_pr: r.map(|r| r.covered_pr),
        }
    }
}

pub fn trials_csv(outcomes: &[TrialOutcome]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for o in outcomes {
        w.serialize(CsvRow::from(o))?;
    }
    w.into_inner().map_err(|e| Error::param(format!("csv buffer: {e}")))
}

pub fn read_trials_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let text = read_text(path)?;
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<CsvRow>, _>>()
        .map_err(Error::from)
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn pretty<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut text = serde_json::to_vec_pretty(value)?;
    text.push(b'\n');
    Ok(text)
}

/// Writes the run directory and returns its manifest.
pub fn persist_run(run: &ComparisonRun, cfg: &ExperimentConfig, dir: &Path) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    // The echoed config is location independent so it can be rerun anywhere.
    let echo = ExperimentConfig {
        output_dir: None,
        ..cfg.clone()
    };
    let files = [
        (CONFIG_FILE, pretty(&echo)?),
        (TRIALS_FILE, trials_csv(&run.outcomes)?),
        (SUMMARY_FILE, pretty(&run.summary)?),
    ];
    let mut sha256 = BTreeMap::new();
    for (name, bytes) in &files {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        sha256.insert(name.to_string(), sha256_hex(bytes));
    }
    let manifest = Manifest {
        artifact: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        trials: cfg.trials,
        sha256,
    };
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, pretty(&manifest)?).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// Re-executes the run recorded in `run_dir` and writes it to `out_dir`.
pub fn rerun_from_manifest(run_dir: &Path, out_dir: &Path, threads: Option<usize>) -> Result<Manifest> {
    let manifest: Manifest = read_json(&run_dir.join(MANIFEST_FILE))?;
    let config_path = run_dir.join(CONFIG_FILE);
    let config_text = read_text(&config_path)?;
    if manifest.sha256.get(CONFIG_FILE) != Some(&sha256_hex(config_text.as_bytes())) {
        return Err(Error::param(format!(
            "{} does not match the checksum in its manifest",
            config_path.display()
        )));
    }
    let cfg: ExperimentConfig = serde_json::from_str(&config_text)?;
    if cfg.seed != manifest.seed || cfg.trials != manifest.trials {
        return Err(Error::param("manifest seed or trial count disagrees with config.json"));
    }
    let run = run_comparison(&cfg, threads)?;
    persist_run(&run, &cfg, out_dir)
}
