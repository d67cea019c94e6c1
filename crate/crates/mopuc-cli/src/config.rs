use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mopuc::io::{Matrix, WeightDoc};
use mopuc::{Error, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub path: PathBuf,
    pub format: Format,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    pub a_l1: Matrix,
    pub a_r2d: Matrix,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub weight: WeightDoc,
    pub n_max: usize,
    pub j_max: usize,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub outputs: Vec<Output>,
    /// Initial Verblunsky matrices at `n = 1` for `dpii propagate`; moment-derived when absent.
    #[serde(default)]
    pub initial: Option<InitialData>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        if cfg.n_max == 0 {
            return Err(Error::InvalidSpec("n_max must be at least 1".into()));
        }
        if cfg.n_max > cfg.j_max {
            return Err(Error::InvalidSpec(format!(
                "n_max = {} exceeds j_max = {}",
                cfg.n_max, cfg.j_max
            )));
        }
        mopuc::verify::tolerances(&cfg.tolerances)?;
        Ok(cfg)
    }
}
