//! Defaults, the optional JSON config file and the precedence rule:
//! command-line flags override file values override built-in defaults.

use std::path::Path;

use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_THRESHOLD: f64 = 0.4;
pub const DEFAULT_ROUNDS: usize = 7;
pub const DEFAULT_EPOCHS: u32 = 10;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_COST: &str = "uniform";
pub const DEFAULT_VARIANT: &str = "relabel";

/// Optional JSON config file, e.g.
/// `{"threshold": 0.4, "cost": "comp+dep", "rounds": 7}`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub threshold: Option<f64>,
    pub cost: Option<String>,
    pub variant: Option<String>,
    pub rounds: Option<usize>,
    pub epochs: Option<u32>,
    pub seed: Option<u64>,
    pub blacklist: Option<Vec<String>>,
    pub blacklist_prefixes: Option<bool>,
    pub workers: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config {}: {}", path.display(), e))
        })?;
        serde_json::from_str(&text).map_err(|e| {
            CliError::Usage(format!("invalid config {}: {}", path.display(), e))
        })
    }
}

pub fn resolve<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}
