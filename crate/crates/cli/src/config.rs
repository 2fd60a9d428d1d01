//! Optional TOML defaults. Anything given on the command line wins.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::Failure;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub kappa: Option<String>,
    pub epsilon: Option<String>,
    pub max_tries: Option<u64>,
    pub dim_cap: Option<usize>,
    pub max_depth: Option<usize>,
    pub svp_budget: Option<u64>,
    pub scan_points: Option<usize>,
    pub samples: Option<u64>,
    pub format: Option<crate::Format>,
    pub report_dir: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        toml::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }
}
