use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Settings shared by every subcommand: file values first, flags on top.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub truncation: usize,
    pub tol: f64,
    pub grid_size: usize,
    pub restarts: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { truncation: 16, tol: 1e-8, grid_size: 512, restarts: 5, seed: 0, out: None, format: Format::Json }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    truncation: Option<usize>,
    tol: Option<f64>,
    grid_size: Option<usize>,
    restarts: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub truncation: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, flags: Overrides) -> Result<Self, CliError> {
        let file = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::input(format!("cannot read config {}: {e}", p.display())))?;
                toml::from_str::<FileConfig>(&text)
                    .map_err(|e| CliError::input(format!("bad config {}: {e}", p.display())))?
            }
            None => FileConfig::default(),
        };
        let d = RunConfig::default();
        let cfg = RunConfig {
            truncation: flags.truncation.or(file.truncation).unwrap_or(d.truncation),
            tol: flags.tol.or(file.tol).unwrap_or(d.tol),
            grid_size: file.grid_size.unwrap_or(d.grid_size),
            restarts: file.restarts.unwrap_or(d.restarts),
            seed: flags.seed.or(file.seed).unwrap_or(d.seed),
            out: flags.out.or(file.out),
            format: flags.format.or(file.format).unwrap_or(d.format),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.truncation == 0 || self.grid_size == 0 || self.restarts == 0 {
            return Err(CliError::domain("truncation, grid_size and restarts must be positive"));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(CliError::domain(format!("tol = {} must lie in (0, 1)", self.tol)));
        }
        Ok(())
    }
}
