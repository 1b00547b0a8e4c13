//! Run configuration: command-line flags over a TOML file over defaults.

use std::path::{Path, PathBuf};

use clap::Args;
use ebtk::criteria::RunConfig;
use serde::Deserialize;

use crate::error::CliError;

/// A TOML file with any subset of the [`RunConfig`] fields.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub eps_feas: Option<f64>,
    pub eps_sep: Option<f64>,
    pub max_iters: Option<usize>,
    pub stall_window: Option<usize>,
    pub joint_levels: Option<Vec<usize>>,
    pub seed: Option<u64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// TOML file with run configuration fields
    #[arg(long, env = "EBTK_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub eps_feas: Option<f64>,
    #[arg(long)]
    pub eps_sep: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub stall_window: Option<usize>,
    /// Comma-separated joint levels, each in 2..=6
    #[arg(long, value_delimiter = ',')]
    pub joint_levels: Option<Vec<usize>>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let d = RunConfig::default();
        let cfg = RunConfig {
            eps_feas: self.eps_feas.or(file.eps_feas).unwrap_or(d.eps_feas),
            eps_sep: self.eps_sep.or(file.eps_sep).unwrap_or(d.eps_sep),
            max_iters: self.max_iters.or(file.max_iters).unwrap_or(d.max_iters),
            stall_window: self.stall_window.or(file.stall_window).unwrap_or(d.stall_window),
            joint_levels: self.joint_levels.clone().or(file.joint_levels).unwrap_or(d.joint_levels),
            seed: self.seed.or(file.seed).unwrap_or(d.seed),
        };
        cfg.validate().map_err(|e| CliError::Input(format!("configuration: {e}")))?;
        Ok(cfg)
    }
}
