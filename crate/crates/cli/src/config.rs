use std::path::PathBuf;

use roughvol::analysis::McMode;
use roughvol::ModelParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    Cholesky,
    DavisHarte,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    FastRho0,
    Joint,
}

impl From<ModeArg> for McMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::FastRho0 => McMode::FastRho0,
            ModeArg::Joint => McMode::Joint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Everything a command may read. Loaded from `--config`, then overridden
/// field by field from the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    pub n: usize,
    pub n_list: Vec<usize>,
    pub fine_factor: usize,
    pub replications: u64,
    pub seed: u64,
    pub a: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_steps: usize,
    pub sampler: SamplerKind,
    pub mode: ModeArg,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub fit_points: Option<usize>,
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            params: ModelParams::default(),
            n: 64,
            n_list: vec![16, 32, 64, 128, 256, 512],
            fine_factor: 64,
            replications: 10_000,
            seed: 42,
            a: 1.0,
            tau_min: 0.0,
            tau_max: 5.0,
            tau_steps: 51,
            sampler: SamplerKind::Cholesky,
            mode: ModeArg::FastRho0,
            format: None,
            out: None,
            fit_points: None,
            threads: None,
        }
    }
}
