use std::path::{Path, PathBuf};

use grioli_core::log_energy::{EnergyWeights, Objective, OptimizerConfig};
use grioli_core::quadrature::QuadratureSpec;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Svd,
    Newton,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Oracle {
    Haar,
    Grid,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[clap(rename_all = "kebab-case")]
pub enum Suite {
    Integrals,
    Grioli,
    Log,
    Isotropy,
    FanHoffman,
    Engines,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Integrals => "integrals",
            Suite::Grioli => "grioli",
            Suite::Log => "log",
            Suite::Isotropy => "isotropy",
            Suite::FanHoffman => "fan-hoffman",
            Suite::Engines => "engines",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveArg {
    Log,
    Euclidean,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Log => Objective::Log,
            ObjectiveArg::Euclidean => Objective::Euclidean,
        }
    }
}

/// Contents of `--config <file.json>`. Every field is optional; flags win over the file.
/// Relative paths are resolved against the directory holding the config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub engine: Option<Engine>,
    pub radius: Option<f64>,
    pub oracle: Option<Oracle>,
    pub samples: Option<usize>,
    pub resolution: Option<usize>,
    pub fd_step: Option<f64>,
    pub suite: Option<Suite>,
    pub scale: Option<usize>,
    pub mu: Option<f64>,
    pub mu_c: Option<f64>,
    pub trials: Option<usize>,
    pub objective: Option<ObjectiveArg>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub quadrature: Option<QuadratureSpec>,
    pub optimizer: Option<OptimizerConfig>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.out, &mut cfg.input, &mut cfg.csv, &mut cfg.svg].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn weights(&self, mu: Option<f64>, mu_c: Option<f64>, default_mu_c: f64) -> Result<EnergyWeights, CliError> {
        let mu = mu.or(self.mu).unwrap_or(1.0);
        let mu_c = mu_c.or(self.mu_c).unwrap_or(default_mu_c);
        Ok(EnergyWeights::new(mu, mu_c)?)
    }
}

pub fn require<T>(value: Option<T>, what: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Config(format!("missing {what} (flag or config field)")))
}
