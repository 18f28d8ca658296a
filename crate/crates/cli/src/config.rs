use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use mapscale_core::mapper::Mode;
use mapscale_core::persistence::{Field, DEFAULT_PRIME};

/// Settings shared by all subcommands, read from `--config` and then
/// overridden by command line flags. Every field is optional.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub complex: Option<PathBuf>,
    pub function: Option<PathBuf>,
    /// Codomain metric (CSV); when present the function maps vertices to
    /// point ids.
    pub metric: Option<PathBuf>,
    pub tower: Option<PathBuf>,
    pub mode: Option<Mode>,
    pub dims: Option<Vec<usize>>,
    pub prime: Option<u32>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Checks that input paths exist and the prime is supported.
    pub fn validate(&self) -> Result<()> {
        for p in [&self.complex, &self.function, &self.metric, &self.tower].into_iter().flatten() {
            ensure!(p.exists(), "input file {} does not exist", p.display());
        }
        Field::new(self.prime())?;
        if let Some(d) = &self.dims {
            ensure!(!d.is_empty(), "no homology dimensions requested");
        }
        Ok(())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.dims.clone().unwrap_or_else(|| vec![0, 1])
    }

    pub fn prime(&self) -> u32 {
        self.prime.unwrap_or(DEFAULT_PRIME)
    }

    /// Exact pullbacks for real functions, graph components otherwise.
    pub fn mode(&self) -> Mode {
        self.mode.unwrap_or(if self.metric.is_some() { Mode::Combinatorial } else { Mode::Exact })
    }

    /// Largest nerve dimension needed for the requested homology.
    pub fn nerve_dim(&self) -> usize {
        self.dims().into_iter().max().unwrap_or(0) + 1
    }

    pub fn require<'a>(&self, field: &'a Option<PathBuf>, name: &str) -> Result<&'a Path> {
        match field {
            Some(p) => Ok(p),
            None => bail!("missing input: pass --{name} or set `{name}` in the config file"),
        }
    }
}
