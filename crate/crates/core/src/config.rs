//! JSON run configuration.
//!
//! Circuit values use the field names of the underlying model: l and c are the
//! line inductance and capacitance per length, L the total length, C_J and I_c
//! the junction capacitance and critical current, C_c the inter-resonator
//! coupling capacitance. Point operations need I_c; sweep operations need the
//! sweep block. Unknown keys are rejected.

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::circuit::CircuitParams;
use crate::error::{Error, Result};
use crate::spectrum::{linear_grid, log_grid};

fn default_n_modes() -> usize {
    10
}

fn default_fock_cutoff() -> usize {
    8
}

fn default_i_c_min() -> f64 {
    1e-7
}

fn default_i_c_max() -> f64 {
    1e-5
}

fn default_points() -> usize {
    200
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(rename = "I_c_min", default = "default_i_c_min")]
    pub i_c_min: f64,
    #[serde(rename = "I_c_max", default = "default_i_c_max")]
    pub i_c_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            i_c_min: default_i_c_min(),
            i_c_max: default_i_c_max(),
            points: default_points(),
            spacing: Spacing::Log,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub l: f64,
    pub c: f64,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "C_J")]
    pub c_j: f64,
    #[serde(rename = "I_c", default)]
    pub i_c: Option<f64>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(rename = "C_c", default)]
    pub c_c: f64,
    #[serde(default = "default_n_modes")]
    pub n_modes: usize,
    #[serde(default = "default_fock_cutoff")]
    pub fock_cutoff: usize,
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.i_c.is_none() && self.sweep.is_none() {
            return Err(Error::Config(
                "need I_c, a sweep block, or both".into(),
            ));
        }
        if self.n_modes == 0 {
            return Err(Error::Config("n_modes must be at least 1".into()));
        }
        if self.fock_cutoff < 5 {
            return Err(Error::Config(
                "fock_cutoff below 5 cannot resolve the n = 0..2 ladder".into(),
            ));
        }
        if let Some(s) = &self.sweep {
            if !(s.i_c_min > 0.0 && s.i_c_max > s.i_c_min) {
                return Err(Error::Config(format!(
                    "sweep range [{}, {}] must be positive and increasing",
                    s.i_c_min, s.i_c_max
                )));
            }
            if s.points < 2 {
                return Err(Error::Config("sweep needs at least 2 points".into()));
            }
        }
        // Positivity of the circuit values themselves.
        self.params_at(self.i_c.unwrap_or(1e-6)).validate()
    }

    pub fn params_at(&self, i_c: f64) -> CircuitParams {
        CircuitParams {
            l: self.l,
            c: self.c,
            length: self.length,
            c_j: self.c_j,
            i_c,
            c_c: self.c_c,
        }
    }

    /// Circuit parameters for point operations; errors when I_c is absent.
    pub fn point_params(&self) -> Result<CircuitParams> {
        let i_c = self.i_c.ok_or_else(|| {
            Error::Config("this operation needs a point I_c in the config".into())
        })?;
        Ok(self.params_at(i_c))
    }

    /// The sweep grid; errors when the sweep block is absent.
    pub fn sweep_grid(&self) -> Result<Vec<f64>> {
        let s = self
            .sweep
            .ok_or_else(|| Error::Config("this operation needs a sweep block".into()))?;
        Ok(match s.spacing {
            Spacing::Log => log_grid(s.i_c_min, s.i_c_max, s.points),
            Spacing::Linear => linear_grid(s.i_c_min, s.i_c_max, s.points),
        })
    }
}

#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: Config,
    /// Hex SHA-256 of the raw config bytes, echoed into every output header.
    pub sha256: String,
    pub path: String,
}

pub fn parse_config(bytes: &[u8]) -> Result<Config> {
    let cfg: Config = serde_json::from_slice(bytes)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &str) -> Result<LoadedConfig> {
    let bytes = std::fs::read(path)?;
    let config = parse_config(&bytes)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(LoadedConfig {
        config,
        sha256: format!("{:x}", hasher.finalize()),
        path: path.to_string(),
    })
}
