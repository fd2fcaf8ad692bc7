use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opspace::TrendThresholds;

/// Numerical knobs shared by the library routines and the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Relative tolerance for certificate and identity checks.
    pub tolerance: f64,
    /// Singular values below `svd_cutoff * sigma_max` count as zero.
    pub svd_cutoff: f64,
    pub trend_slope_threshold: f64,
    pub defect_residual_threshold: f64,
    pub seed: u64,
    #[serde(rename = "Ns")]
    pub ns: Vec<usize>,
    pub sign_trials: usize,
    pub ascent_iters: usize,
    /// Condition-number cap for the reproducing-pair operator.
    pub condition_cap: f64,
    pub max_dim: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tolerance: 1e-9,
            svd_cutoff: 1e-10,
            trend_slope_threshold: 0.25,
            defect_residual_threshold: 0.5,
            seed: 0,
            ns: vec![4, 8, 16, 32, 64],
            sign_trials: 64,
            ascent_iters: 500,
            condition_cap: 1e8,
            max_dim: 512,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tolerance", self.tolerance),
            ("svd_cutoff", self.svd_cutoff),
            ("trend_slope_threshold", self.trend_slope_threshold),
            ("defect_residual_threshold", self.defect_residual_threshold),
            ("condition_cap", self.condition_cap),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::invalid(format!("{name} must be positive, got {value}")));
            }
        }
        validate_ns(&self.ns)?;
        if self.sign_trials == 0 {
            return Err(Error::invalid("sign_trials must be at least 1"));
        }
        if self.max_dim == 0 {
            return Err(Error::invalid("max_dim must be at least 1"));
        }
        Ok(())
    }

    pub fn trend_thresholds(&self) -> TrendThresholds {
        TrendThresholds::symmetric(self.trend_slope_threshold)
    }
}

pub(crate) fn validate_ns(ns: &[usize]) -> Result<()> {
    if ns.is_empty() {
        return Err(Error::invalid("truncation list is empty"));
    }
    if ns[0] == 0 {
        return Err(Error::invalid("truncation indices start at 1"));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("truncation indices must be strictly increasing"));
    }
    Ok(())
}
