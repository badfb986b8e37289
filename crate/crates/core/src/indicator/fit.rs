use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::linalg::least_squares;
use crate::{Error, Result};

/// Regression model for `log|I(τ; 0)|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitModel {
    /// `α·τ + β·√τ + γ·log τ + δ` (real and radial probes).
    Real,
    /// `α·τ + γ·log τ + δ` (complex probes).
    Complex,
}

impl FitModel {
    fn row(self, tau: f64) -> Vec<f64> {
        match self {
            FitModel::Real => alloc::vec![tau, tau.sqrt(), tau.ln(), 1.0],
            FitModel::Complex => alloc::vec![tau, tau.ln(), 1.0],
        }
    }
}

pub const MIN_SAMPLES: usize = 6;
pub const MAX_CONDITION: f64 = 1e10;

/// Least-squares slope fit; `coefficients[0]` is the slope `α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub model: FitModel,
    pub coefficients: Vec<f64>,
    /// Root-mean-square residual of `log|I|`.
    pub residual_norm: f64,
    pub tau_grid: Vec<f64>,
    pub condition: f64,
}

impl SlopeFit {
    pub fn slope(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn predict(&self, tau: f64) -> f64 {
        self.model.row(tau).iter().zip(&self.coefficients).map(|(a, b)| a * b).sum()
    }
}

/// Fits `model` to `(τ_k, log|I_k|)`; needs at least six strictly increasing
/// `τ` and a design condition number at most `1e10`.
pub fn fit_slope(model: FitModel, taus: &[f64], log_abs: &[f64]) -> Result<SlopeFit> {
    if taus.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { survivors: taus.len(), needed: MIN_SAMPLES });
    }
    if taus.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("tau grid must be strictly increasing".into()));
    }
    if log_abs.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("log|I| samples must be finite".into()));
    }
    let rows: Vec<Vec<f64>> = taus.iter().map(|&t| model.row(t)).collect();
    let ls = least_squares(&rows, log_abs)?;
    if ls.condition > MAX_CONDITION {
        return Err(Error::IllConditioned { cond: ls.condition, limit: MAX_CONDITION });
    }
    let rms = (ls.residuals.iter().map(|r| r * r).sum::<f64>() / ls.residuals.len() as f64).sqrt();
    Ok(SlopeFit { model, coefficients: ls.coefficients, residual_norm: rms, tau_grid: taus.to_vec(), condition: ls.condition })
}
