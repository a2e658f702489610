use serde::{Deserialize, Serialize};

use super::lp::check_pair;
use crate::error::{Error, Result};
use crate::series::ZERO_VARIANCE_TOL;

/// Diagonal weight matrix applied to ACF differences at lags `1..=max_lag`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum AcfWeights {
    Identity,
    /// `diag(λ, λ², …)`
    Geometric(f64),
    Diagonal(Vec<f64>),
}

impl AcfWeights {
    pub fn diagonal(&self, max_lag: usize) -> Result<Vec<f64>> {
        let w = match self {
            AcfWeights::Identity => vec![1.0; max_lag],
            AcfWeights::Geometric(l) => (1..=max_lag).map(|k| l.powi(k as i32)).collect(),
            AcfWeights::Diagonal(d) => {
                if d.len() != max_lag {
                    return Err(Error::ParameterMismatch(format!(
                        "{} weights for {max_lag} lags",
                        d.len()
                    )));
                }
                d.clone()
            }
        };
        if w.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::NonPositiveWeight);
        }
        Ok(w)
    }
}

/// Sample autocorrelations `ρ̂(0..=max_lag)`.
pub fn acf_estimate(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if n < max_lag + 2 {
        return Err(Error::LagTooLarge { max_lag, len: n });
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let denom: f64 = dev.iter().map(|d| d * d).sum();
    if (denom / (n as f64 - 1.0)).sqrt() < ZERO_VARIANCE_TOL {
        return Err(Error::ZeroVariance("autocorrelation of a constant series"));
    }
    Ok((0..=max_lag)
        .map(|k| {
            if k == 0 {
                1.0
            } else {
                dev.iter().zip(&dev[k..]).map(|(a, b)| a * b).sum::<f64>() / denom
            }
        })
        .collect())
}

/// Weighted Euclidean distance between ACF vectors over lags `1..=max_lag`.
pub fn d_acf(x: &[f64], y: &[f64], max_lag: usize, weights: &AcfWeights) -> Result<f64> {
    check_pair(x, y, 2)?;
    let w = weights.diagonal(max_lag)?;
    let rx = acf_estimate(x, max_lag)?;
    let ry = acf_estimate(y, max_lag)?;
    Ok(weighted_distance(&rx[1..], &ry[1..], &w))
}

pub(crate) fn weighted_distance(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(w)
        .map(|((p, q), w)| w * (p - q).powi(2))
        .sum::<f64>()
        .sqrt()
}
