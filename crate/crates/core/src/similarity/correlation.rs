use super::lp::check_pair;
use crate::error::{Error, Result};
use crate::series::ZERO_VARIANCE_TOL;

/// Pearson correlation coefficient, clamped to `[-1, 1]`.
pub fn pearson_cor(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y, 2)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    let tol = ZERO_VARIANCE_TOL * ZERO_VARIANCE_TOL * (n - 1.0);
    if sxx < tol || syy < tol {
        return Err(Error::ZeroVariance("correlation with a constant series"));
    }
    // sqrt of the product keeps COR(x, x) exactly 1
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// `sqrt(2 (1 - COR))`, in `[0, 2]`.
pub fn d_cor1(x: &[f64], y: &[f64]) -> Result<f64> {
    Ok(cor1_from(pearson_cor(x, y)?))
}

/// `((1 - COR) / (1 + COR))^(β/2)`; infinite for perfectly anti-correlated series.
pub fn d_cor2(x: &[f64], y: &[f64], beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("β must be > 0, got {beta}")));
    }
    Ok(cor2_from(pearson_cor(x, y)?, beta))
}

pub(crate) fn cor1_from(cor: f64) -> f64 {
    (2.0 * (1.0 - cor)).max(0.0).sqrt()
}

pub(crate) fn cor2_from(cor: f64, beta: f64) -> f64 {
    if cor <= -1.0 {
        return f64::INFINITY;
    }
    ((1.0 - cor) / (1.0 + cor)).max(0.0).powf(beta / 2.0)
}
