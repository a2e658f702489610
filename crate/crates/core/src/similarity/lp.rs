use crate::error::{Error, Result};

pub(crate) fn check_pair(x: &[f64], y: &[f64], min_len: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < min_len {
        return Err(Error::TooShort {
            needed: min_len,
            got: x.len(),
        });
    }
    Ok(())
}

/// Minkowski distance of order `p` (`f64::INFINITY` for the maximum norm).
pub fn d_lp(x: &[f64], y: &[f64], p: f64) -> Result<f64> {
    check_pair(x, y, 1)?;
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!("Lp order must be >= 1, got {p}")));
    }
    let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
    Ok(if p == 1.0 {
        diffs.sum()
    } else if p == 2.0 {
        diffs.map(|d| d * d).sum::<f64>().sqrt()
    } else if p.is_infinite() {
        diffs.fold(0.0, f64::max)
    } else {
        diffs.map(|d| d.powf(p)).sum::<f64>().powf(p.recip())
    })
}

pub fn d_euclidean(x: &[f64], y: &[f64]) -> Result<f64> {
    d_lp(x, y, 2.0)
}
