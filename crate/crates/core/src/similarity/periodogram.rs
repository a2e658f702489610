use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::lp::check_pair;
use crate::error::{Error, Result};
use crate::series::{sample_mean_sd, ZERO_VARIANCE_TOL};

/// Periodogram ordinates `P(ω_j) = |Σ_t x_t e^{-i t ω_j}|² / N` at
/// `ω_j = 2πj/N`, `j = 1..=N/2`.
///
/// The time origin only changes the phase of the transform, so the ordinates
/// are the same whether `t` runs over `0..N` or `1..=N`.
pub fn periodogram(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    Ok(buf[1..=n / 2].iter().map(|c| c.norm_sqr() / n as f64).collect())
}

/// Euclidean distance between periodograms. The normalized variant divides
/// each periodogram by its series' sample variance first.
pub fn d_periodogram(x: &[f64], y: &[f64], normalized: bool) -> Result<f64> {
    check_pair(x, y, 2)?;
    let mut px = periodogram(x)?;
    let mut py = periodogram(y)?;
    if normalized {
        for (p, s) in [(&mut px, x), (&mut py, y)] {
            let (_, sd) = sample_mean_sd(s)?;
            if sd < ZERO_VARIANCE_TOL {
                return Err(Error::ZeroVariance("normalized periodogram of a constant series"));
            }
            let var = sd * sd;
            p.iter_mut().for_each(|v| *v /= var);
        }
    }
    Ok(px
        .iter()
        .zip(&py)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt())
}
