//! Symbolic Aggregate approXimation and the MINDIST word distance.

use crate::error::{Error, Result};
use crate::series::znormalize_values;

pub const MIN_ALPHABET: usize = 2;
pub const MAX_ALPHABET: usize = 10;

/// Standard normal quantile function (Acklam's rational approximation,
/// relative error below 1.2e-9).
pub fn inverse_normal_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383577518672690e2,
        -3.066479806614716e1,
        2.506628277459239e0,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838e0,
        -2.549732539343734e0,
        4.374664141464968e0,
        2.938163982698783e0,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996e0,
        3.754408661907416e0,
    ];
    const P_LOW: f64 = 0.02425;

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - P_LOW {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Equiprobable standard-normal cut points `Φ⁻¹(k/a)`, `k = 1..a`.
pub fn breakpoints(alphabet: usize) -> Result<Vec<f64>> {
    if !(MIN_ALPHABET..=MAX_ALPHABET).contains(&alphabet) {
        return Err(Error::InvalidParameter(format!(
            "alphabet size must lie in [{MIN_ALPHABET}, {MAX_ALPHABET}], got {alphabet}"
        )));
    }
    Ok((1..alphabet)
        .map(|k| inverse_normal_cdf(k as f64 / alphabet as f64))
        .collect())
}

/// A SAX word together with the segmentation that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SaxWord {
    pub symbols: Vec<u8>,
    pub breakpoints: Vec<f64>,
    /// Length of each PAA segment; the last absorbs any remainder.
    pub segment_lengths: Vec<usize>,
}

impl SaxWord {
    pub fn alphabet(&self) -> usize {
        self.breakpoints.len() + 1
    }

    pub fn series_len(&self) -> usize {
        self.segment_lengths.iter().sum()
    }

    pub fn as_string(&self) -> String {
        self.symbols.iter().map(|&s| (b'a' + s) as char).collect()
    }
}

/// Segment lengths for `n` points in `w` segments: `n / w` each, remainder
/// added to the last.
pub fn paa_segments(n: usize, w: usize) -> Result<Vec<usize>> {
    if w == 0 || w > n {
        return Err(Error::InvalidParameter(format!(
            "word length must lie in [1, {n}], got {w}"
        )));
    }
    let base = n / w;
    let mut seg = vec![base; w];
    seg[w - 1] += n - base * w;
    Ok(seg)
}

/// Piecewise aggregate approximation: mean of each segment.
pub fn paa(x: &[f64], w: usize) -> Result<Vec<f64>> {
    let seg = paa_segments(x.len(), w)?;
    let mut out = Vec::with_capacity(w);
    let mut start = 0;
    for len in seg {
        out.push(x[start..start + len].iter().sum::<f64>() / len as f64);
        start += len;
    }
    Ok(out)
}

fn symbol_for(v: f64, cuts: &[f64]) -> u8 {
    cuts.iter().take_while(|&&b| b <= v).count() as u8
}

/// z-normalizes, reduces to `w` segment means and quantizes each mean into
/// one of `a` equiprobable standard-normal cells.
pub fn sax_transform(x: &[f64], w: usize, a: usize) -> Result<SaxWord> {
    let cuts = breakpoints(a)?;
    let segment_lengths = paa_segments(x.len(), w)?;
    let z = znormalize_values(x)?;
    let means = paa(&z, w)?;
    Ok(SaxWord {
        symbols: means.iter().map(|&m| symbol_for(m, &cuts)).collect(),
        breakpoints: cuts,
        segment_lengths,
    })
}

/// Lookup distance between two symbols: zero for equal or adjacent symbols,
/// else the gap between the cells' nearest edges.
pub fn cell_distance(r: u8, s: u8, cuts: &[f64]) -> f64 {
    let (lo, hi) = (r.min(s) as usize, r.max(s) as usize);
    if hi - lo <= 1 {
        0.0
    } else {
        cuts[hi - 1] - cuts[lo]
    }
}

/// MINDIST between two words over the same segmentation:
/// `sqrt(Σ_i len_i · cell(q_i, c_i)²)`, which equals
/// `sqrt(N/w) · sqrt(Σ_i cell²)` when all segments have equal length.
pub fn mindist(q: &SaxWord, c: &SaxWord) -> Result<f64> {
    if q.segment_lengths != c.segment_lengths || q.breakpoints.len() != c.breakpoints.len() {
        return Err(Error::ParameterMismatch(
            "SAX words differ in length, segmentation or alphabet".into(),
        ));
    }
    Ok(q.symbols
        .iter()
        .zip(&c.symbols)
        .zip(&q.segment_lengths)
        .map(|((&a, &b), &len)| len as f64 * cell_distance(a, b, &q.breakpoints).powi(2))
        .sum::<f64>()
        .sqrt())
}

pub fn d_sax(x: &[f64], y: &[f64], w: usize, a: usize) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::ParameterMismatch(format!(
            "series lengths {} and {} give different segmentations",
            x.len(),
            y.len()
        )));
    }
    mindist(&sax_transform(x, w, a)?, &sax_transform(y, w, a)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Φ by Simpson quadrature of the density from 0, inverted by bisection.
    fn quantile_oracle(p: f64) -> f64 {
        let cdf = |x: f64| {
            let n = 20_000;
            let h = x / n as f64;
            let f = |t: f64| (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
            let mut s = f(0.0) + f(x);
            for i in 1..n {
                s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            0.5 + s * h / 3.0
        };
        let (mut lo, mut hi) = (-8.0, 8.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn breakpoints_match_quadrature() {
        let b = breakpoints(3).unwrap();
        assert!((b[0] + 0.43073).abs() < 1e-5 && (b[1] - 0.43073).abs() < 1e-5);
        for a in MIN_ALPHABET..=MAX_ALPHABET {
            let b = breakpoints(a).unwrap();
            assert!(b.windows(2).all(|w| w[0] < w[1]));
            for (k, v) in b.iter().enumerate() {
                let p = (k + 1) as f64 / a as f64;
                assert!((v - quantile_oracle(p)).abs() < 1e-8, "a={a} k={k}");
            }
        }
        for p in [1e-6, 0.01, 0.02, 0.98, 0.999] {
            let v = inverse_normal_cdf(p);
            assert!((v - quantile_oracle(p)).abs() < 1e-8 * v.abs().max(1.0), "p={p}");
        }
        assert!(breakpoints(1).is_err());
        assert!(breakpoints(11).is_err());
    }

    #[test]
    fn ramp_word() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let w = sax_transform(&x, 2, 2).unwrap();
        assert_eq!(w.symbols, vec![0, 1]);
        assert_eq!(w.as_string(), "ab");
    }

    #[test]
    fn negation_reverses_symbols() {
        let x: Vec<f64> = (0..96).map(|i| (i as f64 * 0.21).sin() + 0.02 * i as f64).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        for a in [3, 4, 5, 7] {
            let p = sax_transform(&x, 8, a).unwrap();
            let q = sax_transform(&neg, 8, a).unwrap();
            for (s, t) in p.symbols.iter().zip(&q.symbols) {
                assert_eq!(*s as usize, a - 1 - *t as usize);
            }
        }
    }

    #[test]
    fn mindist_lookup_example() {
        let cuts = breakpoints(3).unwrap();
        let q = SaxWord {
            symbols: vec![0, 1],
            breakpoints: cuts.clone(),
            segment_lengths: vec![2, 2],
        };
        let c = SaxWord {
            symbols: vec![2, 0],
            breakpoints: cuts,
            segment_lengths: vec![2, 2],
        };
        let d = mindist(&q, &c).unwrap();
        assert!((d - 2f64.sqrt() * 0.86146).abs() < 1e-4);
        assert!((d - 1.21829).abs() < 1e-4);
        assert_eq!(mindist(&q, &q).unwrap(), 0.0);
    }

    #[test]
    fn unequal_segments_and_errors() {
        assert_eq!(paa_segments(10, 3).unwrap(), vec![3, 3, 4]);
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let w = sax_transform(&x, 3, 4).unwrap();
        assert_eq!(w.series_len(), 10);
        assert!(sax_transform(&x, 11, 4).is_err());
        assert!(sax_transform(&[1.0; 8], 2, 4).is_err());
        assert!(matches!(d_sax(&x, &x[..8], 2, 4), Err(Error::ParameterMismatch(_))));
    }
}
