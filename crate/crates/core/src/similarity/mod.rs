//! Distance measures between two equal-length series.
//!
//! Five families are covered: Lp distances, correlation-based distances,
//! autocorrelation-based distance, periodogram-based distances and the SAX
//! symbolic MINDIST. [`similarity_vector`] evaluates all of them with one
//! parameter set and records per-measure failures instead of aborting.

mod acf;
mod correlation;
mod lp;
mod periodogram;
mod sax;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use acf::{acf_estimate, d_acf, AcfWeights};
pub use correlation::{d_cor1, d_cor2, pearson_cor};
pub use lp::{d_euclidean, d_lp};
pub use periodogram::{d_periodogram, periodogram};
pub use sax::{
    breakpoints, cell_distance, d_sax, inverse_normal_cdf, mindist, paa, paa_segments,
    sax_transform, SaxWord,
};

use crate::error::{Error, Result};
use crate::series::znormalize_values;

/// Hours represented by one SAX symbol when the word length is derived.
pub const SAX_HOURS_PER_SYMBOL: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Euclidean,
    Cor1,
    Acf,
    PeriodogramNorm,
    Sax,
    Manhattan,
    Chebyshev,
    Minkowski,
    Cor2,
    Periodogram,
}

impl Measure {
    /// Stable export order. The first five are the family representatives.
    pub const ALL: [Measure; 10] = [
        Measure::Euclidean,
        Measure::Cor1,
        Measure::Acf,
        Measure::PeriodogramNorm,
        Measure::Sax,
        Measure::Manhattan,
        Measure::Chebyshev,
        Measure::Minkowski,
        Measure::Cor2,
        Measure::Periodogram,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Euclidean => "d_euc",
            Measure::Cor1 => "d_cor1",
            Measure::Acf => "d_acf",
            Measure::PeriodogramNorm => "d_per_norm",
            Measure::Sax => "d_sax",
            Measure::Manhattan => "d_manhattan",
            Measure::Chebyshev => "d_linf",
            Measure::Minkowski => "d_minkowski",
            Measure::Cor2 => "d_cor2",
            Measure::Periodogram => "d_per",
        }
    }

    pub fn family(self) -> Family {
        match self {
            Measure::Euclidean | Measure::Manhattan | Measure::Chebyshev | Measure::Minkowski => {
                Family::Lp
            }
            Measure::Cor1 | Measure::Cor2 => Family::Correlation,
            Measure::Acf => Family::Autocorrelation,
            Measure::PeriodogramNorm | Measure::Periodogram => Family::Periodogram,
            Measure::Sax => Family::Symbolic,
        }
    }

    fn index(self) -> usize {
        Self::ALL.iter().position(|&m| m == self).expect("listed")
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Lp,
    Correlation,
    Autocorrelation,
    Periodogram,
    Symbolic,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Lp,
        Family::Correlation,
        Family::Autocorrelation,
        Family::Periodogram,
        Family::Symbolic,
    ];

    /// Measure reported for the family in summary tables.
    pub fn representative(self) -> Measure {
        match self {
            Family::Lp => Measure::Euclidean,
            Family::Correlation => Measure::Cor1,
            Family::Autocorrelation => Measure::Acf,
            Family::Periodogram => Measure::PeriodogramNorm,
            Family::Symbolic => Measure::Sax,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimilarityParams {
    pub minkowski_p: f64,
    pub cor_beta: f64,
    pub max_lag: usize,
    pub acf_weights: AcfWeights,
    /// Derived from the series length when absent.
    pub sax_word_len: Option<usize>,
    pub sax_alphabet: usize,
    /// z-normalize both series before every measure.
    pub znormalize_first: bool,
}

impl Default for SimilarityParams {
    fn default() -> Self {
        Self {
            minkowski_p: 3.0,
            cor_beta: 1.0,
            max_lag: 48,
            acf_weights: AcfWeights::Identity,
            sax_word_len: None,
            sax_alphabet: 10,
            znormalize_first: false,
        }
    }
}

impl SimilarityParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.minkowski_p >= 1.0) {
            return bad(format!("minkowski_p must be >= 1, got {}", self.minkowski_p));
        }
        if !(self.cor_beta > 0.0 && self.cor_beta.is_finite()) {
            return bad(format!("cor_beta must be positive, got {}", self.cor_beta));
        }
        if self.max_lag == 0 {
            return bad("max_lag must be at least 1".into());
        }
        if self.sax_word_len == Some(0) {
            return bad("sax_word_len must be at least 1".into());
        }
        breakpoints(self.sax_alphabet)?;
        self.acf_weights.diagonal(self.max_lag).map(|_| ())
    }

    /// SAX word length used for series of length `n`: one symbol per
    /// [`SAX_HOURS_PER_SYMBOL`] hours, at least 1.
    pub fn word_len_for(&self, n: usize) -> usize {
        self.sax_word_len
            .unwrap_or_else(|| (n / SAX_HOURS_PER_SYMBOL).max(1))
    }
}

/// All measures between one pair of series.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityVector {
    pub params: SimilarityParams,
    /// Series length and the SAX word length actually used.
    pub n: usize,
    pub sax_word_len: usize,
    values: Vec<std::result::Result<f64, Error>>,
}

impl SimilarityVector {
    pub fn get(&self, m: Measure) -> Option<f64> {
        self.values[m.index()].as_ref().ok().copied()
    }

    pub fn outcome(&self, m: Measure) -> &std::result::Result<f64, Error> {
        &self.values[m.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Measure, Option<f64>)> + '_ {
        Measure::ALL.iter().map(move |&m| (m, self.get(m)))
    }

    pub fn csv_header() -> String {
        Measure::ALL.iter().map(|m| m.name()).collect::<Vec<_>>().join(",")
    }

    /// One comma-separated record in [`Measure::ALL`] order; failed measures are empty.
    pub fn csv_record(&self) -> String {
        self.iter()
            .map(|(_, v)| v.map(|v| v.to_string()).unwrap_or_default())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Evaluates every measure between `x` and `y`.
pub fn similarity_vector(x: &[f64], y: &[f64], params: &SimilarityParams) -> Result<SimilarityVector> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let (xs, ys);
    let (x, y) = if params.znormalize_first {
        xs = znormalize_values(x);
        ys = znormalize_values(y);
        match (&xs, &ys) {
            (Ok(a), Ok(b)) => (a.as_slice(), b.as_slice()),
            _ => {
                let err = xs.as_ref().err().or(ys.as_ref().err()).cloned().expect("one failed");
                return Ok(SimilarityVector {
                    params: params.clone(),
                    n: x.len(),
                    sax_word_len: params.word_len_for(x.len()),
                    values: vec![Err(err); Measure::ALL.len()],
                });
            }
        }
    } else {
        (x, y)
    };
    let w = params.word_len_for(x.len());
    let values = Measure::ALL
        .iter()
        .map(|m| match m {
            Measure::Euclidean => d_lp(x, y, 2.0),
            Measure::Manhattan => d_lp(x, y, 1.0),
            Measure::Chebyshev => d_lp(x, y, f64::INFINITY),
            Measure::Minkowski => d_lp(x, y, params.minkowski_p),
            Measure::Cor1 => d_cor1(x, y),
            Measure::Cor2 => d_cor2(x, y, params.cor_beta),
            Measure::Acf => d_acf(x, y, params.max_lag, &params.acf_weights),
            Measure::Periodogram => d_periodogram(x, y, false),
            Measure::PeriodogramNorm => d_periodogram(x, y, true),
            Measure::Sax => d_sax(x, y, w, params.sax_alphabet),
        })
        .collect();
    Ok(SimilarityVector {
        params: params.clone(),
        n: x.len(),
        sax_word_len: w,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn pair(seed: u64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..n)
            .map(|i| 1000.0 + 200.0 * (i as f64 * 0.26).sin() + rng.random_range(-20.0..20.0))
            .collect();
        let y: Vec<f64> = x.iter().map(|v| 1.8 * v + rng.random_range(-50.0..50.0)).collect();
        (x, y)
    }

    #[test]
    fn identical_series_give_zero_vector() {
        let (x, _) = pair(1, 200);
        let v = similarity_vector(&x, &x, &SimilarityParams::default()).unwrap();
        for (m, d) in v.iter() {
            assert_eq!(d, Some(0.0), "{m}");
        }
    }

    #[test]
    fn matches_independent_recomputation() {
        let (x, y) = pair(2, 240);
        let p = SimilarityParams::default();
        let v = similarity_vector(&x, &y, &p).unwrap();
        assert_eq!(v.sax_word_len, 60);
        let expected = [
            (Measure::Euclidean, d_euclidean(&x, &y).unwrap()),
            (Measure::Manhattan, d_lp(&x, &y, 1.0).unwrap()),
            (Measure::Chebyshev, d_lp(&x, &y, f64::INFINITY).unwrap()),
            (Measure::Minkowski, d_lp(&x, &y, 3.0).unwrap()),
            (Measure::Cor1, d_cor1(&x, &y).unwrap()),
            (Measure::Cor2, d_cor2(&x, &y, 1.0).unwrap()),
            (Measure::Acf, d_acf(&x, &y, 48, &AcfWeights::Identity).unwrap()),
            (Measure::Periodogram, d_periodogram(&x, &y, false).unwrap()),
            (Measure::PeriodogramNorm, d_periodogram(&x, &y, true).unwrap()),
            (Measure::Sax, mindist(&sax_transform(&x, 60, 10).unwrap(), &sax_transform(&y, 60, 10).unwrap()).unwrap()),
        ];
        for (m, e) in expected {
            let got = v.get(m).unwrap();
            assert!((got - e).abs() <= 1e-9 * e.abs().max(1.0), "{m}: {got} vs {e}");
        }
    }

    #[test]
    fn partial_failures_are_recorded() {
        let x: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let c = vec![5.0; 30];
        let v = similarity_vector(&x, &c, &SimilarityParams::default()).unwrap();
        assert!(v.get(Measure::Euclidean).is_some());
        assert!(v.get(Measure::Cor1).is_none());
        assert!(v.get(Measure::Acf).is_none());
        assert!(v.get(Measure::Periodogram).is_some());
        assert!(v.get(Measure::PeriodogramNorm).is_none());
        let rec = v.csv_record();
        assert_eq!(rec.split(',').count(), Measure::ALL.len());
        assert!(matches!(
            similarity_vector(&x, &x[..10], &SimilarityParams::default()),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn header_order_is_stable() {
        assert_eq!(
            SimilarityVector::csv_header(),
            "d_euc,d_cor1,d_acf,d_per_norm,d_sax,d_manhattan,d_linf,d_minkowski,d_cor2,d_per"
        );
    }

    #[test]
    fn word_length_default() {
        let p = SimilarityParams::default();
        assert_eq!(p.word_len_for(168), 42);
        assert_eq!(p.word_len_for(4000), 1000);
        assert_eq!(p.word_len_for(3), 1);
    }
}
