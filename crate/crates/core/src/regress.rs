//! Ordinary least squares via Householder QR, prediction and fit statistics.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{Column, DesignMatrix, ModelKind};

/// Columns whose QR diagonal falls below this fraction of the largest
/// diagonal entry (after scaling columns to unit norm) are rank deficient.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitStats {
    pub mae: f64,
    pub r2: f64,
    pub adj_r2: f64,
    pub n: usize,
}

/// Mean absolute error, R² and adjusted R² for `p_predictors` regressors
/// (intercept excluded).
pub fn metrics(y: &[f64], y_hat: &[f64], p_predictors: usize) -> Result<FitStats> {
    if y.len() != y_hat.len() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: y_hat.len(),
        });
    }
    let n = y.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    let nf = n as f64;
    let mae = y.iter().zip(y_hat).map(|(a, b)| (a - b).abs()).sum::<f64>() / nf;
    let mean = y.iter().sum::<f64>() / nf;
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if sst == 0.0 {
        return Err(Error::ZeroVariance("R² of a constant target"));
    }
    let sse: f64 = y.iter().zip(y_hat).map(|(a, b)| (a - b).powi(2)).sum();
    let r2 = 1.0 - sse / sst;
    if n <= p_predictors + 1 {
        return Err(Error::DegenerateDof { n, p: p_predictors });
    }
    let adj_r2 = 1.0 - (1.0 - r2) * (nf - 1.0) / (nf - p_predictors as f64 - 1.0);
    Ok(FitStats { mae, r2, adj_r2, n })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub label: String,
    pub value: f64,
}

/// A fitted linear load model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub kind: ModelKind,
    pub coefficients: Vec<Coefficient>,
    pub train_stats: Option<FitStats>,
    pub test_stats: Option<FitStats>,
    pub columns: Vec<Column>,
}

impl FittedModel {
    pub fn beta(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.value).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.coefficients.iter().map(|c| c.label.as_str()).collect()
    }

    pub fn coefficient(&self, label: &str) -> Option<f64> {
        self.coefficients.iter().find(|c| c.label == label).map(|c| c.value)
    }

    pub fn p_predictors(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// Computes and stores test-set statistics.
    pub fn evaluate_test(&mut self, test: &DesignMatrix) -> Result<FitStats> {
        let y_hat = predict(self, test)?;
        let stats = metrics(test.target(), &y_hat, self.p_predictors())?;
        self.test_stats = Some(stats);
        Ok(stats)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_toml()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&s)
    }
}

/// Least-squares solution of `a·β ≈ y` for a column-major `n × p` matrix.
///
/// Columns are scaled to unit norm, factored with Householder reflections and
/// solved by back substitution. Returns the index of the first column whose
/// diagonal entry is numerically zero on rank deficiency.
pub(crate) fn lstsq_householder(
    mut a: Vec<Vec<f64>>,
    mut y: Vec<f64>,
) -> std::result::Result<Vec<f64>, usize> {
    let p = a.len();
    let n = y.len();
    let scale: Vec<f64> = a
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    for (j, c) in a.iter_mut().enumerate() {
        if scale[j] == 0.0 {
            return Err(j);
        }
        c.iter_mut().for_each(|v| *v /= scale[j]);
    }

    let mut diag = vec![0.0; p];
    for k in 0..p {
        let norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        diag[k] = alpha;
        if norm == 0.0 {
            continue;
        }
        // v = x - alpha e1, stored in place
        a[k][k] -= alpha;
        let vnorm2: f64 = a[k][k..].iter().map(|v| v * v).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let (head, tail) = a.split_at_mut(k + 1);
        let v = &head[k][k..];
        for col in tail.iter_mut() {
            let dot: f64 = v.iter().zip(&col[k..]).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm2;
            col[k..].iter_mut().zip(v).for_each(|(c, vi)| *c -= f * vi);
        }
        let dot: f64 = v.iter().zip(&y[k..]).map(|(a, b)| a * b).sum();
        let f = 2.0 * dot / vnorm2;
        y[k..].iter_mut().zip(v).for_each(|(c, vi)| *c -= f * vi);
    }
    let max_diag = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    if let Some(j) = diag.iter().position(|d| d.abs() <= RANK_TOL * max_diag) {
        return Err(j);
    }
    debug_assert!(n >= p);

    let mut beta = vec![0.0; p];
    for k in (0..p).rev() {
        let s: f64 = ((k + 1)..p).map(|j| a[j][k] * beta[j]).sum();
        beta[k] = (y[k] - s) / diag[k];
    }
    Ok(beta.iter().zip(&scale).map(|(b, s)| b / s).collect())
}

/// Least squares on raw column vectors; columns must share `y`'s length.
pub fn lstsq(columns: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    if let Some(c) = columns.iter().find(|c| c.len() != y.len()) {
        return Err(Error::LengthMismatch {
            left: c.len(),
            right: y.len(),
        });
    }
    if y.len() < columns.len() {
        return Err(Error::TooShort {
            needed: columns.len(),
            got: y.len(),
        });
    }
    lstsq_householder(columns.to_vec(), y.to_vec()).map_err(|j| Error::RankDeficient {
        column: format!("#{j}"),
    })
}

/// Fits `target ≈ Xβ` by least squares and records training statistics.
pub fn fit_ols(x: &DesignMatrix) -> Result<FittedModel> {
    let (n, p) = (x.rows(), x.cols());
    if n < p {
        return Err(Error::TooShort { needed: p, got: n });
    }
    if let Some(index) = x.target().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let cols: Vec<Vec<f64>> = (0..p).map(|j| (0..n).map(|i| x.get(i, j)).collect()).collect();
    let beta = lstsq_householder(cols, x.target().to_vec()).map_err(|j| Error::RankDeficient {
        column: x.columns()[j].label.clone(),
    })?;
    let mut model = FittedModel {
        kind: x.kind(),
        coefficients: x
            .columns()
            .iter()
            .zip(&beta)
            .map(|(c, &value)| Coefficient {
                label: c.label.clone(),
                value,
            })
            .collect(),
        train_stats: None,
        test_stats: None,
        columns: x.columns().to_vec(),
    };
    let y_hat = predict(&model, x)?;
    model.train_stats = match metrics(x.target(), &y_hat, p.saturating_sub(1)) {
        Ok(s) => Some(s),
        Err(e) => {
            log::warn!("training statistics unavailable: {e}");
            None
        }
    };
    Ok(model)
}

/// `ŷ = Xβ`. Column labels must match the model exactly.
pub fn predict(model: &FittedModel, x: &DesignMatrix) -> Result<Vec<f64>> {
    if x.cols() != model.coefficients.len()
        || x.columns().iter().zip(&model.coefficients).any(|(c, b)| c.label != b.label)
    {
        return Err(Error::SchemaMismatch(format!(
            "design has {} columns, model expects {}",
            x.cols(),
            model.coefficients.len()
        )));
    }
    let beta = model.beta();
    Ok((0..x.rows())
        .map(|i| x.row(i).iter().zip(&beta).map(|(a, b)| a * b).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Normal-equations solve with Gaussian elimination, test oracle only.
    fn normal_equations(a: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
        let p = a.len();
        let mut m = vec![vec![0.0; p + 1]; p];
        for i in 0..p {
            for j in 0..p {
                m[i][j] = a[i].iter().zip(&a[j]).map(|(x, y)| x * y).sum();
            }
            m[i][p] = a[i].iter().zip(y).map(|(x, y)| x * y).sum();
        }
        for k in 0..p {
            let piv = (k..p).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs())).unwrap();
            m.swap(k, piv);
            for i in (k + 1)..p {
                let f = m[i][k] / m[k][k];
                for j in k..=p {
                    m[i][j] -= f * m[k][j];
                }
            }
        }
        let mut b = vec![0.0; p];
        for k in (0..p).rev() {
            let s: f64 = ((k + 1)..p).map(|j| m[k][j] * b[j]).sum();
            b[k] = (m[k][p] - s) / m[k][k];
        }
        b
    }

    fn random_system(rng: &mut ChaCha8Rng, n: usize, p: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        let a: Vec<Vec<f64>> = (0..p)
            .map(|j| {
                (0..n)
                    .map(|_| if j == 0 { 1.0 } else { rng.random_range(-1.0..1.0) })
                    .collect()
            })
            .collect();
        let y = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        (a, y)
    }

    #[test]
    fn exact_line() {
        let a = vec![vec![1.0; 3], vec![0.0, 1.0, 2.0]];
        let b = lstsq_householder(a, vec![1.0, 3.0, 5.0]).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-14 && (b[1] - 2.0).abs() < 1e-14, "{b:?}");
    }

    #[test]
    fn duplicate_column_is_rank_deficient() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let a = vec![vec![1.0; 10], x.clone(), x];
        assert_eq!(lstsq_householder(a, vec![1.0; 10]), Err(2));
    }

    #[test]
    fn matches_normal_equations_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (a, y) = random_system(&mut rng, 50, 5);
        let qr = lstsq_householder(a.clone(), y.clone()).unwrap();
        let ne = normal_equations(&a, &y);
        for (q, o) in qr.iter().zip(&ne) {
            assert!((q - o).abs() <= 1e-8 * o.abs().max(1e-12), "{q} vs {o}");
        }
    }

    #[test]
    fn residuals_orthogonal_to_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (a, y) = random_system(&mut rng, 80, 6);
        let b = lstsq_householder(a.clone(), y.clone()).unwrap();
        let resid: Vec<f64> = (0..80)
            .map(|i| y[i] - (0..6).map(|j| a[j][i] * b[j]).sum::<f64>())
            .collect();
        let rn = resid.iter().map(|r| r * r).sum::<f64>().sqrt();
        for col in &a {
            let cn = col.iter().map(|r| r * r).sum::<f64>().sqrt();
            let dot: f64 = col.iter().zip(&resid).map(|(c, r)| c * r).sum();
            assert!(dot.abs() <= 1e-6 * cn * rn.max(1.0));
        }
    }

    #[test]
    fn noiseless_recovery() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let (a, _) = random_system(&mut rng, 60, 7);
            let truth: Vec<f64> = (0..7).map(|_| rng.random_range(-5.0..5.0)).collect();
            let y: Vec<f64> = (0..60)
                .map(|i| (0..7).map(|j| a[j][i] * truth[j]).sum())
                .collect();
            let b = lstsq_householder(a, y).unwrap();
            for (p, q) in b.iter().zip(&truth) {
                assert!((p - q).abs() <= 1e-8 * q.abs().max(1.0));
            }
        }
    }

    #[test]
    fn metric_examples() {
        let s = metrics(&[1.0, 2.0, 4.0], &[1.0, 2.0, 4.0], 0).unwrap();
        assert_eq!((s.mae, s.r2), (0.0, 1.0));
        assert!(matches!(metrics(&[0.0, 0.0], &[1.0, 3.0], 0), Err(Error::ZeroVariance(_))));
        let mae = [0.0f64, 0.0].iter().zip([1.0, 3.0]).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0;
        assert_eq!(mae, 2.0);
        assert!(matches!(
            metrics(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 2),
            Err(Error::DegenerateDof { n: 3, p: 2 })
        ));
    }

    #[test]
    fn adjusted_r2_formula() {
        // construct n=100 with r2 = 0.9 exactly: SSE/SST = 0.1
        let y: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        // SST = 100; residual r on every point with 100 r² = 10
        let r = 0.1f64.sqrt();
        let y_hat: Vec<f64> = y.iter().map(|v| v - r).collect();
        let s = metrics(&y, &y_hat, 10).unwrap();
        assert!((s.r2 - 0.9).abs() < 1e-12);
        let expected = 1.0 - 0.1 * 99.0 / 89.0;
        assert!((s.adj_r2 - expected).abs() < 1e-12);
        assert!((s.adj_r2 - 0.88876).abs() < 1e-5);
    }

    #[test]
    fn matches_grid_refinement_on_two_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<f64> = (0..40).map(|_| rng.random_range(0.0..10.0)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 - 0.7 * x + rng.random_range(-1.0..1.0)).collect();
        let b = lstsq_householder(vec![vec![1.0; 40], xs.clone()], ys.clone()).unwrap();

        let sse = |b0: f64, b1: f64| -> f64 {
            xs.iter().zip(&ys).map(|(x, y)| (y - b0 - b1 * x).powi(2)).sum()
        };
        let (mut c0, mut c1, mut h) = (0.0, 0.0, 4.0);
        for _ in 0..60 {
            let mut best = (sse(c0, c1), c0, c1);
            for i in -10..=10 {
                for j in -10..=10 {
                    let (p, q) = (c0 + h * i as f64 / 10.0, c1 + h * j as f64 / 10.0);
                    let v = sse(p, q);
                    if v < best.0 {
                        best = (v, p, q);
                    }
                }
            }
            c0 = best.1;
            c1 = best.2;
            h *= 0.5;
        }
        let pred = |b0: f64, b1: f64| xs.iter().map(|x| b0 + b1 * x).collect::<Vec<_>>();
        let m_qr = metrics(&ys, &pred(b[0], b[1]), 1).unwrap();
        let m_grid = metrics(&ys, &pred(c0, c1), 1).unwrap();
        assert!((m_qr.mae - m_grid.mae).abs() < 1e-4);
        assert!((m_qr.r2 - m_grid.r2).abs() < 1e-4);
    }

    proptest::proptest! {
        #[test]
        fn r2_never_decreases_with_added_column(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (mut a, y) = random_system(&mut rng, 30, 4);
            let fit = |a: &Vec<Vec<f64>>| {
                let b = lstsq_householder(a.clone(), y.clone()).unwrap();
                let yh: Vec<f64> = (0..30).map(|i| a.iter().zip(&b).map(|(c, bj)| c[i] * bj).sum()).collect();
                metrics(&y, &yh, a.len() - 1).unwrap().r2
            };
            let r_small = fit(&a);
            a.push((0..30).map(|_| rng.random_range(-1.0..1.0)).collect());
            let r_big = fit(&a);
            proptest::prop_assert!(r_big >= r_small - 1e-12);
            proptest::prop_assert!((0.0..=1.0 + 1e-12).contains(&r_big));
        }
    }
}
