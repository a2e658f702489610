//! Similarity-band anomaly detection on pairs of zonal forecasts.
//!
//! A [`Baseline`] records, per similarity measure, the mean and spread of the
//! measure between two zones' clean forecasts over random windows. A window
//! violates the constraint for measure `m` when
//! `g_m = |d_m − μ_m| − τ·σ_m > 0`.

use std::ops::Range;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::attack::{projected_gradient_attack, AttackKind, AttackSpec, ForecastSurface, LinearModelSurface};
use crate::error::{Error, Result};
use crate::features::{build_design, split_indices, FeatureOptions, ModelKind, WEEK};
use crate::regress::{fit_ols, predict, FittedModel};
use crate::seed::{derive_seed, stage_rng};
use crate::series::{sample_mean_sd, HourlyTimestamp, ZonalDataset, ZERO_VARIANCE_TOL};
use crate::similarity::{similarity_vector, Measure, SimilarityParams, SimilarityVector};

pub const DEFAULT_TAU: f64 = 3.0;
pub const DEFAULT_WINDOW: usize = WEEK;
pub const DEFAULT_WINDOWS: usize = 50;
pub const MIN_WINDOWS: usize = 20;

/// Clean-window statistics of one measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureBaseline {
    pub measure: Measure,
    pub mean: f64,
    pub sd: f64,
    pub q50: f64,
    pub q95: f64,
    pub q99: f64,
    /// Windows on which the measure was defined.
    pub n_valid: usize,
    /// Zero or undefined spread; never flags.
    pub excluded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub params: SimilarityParams,
    pub window_length: usize,
    pub n_windows: usize,
    pub measures: Vec<MeasureBaseline>,
}

impl Baseline {
    pub fn stat(&self, m: Measure) -> &MeasureBaseline {
        self.measures
            .iter()
            .find(|s| s.measure == m)
            .expect("every measure is calibrated")
    }

    pub fn csv_header() -> &'static str {
        "measure,mean,sd,q50,q95,q99,n_valid,excluded"
    }

    pub fn csv_records(&self) -> Vec<String> {
        self.measures
            .iter()
            .map(|s| {
                format!(
                    "{},{},{},{},{},{},{},{}",
                    s.measure, s.mean, s.sd, s.q50, s.q95, s.q99, s.n_valid, s.excluded
                )
            })
            .collect()
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn baseline_from_vectors(
    vectors: &[SimilarityVector],
    params: &SimilarityParams,
    window_length: usize,
) -> Baseline {
    let measures = Measure::ALL
        .iter()
        .map(|&m| {
            let mut vals: Vec<f64> = vectors.iter().filter_map(|v| v.get(m)).filter(|v| v.is_finite()).collect();
            vals.sort_by(f64::total_cmp);
            let stats = (vals.len() >= 2).then(|| sample_mean_sd(&vals).ok()).flatten();
            match stats {
                Some((mean, sd)) => MeasureBaseline {
                    measure: m,
                    mean,
                    sd,
                    q50: quantile(&vals, 0.5),
                    q95: quantile(&vals, 0.95),
                    q99: quantile(&vals, 0.99),
                    n_valid: vals.len(),
                    excluded: sd <= ZERO_VARIANCE_TOL * mean.abs().max(1.0),
                },
                None => MeasureBaseline {
                    measure: m,
                    mean: f64::NAN,
                    sd: f64::NAN,
                    q50: f64::NAN,
                    q95: f64::NAN,
                    q99: f64::NAN,
                    n_valid: vals.len(),
                    excluded: true,
                },
            }
        })
        .collect();
    Baseline {
        params: params.clone(),
        window_length,
        n_windows: vectors.len(),
        measures,
    }
}

/// Draws `n` window starts uniformly with replacement.
pub fn bootstrap_starts(len: usize, window_length: usize, n: usize, seed: u64) -> Result<Vec<usize>> {
    if window_length == 0 || len < window_length {
        return Err(Error::InsufficientData(format!(
            "{len} points cannot hold a {window_length}-hour window"
        )));
    }
    let mut rng = stage_rng(seed, "detect/windows");
    Ok((0..n).map(|_| rng.random_range(0..=len - window_length)).collect())
}

/// Calibrates per-measure bands between `x` and `y` (two zones' clean
/// forecasts over the same hours) from `n_windows` bootstrap windows.
pub fn calibrate_baseline(
    x: &[f64],
    y: &[f64],
    window_length: usize,
    n_windows: usize,
    params: &SimilarityParams,
    seed: u64,
) -> Result<Baseline> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if n_windows < MIN_WINDOWS {
        return Err(Error::InvalidParameter(format!(
            "calibration needs at least {MIN_WINDOWS} windows, got {n_windows}"
        )));
    }
    let starts = bootstrap_starts(x.len(), window_length, n_windows, seed)?;
    let vectors = starts
        .iter()
        .map(|&s| similarity_vector(&x[s..s + window_length], &y[s..s + window_length], params))
        .collect::<Result<Vec<_>>>()?;
    let b = baseline_from_vectors(&vectors, params, window_length);
    for s in b.measures.iter().filter(|s| s.excluded) {
        log::info!("measure {} excluded from flagging: degenerate spread", s.measure);
    }
    Ok(b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureVerdict {
    pub measure: Measure,
    pub observed: Option<f64>,
    pub z: Option<f64>,
    pub g: Option<f64>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionVerdict {
    pub tau: f64,
    pub k: usize,
    pub measures: Vec<MeasureVerdict>,
    pub n_flagged: usize,
    pub any_flag: bool,
    /// At least `k` measures flagged.
    pub k_of_n_flag: bool,
}

impl DetectionVerdict {
    pub fn get(&self, m: Measure) -> &MeasureVerdict {
        self.measures.iter().find(|v| v.measure == m).expect("every measure is scored")
    }

    pub fn csv_header() -> String {
        let mut cols = vec!["any_flag".to_string(), "k_of_n_flag".into(), "n_flagged".into()];
        for m in Measure::ALL {
            cols.extend([format!("{m}"), format!("{m}_z"), format!("{m}_flag")]);
        }
        cols.join(",")
    }

    pub fn csv_record(&self) -> String {
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        let mut cols = vec![self.any_flag.to_string(), self.k_of_n_flag.to_string(), self.n_flagged.to_string()];
        for v in &self.measures {
            cols.extend([opt(v.observed), opt(v.z), v.flagged.to_string()]);
        }
        cols.join(",")
    }
}

fn check_threshold(tau: f64, k: usize) -> Result<()> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    if k == 0 || k > Measure::ALL.len() {
        return Err(Error::InvalidParameter(format!(
            "k must lie in [1, {}], got {k}",
            Measure::ALL.len()
        )));
    }
    Ok(())
}

/// Scores an already computed similarity vector against the baseline.
pub fn evaluate_vector(v: &SimilarityVector, baseline: &Baseline, tau: f64, k: usize) -> Result<DetectionVerdict> {
    check_threshold(tau, k)?;
    if v.params != baseline.params || v.n != baseline.window_length {
        return Err(Error::ParameterMismatch(format!(
            "window of {} hours scored against a baseline of {}-hour windows with {} parameters",
            v.n,
            baseline.window_length,
            if v.params == baseline.params { "matching" } else { "different" }
        )));
    }
    let measures: Vec<MeasureVerdict> = baseline
        .measures
        .iter()
        .map(|s| {
            let observed = v.get(s.measure);
            let (z, g) = match observed {
                Some(d) if !s.excluded => (Some((d - s.mean) / s.sd), Some((d - s.mean).abs() - tau * s.sd)),
                _ => (None, None),
            };
            MeasureVerdict {
                measure: s.measure,
                observed,
                z,
                g,
                flagged: g.is_some_and(|g| g > 0.0),
            }
        })
        .collect();
    let n_flagged = measures.iter().filter(|m| m.flagged).count();
    Ok(DetectionVerdict {
        tau,
        k,
        measures,
        n_flagged,
        any_flag: n_flagged > 0,
        k_of_n_flag: n_flagged >= k,
    })
}

/// Evaluates `g_m` for every measure on one window of the forecast pair.
pub fn evaluate_constraints(x: &[f64], y: &[f64], baseline: &Baseline, tau: f64, k: usize) -> Result<DetectionVerdict> {
    if x.len() != baseline.window_length {
        return Err(Error::ParameterMismatch(format!(
            "window of {} hours scored against a baseline of {}-hour windows",
            x.len(),
            baseline.window_length
        )));
    }
    evaluate_vector(&similarity_vector(x, y, &baseline.params)?, baseline, tau, k)
}

/// What the detector compares between the two zones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSource {
    #[default]
    Forecast,
    /// Observed loads; temperature attacks leave them unchanged.
    RawLoad,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectConfig {
    pub model_kind: ModelKind,
    pub weekday_only: bool,
    /// Paired with the attacked zone; the first other zone when absent.
    pub reference_zone: Option<String>,
    pub tau: f64,
    pub k: usize,
    pub window_length: usize,
    pub n_windows: usize,
    pub n_trials: usize,
    pub train_ratio: f64,
    pub source: PairSource,
    pub similarity: SimilarityParams,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self {
            model_kind: ModelKind::F2,
            weekday_only: false,
            reference_zone: None,
            tau: DEFAULT_TAU,
            k: 2,
            window_length: DEFAULT_WINDOW,
            n_windows: DEFAULT_WINDOWS,
            n_trials: 50,
            train_ratio: 0.7,
            source: PairSource::Forecast,
            similarity: SimilarityParams::default(),
        }
    }
}

/// Fitted models, clean forecast pair and baseline for one dataset.
#[derive(Debug, Clone)]
pub struct DetectionSetup {
    pub target_zone: String,
    pub reference_zone: String,
    pub target_model: FittedModel,
    pub reference_model: FittedModel,
    pub row_timestamps: Vec<HourlyTimestamp>,
    /// Clean series compared by the detector, one value per design row.
    pub target_series: Vec<f64>,
    pub reference_series: Vec<f64>,
    pub baseline: Baseline,
    source: PairSource,
    surface: Option<LinearModelSurface>,
    features: FeatureOptions,
}

fn fit_on_split(kind: ModelKind, ds: &ZonalDataset, zone: &str, opts: FeatureOptions, ratio: f64, seed: u64) -> Result<(FittedModel, Vec<f64>, crate::features::DesignMatrix)> {
    let x = build_design(kind, ds.zone(zone)?, opts)?;
    let (train, test) = split_indices(x.rows(), ratio, derive_seed(seed, "detect/split"))?;
    let mut model = fit_ols(&x.select_rows(&train))?;
    model.evaluate_test(&x.select_rows(&test))?;
    let forecast = predict(&model, &x)?;
    Ok((model, forecast, x))
}

impl DetectionSetup {
    /// Fits both zones' models on their training rows, forecasts every row
    /// and calibrates the baseline on the clean pair.
    pub fn prepare(dataset: &ZonalDataset, target_zone: &str, cfg: &DetectConfig, seed: u64) -> Result<Self> {
        dataset.require_pairs()?;
        dataset.zone(target_zone)?;
        let reference_zone = match &cfg.reference_zone {
            Some(z) => {
                dataset.zone(z)?;
                if z == target_zone {
                    return Err(Error::InvalidParameter("reference zone equals the attacked zone".into()));
                }
                z.clone()
            }
            None => dataset
                .zone_ids()
                .find(|z| *z != target_zone)
                .expect("at least two zones")
                .to_string(),
        };
        let opts = FeatureOptions {
            weekday_only: cfg.weekday_only,
        };
        let (target_model, target_forecast, x) =
            fit_on_split(cfg.model_kind, dataset, target_zone, opts, cfg.train_ratio, seed)?;
        let (reference_model, reference_forecast, xr) =
            fit_on_split(cfg.model_kind, dataset, &reference_zone, opts, cfg.train_ratio, seed)?;
        debug_assert_eq!(x.row_timestamps(), xr.row_timestamps());
        let (target_series, reference_series, surface) = match cfg.source {
            PairSource::Forecast => (
                target_forecast,
                reference_forecast,
                Some(LinearModelSurface::new(&target_model, x.clone())?),
            ),
            PairSource::RawLoad => (x.target().to_vec(), xr.target().to_vec(), None),
        };
        let baseline = calibrate_baseline(
            &target_series,
            &reference_series,
            cfg.window_length,
            cfg.n_windows,
            &cfg.similarity,
            derive_seed(seed, "detect/calibrate"),
        )?;
        Ok(Self {
            target_zone: target_zone.to_string(),
            reference_zone,
            target_model,
            reference_model,
            row_timestamps: x.row_timestamps().to_vec(),
            target_series,
            reference_series,
            baseline,
            source: cfg.source,
            surface,
            features: opts,
        })
    }

    /// Target-zone series over `rows` after the attack, with the shift
    /// relative to the clean series.
    fn attacked_window(&self, rows: Range<usize>, attack: &AttackKind, seed: u64) -> Result<Vec<f64>> {
        let Some(surface) = &self.surface else {
            return Ok(self.target_series[rows].to_vec());
        };
        let local = surface.restrict(rows);
        let delta = match attack {
            AttackKind::Gaussian { mean, sd } => {
                let dist = Normal::new(*mean, *sd)
                    .map_err(|e| Error::InvalidParameter(format!("gaussian attack: {e}")))?;
                let mut rng = stage_rng(seed, "detect/noise");
                (0..local.rows()).map(|_| dist.sample(&mut rng)).collect()
            }
            AttackKind::BoundedOpt {
                epsilon,
                norm,
                direction,
                max_iters,
                step_size,
            } => {
                let step = step_size.unwrap_or(epsilon / 50.0);
                projected_gradient_attack(&local, *epsilon, *norm, *direction, *max_iters, step).delta
            }
        };
        Ok(local.forecast(&delta))
    }

    /// Runs `n_trials` attacked windows and scores each window before and
    /// after the attack.
    pub fn run_trials(&self, attack: &AttackKind, n_trials: usize, tau: f64, k: usize, seed: u64) -> Result<ExperimentOutcome> {
        if n_trials == 0 {
            return Err(Error::InvalidParameter("n_trials must be at least 1".into()));
        }
        AttackSpec {
            kind: attack.clone(),
            target_zone: self.target_zone.clone(),
            seed,
        }
        .validate()?;
        check_threshold(tau, k)?;
        let w = self.baseline.window_length;
        let starts = bootstrap_starts(self.target_series.len(), w, n_trials, derive_seed(seed, "detect/trials"))?;
        let mut trials = Vec::with_capacity(n_trials);
        for (i, &s) in starts.iter().enumerate() {
            let rows = s..s + w;
            let clean_surface = self.surface.as_ref().map(|sf| sf.restrict(rows.clone()).forecast(&vec![0.0; w]));
            let clean = clean_surface.unwrap_or_else(|| self.target_series[rows.clone()].to_vec());
            let attacked = self.attacked_window(rows.clone(), attack, derive_seed(seed, &format!("detect/trial/{i}")))?;
            let reference = &self.reference_series[rows];
            let shift = attacked.iter().zip(&clean).map(|(a, c)| a - c).sum::<f64>() / w as f64;
            trials.push(TrialRecord {
                trial: i,
                start: self.row_timestamps[s],
                clean: evaluate_constraints(&clean, reference, &self.baseline, tau, k)?,
                attacked: evaluate_constraints(&attacked, reference, &self.baseline, tau, k)?,
                mean_shift: shift,
            });
        }
        Ok(ExperimentOutcome {
            summary: ExperimentSummary::from_trials(&trials),
            trials,
            baseline: self.baseline.clone(),
        })
    }

    /// Scores `n` random clean windows of another dataset with this setup's
    /// models and baseline.
    pub fn held_out_verdicts(&self, other: &ZonalDataset, n: usize, tau: f64, k: usize, seed: u64) -> Result<Vec<DetectionVerdict>> {
        let series = |zone: &str, model: &FittedModel| -> Result<Vec<f64>> {
            let x = build_design(model.kind, other.zone(zone)?, self.features)?;
            match self.source {
                PairSource::Forecast => predict(model, &x),
                PairSource::RawLoad => Ok(x.target().to_vec()),
            }
        };
        let a = series(&self.target_zone, &self.target_model)?;
        let b = series(&self.reference_zone, &self.reference_model)?;
        let w = self.baseline.window_length;
        bootstrap_starts(a.len(), w, n, derive_seed(seed, "detect/held_out"))?
            .into_iter()
            .map(|s| evaluate_constraints(&a[s..s + w], &b[s..s + w], &self.baseline, tau, k))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub start: HourlyTimestamp,
    pub clean: DetectionVerdict,
    pub attacked: DetectionVerdict,
    /// Mean attacked-minus-clean forecast over the window, MW.
    pub mean_shift: f64,
}

impl TrialRecord {
    pub fn csv_header() -> String {
        let v = DetectionVerdict::csv_header();
        let prefixed = |p: &str| v.split(',').map(|c| format!("{p}_{c}")).collect::<Vec<_>>().join(",");
        format!("trial,start,mean_shift_mw,{},{}", prefixed("clean"), prefixed("attacked"))
    }

    pub fn csv_record(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.trial,
            self.start,
            self.mean_shift,
            self.clean.csv_record(),
            self.attacked.csv_record()
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureRates {
    pub measure: Measure,
    pub detection_rate: f64,
    pub false_positive_rate: f64,
    pub mean_z_clean: f64,
    pub mean_z_attacked: f64,
    pub mean_abs_z_attacked: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub n_trials: usize,
    /// Any-measure rule.
    pub detection_rate: f64,
    pub false_positive_rate: f64,
    pub k_of_n_detection_rate: f64,
    pub k_of_n_false_positive_rate: f64,
    pub per_measure: Vec<MeasureRates>,
    pub mean_forecast_shift: f64,
}

fn mean_of(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

impl ExperimentSummary {
    pub fn from_trials(trials: &[TrialRecord]) -> Self {
        let n = trials.len() as f64;
        let rate = |f: &dyn Fn(&TrialRecord) -> bool| trials.iter().filter(|t| f(t)).count() as f64 / n;
        let per_measure = Measure::ALL
            .iter()
            .map(|&m| MeasureRates {
                measure: m,
                detection_rate: rate(&|t| t.attacked.get(m).flagged),
                false_positive_rate: rate(&|t| t.clean.get(m).flagged),
                mean_z_clean: mean_of(trials.iter().filter_map(|t| t.clean.get(m).z)),
                mean_z_attacked: mean_of(trials.iter().filter_map(|t| t.attacked.get(m).z)),
                mean_abs_z_attacked: mean_of(trials.iter().filter_map(|t| t.attacked.get(m).z.map(f64::abs))),
            })
            .collect();
        Self {
            n_trials: trials.len(),
            detection_rate: rate(&|t| t.attacked.any_flag),
            false_positive_rate: rate(&|t| t.clean.any_flag),
            k_of_n_detection_rate: rate(&|t| t.attacked.k_of_n_flag),
            k_of_n_false_positive_rate: rate(&|t| t.clean.k_of_n_flag),
            per_measure,
            mean_forecast_shift: mean_of(trials.iter().map(|t| t.mean_shift)),
        }
    }

    pub fn rates_header() -> &'static str {
        "measure,detection_rate,false_positive_rate,mean_z_clean,mean_z_attacked,mean_abs_z_attacked"
    }

    /// Per-measure rows followed by `any` and `k_of_n` rows.
    pub fn rates_records(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .per_measure
            .iter()
            .map(|r| {
                format!(
                    "{},{},{},{},{},{}",
                    r.measure, r.detection_rate, r.false_positive_rate, r.mean_z_clean, r.mean_z_attacked, r.mean_abs_z_attacked
                )
            })
            .collect();
        out.push(format!("any,{},{},,,", self.detection_rate, self.false_positive_rate));
        out.push(format!("k_of_n,{},{},,,", self.k_of_n_detection_rate, self.k_of_n_false_positive_rate));
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub summary: ExperimentSummary,
    pub trials: Vec<TrialRecord>,
    pub baseline: Baseline,
}

/// Fits on the clean training rows, calibrates, then attacks the target
/// zone on `cfg.n_trials` random windows and scores each against the
/// reference zone.
pub fn detection_experiment(dataset: &ZonalDataset, attack: &AttackSpec, cfg: &DetectConfig, seed: u64) -> Result<ExperimentOutcome> {
    attack.validate()?;
    let setup = DetectionSetup::prepare(dataset, &attack.target_zone, cfg, seed)?;
    setup.run_trials(&attack.kind, cfg.n_trials, cfg.tau, cfg.k, derive_seed(seed, &format!("attack/{}", attack.seed)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_synthetic, SynthConfig};

    fn pair(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = stage_rng(seed, "test");
        let x: Vec<f64> = (0..n)
            .map(|i| 1000.0 + 300.0 * (i as f64 * std::f64::consts::PI / 12.0).sin() + rng.random_range(-30.0..30.0))
            .collect();
        let y = x.iter().map(|v| 2.0 * v + rng.random_range(-80.0..80.0)).collect();
        (x, y)
    }

    #[test]
    fn identical_windows_exclude_everything() {
        let x = vec![5.0; 200];
        let y = vec![7.0; 200];
        let b = calibrate_baseline(&x, &y, 20, 25, &SimilarityParams::default(), 1).unwrap();
        assert!(b.measures.iter().all(|s| s.excluded));
        assert!(b.stat(Measure::Euclidean).sd < 1e-12);
        let v = evaluate_constraints(&[100.0; 20], &y[..20], &b, 3.0, 1).unwrap();
        assert!(!v.any_flag && v.n_flagged == 0);
    }

    #[test]
    fn calibration_is_deterministic_and_ordered() {
        let (x, y) = pair(2000, 3);
        let p = SimilarityParams::default();
        let a = calibrate_baseline(&x, &y, 168, 50, &p, 9).unwrap();
        let b = calibrate_baseline(&x, &y, 168, 50, &p, 9).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
        assert_eq!(a.n_windows, 50);
        for s in &a.measures {
            assert!(s.sd >= 0.0);
            assert!(s.q99 >= s.q95 && s.q95 >= s.q50, "{:?}", s.measure);
        }
    }

    #[test]
    fn calibration_errors() {
        let (x, y) = pair(100, 1);
        let p = SimilarityParams::default();
        assert!(matches!(calibrate_baseline(&x, &y, 168, 50, &p, 1), Err(Error::InsufficientData(_))));
        assert!(matches!(calibrate_baseline(&x, &y, 24, 19, &p, 1), Err(Error::InvalidParameter(_))));
        assert!(matches!(calibrate_baseline(&x, &y[..50], 24, 20, &p, 1), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn threshold_examples() {
        let (x, y) = pair(2000, 4);
        let b = calibrate_baseline(&x, &y, 168, 50, &SimilarityParams::default(), 2).unwrap();
        let mut v = similarity_vector(&x[..168], &y[..168], &b.params).unwrap();
        // substitute exact observations through a vector built from the baseline
        let s = b.stat(Measure::Euclidean).clone();
        let verdict = evaluate_vector(&v, &b, 3.0, 1).unwrap();
        let got = verdict.get(Measure::Euclidean);
        let d = got.observed.unwrap();
        assert_eq!(got.g.unwrap(), (d - s.mean).abs() - 3.0 * s.sd);
        assert_eq!(got.flagged, got.g.unwrap() > 0.0);

        // center and band crossing via a scaled copy of the pair
        let scale_to = |target: f64| {
            let base = d;
            let f = target / base;
            let y2: Vec<f64> = x[..168].iter().zip(&y[..168]).map(|(a, b)| a + f * (b - a)).collect();
            y2
        };
        let y_center = scale_to(s.mean);
        v = similarity_vector(&x[..168], &y_center, &b.params).unwrap();
        let at_center = evaluate_vector(&v, &b, 3.0, 1).unwrap();
        let g = at_center.get(Measure::Euclidean).g.unwrap();
        assert!((g + 3.0 * s.sd).abs() < 1e-6 * s.sd);
        assert!(!at_center.get(Measure::Euclidean).flagged);
        let y_far = scale_to(s.mean + 4.0 * s.sd);
        let far = evaluate_constraints(&x[..168], &y_far, &b, 3.0, 1).unwrap();
        assert!(far.get(Measure::Euclidean).flagged);
        assert!(far.any_flag);
    }

    #[test]
    fn parameter_mismatch() {
        let (x, y) = pair(1000, 5);
        let b = calibrate_baseline(&x, &y, 168, 20, &SimilarityParams::default(), 2).unwrap();
        assert!(matches!(evaluate_constraints(&x[..100], &y[..100], &b, 3.0, 1), Err(Error::ParameterMismatch(_))));
        let other = SimilarityParams {
            max_lag: 24,
            ..SimilarityParams::default()
        };
        let v = similarity_vector(&x[..168], &y[..168], &other).unwrap();
        assert!(matches!(evaluate_vector(&v, &b, 3.0, 1), Err(Error::ParameterMismatch(_))));
        assert!(evaluate_constraints(&x[..168], &y[..168], &b, 0.0, 1).is_err());
    }

    #[test]
    fn self_consistency_at_large_tau() {
        let (x, y) = pair(1500, 6);
        let p = SimilarityParams::default();
        let seed = 8;
        let b = calibrate_baseline(&x, &y, 168, 30, &p, seed).unwrap();
        let starts = bootstrap_starts(x.len(), 168, 30, seed).unwrap();
        let zs: Vec<f64> = starts
            .iter()
            .flat_map(|&s| {
                let v = evaluate_constraints(&x[s..s + 168], &y[s..s + 168], &b, 1.0, 1).unwrap();
                v.measures.into_iter().filter_map(|m| m.z.map(f64::abs)).collect::<Vec<_>>()
            })
            .collect();
        let tau = zs.iter().cloned().fold(0.0, f64::max) + 1e-9;
        for &s in &starts {
            let v = evaluate_constraints(&x[s..s + 168], &y[s..s + 168], &b, tau, 1).unwrap();
            assert!(v.measures.iter().all(|m| m.g.is_none_or(|g| g <= 0.0)));
        }
    }

    fn small_dataset(seed: u64) -> ZonalDataset {
        generate_synthetic(&SynthConfig {
            n_hours: 2000,
            seed,
            ..SynthConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn null_attack_matches_false_positives() {
        let ds = small_dataset(2);
        let cfg = DetectConfig {
            model_kind: ModelKind::F1,
            n_trials: 30,
            ..DetectConfig::default()
        };
        let spec = AttackSpec {
            kind: AttackKind::gaussian(0.0),
            target_zone: "WEST".into(),
            seed: 0,
        };
        let out = detection_experiment(&ds, &spec, &cfg, 4).unwrap();
        assert_eq!(out.summary.detection_rate, out.summary.false_positive_rate);
        assert_eq!(out.summary.mean_forecast_shift, 0.0);
        for t in &out.trials {
            assert_eq!(t.clean, t.attacked);
        }
        let again = detection_experiment(&ds, &spec, &cfg, 4).unwrap();
        assert_eq!(format!("{out:?}"), format!("{again:?}"));
    }

    #[test]
    fn raw_mode_is_blind_to_temperature() {
        let ds = small_dataset(3);
        let cfg = DetectConfig {
            model_kind: ModelKind::F1,
            n_trials: 10,
            source: PairSource::RawLoad,
            ..DetectConfig::default()
        };
        let spec = AttackSpec {
            kind: AttackKind::gaussian(5.0),
            target_zone: "WEST".into(),
            seed: 0,
        };
        let out = detection_experiment(&ds, &spec, &cfg, 1).unwrap();
        assert_eq!(out.summary.detection_rate, out.summary.false_positive_rate);
    }

    #[test]
    fn csv_shapes() {
        let cols = DetectionVerdict::csv_header().split(',').count();
        assert_eq!(cols, 3 + 3 * Measure::ALL.len());
        assert_eq!(TrialRecord::csv_header().split(',').count(), 3 + 2 * cols);
    }
}
