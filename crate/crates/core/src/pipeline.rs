//! Batch commands: the file-to-file steps behind the command-line tool.
//!
//! Every command reads a [`RunConfig`] and the artifacts of earlier steps
//! under `out_dir`, and writes its own artifacts there. All randomness comes
//! from `RunConfig::seed` through per-stage derivation, so reruns with the
//! same configuration produce byte-identical files.
//!
//! Artifact layout:
//!
//! ```text
//! data/load.csv, data/temperature.csv          synth | ingest
//! data/cleaning_report.csv, data/dropped_rows.csv  ingest
//! models/<ZONE>_<kind>.toml, models/metrics.csv   fit
//! forecasts/<ZONE>_<kind>.csv                    predict
//! attack/<kind>_{temperature,summary,forecast}.csv  attack
//! measure/similarity.csv                         measure
//! detect/{baseline,trials,rates}.csv             detect
//! report/model_metrics.txt, report/similarity_table.txt, report/*.svg  report
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::attack::{run_attack, AttackKind, AttackSpec};
use crate::detect::{detection_experiment, Baseline, DetectConfig, ExperimentSummary, PairSource, TrialRecord, DEFAULT_TAU, DEFAULT_WINDOW, DEFAULT_WINDOWS, MIN_WINDOWS};
use crate::error::{Error, Result};
use crate::features::{build_design, train_test_split, FeatureOptions, ModelKind};
use crate::ingest::{ingest_files, parse_temperature_file, write_dataset, CleaningReport, LAG_MIN_LEN};
use crate::plot::{line_plot, Line};
use crate::regress::{fit_ols, predict, FitStats, FittedModel};
use crate::seed::derive_seed;
use crate::series::{HourlyTimestamp, TimeSeries, ZonalDataset};
use crate::similarity::{similarity_vector, Family, Measure, SimilarityParams, SimilarityVector};
use crate::synth::{generate_synthetic, SynthConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    /// Raw inputs for `ingest`.
    pub load_file: Option<PathBuf>,
    pub temperature_file: Option<PathBuf>,
    /// Shortest cleaned series accepted.
    pub min_len: usize,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            load_file: None,
            temperature_file: None,
            min_len: LAG_MIN_LEN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectSection {
    pub model: ModelKind,
    pub tau: f64,
    pub k: usize,
    pub window_length: usize,
    pub n_windows: usize,
    pub n_trials: usize,
    pub source: PairSource,
}

impl Default for DetectSection {
    fn default() -> Self {
        Self {
            model: ModelKind::F2,
            tau: DEFAULT_TAU,
            k: 2,
            window_length: DEFAULT_WINDOW,
            n_windows: DEFAULT_WINDOWS,
            n_trials: 50,
            source: PairSource::Forecast,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed; every stage derives its own stream from it.
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Zones to use; all available when empty.
    pub zones: Vec<String>,
    /// Attacked zone; the first selected zone when absent.
    pub target_zone: Option<String>,
    /// Zone compared with the target; the first other zone when absent.
    pub reference_zone: Option<String>,
    pub models: Vec<ModelKind>,
    pub train_ratio: f64,
    pub weekday_only: bool,
    pub data: DataConfig,
    /// `seed` here is ignored in favour of the master seed.
    pub synth: SynthConfig,
    pub similarity: SimilarityParams,
    pub attack: AttackKind,
    pub detect: DetectSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            out_dir: PathBuf::from("out"),
            zones: Vec::new(),
            target_zone: None,
            reference_zone: None,
            models: vec![ModelKind::F1, ModelKind::F2],
            train_ratio: 0.7,
            weekday_only: false,
            data: DataConfig::default(),
            synth: SynthConfig::default(),
            similarity: SimilarityParams::default(),
            attack: AttackKind::gaussian(1.0),
            detect: DetectSection::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates a configuration file. Relative data paths are
    /// resolved against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: Self = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.data.load_file, &mut cfg.data.temperature_file].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |m: String| Err(Error::Config(m));
        if self.models.is_empty() {
            return cfg_err("models must list at least one of f1, f2".into());
        }
        if !(self.train_ratio > 0.0 && self.train_ratio < 1.0) {
            return cfg_err(format!("train_ratio must lie in (0, 1), got {}", self.train_ratio));
        }
        for p in [&self.data.load_file, &self.data.temperature_file].into_iter().flatten() {
            if !p.exists() {
                return Err(Error::io(p, "file not found"));
            }
        }
        SynthConfig {
            seed: self.seed,
            ..self.synth.clone()
        }
        .validate()?;
        self.similarity.validate()?;
        AttackSpec {
            kind: self.attack.clone(),
            target_zone: String::new(),
            seed: 0,
        }
        .validate()?;
        let d = &self.detect;
        if !(d.tau > 0.0 && d.tau.is_finite()) {
            return cfg_err(format!("detect.tau must be positive, got {}", d.tau));
        }
        if d.k == 0 || d.k > Measure::ALL.len() {
            return cfg_err(format!("detect.k must lie in [1, {}], got {}", Measure::ALL.len(), d.k));
        }
        if d.n_windows < MIN_WINDOWS {
            return cfg_err(format!("detect.n_windows must be at least {MIN_WINDOWS}, got {}", d.n_windows));
        }
        if d.n_trials == 0 || d.window_length < 2 {
            return cfg_err("detect.n_trials must be >= 1 and detect.window_length >= 2".into());
        }
        Ok(())
    }

    fn features(&self) -> FeatureOptions {
        FeatureOptions {
            weekday_only: self.weekday_only,
        }
    }

    fn split_seed(&self) -> u64 {
        derive_seed(self.seed, "split")
    }

    fn path(&self, parts: &[&str]) -> PathBuf {
        parts.iter().fold(self.out_dir.clone(), |p, s| p.join(s))
    }
}

fn write_file(path: &Path, contents: &str) -> Result<PathBuf> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(contents.as_bytes()).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

fn csv_text(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

fn load_path(cfg: &RunConfig) -> PathBuf {
    cfg.path(&["data", "load.csv"])
}

fn temperature_path(cfg: &RunConfig) -> PathBuf {
    cfg.path(&["data", "temperature.csv"])
}

fn model_path(cfg: &RunConfig, zone: &str, kind: ModelKind) -> PathBuf {
    cfg.path(&["models", &format!("{zone}_{kind}.toml")])
}

/// Generates the synthetic dataset into `data/`.
pub fn cmd_synth(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let ds = generate_synthetic(&SynthConfig {
        seed: cfg.seed,
        ..cfg.synth.clone()
    })?;
    let (l, t) = (load_path(cfg), temperature_path(cfg));
    write_dataset(&l, &t, &ds)?;
    log::info!("synthetic dataset: {} zones x {} hours", ds.n_zones(), ds.len());
    Ok(vec![l, t])
}

fn report_rows(prefix: &str, r: &CleaningReport) -> Vec<String> {
    let mut rows = vec![format!(
        "{prefix},total,{},{},{},{},,,",
        r.rows_read, r.rows_kept, r.rows_dropped, r.rows_interpolated
    )];
    rows.extend(r.per_series.iter().map(|(k, s)| {
        format!(
            "{prefix},{k},{},{},{},{},{},{},{}",
            s.rows_read, s.rows_kept, s.rows_dropped, s.rows_interpolated, s.duplicates, s.outliers, s.unfilled_gaps
        )
    }));
    rows
}

/// Parses and cleans the configured raw files into `data/`.
pub fn cmd_ingest(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let (Some(load), Some(temp)) = (&cfg.data.load_file, &cfg.data.temperature_file) else {
        return Err(Error::Config("ingest needs data.load_file and data.temperature_file".into()));
    };
    let out = ingest_files(load, temp, &cfg.zones, cfg.data.min_len)?;
    let (l, t) = (load_path(cfg), temperature_path(cfg));
    write_dataset(&l, &t, &out.dataset)?;
    let mut rows = report_rows("parse", &out.parse_report);
    rows.extend(report_rows("clean", &out.clean_report));
    let report = write_file(
        &cfg.path(&["data", "cleaning_report.csv"]),
        &csv_text(
            "stage,series,rows_read,rows_kept,rows_dropped,rows_interpolated,duplicates,outliers,unfilled_gaps",
            rows,
        ),
    )?;
    let dropped = write_file(
        &cfg.path(&["data", "dropped_rows.csv"]),
        &csv_text(
            "file,line,reason",
            out.parse_report.dropped_lines.iter().map(|d| {
                format!(
                    "\"{}\",{},\"{}\"",
                    d.file.replace('"', "'"),
                    d.line,
                    d.reason.replace('"', "'")
                )
            }),
        ),
    )?;
    log::info!(
        "ingested {} zones x {} hours; {} rows dropped while parsing",
        out.dataset.n_zones(),
        out.dataset.len(),
        out.parse_report.rows_dropped
    );
    Ok(vec![l, t, report, dropped])
}

/// Loads the dataset written by `synth` or `ingest`, restricted to the
/// configured zones.
pub fn load_dataset(cfg: &RunConfig) -> Result<ZonalDataset> {
    Ok(ingest_files(load_path(cfg), temperature_path(cfg), &cfg.zones, cfg.data.min_len)?.dataset)
}

/// Fitted model plus its design-row forecasts for one zone.
struct ZoneFit {
    model: FittedModel,
    rows: Vec<HourlyTimestamp>,
    actual: Vec<f64>,
    forecast: Vec<f64>,
}

fn forecast_zone(cfg: &RunConfig, ds: &ZonalDataset, zone: &str, model: FittedModel) -> Result<ZoneFit> {
    let x = build_design(model.kind, ds.zone(zone)?, cfg.features())?;
    let forecast = predict(&model, &x)?;
    Ok(ZoneFit {
        rows: x.row_timestamps().to_vec(),
        actual: x.target().to_vec(),
        forecast,
        model,
    })
}

fn stats_row(zone: &str, kind: ModelKind, split: &str, s: &FitStats) -> String {
    format!("{zone},{kind},{split},{},{},{},{}", s.r2, s.adj_r2, s.mae, s.n)
}

/// Fits every configured model on every zone's training rows.
pub fn cmd_fit(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let ds = load_dataset(cfg)?;
    let mut files = Vec::new();
    let mut rows = Vec::new();
    for zone in ds.zone_ids() {
        for &kind in &cfg.models {
            let x = build_design(kind, ds.zone(zone)?, cfg.features())?;
            let (train, test) = train_test_split(&x, cfg.train_ratio, cfg.split_seed())?;
            let mut model = fit_ols(&train)?;
            let test_stats = model.evaluate_test(&test)?;
            let train_stats = model.train_stats.expect("set by fit");
            rows.push(stats_row(zone, kind, "train", &train_stats));
            rows.push(stats_row(zone, kind, "test", &test_stats));
            log::info!("{zone} {kind}: test adj R2 {:.4}, MAE {:.2}", test_stats.adj_r2, test_stats.mae);
            let path = model_path(cfg, zone, kind);
            write_file(&path, &model.to_toml()?)?;
            files.push(path);
        }
    }
    files.push(write_file(
        &cfg.path(&["models", "metrics.csv"]),
        &csv_text("zone,model,split,r2,adj_r2,mae,n", rows),
    )?);
    Ok(files)
}

/// Forecasts every design row with the saved models.
pub fn cmd_predict(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let ds = load_dataset(cfg)?;
    let mut files = Vec::new();
    for zone in ds.zone_ids() {
        for &kind in &cfg.models {
            let fit = forecast_zone(cfg, &ds, zone, FittedModel::load(model_path(cfg, zone, kind))?)?;
            let rows = (0..fit.rows.len()).map(|i| format!("{},{},{}", fit.rows[i], fit.actual[i], fit.forecast[i]));
            files.push(write_file(
                &cfg.path(&["forecasts", &format!("{zone}_{kind}.csv")]),
                &csv_text("timestamp,actual,forecast", rows),
            )?);
        }
    }
    Ok(files)
}

fn target_zone(cfg: &RunConfig, ds: &ZonalDataset) -> Result<String> {
    match &cfg.target_zone {
        Some(z) => ds.zone(z).map(|_| z.clone()),
        None => Ok(ds.zone_ids().next().expect("datasets are non-empty").to_string()),
    }
}

fn reference_zone(cfg: &RunConfig, ds: &ZonalDataset, target: &str) -> Result<String> {
    ds.require_pairs()?;
    match &cfg.reference_zone {
        Some(z) if z == target => Err(Error::Config("reference_zone equals target_zone".into())),
        Some(z) => ds.zone(z).map(|_| z.clone()),
        None => Ok(ds.zone_ids().find(|z| *z != target).expect("at least two zones").to_string()),
    }
}

fn attack_path(cfg: &RunConfig, kind: ModelKind, what: &str) -> PathBuf {
    cfg.path(&["attack", &format!("{kind}_{what}.csv")])
}

/// Attacks the target zone's temperature against every saved model.
pub fn cmd_attack(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let ds = load_dataset(cfg)?;
    let target = target_zone(cfg, &ds)?;
    let zone = ds.zone(&target)?;
    let spec = AttackSpec {
        kind: cfg.attack.clone(),
        target_zone: target.clone(),
        seed: derive_seed(cfg.seed, "attack"),
    };
    let mut files = Vec::new();
    for &kind in &cfg.models {
        let model = FittedModel::load(model_path(cfg, &target, kind))?;
        let result = run_attack(&model, zone, cfg.features(), &spec)?;
        let (t, s) = (attack_path(cfg, kind, "temperature"), attack_path(cfg, kind, "summary"));
        if let Some(dir) = t.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        result.export(&t, &s)?;
        let fit = forecast_zone(cfg, &ds, &target, model)?;
        let rows = (0..fit.rows.len()).map(|i| {
            format!(
                "{},{},{},{}",
                fit.rows[i],
                fit.actual[i],
                fit.forecast[i],
                fit.forecast[i] + result.forecast_shift[i]
            )
        });
        let f = write_file(
            &attack_path(cfg, kind, "forecast"),
            &csv_text("timestamp,actual,clean,attacked", rows),
        )?;
        log::info!("{kind}: {}", result.summary_record());
        files.extend([t, s, f]);
    }
    Ok(files)
}

/// One row of the similarity grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    /// `raw`, `f1` or `f2`.
    pub source: String,
    /// `clean` or `attacked`.
    pub scenario: String,
    /// `None` when the attacked input is absent.
    pub vector: Option<SimilarityVector>,
}

/// Measures between `target` and `reference` series for raw loads and each
/// model's forecasts, clean and attacked, over hours shared by all models.
pub fn similarity_grid(
    cfg: &RunConfig,
    ds: &ZonalDataset,
    target: &str,
    reference: &str,
    models: &BTreeMap<ModelKind, (FittedModel, FittedModel)>,
    attacked_temperature: &BTreeMap<ModelKind, TimeSeries>,
) -> Result<Vec<GridRow>> {
    let mut fits = BTreeMap::new();
    for (kind, (mt, mr)) in models {
        let t = forecast_zone(cfg, ds, target, mt.clone())?;
        let r = forecast_zone(cfg, ds, reference, mr.clone())?;
        fits.insert(*kind, (t, r));
    }
    // f1 rows start two weeks in; every model is compared on the common tail
    let common: Vec<HourlyTimestamp> = match fits.values().map(|(t, _)| t.rows.len()).min() {
        Some(n) => {
            let (t, _) = fits.values().find(|(t, _)| t.rows.len() == n).expect("min exists");
            t.rows.clone()
        }
        None => ds.zone(target)?.load.timestamps().collect(),
    };
    let pick = |rows: &[HourlyTimestamp], v: &[f64]| -> Vec<f64> {
        let offset = rows.len() - common.len();
        v[offset..].to_vec()
    };
    let raw = |zone: &str| -> Result<Vec<f64>> {
        let s = &ds.zone(zone)?.load;
        Ok(common.iter().map(|t| s.values()[s.index_of(*t).expect("common hours")]).collect())
    };
    let p = &cfg.similarity;
    let raw_vec = similarity_vector(&raw(target)?, &raw(reference)?, p)?;
    let attacked_any = !attacked_temperature.is_empty();
    let mut rows = vec![
        GridRow {
            source: "raw".into(),
            scenario: "clean".into(),
            vector: Some(raw_vec.clone()),
        },
        GridRow {
            source: "raw".into(),
            scenario: "attacked".into(),
            // measured loads do not depend on the temperature feed
            vector: attacked_any.then_some(raw_vec),
        },
    ];
    for (kind, (t, r)) in &fits {
        let tv = pick(&t.rows, &t.forecast);
        let rv = pick(&r.rows, &r.forecast);
        rows.push(GridRow {
            source: kind.to_string(),
            scenario: "clean".into(),
            vector: Some(similarity_vector(&tv, &rv, p)?),
        });
        let attacked = match attacked_temperature.get(kind) {
            Some(temp) => {
                let ads = ds.with_temperature(target, temp.clone())?;
                let a = forecast_zone(cfg, &ads, target, t.model.clone())?;
                Some(similarity_vector(&pick(&a.rows, &a.forecast), &rv, p)?)
            }
            None => None,
        };
        rows.push(GridRow {
            source: kind.to_string(),
            scenario: "attacked".into(),
            vector: attacked,
        });
    }
    Ok(rows)
}

/// Writes the similarity grid (raw, f1, f2) × (clean, attacked).
pub fn cmd_measure(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let ds = load_dataset(cfg)?;
    ds.require_pairs()?;
    let target = target_zone(cfg, &ds)?;
    let reference = reference_zone(cfg, &ds, &target)?;
    let mut models = BTreeMap::new();
    let mut attacked = BTreeMap::new();
    for &kind in &cfg.models {
        models.insert(
            kind,
            (
                FittedModel::load(model_path(cfg, &target, kind))?,
                FittedModel::load(model_path(cfg, &reference, kind))?,
            ),
        );
        let path = attack_path(cfg, kind, "temperature");
        if path.exists() {
            let (stations, _) = parse_temperature_file(&path)?;
            let raw = stations
                .get(&target)
                .ok_or_else(|| Error::SchemaMismatch(format!("{} has no station {target}", path.display())))?;
            let (series, _) = crate::ingest::clean(raw, 1)?;
            attacked.insert(kind, series);
        } else {
            log::info!("{} missing: attacked {kind} column marked absent", path.display());
        }
    }
    let grid = similarity_grid(cfg, &ds, &target, &reference, &models, &attacked)?;
    let rows = grid.iter().map(|g| match &g.vector {
        Some(v) => format!("{},{},ok,{target},{reference},{},{}", g.source, g.scenario, v.n, v.csv_record()),
        None => format!(
            "{},{},absent,{target},{reference},,{}",
            g.source,
            g.scenario,
            ",".repeat(Measure::ALL.len() - 1)
        ),
    });
    Ok(vec![write_file(
        &cfg.path(&["measure", "similarity.csv"]),
        &csv_text(
            &format!("source,scenario,status,zone_a,zone_b,n,{}", SimilarityVector::csv_header()),
            rows,
        ),
    )?])
}

/// Runs the detection experiment and writes baseline, trials and rates.
pub fn cmd_detect(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let ds = load_dataset(cfg)?;
    ds.require_pairs()?;
    let target = target_zone(cfg, &ds)?;
    let d = &cfg.detect;
    let dcfg = DetectConfig {
        model_kind: d.model,
        weekday_only: cfg.weekday_only,
        reference_zone: Some(reference_zone(cfg, &ds, &target)?),
        tau: d.tau,
        k: d.k,
        window_length: d.window_length,
        n_windows: d.n_windows,
        n_trials: d.n_trials,
        train_ratio: cfg.train_ratio,
        source: d.source,
        similarity: cfg.similarity.clone(),
    };
    let spec = AttackSpec {
        kind: cfg.attack.clone(),
        target_zone: target,
        seed: derive_seed(cfg.seed, "attack"),
    };
    let out = detection_experiment(&ds, &spec, &dcfg, derive_seed(cfg.seed, "detect"))?;
    let s: &ExperimentSummary = &out.summary;
    log::info!(
        "detection rate {:.3}, false-positive rate {:.3} over {} trials",
        s.detection_rate,
        s.false_positive_rate,
        s.n_trials
    );
    let mut rates = s.rates_records();
    rates.push(format!("mean_forecast_shift_mw,{},,,,", s.mean_forecast_shift));
    Ok(vec![
        write_file(
            &cfg.path(&["detect", "baseline.csv"]),
            &csv_text(Baseline::csv_header(), out.baseline.csv_records()),
        )?,
        write_file(
            &cfg.path(&["detect", "trials.csv"]),
            &csv_text(&TrialRecord::csv_header(), out.trials.iter().map(TrialRecord::csv_record)),
        )?,
        write_file(
            &cfg.path(&["detect", "rates.csv"]),
            &csv_text(ExperimentSummary::rates_header(), rates),
        )?,
    ])
}

fn read_csv(path: &Path) -> Result<Vec<BTreeMap<String, String>>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::io(path, e))?;
    let header: Vec<String> = r.headers().map_err(|e| Error::io(path, e))?.iter().map(String::from).collect();
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| Error::io(path, e))?;
            Ok(header.iter().cloned().zip(rec.iter().map(String::from)).collect())
        })
        .collect()
}

fn family_label(f: Family) -> &'static str {
    match f {
        Family::Lp => "Euclidean distance",
        Family::Correlation => "Correlation-based distance",
        Family::Autocorrelation => "Autocorrelation-based distance",
        Family::Periodogram => "Periodogram-based distance (normalized)",
        Family::Symbolic => "Symbolic representation-based",
    }
}

/// Aligned text table; the first column is left-aligned, the rest right.
pub fn aligned_table(header: &[String], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|j| rows.iter().map(|r| r[j].chars().count()).chain([header[j].chars().count()]).max().unwrap_or(0))
        .collect();
    let fmt_row = |r: &[String]| {
        r.iter()
            .enumerate()
            .map(|(j, c)| {
                if j == 0 {
                    format!("{c:<w$}", w = widths[j])
                } else {
                    format!("{c:>w$}", w = widths[j])
                }
            })
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut s = fmt_row(header);
    s.push('\n');
    s.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    s.push('\n');
    for r in rows {
        s.push_str(&fmt_row(r));
        s.push('\n');
    }
    s
}

/// The five family rows × five columns of the similarity table.
pub fn similarity_table(similarity_csv: &[BTreeMap<String, String>]) -> (Vec<String>, Vec<Vec<String>>) {
    let columns = [("raw", "clean"), ("f1", "clean"), ("f2", "clean"), ("f1", "attacked"), ("f2", "attacked")];
    let header = ["Method", "Raw data", "f1 clean", "f2 clean", "f1 attacked", "f2 attacked"]
        .map(String::from)
        .to_vec();
    let rows = Family::ALL
        .iter()
        .map(|&f| {
            let m = f.representative();
            let mut row = vec![family_label(f).to_string()];
            for (source, scenario) in columns {
                let cell = similarity_csv
                    .iter()
                    .find(|r| r["source"] == source && r["scenario"] == scenario)
                    .map(|r| {
                        if r["status"] == "ok" {
                            r[m.name()].parse::<f64>().map(|v| format!("{v:.6}")).unwrap_or_else(|_| "n/a".into())
                        } else {
                            "absent".into()
                        }
                    })
                    .unwrap_or_else(|| "absent".into());
                row.push(cell);
            }
            row
        })
        .collect();
    (header, rows)
}

fn svg_plot(path: &Path, title: &str, series: &[(&str, Vec<f64>)]) -> Result<PathBuf> {
    let lines: Vec<Line<'_>> = series.iter().map(|(l, v)| Line { label: l, values: v }).collect();
    write_file(path, &line_plot(title, "hour", "MW", &lines))
}

fn column(rows: &[BTreeMap<String, String>], name: &str, limit: usize) -> Vec<f64> {
    rows.iter()
        .take(limit)
        .map(|r| r.get(name).and_then(|v| v.parse().ok()).unwrap_or(f64::NAN))
        .collect()
}

/// Hours shown in each plot.
pub const PLOT_HOURS: usize = 336;

/// Renders the metric and similarity tables as text and the forecast plots
/// as SVG.
pub fn cmd_report(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let sim = read_csv(&cfg.path(&["measure", "similarity.csv"]))?;
    let (header, rows) = similarity_table(&sim);
    files.push(write_file(&cfg.path(&["report", "similarity_table.txt"]), &aligned_table(&header, &rows))?);

    let metrics_path = cfg.path(&["models", "metrics.csv"]);
    if metrics_path.exists() {
        let m = read_csv(&metrics_path)?;
        let header = ["Zone", "Model", "Train R2", "Train adj R2", "Train MAE", "Test R2", "Test adj R2", "Test MAE"]
            .map(String::from)
            .to_vec();
        let mut keys: Vec<(String, String)> = m.iter().map(|r| (r["zone"].clone(), r["model"].clone())).collect();
        keys.dedup();
        let get = |z: &str, k: &str, split: &str, col: &str| {
            m.iter()
                .find(|r| r["zone"] == z && r["model"] == k && r["split"] == split)
                .and_then(|r| r[col].parse::<f64>().ok())
                .map(|v| if col == "mae" { format!("{v:.2}") } else { format!("{v:.4}") })
                .unwrap_or_default()
        };
        let rows: Vec<Vec<String>> = keys
            .iter()
            .map(|(z, k)| {
                let mut row = vec![z.clone(), k.clone()];
                for split in ["train", "test"] {
                    for col in ["r2", "adj_r2", "mae"] {
                        row.push(get(z, k, split, col));
                    }
                }
                row
            })
            .collect();
        files.push(write_file(&cfg.path(&["report", "model_metrics.txt"]), &aligned_table(&header, &rows))?);
    }

    let forecast_dir = cfg.path(&["forecasts"]);
    if forecast_dir.is_dir() {
        let mut entries: Vec<PathBuf> = fs::read_dir(&forecast_dir)
            .map_err(|e| Error::io(&forecast_dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "csv"))
            .collect();
        entries.sort();
        for p in entries {
            let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("forecast").to_string();
            let rows = read_csv(&p)?;
            files.push(svg_plot(
                &cfg.path(&["report", &format!("forecast_vs_actual_{stem}.svg")]),
                &format!("{stem}: forecast vs actual (first {PLOT_HOURS} h)"),
                &[("actual", column(&rows, "actual", PLOT_HOURS)), ("forecast", column(&rows, "forecast", PLOT_HOURS))],
            )?);
        }
    }
    for &kind in &cfg.models {
        let p = attack_path(cfg, kind, "forecast");
        if p.exists() {
            let rows = read_csv(&p)?;
            files.push(svg_plot(
                &cfg.path(&["report", &format!("clean_vs_attacked_{kind}.svg")]),
                &format!("{kind}: clean vs attacked forecast (first {PLOT_HOURS} h)"),
                &[("clean", column(&rows, "clean", PLOT_HOURS)), ("attacked", column(&rows, "attacked", PLOT_HOURS))],
            )?);
        }
    }
    Ok(files)
}

/// synth → fit → predict → attack → measure → detect → report.
pub fn run_pipeline(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut files = cmd_synth(cfg)?;
    for step in [cmd_fit, cmd_predict, cmd_attack, cmd_measure, cmd_detect, cmd_report] {
        files.extend(step(cfg)?);
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_round_trips() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml().unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn config_values_and_errors() {
        let cfg = RunConfig::from_toml(
            "seed = 7\nmodels = [\"f2\"]\n[attack]\nkind = \"bounded_opt\"\nepsilon = 2.0\nnorm = \"linf\"\ndirection = \"deflate\"\nmax_iters = 50\n[detect]\ntau = 2.5\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.models, vec![ModelKind::F2]);
        assert!(matches!(cfg.attack, AttackKind::BoundedOpt { epsilon, .. } if epsilon == 2.0));
        assert_eq!(cfg.detect.tau, 2.5);
        for bad in ["train_ratio = 1.0", "models = []", "bogus = 1", "[detect]\nn_windows = 5", "[similarity]\nsax_alphabet = 20"] {
            let e = RunConfig::from_toml(bad).unwrap_err();
            assert!(e.is_user_error(), "{bad}: {e}");
        }
        let e = RunConfig::from_toml("[data]\nload_file = \"/definitely/missing.csv\"").unwrap_err();
        assert!(e.to_string().contains("/definitely/missing.csv"));
    }

    #[test]
    fn aligned_table_pads_columns() {
        let t = aligned_table(
            &["a".into(), "bb".into()],
            &[vec!["long name".into(), "1".into()], vec!["x".into(), "22.5".into()]],
        );
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "a            bb");
        assert_eq!(lines[2], "long name     1");
        assert_eq!(lines[3], "x          22.5");
    }
}
