//! Design matrices for the two regression load models.
//!
//! `F1` regresses load on temperature, hour and day dummies and the one- and
//! two-week lagged load. `F2` uses a day×hour cell coding plus month- and
//! hour-gated cubic polynomials in temperature.
//!
//! Categorical variables use treatment coding: the first level of each
//! factor is the reference and gets no column. Columns that are identically
//! zero on the data at hand (absent months, for example) are omitted and
//! listed in [`DesignMatrix::omitted`].

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::Weekday;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{HourlyTimestamp, TimeSeries, ZoneSeries};

/// Hours in one week.
pub const WEEK: usize = 168;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    F1,
    F2,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::F1 => "f1",
            ModelKind::F2 => "f2",
        })
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f1" => Ok(ModelKind::F1),
            "f2" => Ok(ModelKind::F2),
            _ => Err(Error::InvalidParameter(format!("unknown model kind `{s}`"))),
        }
    }
}

/// Calendar factors.
///
/// `Day` has six levels: the five weekdays and a merged weekend level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Factor {
    Day,
    Month,
    Hour,
}

const DAY_LABELS: [&str; 6] = ["MON", "TUE", "WED", "THU", "FRI", "WEEKEND"];

impl Factor {
    pub fn levels(self) -> usize {
        match self {
            Factor::Day => 6,
            Factor::Month => 12,
            Factor::Hour => 24,
        }
    }

    pub fn level_of(self, t: HourlyTimestamp) -> usize {
        match self {
            Factor::Day => match t.weekday() {
                Weekday::Sat | Weekday::Sun => 5,
                d => d.num_days_from_monday() as usize,
            },
            Factor::Month => t.month() as usize - 1,
            Factor::Hour => t.hour() as usize,
        }
    }

    pub fn level_label(self, level: usize) -> String {
        match self {
            Factor::Day => format!("D_{}", DAY_LABELS[level]),
            Factor::Month => format!("M{:02}", level + 1),
            Factor::Hour => format!("H{level:02}"),
        }
    }
}

/// Conjunction of factor levels; an empty gate is always on.
pub type Gate = Vec<(Factor, usize)>;

fn gate_on(gate: &[(Factor, usize)], t: HourlyTimestamp) -> bool {
    gate.iter().all(|&(f, l)| f.level_of(t) == l)
}

fn gate_label(gate: &[(Factor, usize)]) -> String {
    gate.iter()
        .map(|&(f, l)| f.level_label(l))
        .collect::<Vec<_>>()
        .join(":")
}

/// How a column is computed from a row's timestamp, temperature and load history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ColumnKind {
    Intercept,
    Indicator(Gate),
    /// `gate · T^power`
    Temperature { power: i32, gate: Gate },
    LaggedLoad { hours: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub label: String,
    pub kind: ColumnKind,
}

impl Column {
    fn indicator(gate: Gate) -> Self {
        Self {
            label: gate_label(&gate),
            kind: ColumnKind::Indicator(gate),
        }
    }

    fn temperature(power: i32, gate: Gate) -> Self {
        let t = if power == 1 { "T".to_string() } else { format!("T^{power}") };
        let label = if gate.is_empty() { t } else { format!("{}:{t}", gate_label(&gate)) };
        Self {
            label,
            kind: ColumnKind::Temperature { power, gate },
        }
    }

    pub fn depends_on_temperature(&self) -> bool {
        matches!(self.kind, ColumnKind::Temperature { .. })
    }

    /// Value for a row. `lagged` returns the load `hours` before the row.
    fn value(&self, t: HourlyTimestamp, temp: f64, lagged: impl Fn(usize) -> f64) -> f64 {
        match &self.kind {
            ColumnKind::Intercept => 1.0,
            ColumnKind::Indicator(g) => f64::from(u8::from(gate_on(g, t))),
            ColumnKind::Temperature { power, gate } => {
                if gate_on(gate, t) {
                    temp.powi(*power)
                } else {
                    0.0
                }
            }
            ColumnKind::LaggedLoad { hours } => lagged(*hours),
        }
    }

    /// Value of a temperature column at `temp`; zero for other columns.
    pub fn temperature_value(&self, t: HourlyTimestamp, temp: f64) -> f64 {
        match &self.kind {
            ColumnKind::Temperature { power, gate } if gate_on(gate, t) => temp.powi(*power),
            _ => 0.0,
        }
    }

    /// Derivative of the column value with respect to temperature.
    pub fn temperature_derivative(&self, t: HourlyTimestamp, temp: f64) -> f64 {
        match &self.kind {
            ColumnKind::Temperature { power, gate } if gate_on(gate, t) => {
                f64::from(*power) * temp.powi(power - 1)
            }
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureOptions {
    /// Keep only Monday–Friday rows. Lags still reach into weekend hours.
    pub weekday_only: bool,
}

/// Row-major regression design with its target and per-row context.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    kind: ModelKind,
    columns: Vec<Column>,
    values: Vec<f64>,
    target: Vec<f64>,
    row_timestamps: Vec<HourlyTimestamp>,
    row_temperature: Vec<f64>,
    omitted: Vec<String>,
}

impl DesignMatrix {
    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.target.len()
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn labels(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.label.as_str()).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.cols();
        &self.values[i * p..(i + 1) * p]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols() + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn row_timestamps(&self) -> &[HourlyTimestamp] {
        &self.row_timestamps
    }

    pub fn row_temperature(&self) -> &[f64] {
        &self.row_temperature
    }

    /// Labels of candidate columns dropped for being identically zero.
    pub fn omitted(&self) -> &[String] {
        &self.omitted
    }

    pub fn column_index(&self, label: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.label == label)
    }

    /// Keeps the listed rows in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let p = self.cols();
        let mut values = Vec::with_capacity(rows.len() * p);
        for &r in rows {
            values.extend_from_slice(self.row(r));
        }
        Self {
            kind: self.kind,
            columns: self.columns.clone(),
            values,
            target: rows.iter().map(|&r| self.target[r]).collect(),
            row_timestamps: rows.iter().map(|&r| self.row_timestamps[r]).collect(),
            row_temperature: rows.iter().map(|&r| self.row_temperature[r]).collect(),
            omitted: self.omitted.clone(),
        }
    }

    /// Same rows and columns with temperature-dependent entries recomputed
    /// from `temps` (one value per row).
    pub fn with_temperature(&self, temps: &[f64]) -> Result<Self> {
        if temps.len() != self.rows() {
            return Err(Error::LengthMismatch {
                left: self.rows(),
                right: temps.len(),
            });
        }
        let mut out = self.clone();
        let p = self.cols();
        for (i, (&t, &ts)) in temps.iter().zip(&self.row_timestamps).enumerate() {
            for (j, c) in self.columns.iter().enumerate() {
                if c.depends_on_temperature() {
                    out.values[i * p + j] = c.value(ts, t, |_| 0.0);
                }
            }
        }
        out.row_temperature = temps.to_vec();
        Ok(out)
    }

    /// Writes `timestamp,<labels...>,target` rows.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |e| Error::io(path, e);
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        writeln!(w, "timestamp,{},target", self.labels().join(",")).map_err(io)?;
        for i in 0..self.rows() {
            write!(w, "{}", self.row_timestamps[i]).map_err(io)?;
            for v in self.row(i) {
                write!(w, ",{v}").map_err(io)?;
            }
            writeln!(w, ",{}", self.target[i]).map_err(io)?;
        }
        w.flush().map_err(io)
    }
}

/// Evaluates candidate columns over rows `first..n` of a zone and drops the
/// identically zero ones.
fn assemble(
    kind: ModelKind,
    candidates: Vec<Column>,
    zone: &ZoneSeries,
    first: usize,
    opts: FeatureOptions,
) -> DesignMatrix {
    let load = zone.load.values();
    let temp = zone.temperature.values();
    let rows: Vec<usize> = (first..zone.load.len())
        .filter(|&i| !opts.weekday_only || Factor::Day.level_of(zone.load.timestamp(i)) < 5)
        .collect();
    let mut raw = vec![0.0; rows.len() * candidates.len()];
    let p = candidates.len();
    for (r, &i) in rows.iter().enumerate() {
        let ts = zone.load.timestamp(i);
        for (j, c) in candidates.iter().enumerate() {
            raw[r * p + j] = c.value(ts, temp[i], |h| load[i - h]);
        }
    }
    let keep: Vec<bool> = (0..p)
        .map(|j| {
            matches!(candidates[j].kind, ColumnKind::Intercept)
                || (0..rows.len()).any(|r| raw[r * p + j] != 0.0)
        })
        .collect();
    let mut columns = Vec::new();
    let mut omitted = Vec::new();
    for (c, &k) in candidates.into_iter().zip(&keep) {
        if k {
            columns.push(c);
        } else {
            omitted.push(c.label);
        }
    }
    if !omitted.is_empty() {
        log::info!("{kind}: omitted {} all-zero columns: {}", omitted.len(), omitted.join(" "));
    }
    let mut values = Vec::with_capacity(rows.len() * columns.len());
    for r in 0..rows.len() {
        values.extend((0..p).filter(|&j| keep[j]).map(|j| raw[r * p + j]));
    }
    DesignMatrix {
        kind,
        columns,
        values,
        target: rows.iter().map(|&i| load[i]).collect(),
        row_timestamps: rows.iter().map(|&i| zone.load.timestamp(i)).collect(),
        row_temperature: rows.iter().map(|&i| temp[i]).collect(),
        omitted,
    }
}

fn check_zone(zone: &ZoneSeries) -> Result<()> {
    let (l, t): (&TimeSeries, &TimeSeries) = (&zone.load, &zone.temperature);
    if l.start() != t.start() || l.len() != t.len() {
        return Err(Error::SchemaMismatch(
            "load and temperature must share one index".into(),
        ));
    }
    Ok(())
}

fn dummies(f: Factor) -> impl Iterator<Item = Column> {
    (1..f.levels()).map(move |l| Column::indicator(vec![(f, l)]))
}

/// Columns `[1, T, H(23), D(5), LL_1w, LL_2w]`; the first two weeks only feed lags.
pub fn build_design_f1(zone: &ZoneSeries, opts: FeatureOptions) -> Result<DesignMatrix> {
    check_zone(zone)?;
    let lag = 2 * WEEK;
    if zone.load.len() < lag + 1 {
        return Err(Error::TooShort {
            needed: lag + 1,
            got: zone.load.len(),
        });
    }
    let mut cols = vec![
        Column {
            label: "(Intercept)".into(),
            kind: ColumnKind::Intercept,
        },
        Column::temperature(1, vec![]),
    ];
    cols.extend(dummies(Factor::Hour));
    cols.extend(dummies(Factor::Day));
    cols.push(Column {
        label: "LL_1w".into(),
        kind: ColumnKind::LaggedLoad { hours: WEEK },
    });
    cols.push(Column {
        label: "LL_2w".into(),
        kind: ColumnKind::LaggedLoad { hours: 2 * WEEK },
    });
    Ok(assemble(ModelKind::F1, cols, zone, lag, opts))
}

/// Candidate columns of `F2` before zero-column omission.
pub fn f2_candidate_columns() -> Vec<Column> {
    let mut cols = vec![Column {
        label: "(Intercept)".into(),
        kind: ColumnKind::Intercept,
    }];
    cols.extend(dummies(Factor::Day));
    cols.extend(dummies(Factor::Hour));
    for d in 1..Factor::Day.levels() {
        for h in 1..Factor::Hour.levels() {
            cols.push(Column::indicator(vec![(Factor::Day, d), (Factor::Hour, h)]));
        }
    }
    // Month-gated polynomials use every month level: together they span the
    // ungated T^k terms, so hour gating drops the reference hour.
    for power in 1..=3 {
        for m in 0..Factor::Month.levels() {
            cols.push(Column::temperature(power, vec![(Factor::Month, m)]));
        }
    }
    for power in 1..=3 {
        for h in 1..Factor::Hour.levels() {
            cols.push(Column::temperature(power, vec![(Factor::Hour, h)]));
        }
    }
    cols
}

/// Columns `[1, D×H cells, M×T, M×T², M×T³, H×T, H×T², H×T³]`.
pub fn build_design_f2(zone: &ZoneSeries, opts: FeatureOptions) -> Result<DesignMatrix> {
    check_zone(zone)?;
    if zone.load.is_empty() {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    let x = assemble(ModelKind::F2, f2_candidate_columns(), zone, 0, opts);
    if x.rows() < x.cols() {
        return Err(Error::TooShort {
            needed: x.cols(),
            got: x.rows(),
        });
    }
    Ok(x)
}

pub fn build_design(kind: ModelKind, zone: &ZoneSeries, opts: FeatureOptions) -> Result<DesignMatrix> {
    match kind {
        ModelKind::F1 => build_design_f1(zone, opts),
        ModelKind::F2 => build_design_f2(zone, opts),
    }
}

/// Row indices of a seeded random split, each side in ascending order.
pub fn split_indices(rows: usize, ratio: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "split ratio must lie in (0, 1), got {ratio}"
        )));
    }
    let n_train = (ratio * rows as f64).round() as usize;
    if n_train == 0 || n_train >= rows {
        return Err(Error::DegenerateSplit {
            train: n_train.min(rows),
            test: rows.saturating_sub(n_train),
        });
    }
    let mut idx: Vec<usize> = (0..rows).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (train, test) = idx.split_at(n_train);
    let mut train = train.to_vec();
    let mut test = test.to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Random train/test partition with `round(ratio · rows)` training rows.
pub fn train_test_split(x: &DesignMatrix, ratio: f64, seed: u64) -> Result<(DesignMatrix, DesignMatrix)> {
    let (train, test) = split_indices(x.rows(), ratio, seed)?;
    Ok((x.select_rows(&train), x.select_rows(&test)))
}
