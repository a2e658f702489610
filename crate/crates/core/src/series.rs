//! Hourly timestamps, validated time series and multi-zone datasets.
//!
//! All clocks are naive local standard time: there are no DST transitions,
//! so every day has exactly 24 hours and lag arithmetic is plain addition.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Timelike, Weekday};

use crate::error::{Error, Result};

/// Sample standard deviations below this are treated as zero.
pub const ZERO_VARIANCE_TOL: f64 = 1e-12;

/// A timestamp truncated to the hour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HourlyTimestamp(NaiveDateTime);

impl HourlyTimestamp {
    pub fn new(year: i32, month: u32, day: u32, hour: u32) -> Result<Self> {
        NaiveDate::from_ymd_opt(year, month, day)
            .and_then(|d| d.and_hms_opt(hour, 0, 0))
            .map(Self)
            .ok_or_else(|| {
                Error::InvalidTimestamp(format!("{year:04}-{month:02}-{day:02} hour {hour}"))
            })
    }

    pub fn year(&self) -> i32 {
        self.0.year()
    }

    pub fn month(&self) -> u32 {
        self.0.month()
    }

    pub fn day(&self) -> u32 {
        self.0.day()
    }

    pub fn hour(&self) -> u32 {
        self.0.hour()
    }

    pub fn weekday(&self) -> Weekday {
        self.0.weekday()
    }

    pub fn add_hours(&self, hours: i64) -> Self {
        Self(self.0 + Duration::hours(hours))
    }

    /// Signed number of hours from `earlier` to `self`.
    pub fn hours_since(&self, earlier: &HourlyTimestamp) -> i64 {
        (self.0 - earlier.0).num_hours()
    }

    /// Parses `YYYY-MM-DDTHH:MM`, truncating minutes. Returns the hourly
    /// timestamp and the minute that was dropped.
    pub fn parse_with_minutes(s: &str) -> Result<(Self, u32)> {
        let s = s.trim();
        let dt = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M")
            .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S"))
            .map_err(|_| Error::InvalidTimestamp(s.to_string()))?;
        let minute = dt.minute();
        let truncated = dt
            .with_minute(0)
            .and_then(|d| d.with_second(0))
            .ok_or_else(|| Error::InvalidTimestamp(s.to_string()))?;
        Ok((Self(truncated), minute))
    }
}

impl fmt::Display for HourlyTimestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%dT%H:00"))
    }
}

impl FromStr for HourlyTimestamp {
    type Err = Error;

    /// Strict `YYYY-MM-DDTHH:00` parse.
    fn from_str(s: &str) -> Result<Self> {
        let (ts, minute) = Self::parse_with_minutes(s)?;
        if minute != 0 {
            return Err(Error::InvalidTimestamp(s.to_string()));
        }
        Ok(ts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    Mw,
    DegF,
    Dimensionless,
}

/// A contiguous hourly series of finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    unit: Unit,
    start: HourlyTimestamp,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(unit: Unit, start: HourlyTimestamp, values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            unit,
            start,
            values,
        })
    }

    /// Builds a series from explicit points, which must step by exactly one hour.
    pub fn from_points(unit: Unit, points: &[(HourlyTimestamp, f64)]) -> Result<Self> {
        let Some(&(start, _)) = points.first() else {
            return Err(Error::TooShort { needed: 1, got: 0 });
        };
        for (i, w) in points.windows(2).enumerate() {
            if w[1].0.hours_since(&w[0].0) != 1 {
                return Err(Error::NonHourlyStep { index: i + 1 });
            }
        }
        Self::new(unit, start, points.iter().map(|p| p.1).collect())
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn start(&self) -> HourlyTimestamp {
        self.start
    }

    /// Timestamp of the last point. Equals `start` for an empty series.
    pub fn end(&self) -> HourlyTimestamp {
        self.start.add_hours(self.values.len().saturating_sub(1) as i64)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn timestamp(&self, index: usize) -> HourlyTimestamp {
        self.start.add_hours(index as i64)
    }

    pub fn timestamps(&self) -> impl Iterator<Item = HourlyTimestamp> + '_ {
        (0..self.values.len()).map(|i| self.timestamp(i))
    }

    pub fn index_of(&self, ts: HourlyTimestamp) -> Option<usize> {
        let offset = ts.hours_since(&self.start);
        (offset >= 0 && (offset as usize) < self.values.len()).then_some(offset as usize)
    }

    /// Sub-series over `[from, to]` inclusive, clipped to the series range.
    pub fn between(&self, from: HourlyTimestamp, to: HourlyTimestamp) -> Result<Self> {
        let lo = from.max(self.start);
        let hi = to.min(self.end());
        if self.is_empty() || hi < lo {
            return Err(Error::EmptyIntersection);
        }
        let a = lo.hours_since(&self.start) as usize;
        let b = hi.hours_since(&self.start) as usize;
        Ok(Self {
            unit: self.unit,
            start: lo,
            values: self.values[a..=b].to_vec(),
        })
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            unit: self.unit,
            start: self.timestamp(range.start),
            values: self.values[range].to_vec(),
        }
    }

    /// Same index, new values. Fails if the length differs or a value is non-finite.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::LengthMismatch {
                left: self.values.len(),
                right: values.len(),
            });
        }
        Self::new(self.unit, self.start, values)
    }
}

/// Restricts every series to the common timestamp range.
pub fn align(series: &[TimeSeries]) -> Result<Vec<TimeSeries>> {
    let Some(first) = series.first() else {
        return Ok(Vec::new());
    };
    if series.iter().any(TimeSeries::is_empty) {
        return Err(Error::EmptyIntersection);
    }
    let lo = series.iter().map(TimeSeries::start).max().unwrap_or(first.start);
    let hi = series.iter().map(TimeSeries::end).min().unwrap_or(first.end());
    if hi < lo {
        return Err(Error::EmptyIntersection);
    }
    series.iter().map(|s| s.between(lo, hi)).collect()
}

/// Sample mean and standard deviation (N-1 denominator).
pub fn sample_mean_sd(x: &[f64]) -> Result<(f64, f64)> {
    if x.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let ss: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    Ok((mean, (ss / (n - 1.0)).sqrt()))
}

/// Rescales values to sample mean 0 and sample standard deviation 1.
pub fn znormalize_values(x: &[f64]) -> Result<Vec<f64>> {
    let (mean, sd) = sample_mean_sd(x)?;
    if sd < ZERO_VARIANCE_TOL {
        return Err(Error::ZeroVariance("z-normalization of a constant series"));
    }
    Ok(x.iter().map(|v| (v - mean) / sd).collect())
}

/// Rescales to sample mean 0 and sample standard deviation 1.
pub fn znormalize(x: &TimeSeries) -> Result<TimeSeries> {
    let values = znormalize_values(x.values())?;
    TimeSeries::new(Unit::Dimensionless, x.start(), values)
}

/// Load and temperature series of one zone over the dataset index.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneSeries {
    pub load: TimeSeries,
    pub temperature: TimeSeries,
}

/// Per-zone aligned load and temperature series sharing one hourly index.
///
/// Construction accepts a single zone so that per-zone model fitting works;
/// pairwise operations call [`ZonalDataset::require_pairs`].
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalDataset {
    zones: BTreeMap<String, ZoneSeries>,
    start: HourlyTimestamp,
    len: usize,
}

impl ZonalDataset {
    /// Builds a dataset, aligning every series to the common range first.
    pub fn new(zones: BTreeMap<String, ZoneSeries>) -> Result<Self> {
        if zones.is_empty() {
            return Err(Error::TooFewZones(0));
        }
        let mut all = Vec::with_capacity(zones.len() * 2);
        for (id, z) in &zones {
            if z.load.unit() != Unit::Mw || z.temperature.unit() != Unit::DegF {
                return Err(Error::SchemaMismatch(format!("zone {id}: wrong units")));
            }
            all.push(z.load.clone());
            all.push(z.temperature.clone());
        }
        let mut aligned = align(&all)?.into_iter();
        let start = all.iter().map(TimeSeries::start).max().expect("non-empty");
        let zones: BTreeMap<_, _> = zones
            .into_keys()
            .map(|id| {
                let load = aligned.next().expect("paired");
                let temperature = aligned.next().expect("paired");
                (id, ZoneSeries { load, temperature })
            })
            .collect();
        let len = zones.values().next().map(|z| z.load.len()).unwrap_or(0);
        Ok(Self { zones, start, len })
    }

    pub fn require_pairs(&self) -> Result<()> {
        if self.zones.len() < 2 {
            return Err(Error::TooFewZones(self.zones.len()));
        }
        Ok(())
    }

    pub fn zone(&self, id: &str) -> Result<&ZoneSeries> {
        self.zones
            .get(id)
            .ok_or_else(|| Error::UnknownZone(id.to_string()))
    }

    pub fn zone_ids(&self) -> impl Iterator<Item = &str> {
        self.zones.keys().map(String::as_str)
    }

    pub fn zones(&self) -> impl Iterator<Item = (&str, &ZoneSeries)> {
        self.zones.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn n_zones(&self) -> usize {
        self.zones.len()
    }

    pub fn start(&self) -> HourlyTimestamp {
        self.start
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Copy of the dataset with one zone's temperature replaced.
    pub fn with_temperature(&self, zone: &str, temperature: TimeSeries) -> Result<Self> {
        let mut out = self.clone();
        let z = out
            .zones
            .get_mut(zone)
            .ok_or_else(|| Error::UnknownZone(zone.to_string()))?;
        if temperature.start() != z.temperature.start() || temperature.len() != z.temperature.len()
        {
            return Err(Error::SchemaMismatch(
                "replacement temperature must cover the dataset index".into(),
            ));
        }
        z.temperature = temperature;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ts(h: i64) -> HourlyTimestamp {
        HourlyTimestamp::new(2020, 6, 1, 0).unwrap().add_hours(h)
    }

    fn series(from: i64, to: i64) -> TimeSeries {
        let vals = (from..=to).map(|v| v as f64).collect();
        TimeSeries::new(Unit::Mw, ts(from), vals).unwrap()
    }

    #[test]
    fn timestamp_validation_and_order() {
        assert!(HourlyTimestamp::new(2021, 2, 29, 0).is_err());
        assert!(HourlyTimestamp::new(2020, 2, 29, 23).is_ok());
        assert!(HourlyTimestamp::new(2020, 1, 1, 24).is_err());
        assert!(ts(0) < ts(1));
        assert!(ts(23) < ts(24));
        let t: HourlyTimestamp = "2020-07-04T13:00".parse().unwrap();
        assert_eq!(t.to_string(), "2020-07-04T13:00");
        assert!("2020-07-04T13:30".parse::<HourlyTimestamp>().is_err());
    }

    #[test]
    fn constructor_rejects_bad_input() {
        let bad = TimeSeries::new(Unit::Mw, ts(0), vec![1.0, f64::NAN]);
        assert_eq!(bad, Err(Error::NonFinite { index: 1 }));
        let gap = TimeSeries::from_points(Unit::Mw, &[(ts(0), 1.0), (ts(2), 2.0)]);
        assert_eq!(gap, Err(Error::NonHourlyStep { index: 1 }));
        assert!(TimeSeries::new(Unit::Mw, ts(0), vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn align_identity_overlap_disjoint() {
        let a = series(0, 10);
        assert_eq!(align(&[a.clone(), a.clone()]).unwrap(), vec![a.clone(), a.clone()]);

        let out = align(&[series(0, 10), series(5, 15)]).unwrap();
        for s in &out {
            assert_eq!(s.start(), ts(5));
            assert_eq!(s.end(), ts(10));
        }
        assert_eq!(out[0].values(), &[5.0, 6.0, 7.0, 8.0, 9.0, 10.0]);

        assert_eq!(
            align(&[series(0, 3), series(10, 12)]),
            Err(Error::EmptyIntersection)
        );
    }

    #[test]
    fn znormalize_examples() {
        let x = TimeSeries::new(Unit::Mw, ts(0), vec![1.0, 2.0, 3.0]).unwrap();
        let z = znormalize(&x).unwrap();
        assert_eq!(z.unit(), Unit::Dimensionless);
        for (a, b) in z.values().iter().zip([-1.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        let c = TimeSeries::new(Unit::Mw, ts(0), vec![5.0; 3]).unwrap();
        assert!(matches!(znormalize(&c), Err(Error::ZeroVariance(_))));
    }

    #[test]
    fn mean_sd_examples() {
        assert_eq!(sample_mean_sd(&[2.0, 4.0, 6.0]).unwrap(), (4.0, 2.0));
        assert_eq!(sample_mean_sd(&[0.0; 4]).unwrap(), (0.0, 0.0));
        assert!(sample_mean_sd(&[1.0]).is_err());
    }

    #[test]
    fn mean_sd_of_seeded_normal_draws() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let x: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let (m, s) = sample_mean_sd(&x).unwrap();
        assert!(m.abs() < 0.05, "mean {m}");
        assert!((0.95..=1.05).contains(&s), "sd {s}");
    }

    #[test]
    fn dataset_single_zone_fails_pair_check() {
        let mut zones = BTreeMap::new();
        zones.insert(
            "WEST".to_string(),
            ZoneSeries {
                load: series(0, 5),
                temperature: TimeSeries::new(Unit::DegF, ts(0), vec![70.0; 6]).unwrap(),
            },
        );
        let ds = ZonalDataset::new(zones).unwrap();
        assert_eq!(ds.require_pairs(), Err(Error::TooFewZones(1)));
    }

    proptest! {
        #[test]
        fn align_is_idempotent(a in 0i64..50, la in 1i64..50, b in 0i64..50, lb in 1i64..50) {
            let s = [series(a, a + la), series(b, b + lb)];
            if let Ok(once) = align(&s) {
                let twice = align(&once).unwrap();
                prop_assert_eq!(once, twice);
            }
        }

        #[test]
        fn znormalize_moments_and_idempotence(v in prop::collection::vec(-1e3f64..1e3, 2..200)) {
            let x = TimeSeries::new(Unit::Mw, ts(0), v).unwrap();
            if let Ok(z) = znormalize(&x) {
                let (m, s) = sample_mean_sd(z.values()).unwrap();
                prop_assert!(m.abs() < 1e-10);
                prop_assert!((s - 1.0).abs() < 1e-10);
                let zz = znormalize(&z).unwrap();
                for (p, q) in z.values().iter().zip(zz.values()) {
                    prop_assert!((p - q).abs() < 1e-12);
                }
            }
        }
    }
}
