//! Load and temperature file parsing, gap cleaning and file export.
//!
//! Load files are `timestamp,<zone1>,<zone2>,...` with one row per hour.
//! Temperature files are `timestamp,station,temp_f` with stations interleaved
//! and possibly sub-hourly readings.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{HourlyTimestamp, TimeSeries, Unit, ZonalDataset, ZoneSeries};

/// Longest run of missing hours that is filled by interpolation.
pub const MAX_INTERPOLATED_GAP: usize = 6;

/// Minimum contiguous length that supports two-week lag features.
pub const LAG_MIN_LEN: usize = 337;

/// Physically plausible temperature range in °F; readings outside are outliers.
pub const TEMPERATURE_BOUNDS_F: (f64, f64) = (-60.0, 140.0);

/// Strictly increasing hourly points, possibly with gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    pub unit: Unit,
    pub points: Vec<(HourlyTimestamp, f64)>,
}

impl RawSeries {
    pub fn new(unit: Unit, mut points: Vec<(HourlyTimestamp, f64)>) -> Result<Self> {
        points.sort_by_key(|p| p.0);
        for (i, w) in points.windows(2).enumerate() {
            if w[0].0 == w[1].0 {
                return Err(Error::NotIncreasing { index: i + 1 });
            }
        }
        if let Some(index) = points.iter().position(|p| !p.1.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { unit, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl From<&TimeSeries> for RawSeries {
    fn from(s: &TimeSeries) -> Self {
        Self {
            unit: s.unit(),
            points: s.timestamps().zip(s.values().iter().copied()).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SeriesReport {
    pub rows_read: usize,
    pub rows_kept: usize,
    pub rows_dropped: usize,
    pub rows_interpolated: usize,
    pub duplicates: usize,
    pub outliers: usize,
    pub unfilled_gaps: usize,
}

/// An input row discarded while parsing; `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DroppedLine {
    pub file: String,
    pub line: usize,
    pub reason: String,
}

/// Row accounting for one parse or clean step.
///
/// Always `rows_read == rows_kept + rows_dropped`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CleaningReport {
    pub rows_read: usize,
    pub rows_kept: usize,
    pub rows_dropped: usize,
    pub rows_interpolated: usize,
    /// Every dropped input row.
    pub dropped_lines: Vec<DroppedLine>,
    pub per_series: BTreeMap<String, SeriesReport>,
}

impl CleaningReport {
    pub fn merge(&mut self, other: CleaningReport) {
        self.rows_read += other.rows_read;
        self.rows_kept += other.rows_kept;
        self.rows_dropped += other.rows_dropped;
        self.rows_interpolated += other.rows_interpolated;
        self.dropped_lines.extend(other.dropped_lines);
        for (k, v) in other.per_series {
            let e = self.per_series.entry(k).or_default();
            e.rows_read += v.rows_read;
            e.rows_kept += v.rows_kept;
            e.rows_dropped += v.rows_dropped;
            e.rows_interpolated += v.rows_interpolated;
            e.duplicates += v.duplicates;
            e.outliers += v.outliers;
            e.unfilled_gaps += v.unfilled_gaps;
        }
    }

    fn drop_line(&mut self, file: &Path, line: usize, reason: impl Into<String>) {
        self.rows_dropped += 1;
        self.dropped_lines.push(DroppedLine {
            file: file.display().to_string(),
            line,
            reason: reason.into(),
        });
    }

    fn suffix_series(mut self, suffix: &str) -> Self {
        self.per_series = std::mem::take(&mut self.per_series)
            .into_iter()
            .map(|(k, v)| (format!("{k}/{suffix}"), v))
            .collect();
        self
    }
}

fn open_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn format_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_value(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses a zonal load file into one raw series per zone column.
///
/// A row with a bad timestamp or any unparsable value is dropped as a whole;
/// a repeated timestamp replaces the earlier row.
pub fn parse_load_file(
    path: impl AsRef<Path>,
) -> Result<(BTreeMap<String, RawSeries>, CleaningReport)> {
    let path = path.as_ref();
    let mut records = open_reader(path)?.into_records();
    let header = match records.next() {
        None => return Err(Error::NoData(path.to_path_buf())),
        Some(r) => r.map_err(|e| format_err(path, 1, e.to_string()))?,
    };
    if header.len() < 2 || !header[0].eq_ignore_ascii_case("timestamp") {
        return Err(format_err(path, 1, "expected header `timestamp,<zone>,...`"));
    }
    let zones: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if zones.iter().any(String::is_empty) {
        return Err(format_err(path, 1, "empty zone name in header"));
    }

    let mut report = CleaningReport::default();
    let mut rows: BTreeMap<HourlyTimestamp, (usize, Vec<f64>)> = BTreeMap::new();
    for (i, rec) in records.enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| format_err(path, line, e.to_string()))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        report.rows_read += 1;
        if rec.len() != zones.len() + 1 {
            return Err(format_err(
                path,
                line,
                format!("expected {} fields, found {}", zones.len() + 1, rec.len()),
            ));
        }
        let Ok(ts) = rec[0].parse::<HourlyTimestamp>() else {
            report.drop_line(path, line, format!("bad timestamp `{}`", &rec[0]));
            continue;
        };
        let values: Option<Vec<f64>> = rec.iter().skip(1).map(parse_value).collect();
        let Some(values) = values else {
            report.drop_line(path, line, "unparsable value");
            continue;
        };
        if let Some((prev_line, _)) = rows.insert(ts, (line, values)) {
            report.drop_line(path, prev_line, "duplicate timestamp");
        }
    }
    if rows.is_empty() {
        return Err(Error::NoData(path.to_path_buf()));
    }
    report.rows_kept = rows.len();

    let mut out = BTreeMap::new();
    for (z, zone) in zones.iter().enumerate() {
        let points = rows.iter().map(|(ts, (_, v))| (*ts, v[z])).collect();
        out.insert(zone.clone(), RawSeries::new(Unit::Mw, points)?);
        report.per_series.insert(
            zone.clone(),
            SeriesReport {
                rows_read: report.rows_read,
                rows_kept: report.rows_kept,
                rows_dropped: report.rows_dropped,
                ..Default::default()
            },
        );
    }
    Ok((out, report))
}

/// Parses an interleaved station temperature file.
///
/// Readings outside [`TEMPERATURE_BOUNDS_F`] are dropped, a repeated
/// `(station, timestamp)` keeps its last occurrence, and sub-hourly readings
/// are averaged into their hour.
pub fn parse_temperature_file(
    path: impl AsRef<Path>,
) -> Result<(BTreeMap<String, RawSeries>, CleaningReport)> {
    let path = path.as_ref();
    let mut records = open_reader(path)?.into_records();
    let header = match records.next() {
        None => return Err(Error::NoData(path.to_path_buf())),
        Some(r) => r.map_err(|e| format_err(path, 1, e.to_string()))?,
    };
    let expected = ["timestamp", "station", "temp_f"];
    if header.len() != 3 || !header.iter().zip(expected).all(|(a, b)| a.eq_ignore_ascii_case(b)) {
        return Err(format_err(path, 1, "expected header `timestamp,station,temp_f`"));
    }

    let mut report = CleaningReport::default();
    // station -> exact reading time -> (line, value)
    type Readings = BTreeMap<(HourlyTimestamp, u32), (usize, f64)>;
    let mut stations: BTreeMap<String, Readings> = BTreeMap::new();
    for (i, rec) in records.enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| format_err(path, line, e.to_string()))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        report.rows_read += 1;
        if rec.len() != 3 {
            return Err(format_err(path, line, format!("expected 3 fields, found {}", rec.len())));
        }
        let station = rec[1].to_string();
        let stats = report.per_series.entry(station.clone()).or_default();
        stats.rows_read += 1;
        let Ok((ts, minute)) = HourlyTimestamp::parse_with_minutes(&rec[0]) else {
            stats.rows_dropped += 1;
            report.drop_line(path, line, format!("bad timestamp `{}`", &rec[0]));
            continue;
        };
        if station.is_empty() {
            stats.rows_dropped += 1;
            report.drop_line(path, line, "empty station");
            continue;
        }
        let Some(v) = parse_value(&rec[2]) else {
            stats.rows_dropped += 1;
            report.drop_line(path, line, "unparsable value");
            continue;
        };
        if !(TEMPERATURE_BOUNDS_F.0..=TEMPERATURE_BOUNDS_F.1).contains(&v) {
            stats.rows_dropped += 1;
            stats.outliers += 1;
            report.drop_line(path, line, format!("temperature {v} out of bounds"));
            continue;
        }
        let readings = stations.entry(station).or_default();
        if let Some((prev_line, _)) = readings.insert((ts, minute), (line, v)) {
            stats.rows_dropped += 1;
            stats.duplicates += 1;
            report.drop_line(path, prev_line, "duplicate timestamp");
        }
    }
    if stations.is_empty() {
        return Err(Error::NoData(path.to_path_buf()));
    }

    let mut out = BTreeMap::new();
    for (station, readings) in stations {
        let mut hourly: BTreeMap<HourlyTimestamp, (f64, usize)> = BTreeMap::new();
        for ((ts, _), (_, v)) in &readings {
            let e = hourly.entry(*ts).or_insert((0.0, 0));
            e.0 += v;
            e.1 += 1;
        }
        let points = hourly
            .into_iter()
            .map(|(ts, (sum, n))| (ts, sum / n as f64))
            .collect();
        let stats = report.per_series.get_mut(&station).expect("seen station");
        stats.rows_kept = readings.len();
        report.rows_kept += readings.len();
        out.insert(station, RawSeries::new(Unit::DegF, points)?);
    }
    Ok((out, report))
}

/// Fills short gaps by linear interpolation and returns the longest
/// contiguous segment.
///
/// Gaps of at most [`MAX_INTERPOLATED_GAP`] missing hours are filled; longer
/// gaps split the series. Ties between equally long segments go to the
/// earliest. Fails with `TooShort` when the result has fewer than `min_len`
/// points.
pub fn clean(raw: &RawSeries, min_len: usize) -> Result<(TimeSeries, CleaningReport)> {
    if raw.is_empty() {
        return Err(Error::TooShort {
            needed: min_len.max(1),
            got: 0,
        });
    }
    // segments of filled points, with count of interpolated hours and source points
    struct Segment {
        points: Vec<(HourlyTimestamp, f64)>,
        interpolated: usize,
        original: usize,
    }
    let mut segments = vec![Segment {
        points: vec![raw.points[0]],
        interpolated: 0,
        original: 1,
    }];
    let mut unfilled = 0;
    for w in raw.points.windows(2) {
        let (t0, v0) = w[0];
        let (t1, v1) = w[1];
        let step = t1.hours_since(&t0);
        if step <= 0 {
            return Err(Error::NotIncreasing { index: 0 });
        }
        let missing = (step - 1) as usize;
        let seg = segments.last_mut().expect("non-empty");
        if missing <= MAX_INTERPOLATED_GAP {
            for k in 1..=missing {
                let frac = k as f64 / step as f64;
                seg.points.push((t0.add_hours(k as i64), v0 + (v1 - v0) * frac));
            }
            seg.interpolated += missing;
            seg.points.push((t1, v1));
            seg.original += 1;
        } else {
            unfilled += 1;
            segments.push(Segment {
                points: vec![(t1, v1)],
                interpolated: 0,
                original: 1,
            });
        }
    }
    let best = segments
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.points.len().cmp(&b.points.len()).then(ib.cmp(ia)))
        .map(|(i, _)| i)
        .expect("non-empty");
    let seg = &segments[best];
    if seg.points.len() < min_len {
        return Err(Error::TooShort {
            needed: min_len,
            got: seg.points.len(),
        });
    }
    let series = TimeSeries::from_points(raw.unit, &seg.points)?;
    let report = CleaningReport {
        rows_read: raw.len(),
        rows_kept: seg.original,
        rows_dropped: raw.len() - seg.original,
        rows_interpolated: seg.interpolated,
        dropped_lines: Vec::new(),
        per_series: BTreeMap::from([(
            String::new(),
            SeriesReport {
                rows_read: raw.len(),
                rows_kept: seg.original,
                rows_dropped: raw.len() - seg.original,
                rows_interpolated: seg.interpolated,
                unfilled_gaps: unfilled,
                ..Default::default()
            },
        )]),
    };
    Ok((series, report))
}

fn relabel(mut report: CleaningReport, label: &str) -> CleaningReport {
    if let Some(s) = report.per_series.remove("") {
        report.per_series.insert(label.to_string(), s);
    }
    report
}

/// Result of ingesting a load file and a temperature file.
#[derive(Debug, Clone)]
pub struct IngestOutput {
    pub dataset: ZonalDataset,
    pub parse_report: CleaningReport,
    pub clean_report: CleaningReport,
}

/// Parses, cleans and aligns a load file and a temperature file.
///
/// Zones are paired with the station of the same id; `zones` selects a
/// subset (all paired zones when empty).
pub fn ingest_files(
    load_path: impl AsRef<Path>,
    temperature_path: impl AsRef<Path>,
    zones: &[String],
    min_len: usize,
) -> Result<IngestOutput> {
    let (loads, load_report) = parse_load_file(load_path)?;
    let (temps, temp_report) = parse_temperature_file(temperature_path)?;
    let mut parse_report = CleaningReport::default();
    parse_report.merge(load_report.suffix_series("load"));
    parse_report.merge(temp_report.suffix_series("temperature"));

    let selected: Vec<String> = if zones.is_empty() {
        loads.keys().filter(|z| temps.contains_key(*z)).cloned().collect()
    } else {
        zones.to_vec()
    };
    if selected.is_empty() {
        return Err(Error::SchemaMismatch(
            "no zone has a temperature station with the same id".into(),
        ));
    }
    let mut clean_report = CleaningReport::default();
    let mut out = BTreeMap::new();
    for zone in selected {
        let load = loads.get(&zone).ok_or_else(|| Error::UnknownZone(zone.clone()))?;
        let temp = temps.get(&zone).ok_or_else(|| Error::UnknownZone(zone.clone()))?;
        let (load, r) = clean(load, min_len)?;
        clean_report.merge(relabel(r, &format!("{zone}/load")));
        let (temperature, r) = clean(temp, min_len)?;
        clean_report.merge(relabel(r, &format!("{zone}/temperature")));
        out.insert(zone, ZoneSeries { load, temperature });
    }
    let dataset = ZonalDataset::new(out)?;
    if dataset.len() < min_len {
        return Err(Error::TooShort {
            needed: min_len,
            got: dataset.len(),
        });
    }
    Ok(IngestOutput {
        dataset,
        parse_report,
        clean_report,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Writes the dataset's loads in the load file format.
pub fn write_load_file(path: impl AsRef<Path>, dataset: &ZonalDataset) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let ids: Vec<&str> = dataset.zone_ids().collect();
    let loads: Vec<&[f64]> = dataset.zones().map(|(_, z)| z.load.values()).collect();
    let io = |e| Error::io(path, e);
    writeln!(w, "timestamp,{}", ids.join(",")).map_err(io)?;
    for i in 0..dataset.len() {
        write!(w, "{}", dataset.start().add_hours(i as i64)).map_err(io)?;
        for l in &loads {
            write!(w, ",{}", l[i]).map_err(io)?;
        }
        writeln!(w).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Writes temperature series, one row per station per hour, stations
/// interleaved in id order.
pub fn write_temperature_file<'a>(
    path: impl AsRef<Path>,
    stations: impl IntoIterator<Item = (&'a str, &'a TimeSeries)>,
) -> Result<()> {
    let path = path.as_ref();
    let stations: Vec<_> = stations.into_iter().collect();
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "timestamp,station,temp_f").map_err(io)?;
    let Some(start) = stations.iter().map(|(_, s)| s.start()).min() else {
        return w.flush().map_err(io);
    };
    let end = stations.iter().map(|(_, s)| s.end()).max().unwrap_or(start);
    let hours = end.hours_since(&start);
    for h in 0..=hours {
        let ts = start.add_hours(h);
        for (id, s) in &stations {
            if let Some(i) = s.index_of(ts) {
                writeln!(w, "{ts},{id},{}", s.values()[i]).map_err(io)?;
            }
        }
    }
    w.flush().map_err(io)
}

/// Writes both files of a dataset.
pub fn write_dataset(
    load_path: impl AsRef<Path>,
    temperature_path: impl AsRef<Path>,
    dataset: &ZonalDataset,
) -> Result<()> {
    write_load_file(load_path, dataset)?;
    write_temperature_file(
        temperature_path,
        dataset.zones().map(|(id, z)| (id, &z.temperature)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn ts(h: i64) -> HourlyTimestamp {
        HourlyTimestamp::new(2020, 6, 1, 0).unwrap().add_hours(h)
    }

    #[test]
    fn parses_well_formed_load_file() {
        let f = file(
            "timestamp,WEST,FAR_WEST\n\
             2020-06-01T00:00,1000.5,800\n\
             2020-06-01T01:00,1010,805.25\n\
             2020-06-01T02:00,1020,810\n",
        );
        let (zones, report) = parse_load_file(f.path()).unwrap();
        assert_eq!(zones.len(), 2);
        assert_eq!(zones["WEST"].len(), 3);
        assert_eq!(zones["FAR_WEST"].points[1], (ts(1), 805.25));
        assert_eq!(report.rows_read, 3);
        assert_eq!(report.rows_dropped, 0);
    }

    #[test]
    fn unparsable_load_row_is_dropped() {
        let f = file(
            "timestamp,WEST,FAR_WEST\n\
             2020-06-01T00:00,1000,800\n\
             2020-06-01T01:00,abc,805\n\
             2020-06-01T02:00,1020,810\n",
        );
        let (zones, report) = parse_load_file(f.path()).unwrap();
        assert_eq!(report.rows_dropped, 1);
        assert_eq!(report.rows_read, report.rows_kept + report.rows_dropped);
        assert_eq!(zones["WEST"].len(), 2);
        assert_eq!(report.dropped_lines[0].line, 3);
    }

    #[test]
    fn empty_and_malformed_files() {
        let f = file("");
        assert!(matches!(parse_load_file(f.path()), Err(Error::NoData(_))));
        let f = file("timestamp,WEST\n");
        assert!(matches!(parse_load_file(f.path()), Err(Error::NoData(_))));
        let f = file("time,WEST\n2020-06-01T00:00,1\n");
        assert!(matches!(parse_load_file(f.path()), Err(Error::Format { line: 1, .. })));
        let f = file("timestamp,WEST\n2020-06-01T00:00,1,2\n");
        assert!(matches!(parse_load_file(f.path()), Err(Error::Format { line: 2, .. })));
        assert!(matches!(
            parse_load_file("/nonexistent/load.csv"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn temperature_duplicates_last_wins() {
        let f = file(
            "timestamp,station,temp_f\n\
             2020-06-01T00:00,WEST,70\n\
             2020-06-01T00:00,WEST,72\n\
             2020-06-01T01:00,WEST,75\n",
        );
        let (st, report) = parse_temperature_file(f.path()).unwrap();
        assert_eq!(st["WEST"].points, vec![(ts(0), 72.0), (ts(1), 75.0)]);
        assert_eq!(report.rows_dropped, 1);
        assert_eq!(report.per_series["WEST"].duplicates, 1);
        assert_eq!(report.rows_read, report.rows_kept + report.rows_dropped);
    }

    #[test]
    fn temperature_sub_hourly_mean() {
        // hand-computed: (70 + 71 + 75) / 3 = 72
        let f = file(
            "timestamp,station,temp_f\n\
             2020-06-01T00:00,WEST,70\n\
             2020-06-01T00:20,WEST,71\n\
             2020-06-01T00:40,WEST,75\n\
             2020-06-01T01:00,WEST,80\n",
        );
        let (st, report) = parse_temperature_file(f.path()).unwrap();
        assert_eq!(st["WEST"].points[0], (ts(0), 72.0));
        assert_eq!(st["WEST"].points[1], (ts(1), 80.0));
        assert_eq!(report.rows_kept, 4);
    }

    #[test]
    fn temperature_outlier_dropped() {
        let f = file(
            "timestamp,station,temp_f\n\
             2020-06-01T00:00,WEST,70\n\
             2020-06-01T01:00,WEST,150\n\
             2020-06-01T02:00,WEST,-61\n\
             2020-06-01T03:00,WEST,140\n\
             2020-06-01T00:00,FAR_WEST,60\n",
        );
        let (st, report) = parse_temperature_file(f.path()).unwrap();
        assert_eq!(st["WEST"].len(), 2);
        assert_eq!(st["FAR_WEST"].len(), 1);
        assert_eq!(report.per_series["WEST"].outliers, 2);
        assert_eq!(report.rows_dropped, 2);
    }

    fn raw(points: &[(i64, f64)]) -> RawSeries {
        RawSeries::new(Unit::Mw, points.iter().map(|&(h, v)| (ts(h), v)).collect()).unwrap()
    }

    #[test]
    fn clean_fills_short_gap() {
        let (s, r) = clean(&raw(&[(0, 10.0), (3, 16.0)]), 1).unwrap();
        assert_eq!(s.values(), &[10.0, 12.0, 14.0, 16.0]);
        assert_eq!(r.rows_interpolated, 2);
        assert_eq!(r.rows_dropped, 0);
    }

    #[test]
    fn clean_splits_long_gap() {
        // 7 missing hours between 2 and 10
        let (s, r) = clean(&raw(&[(0, 1.0), (1, 2.0), (2, 3.0), (10, 4.0), (11, 5.0)]), 1).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
        assert_eq!(r.rows_dropped, 2);
        assert_eq!(r.per_series[""].unfilled_gaps, 1);
        // 6 missing hours is still filled
        let (s, _) = clean(&raw(&[(0, 0.0), (7, 7.0)]), 1).unwrap();
        assert_eq!(s.len(), 8);
    }

    #[test]
    fn clean_identity_and_too_short() {
        let pts: Vec<(i64, f64)> = (0..5).map(|h| (h, h as f64)).collect();
        let (s, r) = clean(&raw(&pts), 1).unwrap();
        assert_eq!(s.values(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(r.rows_interpolated, 0);
        assert_eq!(
            clean(&raw(&pts), LAG_MIN_LEN),
            Err(Error::TooShort {
                needed: LAG_MIN_LEN,
                got: 5
            })
        );
    }

    #[test]
    fn load_file_round_trip() {
        use crate::synth::{generate_synthetic, SynthConfig};
        let ds = generate_synthetic(&SynthConfig {
            n_hours: 400,
            ..SynthConfig::default()
        })
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let lp = dir.path().join("load.csv");
        let tp = dir.path().join("temp.csv");
        write_dataset(&lp, &tp, &ds).unwrap();
        let back = ingest_files(&lp, &tp, &[], LAG_MIN_LEN).unwrap();
        assert_eq!(back.dataset, ds);
        assert_eq!(back.clean_report.rows_interpolated, 0);
    }

    proptest::proptest! {
        #[test]
        fn parse_never_panics(body in "[ -~\n]{0,300}") {
            let f = file(&format!("timestamp,A,B\n{body}"));
            if let Ok((_, r)) = parse_load_file(f.path()) {
                proptest::prop_assert_eq!(r.rows_read, r.rows_kept + r.rows_dropped);
            }
            let f = file(&format!("timestamp,station,temp_f\n{body}"));
            if let Ok((_, r)) = parse_temperature_file(f.path()) {
                proptest::prop_assert_eq!(r.rows_read, r.rows_kept + r.rows_dropped);
            }
        }

        #[test]
        fn clean_output_is_contiguous(hours in proptest::collection::btree_set(0i64..200, 1..80)) {
            let pts: Vec<(i64, f64)> = hours.iter().map(|&h| (h, h as f64 * 0.5)).collect();
            let (s, r) = clean(&raw(&pts), 1).unwrap();
            proptest::prop_assert!(s.values().iter().all(|v| v.is_finite()));
            proptest::prop_assert_eq!(r.rows_read, r.rows_kept + r.rows_dropped);
            // linear input stays linear after interpolation
            for (i, v) in s.values().iter().enumerate() {
                let h = s.timestamp(i).hours_since(&ts(0));
                proptest::prop_assert!((v - h as f64 * 0.5).abs() < 1e-9);
            }
        }
    }
}
