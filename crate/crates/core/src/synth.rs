//! Seeded synthetic multi-zone load and temperature data.
//!
//! Each zone's temperature mixes a shared regional weather signal with a
//! zone-local one. Both carry a seasonal sinusoid, a diurnal sinusoid and
//! AR(1) weather noise. Load responds to temperature through a rectified
//! quadratic cooling term above 65 °F, on top of a daily/weekly usage profile
//! and AR(1) noise. Base load may grow linearly over time.
//!
//! Zone structural parameters (base load, cooling sensitivity, climate
//! offset) depend only on the zone index; the seed drives the stochastic parts.
//! Datasets generated with different seeds therefore share one distribution.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use chrono::{Datelike, Weekday};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::stage_rng;
use crate::series::{HourlyTimestamp, TimeSeries, Unit, ZonalDataset, ZoneSeries};

/// Cooling balance point in °F.
pub const COOLING_BALANCE_F: f64 = 65.0;

const ZONE_NAMES: [&str; 8] = [
    "WEST", "FAR_WEST", "NORTH", "NORTH_C", "EAST", "SOUTH_C", "COAST", "SOUTHERN",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_hours: usize,
    pub seed: u64,
    pub zone_count: usize,
    pub shared_weather_weight: f64,
    pub noise_sd: f64,
    /// First hour of the dataset, `YYYY-MM-DDTHH:00`.
    pub start: String,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_hours: 4000,
            seed: 1,
            zone_count: 2,
            shared_weather_weight: 0.85,
            noise_sd: 15.0,
            start: "2020-05-01T00:00".into(),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<HourlyTimestamp> {
        if self.n_hours < 336 {
            return Err(Error::InvalidParameter(format!(
                "n_hours must be at least 336, got {}",
                self.n_hours
            )));
        }
        if self.zone_count < 2 {
            return Err(Error::InvalidParameter("zone_count must be at least 2".into()));
        }
        if !(0.0..=1.0).contains(&self.shared_weather_weight) {
            return Err(Error::InvalidParameter(
                "shared_weather_weight must lie in [0, 1]".into(),
            ));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::InvalidParameter("noise_sd must be >= 0".into()));
        }
        self.start.parse()
    }
}

pub fn zone_name(index: usize) -> String {
    ZONE_NAMES
        .get(index)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("ZONE_{index}"))
}

struct ZoneParams {
    base_mw: f64,
    cooling_mw_per_f2: f64,
    climate_offset_f: f64,
    peak_hour: f64,
    /// Relative base-load growth per year.
    growth_per_year: f64,
}

fn zone_params(index: usize) -> ZoneParams {
    match index {
        0 => ZoneParams {
            base_mw: 950.0,
            cooling_mw_per_f2: 0.45,
            climate_offset_f: 0.0,
            peak_hour: 17.0,
            growth_per_year: 0.0,
        },
        1 => ZoneParams {
            base_mw: 2300.0,
            cooling_mw_per_f2: 0.7,
            climate_offset_f: 1.5,
            peak_hour: 18.0,
            growth_per_year: 0.15,
        },
        k => ZoneParams {
            base_mw: 1200.0 + 350.0 * k as f64,
            cooling_mw_per_f2: 0.4 + 0.05 * k as f64,
            climate_offset_f: -1.0 + 0.5 * (k % 5) as f64,
            peak_hour: 16.0 + (k % 3) as f64,
            growth_per_year: 0.02 * (k % 3) as f64,
        },
    }
}

/// AR(1) path with unit stationary variance.
fn ar1(rng: &mut impl Rng, n: usize, phi: f64) -> Vec<f64> {
    let innov_sd = (1.0 - phi * phi).sqrt();
    let mut x: f64 = rng.sample(StandardNormal);
    (0..n)
        .map(|_| {
            let cur = x;
            let e: f64 = rng.sample(StandardNormal);
            x = phi * x + innov_sd * e;
            cur
        })
        .collect()
}

/// A weather signal over `n` hours starting at `start`.
fn weather(rng: &mut impl Rng, start: HourlyTimestamp, n: usize, offset_f: f64) -> Vec<f64> {
    let phase_jitter: f64 = rng.random_range(-0.05..0.05);
    let noise = ar1(rng, n, 0.96);
    (0..n)
        .map(|i| {
            let t = start.add_hours(i as i64);
            let doy = t_day_of_year(t);
            let seasonal = 11.0 * (2.0 * PI * (doy - 110.0) / 365.0 + phase_jitter).sin();
            let diurnal = 9.0 * (2.0 * PI * (t.hour() as f64 - 15.0) / 24.0).cos();
            76.0 + offset_f + seasonal + diurnal + 3.5 * noise[i]
        })
        .collect()
}

fn t_day_of_year(t: HourlyTimestamp) -> f64 {
    chrono::NaiveDate::from_ymd_opt(t.year(), t.month(), t.day())
        .map(|d| d.ordinal() as f64)
        .unwrap_or(0.0)
}

/// Usage profile in MW excluding weather: daily double hump and weekend dip.
fn usage_profile(t: HourlyTimestamp, p: &ZoneParams) -> f64 {
    let h = t.hour() as f64;
    let evening = (-(h - p.peak_hour).powi(2) / 18.0).exp();
    let morning = (-(h - 8.0).powi(2) / 8.0).exp();
    let night = -((2.0 * PI * (h - 3.0) / 24.0).cos().max(0.0));
    let weekend = matches!(t.weekday(), Weekday::Sat | Weekday::Sun);
    let daily = 0.16 * evening + 0.06 * morning + 0.08 * night;
    p.base_mw * (daily - if weekend { 0.05 } else { 0.0 })
}

/// Generates a deterministic synthetic dataset.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<ZonalDataset> {
    let start = cfg.validate()?;
    let n = cfg.n_hours;
    let w = cfg.shared_weather_weight;
    let shared = weather(&mut stage_rng(cfg.seed, "synth/weather/shared"), start, n, 0.0);

    let mut zones = BTreeMap::new();
    for k in 0..cfg.zone_count {
        let name = zone_name(k);
        let p = zone_params(k);
        let local = weather(
            &mut stage_rng(cfg.seed, &format!("synth/weather/{name}")),
            start,
            n,
            0.0,
        );
        let temps: Vec<f64> = shared
            .iter()
            .zip(&local)
            .map(|(s, l)| w * s + (1.0 - w) * l + p.climate_offset_f)
            .collect();
        let noise = ar1(&mut stage_rng(cfg.seed, &format!("synth/load/{name}")), n, 0.9);
        let load: Vec<f64> = temps
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let ts = start.add_hours(i as i64);
                let cooling = (t - COOLING_BALANCE_F).max(0.0).powi(2);
                let base = p.base_mw * (1.0 + p.growth_per_year * i as f64 / 8760.0);
                base + p.cooling_mw_per_f2 * cooling + usage_profile(ts, &p) + cfg.noise_sd * noise[i]
            })
            .collect();
        zones.insert(
            name,
            ZoneSeries {
                load: TimeSeries::new(Unit::Mw, start, load)?,
                temperature: TimeSeries::new(Unit::DegF, start, temps)?,
            },
        );
    }
    ZonalDataset::new(zones)
}
