//! False data injection on temperature inputs.
//!
//! Two attacks are provided: additive Gaussian noise, and a norm-bounded
//! perturbation found by projected gradient ascent on the attacker's
//! objective `γ · Σ_t ŷ_t(T + Δ)` subject to `‖Δ‖_p ≤ ε`. Attacks only touch
//! inference-time temperature; models are always trained on clean data.

use std::fmt;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{build_design, DesignMatrix, FeatureOptions};
use crate::regress::{predict, FittedModel};
use crate::series::{TimeSeries, ZoneSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormOrder {
    L1,
    L2,
    Linf,
}

impl NormOrder {
    pub fn norm(self, v: &[f64]) -> f64 {
        match self {
            NormOrder::L1 => v.iter().map(|x| x.abs()).sum(),
            NormOrder::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            NormOrder::Linf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }
}

impl fmt::Display for NormOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormOrder::L1 => "1",
            NormOrder::L2 => "2",
            NormOrder::Linf => "inf",
        })
    }
}

impl std::str::FromStr for NormOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "1" | "l1" => Ok(NormOrder::L1),
            "2" | "l2" => Ok(NormOrder::L2),
            "inf" | "linf" | "infinity" => Ok(NormOrder::Linf),
            _ => Err(Error::InvalidParameter(format!("unsupported norm `{s}`"))),
        }
    }
}

/// Sign of the attacker's objective: raise or lower the total forecast.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Inflate,
    Deflate,
}

impl Direction {
    pub fn gamma(self) -> f64 {
        match self {
            Direction::Inflate => 1.0,
            Direction::Deflate => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttackKind {
    Gaussian {
        mean: f64,
        sd: f64,
    },
    BoundedOpt {
        epsilon: f64,
        norm: NormOrder,
        direction: Direction,
        max_iters: usize,
        /// Defaults to `epsilon / 50`.
        step_size: Option<f64>,
    },
}

impl AttackKind {
    pub fn gaussian(sd: f64) -> Self {
        AttackKind::Gaussian { mean: 0.0, sd }
    }

    pub fn bounded(epsilon: f64, norm: NormOrder, direction: Direction) -> Self {
        AttackKind::BoundedOpt {
            epsilon,
            norm,
            direction,
            max_iters: 200,
            step_size: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackSpec {
    #[serde(flatten)]
    pub kind: AttackKind,
    pub target_zone: String,
    #[serde(default)]
    pub seed: u64,
}

impl AttackSpec {
    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            AttackKind::Gaussian { mean, sd } => {
                if !(mean.is_finite() && sd.is_finite() && *sd >= 0.0) {
                    return Err(Error::InvalidParameter("gaussian attack needs finite mean and sd >= 0".into()));
                }
            }
            AttackKind::BoundedOpt {
                epsilon,
                max_iters,
                step_size,
                ..
            } => {
                if !(*epsilon > 0.0 && epsilon.is_finite()) {
                    return Err(Error::InvalidParameter("epsilon must be > 0".into()));
                }
                if *max_iters == 0 {
                    return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
                }
                if let Some(s) = step_size {
                    if !(*s > 0.0 && s.is_finite()) {
                        return Err(Error::InvalidParameter("step_size must be > 0".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Adds seeded iid `Normal(mean, sd²)` noise to every hour.
pub fn inject_gaussian(temperature: &TimeSeries, mean: f64, sd: f64, seed: u64) -> Result<TimeSeries> {
    if sd == 0.0 && mean == 0.0 {
        return Ok(temperature.clone());
    }
    let dist = Normal::new(mean, sd)
        .map_err(|e| Error::InvalidParameter(format!("gaussian noise: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = temperature
        .values()
        .iter()
        .map(|t| t + dist.sample(&mut rng))
        .collect();
    temperature.with_values(values)
}

/// Euclidean projection onto the `p`-norm ball of radius `epsilon`.
///
/// The result always satisfies `norm(result) <= epsilon` in floating point.
pub fn project_lp(delta: &[f64], epsilon: f64, p: NormOrder) -> Vec<f64> {
    assert!(epsilon > 0.0, "projection radius must be positive");
    if p.norm(delta) <= epsilon {
        return delta.to_vec();
    }
    let mut out: Vec<f64> = match p {
        NormOrder::Linf => delta.iter().map(|d| d.clamp(-epsilon, epsilon)).collect(),
        NormOrder::L2 => {
            let s = epsilon / NormOrder::L2.norm(delta);
            delta.iter().map(|d| d * s).collect()
        }
        NormOrder::L1 => {
            // sort-based projection of |Δ| onto the simplex of radius ε
            let mut u: Vec<f64> = delta.iter().map(|d| d.abs()).collect();
            u.sort_unstable_by(|a, b| b.total_cmp(a));
            let mut cum = 0.0;
            let mut theta = 0.0;
            for (j, &uj) in u.iter().enumerate() {
                cum += uj;
                let t = (cum - epsilon) / (j + 1) as f64;
                if uj - t > 0.0 {
                    theta = t;
                } else {
                    break;
                }
            }
            delta
                .iter()
                .map(|d| d.signum() * (d.abs() - theta).max(0.0))
                .collect()
        }
    };
    // rounding can leave the norm a few ulps above the radius
    let mut guard = 0;
    while p.norm(&out) > epsilon && guard < 64 {
        let shrink = (epsilon / p.norm(&out)) * (1.0 - 4.0 * f64::EPSILON);
        out.iter_mut().for_each(|v| *v *= shrink);
        guard += 1;
    }
    out
}

/// Forecast of a set of rows as a function of a temperature perturbation.
///
/// The optimizer only needs forecasts and the gradient of their sum, so a
/// surrogate model can stand in for the defender's model.
pub trait ForecastSurface {
    fn rows(&self) -> usize;
    fn forecast(&self, delta: &[f64]) -> Vec<f64>;
    /// `∂(Σ_t ŷ_t)/∂Δ_t` for every row.
    fn total_gradient(&self, delta: &[f64]) -> Vec<f64>;
}

/// A fitted linear model evaluated on fixed design rows, with the
/// temperature-bearing columns recomputed from `T + Δ`.
#[derive(Debug, Clone)]
pub struct LinearModelSurface {
    design: DesignMatrix,
    fixed: Vec<f64>,
    temperature_columns: Vec<(usize, f64)>,
}

impl LinearModelSurface {
    pub fn new(model: &FittedModel, design: DesignMatrix) -> Result<Self> {
        predict(model, &design)?;
        let beta = model.beta();
        let temperature_columns: Vec<(usize, f64)> = design
            .columns()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.depends_on_temperature())
            .map(|(j, _)| (j, beta[j]))
            .collect();
        if temperature_columns.is_empty() {
            return Err(Error::NotTemperatureDependent);
        }
        let fixed = (0..design.rows())
            .map(|i| {
                design
                    .row(i)
                    .iter()
                    .zip(&beta)
                    .enumerate()
                    .filter(|(j, _)| !design.columns()[*j].depends_on_temperature())
                    .map(|(_, (x, b))| x * b)
                    .sum()
            })
            .collect();
        Ok(Self {
            design,
            fixed,
            temperature_columns,
        })
    }

    pub fn design(&self) -> &DesignMatrix {
        &self.design
    }

    /// The same surface over a contiguous block of its rows.
    pub fn restrict(&self, rows: std::ops::Range<usize>) -> Self {
        let idx: Vec<usize> = rows.clone().collect();
        Self {
            design: self.design.select_rows(&idx),
            fixed: self.fixed[rows].to_vec(),
            temperature_columns: self.temperature_columns.clone(),
        }
    }
}

impl ForecastSurface for LinearModelSurface {
    fn rows(&self) -> usize {
        self.design.rows()
    }

    fn forecast(&self, delta: &[f64]) -> Vec<f64> {
        let cols = self.design.columns();
        let ts = self.design.row_timestamps();
        let temp = self.design.row_temperature();
        (0..self.rows())
            .map(|i| {
                let t = temp[i] + delta[i];
                let variable: f64 = self
                    .temperature_columns
                    .iter()
                    .map(|&(j, b)| b * cols[j].temperature_value(ts[i], t))
                    .sum();
                self.fixed[i] + variable
            })
            .collect()
    }

    fn total_gradient(&self, delta: &[f64]) -> Vec<f64> {
        let cols = self.design.columns();
        let ts = self.design.row_timestamps();
        let temp = self.design.row_temperature();
        (0..self.rows())
            .map(|i| {
                let t = temp[i] + delta[i];
                self.temperature_columns
                    .iter()
                    .map(|&(j, b)| b * cols[j].temperature_derivative(ts[i], t))
                    .sum()
            })
            .collect()
    }
}

/// Outcome of projected gradient ascent.
#[derive(Debug, Clone, PartialEq)]
pub struct PgdOutcome {
    pub delta: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// Maximizes `γ · Σ ŷ(Δ)` over the `p`-ball with fixed-step projected
/// gradient steps, returning the best iterate seen (Δ = 0 included).
pub fn projected_gradient_attack(
    surface: &impl ForecastSurface,
    epsilon: f64,
    norm: NormOrder,
    direction: Direction,
    max_iters: usize,
    step_size: f64,
) -> PgdOutcome {
    let gamma = direction.gamma();
    let objective = |d: &[f64]| gamma * surface.forecast(d).iter().sum::<f64>();
    let mut delta = vec![0.0; surface.rows()];
    let mut best = PgdOutcome {
        objective: objective(&delta),
        delta: delta.clone(),
        iterations: 0,
    };
    let mut iterations = 0;
    for _ in 0..max_iters {
        iterations += 1;
        let grad = surface.total_gradient(&delta);
        let step: Vec<f64> = delta
            .iter()
            .zip(&grad)
            .map(|(d, g)| d + step_size * gamma * g)
            .collect();
        let next = project_lp(&step, epsilon, norm);
        let moved = next
            .iter()
            .zip(&delta)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        delta = next;
        let obj = objective(&delta);
        if obj > best.objective {
            best.objective = obj;
            best.delta.clone_from(&delta);
        }
        if moved <= 1e-12 * epsilon.max(1.0) {
            break;
        }
    }
    best.iterations = iterations;
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackResult {
    pub perturbed_temperature: TimeSeries,
    /// Perturbation over the full temperature series.
    pub delta: Vec<f64>,
    pub delta_norm: f64,
    /// Attacked minus clean forecast for every design row.
    pub forecast_shift: Vec<f64>,
    pub iterations_used: usize,
    pub feasible: bool,
    pub spec: AttackSpec,
}

impl AttackResult {
    pub fn total_shift(&self) -> f64 {
        self.forecast_shift.iter().sum()
    }

    pub fn summary_header() -> &'static str {
        "kind,target_zone,epsilon,p,delta_norm,total_shift_mw,iterations,feasible"
    }

    pub fn summary_record(&self) -> String {
        let (kind, eps, p) = match &self.spec.kind {
            AttackKind::Gaussian { .. } => ("gaussian", String::new(), "2".to_string()),
            AttackKind::BoundedOpt { epsilon, norm, .. } => {
                ("bounded_opt", epsilon.to_string(), norm.to_string())
            }
        };
        format!(
            "{kind},{},{eps},{p},{},{},{},{}",
            self.spec.target_zone,
            self.delta_norm,
            self.total_shift(),
            self.iterations_used,
            self.feasible
        )
    }

    /// Writes the perturbed temperature file and the one-row summary.
    pub fn export(&self, temperature_path: impl AsRef<Path>, summary_path: impl AsRef<Path>) -> Result<()> {
        crate::ingest::write_temperature_file(
            temperature_path,
            [(self.spec.target_zone.as_str(), &self.perturbed_temperature)],
        )?;
        let path = summary_path.as_ref();
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        writeln!(f, "{}\n{}", Self::summary_header(), self.summary_record()).map_err(|e| Error::io(path, e))
    }
}

/// Runs an attack against `model` on one zone's data.
///
/// The model's design is rebuilt on the zone; the perturbation covers the
/// hours that enter the design rows and is zero elsewhere.
pub fn run_attack(
    model: &FittedModel,
    zone: &ZoneSeries,
    opts: FeatureOptions,
    spec: &AttackSpec,
) -> Result<AttackResult> {
    spec.validate()?;
    let design = build_design(model.kind, zone, opts)?;
    let surface = LinearModelSurface::new(model, design)?;
    let temp = &zone.temperature;
    let row_index: Vec<usize> = surface
        .design()
        .row_timestamps()
        .iter()
        .map(|t| temp.index_of(*t).expect("design rows lie in the zone index"))
        .collect();

    let (delta, iterations, feasible, row_delta) = match &spec.kind {
        AttackKind::Gaussian { mean, sd } => {
            let noisy = inject_gaussian(temp, *mean, *sd, spec.seed)?;
            let delta: Vec<f64> = noisy
                .values()
                .iter()
                .zip(temp.values())
                .map(|(a, b)| a - b)
                .collect();
            let row_delta = row_index.iter().map(|&i| delta[i]).collect();
            (delta, 0, true, row_delta)
        }
        AttackKind::BoundedOpt {
            epsilon,
            norm,
            direction,
            max_iters,
            step_size,
        } => {
            let step = step_size.unwrap_or(epsilon / 50.0);
            let out = projected_gradient_attack(&surface, *epsilon, *norm, *direction, *max_iters, step);
            let mut delta = vec![0.0; temp.len()];
            for (&i, d) in row_index.iter().zip(&out.delta) {
                delta[i] = *d;
            }
            let feasible = norm.norm(&out.delta) <= *epsilon;
            (delta, out.iterations, feasible, out.delta)
        }
    };
    let clean = surface.forecast(&vec![0.0; surface.rows()]);
    let attacked = surface.forecast(&row_delta);
    let perturbed: Vec<f64> = temp.values().iter().zip(&delta).map(|(t, d)| t + d).collect();
    let delta_norm = match &spec.kind {
        AttackKind::Gaussian { .. } => NormOrder::L2.norm(&delta),
        AttackKind::BoundedOpt { norm, .. } => norm.norm(&delta),
    };
    Ok(AttackResult {
        perturbed_temperature: temp.with_values(perturbed)?,
        delta,
        delta_norm,
        forecast_shift: attacked.iter().zip(&clean).map(|(a, c)| a - c).collect(),
        iterations_used: iterations,
        feasible,
        spec: spec.clone(),
    })
}
