//! Short-term load forecasting workbench.
//!
//! Builds zonal regression load models from hourly load and temperature,
//! simulates false data injection on temperature inputs, and compares the
//! forecasts of neighbouring zones with time-series similarity measures used
//! as physical-consistency checks.

pub mod attack;
pub mod detect;
pub mod error;
pub mod features;
pub mod ingest;
pub mod pipeline;
pub mod plot;
pub mod regress;
pub mod seed;
pub mod series;
pub mod similarity;
pub mod synth;

pub use error::{Error, Result};
