//! Calibrates a similarity baseline between two zones' forecasts, then
//! measures how often Gaussian temperature noise on one zone is flagged.
//!
//! cargo run --example detect_attack

use zonal_stlf::attack::AttackKind;
use zonal_stlf::detect::{DetectConfig, DetectionSetup};
use zonal_stlf::synth::{generate_synthetic, SynthConfig};

fn main() -> zonal_stlf::Result<()> {
    let ds = generate_synthetic(&SynthConfig::default())?;
    let cfg = DetectConfig { n_windows: 100, ..DetectConfig::default() };
    let setup = DetectionSetup::prepare(&ds, "WEST", &cfg, 5)?;

    println!("baseline over {} windows of {} h:", setup.baseline.n_windows, setup.baseline.window_length);
    for b in &setup.baseline.measures {
        let state = if b.excluded { "excluded" } else { "" };
        println!("  {:<12} mean {:>12.5} sd {:>10.5} {state}", b.measure.name(), b.mean, b.sd);
    }

    let held_out = generate_synthetic(&SynthConfig { seed: 1001, ..SynthConfig::default() })?;
    let fp = setup.held_out_verdicts(&held_out, 100, cfg.tau, cfg.k, 9)?;
    let fp_rate = fp.iter().filter(|v| v.k_of_n_flag).count() as f64 / fp.len() as f64;
    println!("\nheld-out false-positive rate ({} of n rule): {fp_rate:.3}", cfg.k);

    println!("\n{:>6} {:>10} {:>10} {:>14}", "sd", "any rate", "k-of-n", "mean shift MW");
    for sd in [0.5, 1.0, 2.0, 4.0] {
        let out = setup.run_trials(&AttackKind::gaussian(sd), 40, cfg.tau, cfg.k, 17)?;
        let s = &out.summary;
        println!("{sd:>6.1} {:>10.3} {:>10.3} {:>14.3}", s.detection_rate, s.k_of_n_detection_rate, s.mean_forecast_shift);
    }
    Ok(())
}
