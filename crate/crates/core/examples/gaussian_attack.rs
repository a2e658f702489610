//! Adds zero-mean Gaussian noise to one zone's temperature and reports the
//! forecast shift for both models at several noise levels.
//!
//! cargo run --example gaussian_attack

use zonal_stlf::attack::{run_attack, AttackKind, AttackSpec};
use zonal_stlf::features::{build_design, train_test_split, FeatureOptions, ModelKind};
use zonal_stlf::regress::fit_ols;
use zonal_stlf::synth::{generate_synthetic, SynthConfig};

fn main() -> zonal_stlf::Result<()> {
    let ds = generate_synthetic(&SynthConfig::default())?;
    let target = "WEST";
    let zone = ds.zone(target)?;
    let opts = FeatureOptions::default();
    println!("{:<5} {:>6} {:>12} {:>16} {:>16}", "model", "sd", "||delta||_2", "mean shift MW", "mean |shift| MW");
    for kind in [ModelKind::F1, ModelKind::F2] {
        let (train, _) = train_test_split(&build_design(kind, zone, opts)?, 0.7, 11)?;
        let model = fit_ols(&train)?;
        for sd in [0.5, 1.0, 2.0, 5.0] {
            let spec = AttackSpec { kind: AttackKind::gaussian(sd), target_zone: target.into(), seed: 42 };
            let r = run_attack(&model, zone, opts, &spec)?;
            let n = r.forecast_shift.len() as f64;
            let mean_abs = r.forecast_shift.iter().map(|s| s.abs()).sum::<f64>() / n;
            println!("{kind:<5} {sd:>6.1} {:>12.2} {:>16.3} {mean_abs:>16.3}", r.delta_norm, r.total_shift() / n);
        }
    }
    Ok(())
}
