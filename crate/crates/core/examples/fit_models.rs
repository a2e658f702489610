//! Fits both regression models to every zone of a synthetic dataset and
//! compares their held-out accuracy.
//!
//! cargo run --example fit_models

use zonal_stlf::features::{build_design, train_test_split, FeatureOptions, ModelKind};
use zonal_stlf::regress::fit_ols;
use zonal_stlf::seed::derive_seed;
use zonal_stlf::synth::{generate_synthetic, SynthConfig};

fn main() -> zonal_stlf::Result<()> {
    let ds = generate_synthetic(&SynthConfig::default())?;
    let split_seed = derive_seed(1, "split");
    println!("{:<9} {:<5} {:>5} {:>9} {:>9} {:>9}", "zone", "model", "cols", "train R2", "test aR2", "test MAE");
    for (id, zone) in ds.zones() {
        for kind in [ModelKind::F1, ModelKind::F2] {
            let x = build_design(kind, zone, FeatureOptions::default())?;
            let (train, test) = train_test_split(&x, 0.7, split_seed)?;
            let mut model = fit_ols(&train)?;
            let test_stats = model.evaluate_test(&test)?;
            let train_stats = model.train_stats.expect("fitted");
            println!(
                "{id:<9} {kind:<5} {:>5} {:>9.4} {:>9.4} {:>9.2}",
                x.cols(),
                train_stats.r2,
                test_stats.adj_r2,
                test_stats.mae
            );
            if kind == ModelKind::F1 {
                let show = ["(Intercept)", "T", "H18", "LL_1w", "LL_2w"];
                let picked: Vec<String> = show
                    .iter()
                    .filter_map(|l| model.coefficient(l).map(|v| format!("{l}={v:.3}")))
                    .collect();
                println!("          {}", picked.join("  "));
            }
        }
    }
    Ok(())
}
