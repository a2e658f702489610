//! Optimizes a norm-bounded temperature perturbation that inflates (or
//! deflates) the total forecast, for each norm and several budgets.
//!
//! cargo run --example bounded_attack

use zonal_stlf::attack::{run_attack, AttackKind, AttackSpec, Direction, NormOrder};
use zonal_stlf::features::{build_design, train_test_split, FeatureOptions, ModelKind};
use zonal_stlf::regress::fit_ols;
use zonal_stlf::synth::{generate_synthetic, SynthConfig};

fn main() -> zonal_stlf::Result<()> {
    let ds = generate_synthetic(&SynthConfig { n_hours: 2000, ..SynthConfig::default() })?;
    let target = "WEST";
    let zone = ds.zone(target)?;
    let opts = FeatureOptions::default();
    let (train, _) = train_test_split(&build_design(ModelKind::F2, zone, opts)?, 0.7, 11)?;
    let model = fit_ols(&train)?;

    println!("{:<5} {:>8} {:>9} {:>10} {:>16} {:>6}", "norm", "epsilon", "direction", "||delta||", "total shift MW", "iters");
    for norm in [NormOrder::L1, NormOrder::L2, NormOrder::Linf] {
        for eps in [1.0, 5.0, 20.0] {
            for dir in [Direction::Inflate, Direction::Deflate] {
                let spec = AttackSpec { kind: AttackKind::bounded(eps, norm, dir), target_zone: target.into(), seed: 0 };
                let r = run_attack(&model, zone, opts, &spec)?;
                assert!(r.feasible);
                println!(
                    "{norm:<5} {eps:>8.1} {:>9} {:>10.3} {:>16.1} {:>6}",
                    format!("{dir:?}").to_lowercase(),
                    r.delta_norm,
                    r.total_shift(),
                    r.iterations_used
                );
            }
        }
    }
    Ok(())
}
