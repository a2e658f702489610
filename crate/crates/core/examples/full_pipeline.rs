//! Runs synth, fit, predict, attack, measure, detect and report in one go.
//!
//! cargo run --example full_pipeline -- [out_dir]

use zonal_stlf::pipeline::{run_pipeline, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out/examples/pipeline".into());
    let mut cfg = RunConfig { out_dir: out.into(), ..RunConfig::default() };
    cfg.synth.n_hours = 3000;
    cfg.detect.n_trials = 20;
    let files = run_pipeline(&cfg)?;
    for f in &files {
        println!("{}", f.display());
    }
    let table = std::fs::read_to_string(cfg.out_dir.join("report").join("similarity_table.txt"))?;
    println!("\n{table}");
    Ok(())
}
