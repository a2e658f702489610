//! Generates a synthetic two-zone dataset and writes it in the ingest format.
//!
//! cargo run --example synth_dataset -- [out_dir]

use zonal_stlf::ingest::write_dataset;
use zonal_stlf::similarity::pearson_cor;
use zonal_stlf::synth::{generate_synthetic, SynthConfig};

fn main() -> zonal_stlf::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out/examples/synth".into());
    let cfg = SynthConfig { n_hours: 24 * 7 * 26, ..SynthConfig::default() };
    let ds = generate_synthetic(&cfg)?;
    println!("{} zones x {} hours from {}", ds.n_zones(), ds.len(), ds.start());
    for (id, z) in ds.zones() {
        let l = z.load.values();
        let t = z.temperature.values();
        let mean = l.iter().sum::<f64>() / l.len() as f64;
        let peak = l.iter().cloned().fold(f64::MIN, f64::max);
        let tmax = t.iter().cloned().fold(f64::MIN, f64::max);
        println!("{id:>9}: mean load {mean:8.1} MW, peak {peak:8.1} MW, max temp {tmax:5.1} F");
    }
    let loads: Vec<&[f64]> = ds.zones().map(|(_, z)| z.load.values()).collect();
    println!("load correlation between zones: {:.3}", pearson_cor(loads[0], loads[1])?);

    let (load, temp) = (format!("{out}/load.csv"), format!("{out}/temperature.csv"));
    write_dataset(&load, &temp, &ds)?;
    println!("wrote {load} and {temp}");
    Ok(())
}
