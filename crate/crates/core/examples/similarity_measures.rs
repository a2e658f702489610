//! Every similarity measure between two neighbouring zones' loads, and how
//! each responds to shifting, scaling and noising one of them.
//!
//! cargo run --example similarity_measures

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use zonal_stlf::similarity::{similarity_vector, Measure, SimilarityParams};
use zonal_stlf::synth::{generate_synthetic, SynthConfig};

fn main() -> zonal_stlf::Result<()> {
    let ds = generate_synthetic(&SynthConfig { n_hours: 24 * 7 * 8, ..SynthConfig::default() })?;
    let zones: Vec<&[f64]> = ds.zones().map(|(_, z)| z.load.values()).collect();
    let (x, y) = (zones[0], zones[1]);
    let params = SimilarityParams::default();

    let shifted: Vec<f64> = y.iter().map(|v| v + 100.0).collect();
    let scaled: Vec<f64> = y.iter().map(|v| v * 1.5).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noise = Normal::new(0.0, 50.0).expect("valid sd");
    let noisy: Vec<f64> = y.iter().map(|v| v + noise.sample(&mut rng)).collect();

    let cases = [("y", y), ("y+100", &shifted[..]), ("1.5y", &scaled[..]), ("y+noise", &noisy[..])];
    let vectors = cases
        .iter()
        .map(|(_, c)| similarity_vector(x, c, &params))
        .collect::<zonal_stlf::Result<Vec<_>>>()?;

    print!("{:<12}", "measure");
    for (name, _) in &cases {
        print!("{name:>14}");
    }
    println!();
    for m in Measure::ALL {
        print!("{:<12}", m.name());
        for v in &vectors {
            match v.get(m) {
                Some(d) if d.abs() >= 1e5 => print!("{d:>14.4e}"),
                Some(d) => print!("{d:>14.5}"),
                None => print!("{:>14}", "n/a"),
            }
        }
        println!();
    }
    println!("\nSAX word length used: {}", vectors[0].sax_word_len);
    Ok(())
}
