//! SAX words for a daily profile and the MINDIST lower bound on the
//! Euclidean distance of the z-normalized series.
//!
//! cargo run --example sax_words

use zonal_stlf::series::znormalize;
use zonal_stlf::similarity::{breakpoints, d_euclidean, mindist, paa, sax_transform};
use zonal_stlf::synth::{generate_synthetic, SynthConfig};

fn main() -> zonal_stlf::Result<()> {
    let ds = generate_synthetic(&SynthConfig { n_hours: 24 * 30, ..SynthConfig::default() })?;
    let (_, zone) = ds.zones().next().expect("two zones");
    let week = zone.load.slice(0..168);
    let z = znormalize(&week)?;

    println!("breakpoints a=4: {:?}", breakpoints(4)?);
    println!("PAA (7 segments): {:?}", paa(z.values(), 7)?.iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>());
    for (w, a) in [(7, 4), (14, 4), (28, 6), (56, 10)] {
        println!("w={w:>2} a={a:>2}: {}", sax_transform(z.values(), w, a)?.as_string());
    }

    println!("\nday-to-day MINDIST vs Euclidean (w=8, a=6):");
    let days: Vec<Vec<f64>> = (0..7)
        .map(|d| znormalize(&zone.load.slice(d * 24..(d + 1) * 24)).map(|s| s.values().to_vec()))
        .collect::<zonal_stlf::Result<_>>()?;
    for d in 1..7 {
        let q = sax_transform(&days[0], 8, 6)?;
        let c = sax_transform(&days[d], 8, 6)?;
        let lb = mindist(&q, &c)?;
        let e = d_euclidean(&days[0], &days[d])?;
        println!("day0 {} vs day{d} {}: MINDIST {lb:.4} <= Euclidean {e:.4}", q.as_string(), c.as_string());
        assert!(lb <= e + 1e-9);
    }
    Ok(())
}
