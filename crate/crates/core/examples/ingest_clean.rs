//! Parses and cleans the bundled sample files, which contain a few bad rows,
//! a duplicate timestamp, an out-of-range temperature and a three-hour gap.
//!
//! cargo run --example ingest_clean

use zonal_stlf::ingest::ingest_files;

fn main() -> zonal_stlf::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let out = ingest_files(
        format!("{dir}/sample_load.csv"),
        format!("{dir}/sample_temperature.csv"),
        &[],
        337,
    )?;
    let ds = &out.dataset;
    println!("cleaned: {} zones x {} hours, {} .. {}", ds.n_zones(), ds.len(), ds.start(), ds.start().add_hours(ds.len() as i64 - 1));

    println!("\n{:<27} {:>6} {:>6} {:>8} {:>13}", "series", "read", "kept", "dropped", "interpolated");
    for (stage, report) in [("parse", &out.parse_report), ("clean", &out.clean_report)] {
        for (name, s) in &report.per_series {
            println!(
                "{:<27} {:>6} {:>6} {:>8} {:>13}",
                format!("{stage} {name}"),
                s.rows_read,
                s.rows_kept,
                s.rows_dropped,
                s.rows_interpolated
            );
        }
    }
    println!("\ndropped rows:");
    for d in &out.parse_report.dropped_lines {
        let file = std::path::Path::new(&d.file).file_name().unwrap_or_default().to_string_lossy();
        println!("  {file}:{} {}", d.line, d.reason);
    }
    Ok(())
}
