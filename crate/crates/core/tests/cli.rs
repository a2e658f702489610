use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_zonal-stlf"))
}

fn run(out: &Path, args: &[&str]) -> Output {
    bin().arg("--out").arg(out).args(args).output().expect("binary runs")
}

fn data_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn missing_input_is_a_user_error_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    let o = bin()
        .arg("--out")
        .arg(dir.path())
        .args(["ingest", "--load"])
        .arg(&missing)
        .arg("--temperature")
        .arg(data_file("sample_temperature.csv"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(&missing.display().to_string()), "{}", stderr(&o));

    let o = run(dir.path(), &["fit"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("load.csv"));

    let o = bin().args(["--config", "/definitely/not/here.toml", "fit"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/definitely/not/here.toml"));
}

#[test]
fn invalid_config_values_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "train_ratio = 1.5\n").unwrap();
    let o = bin().arg("--config").arg(&cfg).arg("fit").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("train_ratio"));

    let o = run(dir.path(), &["attack", "--epsilon", "1", "--direction", "sideways"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sideways"));

    let o = run(dir.path(), &["synth", "--hours", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn synth_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    for (out, seed) in [(&a, "3"), (&b, "3"), (&c, "4")] {
        let o = run(out, &["--seed", seed, "synth", "--hours", "800"]);
        assert!(o.status.success(), "{}", stderr(&o));
        let listed = String::from_utf8(o.stdout).unwrap();
        assert!(listed.lines().any(|l| l.ends_with("load.csv")));
    }
    for f in ["load.csv", "temperature.csv"] {
        let read = |d: &Path| std::fs::read(d.join("data").join(f)).unwrap();
        assert_eq!(read(&a), read(&b), "{f}");
        assert_ne!(read(&a), read(&c), "{f}");
    }
    let text = std::fs::read_to_string(a.join("data/load.csv")).unwrap();
    assert_eq!(text.lines().count(), 801);
}

#[test]
fn ingest_sample_reports_known_defects() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .arg("--out")
        .arg(dir.path())
        .args(["ingest", "--load"])
        .arg(data_file("sample_load.csv"))
        .arg("--temperature")
        .arg(data_file("sample_temperature.csv"))
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let dropped = std::fs::read_to_string(dir.path().join("data/dropped_rows.csv")).unwrap();
    let reasons: Vec<&str> = dropped.lines().skip(1).collect();
    assert_eq!(reasons.len(), 4, "{dropped}");
    assert!(reasons.iter().any(|l| l.contains("sample_load.csv\",102,\"unparsable value")));
    assert!(reasons.iter().any(|l| l.contains(",502,\"bad timestamp")));
    assert!(reasons.iter().any(|l| l.contains(",899,\"duplicate timestamp")));
    assert!(reasons.iter().any(|l| l.contains("sample_temperature.csv\",602,\"temperature 999 out of bounds")));

    let load = std::fs::read_to_string(dir.path().join("data/load.csv")).unwrap();
    assert_eq!(load.lines().count(), 1201);
    let report = std::fs::read_to_string(dir.path().join("data/cleaning_report.csv")).unwrap();
    assert!(report.contains("clean,FAR_WEST/load,1195,1195,0,5,0,0,0"), "{report}");
    assert!(report.contains("parse,FAR_WEST/temperature,1200,1199,1,0,0,1,0"), "{report}");
}

#[test]
fn measure_without_attack_marks_attacked_columns_absent() {
    let dir = tempfile::tempdir().unwrap();
    for step in [&["synth", "--hours", "1200"][..], &["fit"], &["measure"]] {
        let o = run(dir.path(), step);
        assert!(o.status.success(), "{step:?}: {}", stderr(&o));
    }
    let csv = std::fs::read_to_string(dir.path().join("measure/similarity.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert!(rows[0].starts_with("source,scenario,status,zone_a,zone_b,n,"));
    assert_eq!(rows.len(), 7);
    for r in &rows[1..] {
        let f: Vec<&str> = r.split(',').collect();
        let expect = if f[1] == "attacked" { "absent" } else { "ok" };
        assert_eq!(f[2], expect, "{r}");
        if expect == "absent" {
            assert!(f[5..].iter().all(|v| v.is_empty()), "{r}");
        }
    }

    let o = run(dir.path(), &["report"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = std::fs::read_to_string(dir.path().join("report/similarity_table.txt")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 7, "{table}");
    assert!(lines[0].contains("Raw data") && lines[0].contains("f2 attacked"));
    for l in &lines[2..] {
        assert_eq!(l.matches("absent").count(), 2, "{l}");
    }
}

#[test]
fn report_grid_is_five_by_five_after_attack() {
    let dir = tempfile::tempdir().unwrap();
    for step in [&["synth", "--hours", "1200"][..], &["fit"], &["predict"], &["attack", "--sd", "1"], &["measure"], &["report"]] {
        let o = run(dir.path(), step);
        assert!(o.status.success(), "{step:?}: {}", stderr(&o));
    }
    let table = std::fs::read_to_string(dir.path().join("report/similarity_table.txt")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    let header: Vec<&str> = lines[0].split("  ").map(str::trim).filter(|s| !s.is_empty()).collect();
    assert_eq!(header, ["Method", "Raw data", "f1 clean", "f2 clean", "f1 attacked", "f2 attacked"]);
    let body = &lines[2..];
    assert_eq!(body.len(), 5);
    for l in body {
        let numbers = l.split_whitespace().filter(|t| t.parse::<f64>().is_ok()).count();
        assert_eq!(numbers, 5, "{l}");
    }
    assert!(dir.path().join("report/clean_vs_attacked_f2.svg").exists());
    assert!(dir.path().join("report/model_metrics.txt").exists());
}

#[test]
fn single_zone_data_fits_but_cannot_be_compared() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("west.toml");
    std::fs::write(
        &cfg,
        format!(
            "zones = [\"WEST\"]\n[data]\nload_file = {:?}\ntemperature_file = {:?}\n",
            data_file("sample_load.csv"),
            data_file("sample_temperature.csv")
        ),
    )
    .unwrap();
    let step = |name: &str| bin().arg("--config").arg(&cfg).arg("--out").arg(dir.path()).arg(name).output().unwrap();
    for name in ["ingest", "fit", "predict"] {
        let o = step(name);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
    }
    assert!(dir.path().join("models/WEST_f2.toml").exists());
    assert!(!dir.path().join("models/FAR_WEST_f2.toml").exists());
    for name in ["measure", "detect"] {
        let o = step(name);
        assert_eq!(o.status.code(), Some(2), "{name}");
        assert!(stderr(&o).contains("at least 2 zones"), "{}", stderr(&o));
    }
}

#[test]
fn sample_config_runs_every_stage() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = data_file("sample.toml");
    for step in ["ingest", "fit", "predict", "attack", "measure", "detect", "report"] {
        let o = bin().arg("--config").arg(&cfg).arg("--out").arg(dir.path()).arg(step).output().unwrap();
        assert!(o.status.success(), "{step}: {}", stderr(&o));
    }
    let summary = std::fs::read_to_string(dir.path().join("attack/f2_summary.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().starts_with("bounded_opt,WEST,2,inf,"), "{summary}");
    assert!(dir.path().join("detect/rates.csv").exists());
}
