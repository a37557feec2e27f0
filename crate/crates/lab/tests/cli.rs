use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shrinker-lab"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .env_remove("SHRINKER_LAB_THREADS")
        .output()
        .expect("spawn shrinker-lab")
}

fn entries(dir: &Path) -> usize {
    std::fs::read_dir(dir).map(|d| d.count()).unwrap_or(0)
}

#[test]
fn usage_errors_exit_2_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["catalog", "verify", "--model", "torus"][..],
        &["catalog", "verify", "--m", "2"],
        &["entropy", "mu", "--model", "gaussian"],
        &["radii", "--points", "axis:0,zz"],
    ] {
        let out = lab(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(entries(dir.path()), 0);

    let bad = Command::new(env!("CARGO_BIN_EXE_shrinker-lab")).arg("no-such-command").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn entropy_curve_bottoms_out_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["entropy", "curve", "--csv", "mu.csv", "--plot", "mu.svg"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(dir.path().join("mu.csv")).unwrap();
    let head = rdr.headers().unwrap().clone();
    let (ti, mi) = (head.iter().position(|h| h == "tau").unwrap(), head.iter().position(|h| h == "is_min").unwrap());
    let mins: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap())
        .filter(|r| &r[mi] == "true")
        .map(|r| r[ti].parse().unwrap())
        .collect();
    assert_eq!(mins, vec![1.0]);
    assert!(dir.path().join("mu.svg").exists());
}

#[test]
fn model_file_round_trips_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("cyl.json");
    let out = lab(&["catalog", "export", "--model", "cylinder", "--out", spec.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let out = lab(&["catalog", "verify", "--model-file", spec.to_str().unwrap(), "--json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["summary"]["fail"], 0);
}
