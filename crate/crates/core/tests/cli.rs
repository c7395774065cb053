use std::path::Path;
use std::process::{Command, Output};

use emfbeam::io::RunManifest;

const SMALL: &str = r#"{"M": 16, "R": 200, "square_half_width": 250, "grid_step": 10, "circle_samples": 1024, "n_samples": 12}"#;

fn emfbeam(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emfbeam"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .env_remove("EMFBEAM_OUT_DIR")
        .output()
        .expect("spawn emfbeam")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> =
        std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    names
}

#[test]
fn missing_config_exits_2_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let missing = tmp.path().join("nope.json");
    let o = emfbeam(&["snapshot", "--config", missing.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    let o = emfbeam(&["mc", "--config", missing.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn bad_config_and_arguments_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), r#"{"M": 16, "bogus": 1}"#);
    assert_eq!(emfbeam(&["mc", "--config", &cfg], &out).status.code(), Some(2));
    let cfg = write_config(tmp.path(), SMALL);
    assert_eq!(emfbeam(&["snapshot", "--config", &cfg, "--schemes", "mrt,zf"], &out).status.code(), Some(2));
    assert_eq!(emfbeam(&["mc", "--config", &cfg, "--workers", "0"], &out).status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn snapshot_scheme_filter() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), SMALL);
    let o = emfbeam(&["snapshot", "--config", &cfg, "--seed", "4", "--schemes", "mrt"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        listing(&out),
        ["exposure_mrt.csv", "heatmap_mrt.ppm", "manifest.json", "report.txt", "scenario.json"]
    );
    let manifest = RunManifest::read(&out).unwrap();
    assert_eq!(manifest.seed, 4);
    assert_eq!(manifest.config.schemes, vec![emfbeam::schemes::Scheme::Mrt]);
    assert!(manifest.verify(&out).unwrap().is_empty());
    let report = std::fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("MRT") && !report.contains("Truncated"));
}

#[test]
fn snapshot_full_run_writes_all_maps() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), SMALL);
    assert!(emfbeam(&["snapshot", "--config", &cfg], &out).status.success());
    let names = listing(&out);
    for scheme in ["mrt", "reduced", "truncated", "boosted"] {
        assert!(names.contains(&format!("heatmap_{scheme}.ppm")));
        let csv = std::fs::read_to_string(out.join(format!("exposure_{scheme}.csv"))).unwrap();
        assert_eq!(csv.lines().next(), Some("x,y,omega_db,over_flag"));
        assert_eq!(csv.lines().count(), 1 + 51 * 51);
    }
}

#[test]
fn mc_is_identical_across_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(emfbeam(&["mc", "--config", &cfg, "--workers", "1"], &a).status.success());
    assert!(emfbeam(&["mc", "--config", &cfg, "--workers", "8"], &b).status.success());
    let names = listing(&a);
    assert_eq!(names, listing(&b));
    assert_eq!(names.iter().filter(|n| n.starts_with("cdf_")).count(), 12);
    for n in names.iter().filter(|n| *n != "manifest.json") {
        assert_eq!(std::fs::read(a.join(n)).unwrap(), std::fs::read(b.join(n)).unwrap(), "{n}");
    }
    let (ma, mb) = (RunManifest::read(&a).unwrap(), RunManifest::read(&b).unwrap());
    assert_eq!(ma.files, mb.files);
    let samples = std::fs::read_to_string(a.join("samples.csv")).unwrap();
    assert_eq!(samples.lines().count(), 1 + 12 * 4);
}

#[test]
fn mc_overrides_and_env_out_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let env_out = tmp.path().join("from_env");
    let o = Command::new(env!("CARGO_BIN_EXE_emfbeam"))
        .args(["mc", "--config", &cfg, "--samples", "3", "--seed", "9"])
        .env("EMFBEAM_OUT_DIR", &env_out)
        .output()
        .unwrap();
    assert!(o.status.success());
    let m = RunManifest::read(&env_out).unwrap();
    assert_eq!((m.config.n_samples, m.seed, m.command.as_str()), (3, 9, "mc"));
    let cdf = std::fs::read_to_string(env_out.join("cdf_chi_mrt.csv")).unwrap();
    assert_eq!(cdf, "value,probability\n1,0.3333333333333333\n1,0.6666666666666666\n1,1\n");
}
