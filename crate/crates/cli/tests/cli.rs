use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ris_sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ris-sim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = ris_sim(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn out_dir(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn single_trial_smoke_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_dir(&dir, "mc");
    ok(&["montecarlo", "--set", "trials=1", "--out", &out]);
    for f in ["samples.csv", "cdf.csv", "summary.json", "manifest.json"] {
        assert!(Path::new(&out).join(f).is_file(), "{f} missing");
    }
    let rows = csv_rows(&Path::new(&out).join("samples.csv"));
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[0] == "0"));
}

#[test]
fn equal_gain_columns_match_exhaustive_search() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_dir(&dir, "mc");
    ok(&[
        "montecarlo",
        "--set",
        "sigma_t_sq=0",
        "--set",
        "policies=A1, BruteForceA",
        "--set",
        "trials=300",
        "--out",
        &out,
    ]);
    let rows = csv_rows(&Path::new(&out).join("samples.csv"));
    assert_eq!(rows.len(), 600);
    for pair in rows.chunks(2) {
        assert_eq!(pair[0][1], "A1");
        assert_eq!(pair[1][1], "BruteForceA");
        assert_eq!(pair[0][2], pair[1][2], "trial {}", pair[0][0]);
    }
}

#[test]
fn table_preset_summary_has_five_means() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_dir(&dir, "mc");
    ok(&["montecarlo", "--preset", "table2-ms10", "--set", "trials=500", "--out", &out]);
    let s: Value = serde_json::from_str(&fs::read_to_string(Path::new(&out).join("summary.json")).unwrap()).unwrap();
    let p = s["policies"].as_array().unwrap();
    assert_eq!(p.len(), 5);
    let ids: Vec<&str> = p.iter().map(|x| x["policy_id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["BruteForceA", "A1", "A2", "A3", "A4"]);
    let means: Vec<f64> = p.iter().map(|x| x["mean_db"].as_f64().unwrap()).collect();
    assert!(means[1..].iter().all(|&m| m <= means[0]));
}

#[test]
fn manifest_rerun_is_byte_identical_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (out_dir(&dir, "a"), out_dir(&dir, "b"));
    ok(&["montecarlo", "--set", "trials=400", "--seed", "99", "--threads", "1", "--out", &a]);
    let manifest = format!("{a}/manifest.json");
    ok(&["montecarlo", "--config", &manifest, "--threads", "4", "--out", &b]);
    let m: Value = serde_json::from_str(&fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["seed"], 99);
    for f in ["samples.csv", "cdf.csv", "summary.json"] {
        let (x, y) = (fs::read(format!("{a}/{f}")).unwrap(), fs::read(format!("{b}/{f}")).unwrap());
        assert!(x == y, "{f} differs");
        let listed = m["outputs"].as_array().unwrap().iter().find(|o| o["path"] == f).unwrap();
        assert_eq!(listed["sha256"].as_str().unwrap(), ris_cli::manifest::sha256_hex(&x));
        assert_eq!(listed["bytes"].as_u64().unwrap(), x.len() as u64);
    }
    let m2: Value = serde_json::from_str(&fs::read_to_string(format!("{b}/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["config"], m2["config"]);
}

#[test]
fn config_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.ini");
    fs::write(&path, "[run]\ntrials = 10\n\n[harvester]\np_max = lots\n").unwrap();
    let out = ris_sim(&["montecarlo", "--config", path.to_str().unwrap(), "--out", &out_dir(&dir, "x")]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.ini:5:"), "{err}");

    let missing = ris_sim(&["montecarlo", "--config", "/nonexistent/cfg.ini", "--out", &out_dir(&dir, "y")]);
    assert!(!missing.status.success());
}

#[test]
fn exhaustive_cap_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let out = ris_sim(&[
        "montecarlo",
        "--set",
        "m_x=6",
        "--set",
        "m_y=4",
        "--set",
        "trials=1",
        "--out",
        &out_dir(&dir, "x"),
    ]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cap of 22"), "{err}");
    assert!(!dir.path().join("x/manifest.json").exists());
}

#[test]
fn ambiguous_override_is_rejected() {
    let out = ris_sim(&["config", "--set", "alpha=0.5"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("power.alpha") && err.contains("tracking.alpha"), "{err}");
}

#[test]
fn rendered_config_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let first = ok(&["config", "--preset", "table4-ms10", "--set", "p_max=13 dBm"]);
    let path = dir.path().join("resolved.ini");
    fs::write(&path, &first.stdout).unwrap();
    let second = ok(&["config", "--config", path.to_str().unwrap()]);
    assert_eq!(first.stdout, second.stdout);
}

fn demo(args: &[&str]) -> Value {
    let mut full = vec!["policy-demo"];
    full.extend_from_slice(args);
    serde_json::from_slice(&ok(&full).stdout).unwrap()
}

#[test]
fn policy_demo_partition() {
    let v = demo(&["--policy", "A1", "--seed", "7"]);
    let (h, r) = (v["a_h"].as_array().unwrap(), v["a_r"].as_array().unwrap());
    assert_eq!(h.len() + r.len(), 10);
    let mut all: Vec<u64> = h.iter().chain(r).map(|x| x.as_u64().unwrap()).collect();
    all.sort();
    assert_eq!(all, (0..10).collect::<Vec<u64>>());
}

#[test]
fn policy_demo_exhaustive_dominates() {
    for seed in ["1", "2", "3", "4"] {
        let small = ["--set", "m_x=3", "--set", "m_y=2", "--seed", seed];
        let a1 = demo(&[&["--policy", "A1"][..], &small].concat());
        let bf = demo(&[&["--policy", "BruteForceA"][..], &small].concat());
        assert_eq!(bf["m_s"], 6);
        assert!(bf["snr_db"].as_f64().unwrap() >= a1["snr_db"].as_f64().unwrap());
    }
}

#[test]
fn malformed_policy_exits_2() {
    let out = ris_sim(&["policy-demo", "--policy", "A9"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("BruteForceA") && err.contains("B4"), "{err}");
}

fn event_positions(dir: &str) -> Vec<f64> {
    csv_rows(&Path::new(dir).join("events.csv"))
        .iter()
        .map(|r| r[1].parse().unwrap())
        .collect()
}

#[test]
fn tracking_near_origin_spacing() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_dir(&dir, "t");
    ok(&["tracking", "--preset", "fig7-15x15", "--out", &out]);
    let x = event_positions(&out);
    let near: Vec<f64> = x
        .windows(2)
        .filter(|w| ((w[0] + w[1]) / 2.0).abs() < 5.0)
        .map(|w| w[1] - w[0])
        .collect();
    assert!(!near.is_empty());
    let mean = near.iter().sum::<f64>() / near.len() as f64;
    assert!((mean - 1.4).abs() <= 0.3, "near spacing {mean}");
    for f in ["trace.csv", "pdavg.csv", "manifest.json"] {
        assert!(Path::new(&out).join(f).is_file());
    }
    let m: Value = serde_json::from_str(&fs::read_to_string(Path::new(&out).join("manifest.json")).unwrap()).unwrap();
    assert!((m["derived"]["geometry"]["ris_height"].as_f64().unwrap() - 11.485).abs() < 1e-3);
}

#[test]
fn tracking_huge_threshold_has_no_events() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_dir(&dir, "t");
    ok(&["tracking", "--set", "threshold=1e9 dB", "--out", &out]);
    assert_eq!(event_positions(&out), vec![-40.0]);
    assert_eq!(csv_rows(&Path::new(&out).join("pdavg.csv")).len(), 0);
}

#[test]
fn tracking_halved_step_keeps_first_event() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (out_dir(&dir, "a"), out_dir(&dir, "b"));
    ok(&["tracking", "--preset", "fig7-15x15", "--out", &a]);
    ok(&["tracking", "--preset", "fig7-15x15", "--set", "step=0.005 m", "--out", &b]);
    let (xa, xb) = (event_positions(&a), event_positions(&b));
    assert_eq!(xa.len(), xb.len());
    assert!((xa[1] - xb[1]).abs() < 0.01, "{} vs {}", xa[1], xb[1]);
}

#[test]
fn shipped_config_equals_defaults() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/table1.ini");
    let c = ris_cli::Config::from_text(&fs::read_to_string(&path).unwrap(), "table1.ini").unwrap();
    assert_eq!(c.render(), ris_cli::Config::default().render());
}
