use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vg-stein")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn tmp(name: &str, body: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("vg-stein-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn laplace_stein_factor() {
    let v = json(&["constants", "--r", "2", "--which", "A"]);
    let a = v["records"][0]["value"].as_f64().unwrap();
    assert!((a - 2.04665).abs() < 1e-5, "{a}");
    assert_eq!(v["version"], "1");
    assert_eq!(v["config"]["command"]["which"], "A");
}

#[test]
fn identity_solution_is_minus_one() {
    let v = json(&["solve", "--r", "1.5", "--theta", "-0.5", "--h", "identity", "--x", "-2,0.3,4", "--derivs", "2"]);
    for rec in v["records"].as_array().unwrap() {
        assert!((rec["f"].as_f64().unwrap() + 1.0).abs() < 1e-10);
        assert!(rec["f2"].as_f64().unwrap().abs() < 1e-8);
    }
}

#[test]
fn cumulants_shift_only_the_mean() {
    let v = json(&["cumulants", "--r", "2", "--theta", "1", "--mu", "-3"]);
    let k = &v["records"][0];
    assert_eq!(k["kappa1"].as_f64().unwrap(), -1.0); // rθ + μ
    assert_eq!(k["kappa2"].as_f64().unwrap(), 6.0);
}

#[test]
fn csv_round_trips_at_full_precision() {
    let out = run(&["pdf", "--r", "0.7", "--theta", "0.2", "--x", "0.1,1.7", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# version=1 config="));
    assert_eq!(lines.next().unwrap(), "pdf,x");
    let json = json(&["pdf", "--r", "0.7", "--theta", "0.2", "--x", "0.1,1.7"]);
    for (line, rec) in lines.zip(json["records"].as_array().unwrap()) {
        let pdf: f64 = line.split(',').next().unwrap().parse().unwrap();
        assert_eq!(pdf, rec["pdf"].as_f64().unwrap());
    }
}

#[test]
fn sampling_is_deterministic() {
    let a = run(&["sample", "--r", "3", "--theta", "0.4", "--n", "50", "--seed", "9"]);
    let b = run(&["sample", "--r", "3", "--theta", "0.4", "--n", "50", "--seed", "9"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["sample", "--r", "3", "--theta", "0.4", "--n", "50", "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn exact_cumulants_give_zero_bound() {
    let f = tmp("k.json", r#"{"r": 2, "theta": 1, "sigma": 1, "cumulants": [0, 6, 28, 204, 1968, 23760]}"#);
    let v = json(&["six-moment", "--cumulants", f.to_str().unwrap(), "--metric", "k"]);
    assert_eq!(v["records"][0]["kolmogorov_bound"].as_f64().unwrap(), 0.0);
    let w = json(&["six-moment", "--cumulants", f.to_str().unwrap(), "--form", "raw"]);
    assert_eq!(w["records"][0]["value"].as_f64().unwrap(), 0.0);
}

#[test]
fn empirical_distance_reads_header_and_values() {
    let f = tmp("s.csv", "value\n-1.0\n0.0\n1.0\n");
    let v = json(&["distance", "--between", "2,0,1,0", "--empirical", f.to_str().unwrap()]);
    let recs = v["records"].as_array().unwrap();
    assert_eq!(recs.len(), 2);
    // symmetric law, symmetric sample: sup is attained just below a jump
    let dk = recs[0]["value"].as_f64().unwrap();
    assert!(dk > 0.0 && dk < 1.0);
}

#[test]
fn appendix_b_suite_passes() {
    let v = json(&["certify", "--suite", "appB"]);
    let recs = v["records"].as_array().unwrap();
    assert!(!recs.is_empty());
    assert!(recs.iter().all(|r| r["pass"] == true));
    assert_eq!(v["config"]["certify"]["suite"], "appb");
}

#[test]
fn blowup_suite_reports_failure() {
    let out = run(&["certify", "--suite", "blowup"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["records"][0]["kind"], "blowup");
}

#[test]
fn config_file_narrows_the_grid() {
    let f = tmp(
        "c.toml",
        "threads = 1\n[certify.bounds]\nr_values = [2.0]\ntheta_values = [0.0]\nsigma_values = [1.0]\nper_decade = 4\nband_points = 2\n\
         tf_list = [{ kind = \"indicator\", z = 0.0 }]\n",
    );
    let v = json(&["--config", f.to_str().unwrap(), "certify", "--suite", "thm31"]);
    let recs = v["records"].as_array().unwrap();
    assert!(!recs.is_empty());
    assert!(recs.iter().all(|r| r["params"]["r"] == 2.0 && r["pass"] == true));
    assert_eq!(v["config"]["file"]["threads"], 1);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["pdf", "--r", "2"]).status.code(), Some(2));
    assert_eq!(run(&["pdf", "--r", "-1", "--x", "0"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--r", "2", "--h", "cosine:1", "--x", "0"]).status.code(), Some(2));
    assert_eq!(run(&["distance", "--between", "2,0,1"]).status.code(), Some(2));
    assert_eq!(run(&["--config", "/nonexistent.toml", "mode", "--r", "2"]).status.code(), Some(2));
}

#[test]
fn solve_identity_example() {
    let v = json(&["solve", "--h", "identity", "--r", "3", "--theta", "1", "--sigma", "1", "--x", "0.7"]);
    assert!((v["records"][0]["f"].as_f64().unwrap() + 1.0).abs() < 1e-12);
}

#[test]
fn certification_output_is_byte_identical() {
    let a = run(&["certify", "--suite", "jump", "--format", "csv"]);
    let b = run(&["certify", "--suite", "jump", "--format", "csv"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
