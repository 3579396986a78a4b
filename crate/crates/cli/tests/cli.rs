use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn priverm(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_priverm"))
        .args(args)
        .current_dir(cwd)
        .env_remove("PRIVERM_THREADS")
        .output()
        .expect("binary runs")
}

fn json_out(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const H1: &str = r#"{"domain_size": 3, "hypotheses": ["000", "001", "100", "110"]}"#;
const PHI1: &str = r#"{"domain_size": 3, "hypotheses": ["000", "001", "010", "101"]}"#;

#[test]
fn vc_of_product_base_class_is_one() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "h1.json", H1);
    let v = json_out(&priverm(&["vc", "h1.json"], tmp.path()));
    assert_eq!(v["vc"], 1);
    assert_eq!(v["exact"], true);
}

#[test]
fn vc_of_full_class_on_four_points() {
    let tmp = tempfile::tempdir().unwrap();
    let all: Vec<String> = (0..16).map(|c| format!("{c:04b}")).collect();
    let file = serde_json::json!({"domain_size": 4, "hypotheses": all});
    write(tmp.path(), "full.json", &file.to_string());
    let v = json_out(&priverm(&["vc", "full.json", "--threads", "2"], tmp.path()));
    assert_eq!(v["vc"], 4);
    assert_eq!(v["witness"], serde_json::json!([0, 1, 2, 3]));
}

#[test]
fn malformed_json_exits_2_with_position() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "bad.json", "{\"domain_size\": 3,\n \"hypotheses\": [\"000\",]}");
    let out = priverm(&["vc", "bad.json"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2 column"), "{err}");
}

#[test]
fn exit_codes_for_budget_io_and_usage() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "h1.json", H1);
    assert_eq!(priverm(&["vc", "h1.json", "--budget", "1"], tmp.path()).status.code(), Some(3));
    assert_eq!(priverm(&["vc", "missing.json"], tmp.path()).status.code(), Some(4));
    assert_eq!(priverm(&["vc"], tmp.path()).status.code(), Some(2));
    assert_eq!(priverm(&["vc", "h1.json", "--threads", "0"], tmp.path()).status.code(), Some(2));
    let lb = json_out(&priverm(&["vc", "h1.json", "--mode", "lower-bound", "--witness", "2"], tmp.path()));
    assert_eq!((lb["vc"].clone(), lb["exact"].clone()), (1.into(), false.into()));
}

#[test]
fn verify_theorem1_d1_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = priverm(&["verify", "--suite", "theorem1", "--d", "1", "--format", "table"], tmp.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("VC(F): 3"), "{text}");
    assert!(text.trim_end().ends_with("PASS"));
}

#[test]
fn verify_claims_reports_refuted_prediction() {
    let tmp = tempfile::tempdir().unwrap();
    let v = json_out(&priverm(&["verify", "--suite", "claims", "--d", "2"], tmp.path()));
    assert_eq!(v["values"]["predicted"], 4);
    assert_eq!(v["values"]["measured"], 6);
    assert_eq!(v["values"]["verdict"], "REFUTED");
    let text = stdout(&priverm(&["verify", "--suite", "claims", "--d", "2", "--format", "table"], tmp.path()));
    assert!(text.contains("additive prediction 4, measured 6: REFUTED"), "{text}");
}

#[test]
fn verify_lemma1_union_is_five() {
    let tmp = tempfile::tempdir().unwrap();
    let v = json_out(&priverm(&["verify", "--suite", "lemma1", "--d", "2", "--dstar", "2"], tmp.path()));
    assert_eq!(v["passed"], true);
    assert_eq!(v["values"]["union_vc"], 5);
}

#[test]
fn bounds_itemizes_terms_and_flags_override_file() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "in.json", r#"{"m": 10, "delta": 0.5, "d": 7, "eps_erm": 0.3}"#);
    let v = json_out(&priverm(
        &["bounds", "--input", "in.json", "--m", "99", "--delta", "0.0733", "--d", "2", "--eps-erm", "0.1"],
        tmp.path(),
    ));
    assert_eq!(v["inputs"]["m"], 99);
    let fast = (8.0 * 2.0 * 100f64.ln() + 4.0 * (4.0 / 0.0733f64).ln()) / 99.0;
    let terms = &v["b_erm"];
    assert!((terms["fast"].as_f64().unwrap() - fast).abs() < 1e-12);
    assert!((terms["slow"].as_f64().unwrap() - (0.1 * fast).sqrt()).abs() < 1e-12);
    assert!((terms["total"].as_f64().unwrap() - (0.1 + (0.1 * fast).sqrt() + fast)).abs() < 1e-12);
    assert!(v["sufficient"]["not_applicable"].is_string());
    let root = v["alpha_threshold"].as_f64().unwrap();
    assert!((2.246..=2.248).contains(&root));

    let out = priverm(&["bounds", "--m", "99", "--delta", "0.0733"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn erm_prints_privileged_result() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "h.json", H1);
    write(tmp.path(), "phi.json", PHI1);
    write(
        tmp.path(),
        "s.json",
        r#"[{"x": 0, "xstar": 1, "y": 1}, {"x": 2, "xstar": 0, "y": 0}, {"x": 1, "xstar": 2, "y": 1}]"#,
    );
    let v = json_out(&priverm(&["erm", "--classes", "h.json", "phi.json", "--sample", "s.json"], tmp.path()));
    assert_eq!(v["m"], 3);
    assert_eq!(v["objective"], 0.0);
    assert_eq!(v["h"], "110");
    assert_eq!(v["solver"], "exhaustive");

    write(tmp.path(), "w.json", r#"{"triples": [{"x": 0, "xstar": 0, "y": 1}, {"x": 0, "xstar": 0, "y": 0}]}"#);
    let v = json_out(&priverm(
        &["erm", "--classes", "h.json", "phi.json", "--sample", "w.json", "--c", "2"],
        tmp.path(),
    ));
    assert_eq!(v["c"], 2.0);
    assert_eq!(v["objective"], 0.5);
}

#[test]
fn sim_creates_run_directory_and_rerun_matches() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "exp.json",
        r#"{"distribution": {"kind": "table", "support": [
              {"x": 0, "xstar": 0, "y": 0, "p": 0.4},
              {"x": 1, "xstar": 1, "y": 1, "p": 0.35},
              {"x": 1, "xstar": 0, "y": 0, "p": 0.25}]},
            "classes": {"kind": "full", "x_size": 2, "xstar_size": 2},
            "m": 25, "trials": 40, "delta": 0.05, "seed": 5}"#,
    );
    let v = json_out(&priverm(&["sim", "--config", "exp.json", "--threads", "4"], tmp.path()));
    let run_dir = tmp.path().join("priverm-runs/seed-5");
    assert_eq!(v["summary"]["trials"], 40);
    for f in ["config.json", "trials.csv", "summary.json", "manifest.json"] {
        assert!(run_dir.join(f).is_file(), "{f}");
    }
    let v = json_out(&priverm(
        &["sim", "--rerun", "priverm-runs/seed-5", "--threads", "1", "--output-dir", "again"],
        tmp.path(),
    ));
    assert_eq!(v["identical"], true);
    assert_eq!(
        std::fs::read(run_dir.join("trials.csv")).unwrap(),
        std::fs::read(tmp.path().join("again/trials.csv")).unwrap()
    );

    let out = priverm(
        &["sim", "--config", "exp.json", "--trials", "3", "--seed", "9", "--format", "csv", "--output-dir", "c"],
        tmp.path(),
    );
    let text = stdout(&out);
    assert!(text.starts_with("trial,eps_erm,eps_ig,eps_u,true_err_erm,true_err_pr,b_erm,b_pr,covered_erm,covered_pr\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn construct_writes_class_files() {
    let tmp = tempfile::tempdir().unwrap();
    let v = json_out(&priverm(&["construct", "theorem1", "--d", "2", "--output-dir", "out"], tmp.path()));
    assert_eq!(v["additive_prediction"], 4);
    assert_eq!(v["h"]["hypotheses"].as_array().unwrap().len(), 16);
    let w = json_out(&priverm(&["construct", "lemma2", "--h", "out/h.json", "--phi", "out/phi.json"], tmp.path()));
    assert_eq!(w["indices"].as_array().unwrap().len(), 2);
    let f = json_out(&priverm(
        &["construct", "theorem5", "--dstar", "4", "--eps", "0.1", "--delta", "0.005", "--heavy-side", "true,false"],
        tmp.path(),
    ));
    let alpha = 0.8 / (1.0 - 0.04);
    assert!((f["alpha"].as_f64().unwrap() - alpha).abs() < 1e-12);
    assert!((f["phi_star_prob"].as_f64().unwrap() - (1.0 - alpha) / 2.0).abs() < 1e-12);
}

#[test]
fn deviation_experiment_is_thread_count_independent() {
    let tmp = tempfile::tempdir().unwrap();
    let args = |t: &'static str| ["sim", "--deviation", "--dstar", "4", "--m", "20", "--trials", "300", "--seed", "3", "--threads", t];
    let one = json_out(&priverm(&args("1"), tmp.path()));
    let four = json_out(&priverm(&args("4"), tmp.path()));
    assert_eq!(one, four);
    assert_eq!(one["trials"], 300);
}
