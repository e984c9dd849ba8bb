use std::path::Path;
use std::process::{Command, Output};

use defectchain::fusion_core::{ising, ISING_STAR};
use serde_json::Value;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_defectchain"))
        .args(args)
        .current_dir(dir)
        .env("DEFECTCHAIN_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json_file(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn mutated_ising(dir: &Path) -> std::path::PathBuf {
    let c = ising(1).unwrap();
    let key = [ISING_STAR; 4].iter().copied().chain([1, 1]).collect::<Vec<_>>();
    let key: [usize; 6] = key.try_into().unwrap();
    let m = c.with_fsymbol(key, -c.f(key[0], key[1], key[2], key[3], key[4], key[5]));
    let p = dir.join("bad.json");
    std::fs::write(&p, m.to_json_string()).unwrap();
    p
}

#[test]
fn pentagon_check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["pentagon-check", "ising", "--out", "ok.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_file(&dir.path().join("ok.json"));
    assert_eq!(v["ok"], true);
    assert!(v["provenance"]["config_sha256"].as_str().unwrap().len() == 64);

    let bad = mutated_ising(dir.path());
    let out = run(&["pentagon-check", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["ok"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());

    let out = run(&["pentagon-check", "no-such-file.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bimodule_and_tube_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["bimodule-check", "F1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["bimodule-check", "F2", "--category", "vecz3"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["tube-idempotents"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["algebra_dim"], 4);
    assert_eq!(v["idempotents"].as_array().unwrap().len(), 4);
}

#[test]
fn derive_matches_ising_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["derive-fsymbols", "--kappa", "-1", "--out", "f.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("f.json")).unwrap();
    let got = defectchain::fusion_core::FusionCategory::from_json_str(&text).unwrap();
    assert!(got.same_data(&ising(-1).unwrap()));
    let out = run(&["derive-fsymbols", "--kappa", "2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn build_then_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["build-hamiltonian", "--edges", "7", "--out", "h.mtx"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let basis = json_file(&dir.path().join("h.basis.json"));
    assert_eq!(basis["dim"], 8);
    let out = run(&["spectrum", "h.mtx", "--out", "s.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = json_file(&dir.path().join("s.json"));
    let evs: Vec<f64> = s["eigenvalues"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(evs.len(), 8);
    let want = defectchain::spectra::free_fermion_energy(3).unwrap()
        - 2.0 * std::f64::consts::FRAC_1_SQRT_2;
    assert!((evs[0] - want).abs() < 1e-10, "{} vs {want}", evs[0]);
    let out = run(&["spectrum", "h.mtx", "--lanczos", "2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn compare_tfim_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["compare-tfim", "--edges", "9"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["comparison"]["equal"], true);
    let out = run(&["compare-tfim", "--edges", "8"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reproduce_rejects_unknown_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), r#"{"sizes": [1], "colour": "blue"}"#).unwrap();
    let out = run(&["reproduce", "--config", "cfg.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(dir.path().join("cfg.json"), r#"{"sizes": [11]}"#).unwrap();
    let out = run(&["reproduce", "--config", "cfg.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reproduce_with_mutated_fsymbols_fails_and_keeps_report() {
    let dir = tempfile::tempdir().unwrap();
    let bad = mutated_ising(dir.path());
    let out = run(
        &["reproduce", "--sizes", "1,2", "--fsymbols-file", bad.to_str().unwrap(), "--output-dir", "out"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json_file(&dir.path().join("out/report.json"));
    assert_eq!(r["passed"], false);
}

#[test]
fn reproduce_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), r#"{"sizes": [1, 2, 3], "boundary": "both"}"#).unwrap();
    let mut reports = Vec::new();
    for o in ["a", "b"] {
        let out = run(&["reproduce", "--config", "cfg.json", "--output-dir", o], dir.path());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
        let p = dir.path().join(o);
        assert!(p.join("fsymbols.json").exists());
        assert!(p.join("spectra.json").exists());
        assert!(p.join("H_k3_fixed.mtx").exists());
        let r = json_file(&p.join("report.json"));
        assert_eq!(r["passed"], true);
        assert_eq!(r["criteria"].as_array().unwrap().len(), 8);
        reports.push(r);
    }
    // only the output directory differs
    for r in &mut reports {
        r["config"]["output_dir"] = Value::Null;
        r["provenance"] = Value::Null;
    }
    assert_eq!(reports[0], reports[1]);
}
