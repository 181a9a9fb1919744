use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const FERMI: &str = r#"{
    "chain": {"n": 2, "omega": 200.0, "j0": 1.0, "separation": 1.0},
    "initial": {"kind": "excited_qubit", "qubit": 0},
    "horizon": 6.0,
    "grid": {"t_points": 61, "x_points": 11}
}"#;

const PULSE: &str = r#"{
    "chain": {"n": 3, "omega": 200.0, "j0": 1.0, "separation": 1.0},
    "initial": {"kind": "pulse", "sigma": 1.0, "x0": 2.0, "direction": "left"},
    "horizon": 6.0,
    "grid": {"t_points": 31}
}"#;

fn wqed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wqed")).args(args).env_remove("WQED_DIAGRAM_CAP").output().unwrap()
}

fn config(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn out_path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

fn parse_row(line: &str) -> Vec<f64> {
    line.split(',').map(|v| v.parse().unwrap()).collect()
}

#[test]
fn simulate_writes_expected_columns() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "fermi.json", FERMI);
    let out = out_path(&dir, "out.csv");
    let o = wqed(&["simulate", &cfg, "--out", &out, "--observables", "e:0,e:1,field"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,e:0.re,e:0.im,e:0.abs2,e:1.re,e:1.im,e:1.abs2,field.re,field.im,field.abs2"
    );
    let rows: Vec<Vec<f64>> = lines.map(parse_row).collect();
    assert_eq!(rows.len(), 61);
    // e1 is zero before the light time, then -J0 (t-L) e^{-J0 (t-L)} in magnitude
    for r in &rows {
        let t = r[0];
        if t < 1.0 {
            assert_eq!(r[6], 0.0);
        } else if t > 1.0 && t < 3.0 {
            let want = ((t - 1.0) * (-(t - 1.0)).exp()).powi(2);
            assert!((r[6] - want).abs() < 1e-12, "t={t}");
        }
        assert!((r[1] * r[1] + r[2] * r[2] - r[3]).abs() < 1e-15);
    }
    assert!(csv.ends_with('\n') && !csv.contains('\r'));
}

#[test]
fn output_is_byte_identical_across_runs_and_threads() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "pulse.json", PULSE);
    let mut outputs = Vec::new();
    for threads in ["1", "4", "1"] {
        let o = wqed(&["--threads", threads, "simulate", &cfg, "--observables", "e:0,e:2,field:-0.5"]);
        assert!(o.status.success());
        outputs.push(o.stdout);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn flags_override_file() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "fermi.json", FERMI);
    let o = wqed(&["simulate", &cfg, "--horizon", "2", "--t-points", "5"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let last = parse_row(text.lines().last().unwrap());
    assert_eq!(text.lines().count(), 6);
    assert_eq!(last[0], 2.0);
}

#[test]
fn profile_snapshot() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "fermi.json", FERMI);
    let prof = out_path(&dir, "profile.csv");
    let o = wqed(&["simulate", &cfg, "--profile-out", &prof]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(&prof).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,x,psi_r.re,psi_r.im,psi_l.re,psi_l.im,density");
    assert_eq!(csv.lines().count(), 12);
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "fermi.json", FERMI);
    assert_eq!(wqed(&["simulate", &cfg, "--observables", ""]).status.code(), Some(2));
    assert_eq!(wqed(&["simulate", &cfg, "--observables", "e:9"]).status.code(), Some(2));
    let bad = config(&dir, "bad.json", &FERMI.replace("\"horizon\"", "\"colour\": 1, \"horizon\""));
    assert_eq!(wqed(&["simulate", &bad]).status.code(), Some(2));
    assert_eq!(wqed(&["simulate"]).status.code(), Some(2));
    assert_eq!(wqed(&["fermi-demo", "--L", "1", "--out", dir.path().to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn diagram_cap_exit_3() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "fermi.json", FERMI);
    let o = Command::new(env!("CARGO_BIN_EXE_wqed")).args(["simulate", &cfg]).env("WQED_DIAGRAM_CAP", "10").output().unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("WQED_DIAGRAM_CAP"));
}

fn check(what: &str, cfg: &str) -> (Option<i32>, serde_json::Value) {
    let o = wqed(&["check", "--what", what, cfg]);
    let report = serde_json::from_slice(&o.stdout).unwrap_or(serde_json::Value::Null);
    (o.status.code(), report)
}

#[test]
fn checks_pass_on_fermi_config() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "fermi.json", FERMI);
    for what in ["causality", "no-uhp", "oracle", "norm"] {
        let (code, report) = check(what, &cfg);
        assert_eq!(code, Some(0), "{what}: {report}");
        assert_eq!(report["pass"], true);
    }
    let (_, report) = check("causality", &cfg);
    assert_eq!(report["details"]["qubits"][0]["max_abs_before"], 0.0);
    let (_, report) = check("oracle", &cfg);
    assert!(report["details"]["max_error"].as_f64().unwrap() < 1e-5);
    assert_eq!(report["details"]["dt"], 1.0 / 256.0);
    let (_, report) = check("no-uhp", &cfg);
    assert!(report["details"]["table"].as_array().unwrap().len() >= 19);
}

#[test]
fn fermi_demo_files() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("demo");
    let o = wqed(&["fermi-demo", "--L", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let e1 = std::fs::read_to_string(out.join("e1.csv")).unwrap();
    let rows: Vec<Vec<f64>> = e1.lines().skip(1).map(parse_row).collect();
    assert_eq!(rows.len(), 2001);
    // first feedback peak: one 1/J0 after the light time
    let peak = rows.iter().filter(|r| r[0] < 10.0).max_by(|a, b| a[3].total_cmp(&b[3])).unwrap();
    assert!((peak[0] - 6.0).abs() < 0.02, "{}", peak[0]);
    assert!(Path::new(&out.join("field.csv")).exists());
}
