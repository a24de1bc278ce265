use std::io::Write;
use std::process::{Command, Output, Stdio};

fn tresca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tresca"))
        .args(args)
        .env_clear()
        .output()
        .expect("spawn tresca")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn param_gate_passes_on_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = tresca(&["param-gate", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("1 of 1 verdicts passed"));
    assert!(dir.path().join("gate.json").exists());
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn gate_mode_flag_changes_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let min = tresca(&["param-gate", "--out", out, "--h0", "1e-5"]);
    assert_eq!(min.status.code(), Some(1));
    assert!(stdout(&min).contains("HeightLubrication"));
    let max = tresca(&["param-gate", "--out", out, "--h0", "1e-5", "--gate-max"]);
    assert_eq!(max.status.code(), Some(0), "{}", stdout(&max));
}

#[test]
fn bad_sigma_in_config_names_key_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "[dynamics]\nh0 = 5e-6\nsigma = 0.7\n").unwrap();
    let o = tresca(&["contact-sim", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("sigma"), "{err}");
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn flag_override_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let o = tresca(&["contact-sim", "--sigma", "0.7", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sigma"));
}

#[test]
fn unknown_suite_is_an_error() {
    let o = tresca(&["run", "everything"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn contact_sim_without_slip_term_matches_free_fall() {
    let dir = tempfile::tempdir().unwrap();
    let o = tresca(&["contact-sim", "--c-star", "0", "--out", dir.path().to_str().unwrap()]);
    let text = stdout(&o);
    assert!(text.contains("closed_form"), "{text}");
    let line = text.lines().find(|l| l.contains("closed_form")).unwrap();
    assert!(line.trim_start().starts_with("PASS"), "{line}");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("contact.json")).unwrap()).unwrap();
    assert!(json.is_object());
    assert!(dir.path().join("trajectory.csv").exists());
}

#[test]
fn field_eval_writes_csv_to_stdout() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tresca"))
        .args(["field-eval", "--h", "0.1", "--points", "-"])
        .env_clear()
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"x1,x2\n0.0,0.05\n0.9,1.5\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,w1,w2,q,residual"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    // centreline: w1 vanishes by parity
    assert_eq!(row[2], 0.0);
    // far from the disk the field is the rigid translation e2
    let far: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(&far[2..4], &[0.0, 1.0]);
}

#[test]
fn field_eval_rejects_points_outside_the_container() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("p.csv");
    std::fs::write(&pts, "x1,x2\n0.0,-0.5\n").unwrap();
    let o = tresca(&["field-eval", "--h", "0.1", "--points", pts.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("row 1"));
}
