use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn monopole(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monopole"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn records(csv_text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let head = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|x| x.unwrap().iter().map(String::from).collect())
        .collect();
    (head, rows)
}

fn column(head: &[String], name: &str) -> usize {
    head.iter().position(|h| h == name).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn repeated_sweeps_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let base = ["sweep", "--model", "spinj", "--parameter", "delta", "--range", "-0.5,0.5,9", "--outputs", "quasienergy,gamma_hf"];
    for (out, workers) in [(&a, "1"), (&b, "4")] {
        let mut args = base.to_vec();
        args.extend(["--out", out.to_str().unwrap(), "--workers", workers]);
        let o = monopole(&args);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn pure_coulomb_orbit_keeps_angular_momentum() {
    let o = monopole(&["orbit", "--mu", "0", "--stride", "10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (head, rows) = records(&stdout(&o));
    let j = column(&head, "j_residual");
    assert!(rows.len() > 10);
    for r in &rows {
        assert!(r[j].parse::<f64>().unwrap() < 1e-12, "{}", r[j]);
    }
}

#[test]
fn sweep_through_the_diabolical_point_flushes_partial_results() {
    let o = monopole(&[
        "sweep", "--model", "rwa", "--parameter", "lambda", "--range", "0,1,5",
        "--parameter2", "delta", "--range2", "-2,2,11", "--outputs", "chi",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let (head, rows) = records(&stdout(&o));
    let (lam, del, lab, chi, st) = (
        column(&head, "lambda"),
        column(&head, "delta"),
        column(&head, "label"),
        column(&head, "chi"),
        column(&head, "status"),
    );
    let at = |r: &Vec<String>, c: usize| r[c].parse::<f64>().unwrap();
    let dp: Vec<_> = rows.iter().filter(|r| at(r, lam) == 0.0 && at(r, del) == 0.0).collect();
    assert_eq!(dp.len(), 1);
    assert!(dp[0][st].starts_with("error"));
    // on resonance the susceptibility is |V0|/2 for any nonzero coupling
    let mut checked = 0;
    for r in rows.iter().filter(|r| at(r, lam) > 0.0 && at(r, del) == 0.0 && r[lab] == "+") {
        assert_eq!(r[st], "ok");
        assert!((at(r, chi) - 0.25).abs() < 1e-8, "{}", r[chi]);
        checked += 1;
    }
    assert_eq!(checked, 4);
}

#[test]
fn sweep_away_from_the_diabolical_point_succeeds() {
    let o = monopole(&[
        "sweep", "--model", "rwa", "--parameter", "lambda", "--range", "0.25,1,4",
        "--parameter2", "delta", "--range2", "-2,2,5", "--outputs", "chi,quasienergy",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (head, rows) = records(&stdout(&o));
    assert_eq!(rows.len(), 4 * 5 * 2);
    let st = column(&head, "status");
    assert!(rows.iter().all(|r| r[st] == "ok"));
}

#[test]
fn unknown_config_field_is_reported_with_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[orbit]\nb = 1.0\nmu = 0.5\nstrid = 4\n");
    let o = monopole(&["--config", &cfg, "orbit"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("bad.toml:4"), "{e}");
    assert!(e.contains("strid"), "{e}");
}

#[test]
fn bad_inputs_exit_with_validation_status() {
    let cases: [&[&str]; 4] = [
        &["sweep", "--model", "rwa", "--parameter", "lambda", "--range", "0,1,1", "--outputs", "chi"],
        &["sweep", "--model", "rwa", "--parameter", "nope", "--range", "0,1,3", "--outputs", "chi"],
        &["sweep", "--model", "orbit", "--parameter", "mu", "--range", "0,1,3", "--outputs", "chi"],
        &["spinj", "--j", "0.7"],
    ];
    for args in cases {
        let o = monopole(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn config_values_override_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"orbit": {"mu": 0.0}}"#);
    let o = monopole(&["--config", &cfg, "--format", "json", "orbit", "--mu", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["params"]["mu"], 0.0);
}

#[test]
fn json_output_carries_a_schema_and_sorted_keys() {
    let o = monopole(&["--format", "json", "two-level", "--theta", "1.0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], "monopole.two_level.v1");
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let positions: Vec<usize> = keys.iter().map(|k| text.find(&format!("\"{k}\"")).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_exit_status_follows_tolerances() {
    let o = monopole(&["verify", "--only", "two_level"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
    let o = monopole(&["verify", "--only", "two_level", "--tol-scale", "1e-6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
    let o = monopole(&["verify", "--only", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
}
