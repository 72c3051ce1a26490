use std::process::{Command, Output};

use serde_json::Value;

fn gcalabi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcalabi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = gcalabi(&full);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn match_n3_routes_agree() {
    let v = json(&["match", "--n", "3"]);
    let r = &v["results"][0];
    let gap = (r["w0_closed"].as_f64().unwrap() - r["w0_shot"].as_f64().unwrap()).abs();
    assert!(gap <= 1e-6);
    assert_eq!(v["config"]["n"], 3);
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["pass"] == true));
}

#[test]
fn match_n2_exits_2() {
    let out = gcalabi(&["match", "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no positive solution"));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(
        gcalabi(&["match", "--format", "xml"]).status.code(),
        Some(64)
    );
    assert_eq!(gcalabi(&["solve", "--n", "2"]).status.code(), Some(64));
    assert_eq!(
        gcalabi(&["specfun", "hyp2f1", "1", "2"]).status.code(),
        Some(64)
    );
    assert_eq!(gcalabi(&[]).status.code(), Some(64));
    assert_eq!(gcalabi(&["--version"]).status.code(), Some(0));
}

#[test]
fn numeric_failure_exits_1() {
    let out = gcalabi(&["specfun", "gamma", "-2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_report() {
    let v = json(&["verify", "--n", "3", "--d1", "1", "--d2", "2"]);
    let checks = v["checks"].as_array().unwrap();
    let nama = checks
        .iter()
        .find(|c| c["name"] == "nama_max_rel_residual")
        .unwrap();
    assert!(nama["value"].as_f64().unwrap() <= 1e-6);
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn solve_csv_schema_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = gcalabi(&[
            "solve",
            "--n",
            "4",
            "--grid-size",
            "50",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,w,wp,wpp,ode_residual"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 50);
    assert!((rows[0][0] - 1e-3).abs() < 1e-15);
    assert!((rows[49][0] - 1e3).abs() < 1e-9);
    for r in &rows {
        assert!(r[3] > 0.0);
        assert!(r[4].abs() < 1e-6);
    }
    // 17 significant digits
    let first = text.lines().nth(1).unwrap().split(',').next().unwrap();
    assert_eq!(
        first
            .split('e')
            .next()
            .unwrap()
            .replace(['.', '-'], "")
            .len(),
        17
    );
}

#[test]
fn expand_and_scales_run() {
    let v = json(&["expand", "--n", "3", "--grid-size", "20"]);
    assert_eq!(v["results"].as_array().unwrap().len(), 20);
    assert!(v["checks"][0]["pass"] == true);
    let v = json(&["scales", "--n", "5", "--grid-size", "20"]);
    let r0 = &v["results"][0];
    assert_eq!(r0["vol_exponent"].as_f64().unwrap(), 20.0 / 7.0);
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["pass"] == true));
}

#[test]
fn specfun_to_stdout() {
    let out = gcalabi(&[
        "specfun",
        "gauss",
        "0.5",
        "-0.3333333333333333",
        "0.6666666666666666",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let value: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 0.431_184_926_538_298_42).abs() < 1e-12);
    let v = json(&["specfun", "fprofile", "2", "--n", "3"]);
    assert!((v["results"][0]["value"].as_f64().unwrap() - 1.391_614_956_409_629_1).abs() < 1e-12);
}
