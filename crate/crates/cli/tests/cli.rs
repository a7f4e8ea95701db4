use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn admiss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_admiss")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn heat(dir: &TempDir, modes: usize) -> PathBuf {
    file(dir, &format!("heat{modes}.json"), &format!(r#"{{"generator":"heat1d","modes":{modes}}}"#))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn without_clock(json: &str) -> Value {
    let mut v: Value = serde_json::from_str(json).unwrap();
    v.as_object_mut().unwrap().remove("wall_clock_seconds");
    v
}

#[test]
fn heat_check_exit_codes_follow_the_threshold() {
    let dir = TempDir::new().unwrap();
    let sys = heat(&dir, 100_000);
    let ok = admiss(&["check", "--system", s(&sys), "--space", r#"{"kind":"Lp","p":2}"#, "--no-cross-checks"]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    assert!(stdout(&ok).contains("combined: bounded-evidence"));
    let bad = admiss(&["check", "--system", s(&sys), "--space", r#"{"kind":"Lp","p":1.2}"#, "--no-cross-checks"]);
    assert_eq!(code(&bad), 2, "{}", stdout(&bad));
}

#[test]
fn malformed_input_is_a_usage_error_with_a_path() {
    let dir = TempDir::new().unwrap();
    let sys = heat(&dir, 10);
    let o = admiss(&["check", "--system", s(&sys), "--space", r#"{"kind":"Lp","p":"#]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 1"), "{}", stderr(&o));
    let o = admiss(&["check", "--system", s(&sys), "--space", r#"{"kind":"Lp","p":0.5}"#]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("$.p"), "{}", stderr(&o));
    let broken = file(&dir, "broken.json", r#"{"generator":"heat1d"}"#);
    let o = admiss(&["check", "--system", s(&broken), "--space", r#"{"kind":"Lp","p":2}"#]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("$.modes"), "{}", stderr(&o));
}

#[test]
fn refused_hypotheses_name_the_criterion() {
    let dir = TempDir::new().unwrap();
    let sys = heat(&dir, 100);
    let o = admiss(&["check", "--system", s(&sys), "--space", r#"{"kind":"Lp","p":1.5}"#, "--criterion", "C4"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("strip summability criterion (C4)"), "{}", stderr(&o));
}

#[test]
fn help_version_and_bad_flags() {
    assert_eq!(code(&admiss(&["--help"])), 0);
    assert_eq!(code(&admiss(&["--version"])), 0);
    assert_eq!(code(&admiss(&["check", "--bogus"])), 1);
    assert_eq!(code(&admiss(&["check", "--criterion", "C9"])), 1);
    assert_eq!(code(&admiss(&[])), 1);
}

#[test]
fn inconclusive_runs_exit_three() {
    let dir = TempDir::new().unwrap();
    let sys = heat(&dir, 50);
    let o = admiss(&["check", "--system", s(&sys), "--criterion", "exact_control"]);
    assert_eq!(code(&o), 3, "{}", stdout(&o));
}

#[test]
fn p_sweep_flips_once_at_four_thirds() {
    let dir = TempDir::new().unwrap();
    let sys = heat(&dir, 100_000);
    let out = dir.path().join("sweep.csv");
    let o = admiss(&[
        "sweep",
        "--system",
        s(&sys),
        "--space",
        r#"{"kind":"Lp","p":2}"#,
        "--param",
        "p",
        "--values",
        "1.2,1.3,4/3,1.4,2,3,4",
        "--no-cross-checks",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut rows = csv::Reader::from_path(&out).unwrap();
    let header = rows.headers().unwrap().clone();
    assert_eq!(&header.iter().take(4).collect::<Vec<_>>(), &["param", "criterion", "constant", "verdict"]);
    let verdicts: Vec<(f64, String)> = rows
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[3].to_string())
        })
        .collect();
    let flips = verdicts.windows(2).filter(|w| w[0].1 != w[1].1).count();
    assert_eq!(flips, 1, "{verdicts:?}");
    for (p, v) in &verdicts {
        let want = if *p < 4.0 / 3.0 { "unbounded-evidence" } else { "bounded-evidence" };
        assert_eq!(v, want, "p = {p}");
    }
}

#[test]
fn empty_sweep_range_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let sys = heat(&dir, 10);
    let o = admiss(&["sweep", "--system", s(&sys), "--space", r#"{"kind":"Lp","p":2}"#, "--param", "p", "--values="]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let o = admiss(&["sweep", "--system", s(&sys), "--space", r#"{"kind":"Lp","p":2}"#, "--param", "q", "--values", "1"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn failing_rows_do_not_abort_the_sweep() {
    let dir = TempDir::new().unwrap();
    let sys = heat(&dir, 200);
    let o = admiss(&[
        "sweep", "--system", s(&sys), "--space", r#"{"kind":"Lp","p":2}"#, "--param", "p", "--values", "0.5,2",
        "--format", "csv", "--no-cross-checks",
    ]);
    assert_eq!(code(&o), 3);
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("0.5,-,,error,")), "{text}");
    assert!(text.lines().any(|l| l.starts_with("2,C3,")), "{text}");
}

#[test]
fn beta_sweep_for_sobolev_control_is_monotone() {
    let dir = TempDir::new().unwrap();
    let sys = file(&dir, "pts.json", r#"{"eigenvalues":[-1,-4,-16,-64,-256,-1024],"coeffs":[1,1,1,1,1,1],"q":2}"#);
    let o = admiss(&[
        "sweep", "--system", s(&sys), "--criterion", "sobolev_control", "--param", "beta", "--values",
        "0.25,0.5,1,1.5,2", "--format", "csv",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let constants: Vec<f64> = csv::Reader::from_reader(o.stdout.as_slice())
        .records()
        .map(|r| r.unwrap()[2].parse().unwrap())
        .collect();
    assert_eq!(constants.len(), 5);
    assert!(constants.windows(2).all(|w| w[0] <= w[1]), "{constants:?}");
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let sys = heat(&dir, 3000);
    let args = ["check", "--system", s(&sys), "--space", r#"{"kind":"Lp","p":1.5}"#, "--format", "json"];
    let a = admiss(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_admiss")).args(args).env("ADMISS_THREADS", "3").output().unwrap();
    assert_eq!(code(&a), 0);
    assert_eq!(without_clock(&stdout(&a)), without_clock(&stdout(&b)));
    let v: Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["settings"]["modes"], 3000);
    assert_eq!(v["settings"]["grid"]["n_min"], -20);
    assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap().len(), 64);

    let oracle = ["oracle", "--system", s(&sys), "--space", r#"{"kind":"Lp","p":1.2}"#, "--m", "16", "--seed", "5"];
    let x = dir.path().join("x.json");
    let y = dir.path().join("y.json");
    assert_eq!(code(&admiss(&[&oracle[..], &["--out", s(&x)]].concat())), 0);
    assert_eq!(code(&admiss(&[&oracle[..], &["--out", s(&y)]].concat())), 0);
    let (x, y) = (std::fs::read_to_string(x).unwrap(), std::fs::read_to_string(y).unwrap());
    assert_eq!(without_clock(&x), without_clock(&y));
}

#[test]
fn oracle_lower_bounds_grow_with_m() {
    let dir = TempDir::new().unwrap();
    let sys = heat(&dir, 2000);
    let o = admiss(&[
        "oracle", "--system", s(&sys), "--space", r#"{"kind":"Lp","p":1.2}"#, "--m", "1,4,16,64", "--format", "csv",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let bounds: Vec<f64> = csv::Reader::from_reader(o.stdout.as_slice())
        .records()
        .map(|r| r.unwrap()[1].parse().unwrap())
        .collect();
    assert!(bounds.windows(2).all(|w| w[0] <= w[1]), "{bounds:?}");
}

#[test]
fn isometry_self_test_passes() {
    for preset in ["hardy", "bergman:0", "bergman:1"] {
        let o = admiss(&["oracle", "--isometry", preset]);
        assert_eq!(code(&o), 0, "{preset}: {}", stdout(&o));
        let line = stdout(&o).lines().last().unwrap().to_string();
        let err: f64 = line.trim_start_matches("max relative error: ").parse().unwrap();
        assert!(err < 1e-6, "{preset}: {line}");
    }
}
