use std::process::{Command, Output};

use tanprimes::counting::count_sc;
use tanprimes::report;
use tanprimes::sequence::DEFAULT_TOL;
use tanprimes::{EvalConfig, Params};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tanprimes")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn windows_row() {
    let o = run(&["windows", "--x", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "2");
    assert!((row[2].parse::<f64>().unwrap() - 1174.483).abs() < 1e-3);
    assert!((row[4].parse::<f64>().unwrap() - 1620.247).abs() < 1e-3);
    let big = stdout(&run(&["windows", "--x", "1e6"]));
    assert_eq!(big.lines().nth(1).unwrap().split(',').nth(1), Some("4"));
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(run(&["windows", "--x", "23"]).status.code(), Some(3));
    assert_eq!(run(&["count", "--c", "1.2", "--theta", "2", "--x", "1000"]).status.code(), Some(3));
    assert_eq!(run(&["count", "--x", "1000", "--precision-cap", "32"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    let lit = run(&["hb", "--p", "1024", "--mode", "literal"]);
    assert_eq!(lit.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&lit.stderr).contains("U² ≤ Z"));
}

#[test]
fn count_matches_library() {
    let o = run(&["count", "--c", "1.05", "--theta", "2", "--x", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let lib = count_sc(1000.0, &Params::new(1.05, 2.0).unwrap(), EvalConfig::default(), DEFAULT_TOL).unwrap();
    assert_eq!(stdout(&o), report::count_table(&[lib]).to_csv());
}

#[test]
fn count_json_has_every_field() {
    let o = run(&["count", "--x", "1e3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    let row = &v["data"][0];
    for k in [
        "x",
        "k",
        "delta1",
        "delta2",
        "s_c",
        "undecided",
        "gamma_sum",
        "sigma_sum",
        "residual",
        "density_ratio",
    ] {
        assert!(!row[k].is_null(), "{k}");
    }
    assert_eq!(row["s_c"], 46);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "theta = 3.0\nprecision-cap = 2048\nformat = \"json\"\n").unwrap();
    let c = cfg.to_str().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&run(&["windows", "--x", "1e3", "--config", c]).stdout).unwrap();
    assert_eq!(v["config"]["theta"], 3.0);
    assert_eq!(v["config"]["precision_cap"], 2048);
    let v: serde_json::Value =
        serde_json::from_slice(&run(&["windows", "--x", "1e3", "--config", c, "--theta", "2.5"]).stdout).unwrap();
    assert_eq!(v["config"]["theta"], 2.5);
    std::fs::write(&cfg, "colour = 1\n").unwrap();
    assert_eq!(run(&["windows", "--x", "1e3", "--config", c]).status.code(), Some(3));
}

#[test]
fn output_file_and_density_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    let plot = dir.path().join("d.dat");
    let o = run(&[
        "density",
        "--x",
        "1e3,1e4",
        "--output",
        out.to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 3);
    let text = std::fs::read_to_string(&plot).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(|s| s.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.len() == 2));
    assert_eq!(rows[0][0], 1e3);
}

#[test]
fn verify_suites_pass() {
    for args in [
        &["verify", "weyl", "--trials", "1000", "--seed", "7"][..],
        &["verify", "vaaler", "--M", "16,64,256"],
        &["verify", "hb", "--pmax", "4096"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        let out = stdout(&o);
        assert!(out.lines().skip(1).all(|l| l.contains(",true,")), "{out}");
    }
    assert_eq!(run(&["verify", "nope"]).status.code(), Some(3));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let a = run(&["verify", "weyl", "--trials", "200", "--seed", "11"]);
    let b = run(&["verify", "weyl", "--trials", "200", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    let s1 = run(&["sweep", "--family", "inversion", "--theta", "5", "--n", "1024,2048", "--threads", "1"]);
    let s4 = run(&["sweep", "--family", "inversion", "--theta", "5", "--n", "1024,2048", "--threads", "4"]);
    assert_eq!(s1.status.code(), Some(0));
    assert_eq!(s1.stdout, s4.stdout);
    assert!(stdout(&s1).starts_with("N,h,k,abs,bound,ratio"));
}

#[test]
fn remaining_subcommands() {
    let t = run(&["terms", "--x", "1000", "--count", "4"]);
    assert_eq!(stdout(&t).lines().count(), 5);
    let i = stdout(&run(&["invert", "--x", "1000", "--t", "2000"]));
    assert!(i.lines().nth(1).unwrap().starts_with("2.0000000000000000e3,1.21680486735268"));
    let pc = stdout(&run(&["pi-c", "--x", "100"]));
    assert_eq!(pc.lines().nth(1).unwrap().split(',').nth(2), Some("22"));
    let v = stdout(&run(&["vaaler", "--M", "4"]));
    assert_eq!(v.lines().count(), 6);
    let ts = run(&["typesum", "--kind", "ilog", "--n", "4096", "--theta", "5"]);
    assert_eq!(ts.status.code(), Some(0));
    let hb = run(&["hb", "--p", "1024", "--g", "inversion", "--theta", "5", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&hb.stdout).unwrap();
    assert!(v["data"]["relative_residual"].as_f64().unwrap() < 1e-9);
    assert!(v["data"]["components"].as_array().unwrap().len() > 1000);
}
