use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use darboux::grid::PeriodicGrid;
use darboux::io::{fmt_num, parse_csv};
use darboux::liealg::SpaceForm;
use darboux::samples::SpinInit;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_darboux"))
        .args(args)
        .output()
        .unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn shipped(name: &str) -> String {
    format!("{}/configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run_cmd(cmd: &[&str], config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args: Vec<&str> = cmd.to_vec();
    args.extend([
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    args.extend(extra);
    run(&args)
}

#[test]
fn tables_verify_108_entries() {
    let dir = TempDir::new().unwrap();
    let o = run(&["tables", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    assert!(
        text(&o.stdout).contains("108 table entries verified"),
        "{}",
        text(&o.stdout)
    );
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("tables.json")).unwrap()).unwrap();
    assert_eq!(report["entries_checked"], 108);
    assert_eq!(report["ok"], true);
}

#[test]
fn tables_json_report_parses() {
    let dir = TempDir::new().unwrap();
    let o = run(&["tables", "--json", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
    assert!(v["commutator_oracle_max"].as_f64().unwrap() <= 1e-15);
}

#[test]
fn injected_table_error_is_named() {
    let dir = TempDir::new().unwrap();
    let o = run(&[
        "tables",
        "--inject",
        "2:B2:B3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let out = text(&o.stdout);
    assert!(out.contains("table 2") && out.contains("[B2, B3]"), "{out}");
}

#[test]
fn zero_time_flow_returns_the_input() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "flow.json",
        r#"{"form": 0, "grid": {"length": 6.283185307179586, "n": 16},
            "init": {"kind": "random", "modes": 2, "amplitude": 0.3},
            "t_final": 0.0, "dt": 0.001, "seed": 4}"#,
    );
    let g = PeriodicGrid::periodic(std::f64::consts::TAU, 16).unwrap();
    let init = SpinInit::Random {
        modes: 2,
        amplitude: 0.3,
    }
    .build(g, SpaceForm::Euclidean, 4)
    .unwrap();
    for kind in ["heisenberg", "f1", "shortening"] {
        let out = dir.path().join(kind);
        let o = run_cmd(&["flow", kind], &cfg, &out, &[]);
        assert_eq!(o.status.code(), Some(0), "{kind}: {}", text(&o.stderr));
        let csv = fs::read_to_string(out.join(format!("flow_{kind}_trajectory.csv"))).unwrap();
        let rows = parse_csv(&csv, &["t", "s", "l1", "l2", "l3"]).unwrap();
        let first: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] == 0.0).take(16).collect();
        assert_eq!(first.len(), 16);
        for (r, l) in first.iter().zip(&init.lam) {
            assert_eq!([r[2], r[3], r[4]], *l, "{kind}");
        }
        assert!(rows.iter().all(|r| r[0] == 0.0), "{kind}");
    }
}

#[test]
fn missing_key_reports_its_path() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"form": 1, "grid": {"length": 1.0}, "init": {"kind": "random", "modes": 2, "amplitude": 0.3}}"#,
    );
    let o = run_cmd(&["invariants"], &cfg, &dir.path().join("out"), &[]);
    assert_ne!(o.status.code(), Some(0));
    let err = text(&o.stderr);
    assert!(
        err.contains("at grid") && err.contains("missing field `n`"),
        "{err}"
    );
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"form": -1, "h": [0, 0, 0], "H": [0, 0, 0], "span": 1.0, "tolerance": 1e-10}"#,
    );
    let o = run_cmd(&["elastica"], &cfg, &dir.path().join("out"), &[]);
    assert_ne!(o.status.code(), Some(0));
    assert!(text(&o.stderr).contains("tolerance"), "{}", text(&o.stderr));
}

#[test]
fn infeasible_soliton_fails_cleanly() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "sol.json",
        r#"{"targets": {"H1": 0.0, "I1": 1.0, "I2": 0.0, "h1": 0.5}, "span": 10.0, "n": 100,
            "window": 4.0, "t_final": 0.1, "levels": [{"n": 32, "slices": 5}]}"#,
    );
    let o = run_cmd(&["soliton"], &cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    let err = text(&o.stderr);
    assert!(err.contains("no real initial state"), "{err}");
    assert!(!err.contains("panicked"));
}

#[test]
fn equilibrium_soliton_has_zero_residual() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "sol.json",
        r#"{"targets": {"H1": 0.5, "I1": 0.75, "I2": -0.5, "h1": -1.0}, "span": 10.0, "n": 100,
            "window": 4.0, "t_final": 0.1, "levels": [{"n": 32, "slices": 5}, {"n": 64, "slices": 9}]}"#,
    );
    let o = run_cmd(&["soliton"], &cfg, &dir.path().join("out"), &["--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["xi"], -0.5);
    for row in v["levels"].as_array().unwrap() {
        assert_eq!(row["residual"], 0.0);
    }
}

#[test]
fn dry_run_touches_nothing() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    for (cmd, cfg) in [
        (vec!["frame"], "frame_helix.json"),
        (vec!["flow", "heisenberg"], "flow_magnon.json"),
        (vec!["hasimoto-check"], "hasimoto.json"),
        (vec!["elastica"], "elastica.json"),
        (vec!["soliton"], "soliton.json"),
        (vec!["invariants"], "invariants.json"),
    ] {
        let o = run_cmd(&cmd, Path::new(&shipped(cfg)), &out, &["--dry-run"]);
        assert_eq!(o.status.code(), Some(0), "{cmd:?}: {}", text(&o.stderr));
        assert!(text(&o.stdout).contains("configuration valid"));
    }
    let o = run(&["tables", "--dry-run", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!out.exists());
}

fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    for (cmd, cfg) in [
        (vec!["elastica"], "elastica.json"),
        (vec!["frame"], "frame_helix.json"),
        (vec!["invariants"], "invariants.json"),
        (vec!["flow", "shortening"], "flow_random.json"),
    ] {
        let a = dir.path().join(format!("{}_a", cmd.join("_")));
        let b = dir.path().join(format!("{}_b", cmd.join("_")));
        let cfg = PathBuf::from(shipped(cfg));
        assert_eq!(run_cmd(&cmd, &cfg, &a, &[]).status.code(), Some(0));
        assert_eq!(
            run_cmd(&cmd, &cfg, &b, &["--jobs", "2"]).status.code(),
            Some(0)
        );
        let (oa, ob) = (outputs(&a), outputs(&b));
        assert!(!oa.is_empty());
        assert_eq!(oa, ob, "{cmd:?}");
    }
}

#[test]
fn csv_numbers_use_full_precision() {
    assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = run_cmd(
        &["elastica"],
        Path::new(&shipped("elastica.json")),
        &out,
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(out.join("elastica_trajectory.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    assert!(row.split(',').all(|f| f.contains('e')), "{row}");
    let svg = fs::read_to_string(out.join("elastica_h1.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}
