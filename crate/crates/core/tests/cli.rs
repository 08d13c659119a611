//! End-to-end runs of the `condop` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use condop::report::Report;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn condop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_condop"))
        .args(args)
        .env_remove("CONDOP_SEED")
        .output()
        .expect("binary runs")
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("condop-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn stdout_report(out: &Output) -> Report {
    Report::from_json(&String::from_utf8_lossy(&out.stdout)).expect("stdout is a report")
}

#[test]
fn classify_prints_a_report() {
    let out = condop(&["classify", fixture("basic.json").to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = stdout_report(&out);
    assert_eq!(report.header.tool, "condop");
    assert_eq!(report.body["seed"], 7);
    let results = report.body["results"].as_array().unwrap();
    assert_eq!(results.len(), 6);
    assert_eq!(results[1]["result"]["preimage"]["delta_b"], 1.5);
}

#[test]
fn invalid_input_exits_2_with_path() {
    let out = condop(&["classify", fixture("invalid_weight.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("space.weights[1]"));

    let out = condop(&["classify", "/nonexistent/scenario.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn audit_exits_3_on_failed_implication() {
    let path = fixture("corrupted_audit.json");
    let out = condop(&["audit", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("audit failure"));
    assert_eq!(
        condop(&["classify", path.to_str().unwrap()]).status.code(),
        Some(0)
    );
    assert_eq!(
        condop(&["audit", fixture("cross_exponent.json").to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn strict_oracle_exits_4_on_flags() {
    let path = fixture("strict_oracle.json");
    assert_eq!(
        condop(&["classify", path.to_str().unwrap()]).status.code(),
        Some(0)
    );
    assert_eq!(
        condop(&["classify", "--strict-oracle", path.to_str().unwrap()])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn sweep_writes_csv_and_level_reports() {
    let dir = scratch_dir("sweep");
    let out = condop(&[
        "sweep",
        fixture("sweep_pairing.json").to_str().unwrap(),
        "--levels",
        "4..6",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.join("sweep.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "level,kernel_dim,rank,codim,index,bounded_below,delta,takagi_b"
    );
    assert!(lines[1].starts_with("4,12,4,4,8,"));
    assert_eq!(*lines.last().unwrap(), "verdict,fredholm-fails");
    for level in 4..=6 {
        let text = std::fs::read_to_string(dir.join(format!("level_{level:02}.json"))).unwrap();
        assert_eq!(Report::from_json(&text).unwrap().body["level"], level);
    }
    assert!(dir.join("report.json").exists());
    std::fs::remove_dir_all(&dir).unwrap();

    let out = condop(&["sweep", fixture("sweep_invertible.json").to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stdout).ends_with("verdict,invertible-uniform\n"));
    let out = condop(&[
        "sweep",
        fixture("sweep_pairing.json").to_str().unwrap(),
        "--levels",
        "6..4",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn recognize_subcommand() {
    let out = condop(&["recognize", fixture("basic.json").to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = stdout_report(&out);
    let results = report.body["results"].as_array().unwrap();
    assert_eq!(results.len(), 1);
    assert_eq!(results[0]["analysis"], "recognize");
}

#[test]
fn seed_precedence() {
    let path = fixture("basic.json");
    let seed_of = |out: &Output| stdout_report(out).body["seed"].clone();
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_condop"));
        cmd.env_remove("CONDOP_SEED");
        if let Some(v) = env {
            cmd.env("CONDOP_SEED", v);
        }
        cmd.arg("classify").arg(&path);
        if let Some(v) = flag {
            cmd.args(["--seed", v]);
        }
        cmd.output().unwrap()
    };
    assert_eq!(seed_of(&run(None, None)), 7);
    assert_eq!(seed_of(&run(Some("21"), None)), 21);
    assert_eq!(seed_of(&run(Some("21"), Some("5"))), 5);
    assert_eq!(run(Some("x"), None).status.code(), Some(2));
}

#[test]
fn repeated_runs_have_identical_bodies() {
    let path = fixture("cross_exponent.json");
    let a = stdout_report(&condop(&[
        "classify",
        path.to_str().unwrap(),
        "--seed",
        "3",
    ]));
    let b = stdout_report(&condop(&[
        "classify",
        path.to_str().unwrap(),
        "--seed",
        "3",
    ]));
    assert_eq!(a.body_json(), b.body_json());
}

#[test]
fn demos() {
    let out = condop(&["demo", "laplace", "--a", "2", "--x", "0.5,1"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = stdout_report(&out).body["result"]["rows"]
        .as_array()
        .unwrap()
        .clone();
    assert_eq!(rows.len(), 2);
    for row in rows {
        let (x, computed) = (
            row["x"].as_f64().unwrap(),
            row["computed"].as_f64().unwrap(),
        );
        assert!((computed - 1.0 / (x + 2.0)).abs() < 1e-3);
    }
    for name in ["product", "kernel", "convolution"] {
        assert_eq!(condop(&["demo", name]).status.code(), Some(0), "{name}");
    }
    assert_eq!(
        condop(&["demo", "kernel", "--n", "1"]).status.code(),
        Some(2)
    );
}
