use std::path::Path;
use std::process::{Command, Output};

fn bellmart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellmart"))
        .args(args)
        .env_remove("BELLMART_SEED")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn constants_table_succeeds() {
    let out = bellmart(&["constants", "--p-min", "2", "--p-max", "3", "--step", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("p,q,z_p,z_q,c_left,c_right,gap\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn failed_row_exits_one() {
    let out = bellmart(&["constants", "--p-min", "1.5", "--p-max", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("2,2,"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["bellman", "--p", "1.5", "--u", "1", "--v", "1"],
        vec!["bellman", "--p", "3", "--u", "1"],
        vec!["certify", "--grid", "0:1:10"],
        vec![
            "simulate",
            "--construction",
            "nope",
            "--paths",
            "10",
            "--steps",
            "10",
        ],
        vec!["frobnicate"],
    ] {
        let out = bellmart(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn bellman_point_row() {
    let out = bellmart(&["bellman", "--p", "3", "--u", "1", "--v", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(&row[..7], &[1.0, 1.0, 3.0, 2.0, 2.0, 2.0, 2.0]);
}

#[test]
fn manifest_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sim.csv");
    let out = bellmart(&[
        "--out",
        path_str(&out_path),
        "simulate",
        "--paths",
        "500",
        "--steps",
        "100",
        "--seed",
        "11",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest = dir.path().join("sim.csv.manifest.json");
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&manifest).unwrap()).unwrap();
    assert_eq!(json["verb"], "simulate");
    assert_eq!(json["seeds"][0], 11);
    let first = std::fs::read(&out_path).unwrap();

    let replay = bellmart(&["replay", path_str(&manifest)]);
    assert_eq!(replay.status.code(), Some(0));
    assert!(stdout(&replay).contains("reproduced"));

    let again = bellmart(&[
        "--out",
        path_str(&out_path),
        "simulate",
        "--paths",
        "500",
        "--steps",
        "100",
        "--seed",
        "11",
    ]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(std::fs::read(&out_path).unwrap(), first);
}

#[test]
fn tampered_manifest_fails_replay() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    let out = bellmart(&[
        "--manifest",
        path_str(&manifest),
        "bellman",
        "--p",
        "3",
        "--grid",
        "0.1:10:4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&manifest).unwrap();
    let mut json: serde_json::Value = serde_json::from_str(&text).unwrap();
    json["outputs"][0]["sha256"] = "00".repeat(32).into();
    std::fs::write(&manifest, json.to_string()).unwrap();
    let replay = bellmart(&["replay", path_str(&manifest)]);
    assert_eq!(replay.status.code(), Some(1));

    std::fs::write(&manifest, "not json").unwrap();
    assert_eq!(
        bellmart(&["replay", path_str(&manifest)]).status.code(),
        Some(2)
    );
}

#[test]
fn seed_comes_from_environment() {
    let run = |seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_bellmart"));
        cmd.args(["simulate", "--mode", "lemmas", "--draws", "100"]);
        match seed {
            Some(s) => cmd.env("BELLMART_SEED", s),
            None => cmd.env_remove("BELLMART_SEED"),
        };
        stdout(&cmd.output().unwrap())
    };
    assert!(run(None).contains("100,20240601,"));
    assert!(run(Some("5")).contains("100,5,"));
}
