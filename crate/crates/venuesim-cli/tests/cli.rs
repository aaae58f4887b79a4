//! CLI-level smoke tests: bootstrap, small-scale generation, validation exit
//! codes and error reporting.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_venuesim")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("venuesim-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn init_config(dir: &PathBuf) {
    let out = Command::new(bin())
        .args(["init", "--out"])
        .arg(dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
}

#[test]
fn init_refuses_nonempty_dir_without_force() {
    let cfg = tmp("init");
    init_config(&cfg);
    let again = Command::new(bin())
        .args(["init", "--out"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(!again.status.success(), "init must refuse without --force");
    let forced = Command::new(bin())
        .args(["init", "--out"])
        .arg(&cfg)
        .arg("--force")
        .output()
        .unwrap();
    assert!(forced.status.success());
}

#[test]
fn smoke_generate_validate_stats_roundtrip() {
    let cfg = tmp("roundtrip-cfg");
    init_config(&cfg);
    let out_dir = tmp("roundtrip-out");
    let gen = Command::new(bin())
        .args(["generate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .args(["--scale", "0.01", "--days", "1", "--seed", "7"])
        .output()
        .unwrap();
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));
    let stdout = String::from_utf8_lossy(&gen.stdout);
    assert!(stdout.contains("final records:"), "summary missing: {stdout}");

    for f in ["dataset.csv", "ground_truth.json", "profile.json"] {
        assert!(out_dir.join(f).exists(), "{f} missing");
    }

    let val = Command::new(bin())
        .args(["validate", "--config"])
        .arg(&cfg)
        .arg("--data")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(val.status.success(), "{}", String::from_utf8_lossy(&val.stderr));
    assert!(String::from_utf8_lossy(&val.stdout).contains("physical findings: 0"));

    let stats = Command::new(bin())
        .args(["stats", "--data"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(stats.status.success());
    let text = String::from_utf8_lossy(&stats.stdout);
    assert!(text.contains("\"unique_pids\": 54"), "stats: {text}");
}

#[test]
fn smoke_runs_are_deterministic() {
    let cfg = tmp("det-cfg");
    init_config(&cfg);
    let mut outputs = Vec::new();
    for name in ["det-a", "det-b"] {
        let out_dir = tmp(name);
        let gen = Command::new(bin())
            .args(["generate", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out_dir)
            .args(["--scale", "0.02", "--days", "1,2", "--seed", "99"])
            .output()
            .unwrap();
        assert!(gen.status.success());
        outputs.push(out_dir);
    }
    for f in ["dataset.csv", "ground_truth.json", "profile.json"] {
        let a = std::fs::read(outputs[0].join(f)).unwrap();
        let b = std::fs::read(outputs[1].join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
}

#[test]
fn truncated_dataset_fails_with_parse_error() {
    let cfg = tmp("trunc-cfg");
    init_config(&cfg);
    let out_dir = tmp("trunc-out");
    let gen = Command::new(bin())
        .args(["generate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .args(["--scale", "0.01", "--days", "1"])
        .output()
        .unwrap();
    assert!(gen.status.success());

    // Chop the file mid-line.
    let path = out_dir.join("dataset.csv");
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 7]).unwrap();

    let val = Command::new(bin())
        .args(["validate", "--config"])
        .arg(&cfg)
        .arg("--data")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(!val.status.success(), "validate must fail on a truncated file");
    let err = String::from_utf8_lossy(&val.stderr);
    assert!(err.contains("line"), "error should carry a line number: {err}");
}

#[test]
fn corrupted_dataset_yields_physical_findings() {
    let cfg = tmp("corrupt-cfg");
    init_config(&cfg);
    let out_dir = tmp("corrupt-out");
    let gen = Command::new(bin())
        .args(["generate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .args(["--scale", "0.01", "--days", "1"])
        .output()
        .unwrap();
    assert!(gen.status.success());

    // Teleport one record across the floor.
    let path = out_dir.join("dataset.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    let mid = lines.len() / 2;
    let row: Vec<&str> = lines[mid].split(',').collect();
    let forged = format!("{},{},1,29,15,11529", row[0], row[1]);
    lines[mid] = &forged;
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();

    let val = Command::new(bin())
        .args(["validate", "--config"])
        .arg(&cfg)
        .arg("--data")
        .arg(&out_dir)
        .arg("--strict")
        .output()
        .unwrap();
    assert!(!val.status.success(), "strict validation must fail");
    let out = String::from_utf8_lossy(&val.stdout);
    assert!(
        out.contains("physical/adjacency") || out.contains("physical/"),
        "expected a physical finding: {out}"
    );
}
