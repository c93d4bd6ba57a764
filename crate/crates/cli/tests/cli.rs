use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn repcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repcat"))
        .args(args)
        .env_remove("REPCAT_WORKERS")
        .output()
        .expect("spawn")
}

fn config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SWEEP: &str = r#"{
  "experiment": "memory",
  "distances": [3, 5],
  "noise": {"p": [0.015, 0.02, 0.03]},
  "stopping": {"min_failures": 60, "max_trajectories": 200000},
  "seed": 11
}"#;

#[test]
fn zero_noise_csv_matches_golden() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        &dir,
        "z.json",
        r#"{"experiment": "memory", "distances": [3, 5], "noise": {"p": [0.0]}}"#,
    );
    let out = dir.path().join("z");
    let o = repcat(&[
        "run",
        "--config",
        s(&cfg),
        "--max-trajectories",
        "1024",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let got = std::fs::read_to_string(out.with_extension("csv")).unwrap();
    let want = include_str!("golden/zero_noise.csv");
    assert_eq!(got, want);
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap())
            .unwrap();
    assert_eq!(record["config"]["experiment"], "memory");
    assert_eq!(record["estimates"].as_array().unwrap().len(), 2);
}

#[test]
fn rerun_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "m.json", SWEEP);
    let run = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        let o = repcat(&[
            "run",
            "--config",
            s(&cfg),
            "--workers",
            workers,
            "--out",
            s(&out),
        ]);
        assert!(o.status.success());
        std::fs::read(out.with_extension("csv")).unwrap()
    };
    let a = run("a", "1");
    assert_eq!(a, run("b", "1"));
    assert_eq!(a, run("c", "3"));
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 1 + 6);
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "m.json", SWEEP);
    assert_eq!(
        repcat(&["run", "--config", s(&cfg), "--set", "distances=[]"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        repcat(&["run", "--config", s(&cfg), "--set", "distances=[4]"])
            .status
            .code(),
        Some(2)
    );
    let broken = config(
        &dir,
        "b.json",
        "{\n  \"experiment\": \"memory\",\n  \"distances\": [3,\n}",
    );
    let o = repcat(&["validate", "--config", s(&broken)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    assert_eq!(
        repcat(&["validate", "--config", s(&cfg)]).status.code(),
        Some(0)
    );
}

#[test]
fn fit_and_overhead_pipeline() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "m.json", SWEEP);
    let prefix = dir.path().join("sweep");
    assert!(repcat(&["run", "--config", s(&cfg), "--out", s(&prefix)])
        .status
        .success());

    let fit = dir.path().join("fit.json");
    let o = repcat(&["fit", s(&prefix.with_extension("csv")), "--out", s(&fit)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("p_th"));
    let o = repcat(&["fit", s(&prefix.with_extension("json"))]);
    assert!(o.status.success());

    let o = repcat(&[
        "overhead",
        "--fit",
        s(&fit),
        "--p",
        "0.001,0.01",
        "--targets",
        "1e-6,1e-10",
    ]);
    assert!(o.status.success());
    let table = String::from_utf8(o.stdout).unwrap();
    let mut lines = table.lines();
    assert_eq!(
        lines.next(),
        Some("p,target_pL,d,nbar,total_modes,feasible")
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn single_distance_fit_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "m.json", SWEEP);
    let prefix = dir.path().join("one");
    assert!(repcat(&[
        "run",
        "--config",
        s(&cfg),
        "--set",
        "distances=[3]",
        "--out",
        s(&prefix)
    ])
    .status
    .success());
    assert_eq!(
        repcat(&["fit", s(&prefix.with_extension("csv"))])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn enumerate_census() {
    let first_line = |o: Output| {
        String::from_utf8(o.stdout)
            .unwrap()
            .lines()
            .next()
            .unwrap()
            .to_string()
    };
    let o = repcat(&[
        "enumerate",
        "--experiment",
        "memory",
        "--d",
        "3",
        "--max-weight",
        "1",
    ]);
    assert!(first_line(o).ends_with("failing 0"));
    let o = repcat(&[
        "enumerate",
        "--experiment",
        "memory",
        "--d",
        "3",
        "--max-weight",
        "0",
    ]);
    assert_eq!(first_line(o), "examined 1 failing 0");
    let o = repcat(&[
        "enumerate",
        "--experiment",
        "toffoli_ft",
        "--d",
        "3",
        "--max-weight",
        "1",
    ]);
    assert!(!first_line(o).ends_with("failing 0"));
    let o = repcat(&[
        "enumerate",
        "--experiment",
        "memory",
        "--d",
        "5",
        "--max-weight",
        "2",
        "--budget",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(4));
}
