//! End-to-end runs of the `smscma` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_smscma"));
    cmd.env_remove("SMSCMA_WORKERS");
    cmd
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples/configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_accepts_every_shipped_config() {
    for entry in std::fs::read_dir(config("")).unwrap() {
        let path = entry.unwrap().path();
        let out = run(&["validate", path_str(&path)]);
        assert_eq!(
            code(&out),
            0,
            "{}: {}",
            path.display(),
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn validate_prints_one_based_index_sets() {
    let out = run(&["validate", path_str(&config("eta3_nr2.json"))]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("{2, 3, 5}"), "{text}");
    assert!(text.contains("{1, 4, 5}"), "{text}");
}

#[test]
fn noiseless_simulation_has_zero_ber() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("clean");
    let out = run(&[
        "simulate",
        path_str(&config("eta3_nr2.json")),
        "--noiseless",
        "--decoders",
        "sud,msud,fcsd,mpa",
        "--trials",
        "50",
        "--out",
        path_str(&stem),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(dir.path().join("clean.csv")).unwrap();
    let headers = reader.headers().unwrap().clone();
    let ber = headers.iter().position(|h| h == "ber").unwrap();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.unwrap();
        assert_eq!(record[ber].parse::<f64>().unwrap(), 0.0, "{record:?}");
        rows += 1;
    }
    assert_eq!(rows, 4);
}

#[test]
fn manifest_replay_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let common = [
        "--decoders",
        "sud,fcsd,mpa",
        "--snr",
        "0:5:10",
        "--trials",
        "40",
        "--seed",
        "9",
    ];
    let cfg = config("eta3_nr2.json");
    let mut args = vec!["simulate", path_str(&cfg)];
    args.extend(common);
    args.extend(["--out", path_str(&first), "--workers", "1"]);
    assert_eq!(code(&run(&args)), 0);

    let second = dir.path().join("second");
    let manifest = dir.path().join("first.manifest.json");
    let out = run(&[
        "simulate",
        "--manifest",
        path_str(&manifest),
        "--out",
        path_str(&second),
        "--workers",
        "3",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for ext in ["csv", "json"] {
        let a = std::fs::read(dir.path().join(format!("first.{ext}"))).unwrap();
        let b = std::fs::read(dir.path().join(format!("second.{ext}"))).unwrap();
        assert_eq!(a, b, "{ext} differs");
    }
}

#[test]
fn complexity_report_lists_golden_counts() {
    let out = run(&["complexity", path_str(&config("eta3_nr2.json"))]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let text = report.to_string();
    for golden in [
        "15812", "16400", "20996", "74008", "94184", "196548", "270864",
    ] {
        assert!(text.contains(golden), "missing {golden}");
    }
}

#[test]
fn nom_writes_one_row_per_survivor_vector() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("nom");
    let out = run(&[
        "nom",
        path_str(&config("nom_eta3.json")),
        "--rho",
        "15,50,15",
        "--rho",
        "50,15,15",
        "--trials",
        "30",
        "--snr",
        "4",
        "--out",
        path_str(&stem),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(dir.path().join("nom.csv")).unwrap();
    assert_eq!(reader.records().count(), 2);
}

#[test]
fn exit_codes_follow_error_kind() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("eta3_nr2.json");
    let out_stem = dir.path().join("x");

    // malformed arguments and configs
    assert_eq!(code(&run(&["simulate", "--bogus"])), 2);
    assert_eq!(
        code(&run(&[
            "nom",
            path_str(&cfg),
            "--rho",
            "1,2",
            "--trials",
            "2"
        ])),
        2
    );
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"U": 3, "R": 4, "M": 2, "N_t": 4, "N_r": 2, "rho": [1, 1, 1]}"#,
    )
    .unwrap();
    assert_eq!(code(&run(&["validate", path_str(&bad)])), 2);

    // search space guard
    let out = run(&[
        "simulate",
        path_str(&cfg),
        "--decoders",
        "ml",
        "--ml-guard",
        "1000",
        "--trials",
        "1",
        "--out",
        path_str(&out_stem),
    ]);
    assert_eq!(code(&out), 3);

    // I/O
    assert_eq!(
        code(&run(&[
            "validate",
            path_str(&dir.path().join("missing.json"))
        ])),
        4
    );
}
