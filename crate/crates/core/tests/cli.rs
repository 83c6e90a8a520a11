use std::path::Path;
use std::process::{Command, Output};

use rsma_relay::sim::{read_rows, OutputFormat};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rsma-relay"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn binary")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let o = run(&[
        "--snr",
        "10:10:20",
        "--realizations",
        "8",
        "--method",
        "rsma_closed,sdma",
        "--variant",
        "R1,R3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_rows(OutputFormat::Csv, &out).unwrap();
    // 2 SNRs x (closed: 2 variants + sdma: 2 variants)
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r.n_realizations == 8));

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.csv.meta.json")).unwrap()).unwrap();
    assert!(meta.is_object());
}

#[test]
fn json_by_extension() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.json");
    let o = run(&["--snr", "20", "--realizations", "4", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v.as_array().is_some_and(|a| !a.is_empty()));
}

#[test]
fn stdout_when_no_output_path() {
    let o = run(&["--snr", "0", "--realizations", "2", "--method", "sdma", "--variant", "R1", "--bu-mode", "PCI"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("point_index,"));
}

#[test]
fn config_file_and_cli_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("o.csv");
    std::fs::write(
        &cfg,
        r#"{"snr_db": [5.0, 15.0], "n_realizations": 3, "methods": ["sdma"], "variants": ["R1"], "seed": 9}"#,
    )
    .unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "--realizations", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_rows(OutputFormat::Csv, &out).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.n_realizations == 5 && r.seed == 9));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"snr_db": [10.0], "n_realisations": 3}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("n_realisations"), "{}", stderr(&o));
}

#[test]
fn invalid_config_reports_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n_bs_users": 40, "n_realizations": 0, "rician_factor": -1.0}"#).unwrap();
    let out = dir.path().join("never.csv");
    let o = run(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.starts_with("error:"), "{err}");
    assert!(err.contains("realizations") && err.contains("rician"), "{err}");
    assert!(!Path::new(&out).exists());
}

#[test]
fn bad_flags_fail() {
    assert!(!run(&["--preset", "fig9"]).status.success());
    assert!(!run(&["--snr", "a:b:c"]).status.success());
    assert!(!run(&["--method", "noma"]).status.success());
    assert!(!run(&["--grid", "64"]).status.success());
}

#[test]
fn repeated_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (p, threads) in [(&a, "1"), (&b, "3")] {
        let o = run(&[
            "--snr",
            "10:10:30",
            "--realizations",
            "6",
            "--method",
            "rsma_exhaustive",
            "--variant",
            "R2",
            "--grid",
            "12:8",
            "--threads",
            threads,
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
