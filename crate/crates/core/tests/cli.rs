//! The `chis` binary: subcommands and exit codes.

use std::process::{Command, Output};

fn chis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chis"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn defaults_prints_a_loadable_config() {
    let o = chis(&["defaults"]);
    assert_eq!(o.status.code(), Some(0));
    let cfg = chis::scenario::load_config(&stdout(&o)).unwrap();
    assert_eq!(cfg, chis::scenario::ScenarioConfig::default());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(chis(&[]).status.code(), Some(2));
    assert_eq!(chis(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        chis(&[
            "sweep",
            "scenarios/studies/sweep_line.toml",
            "--param",
            "nope",
            "--values",
            "1"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(chis(&["run", "does/not/exist.toml"]).status.code(), Some(2));
}

#[test]
fn sweep_writes_one_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(
        &cfg,
        "name = \"s\"\n[domain]\nextents = [1.0]\nnx = 32\n[model]\ndelta = 1.0\nt_final = 2.0\n[numerics]\ndt = 1e-3\n",
    )
    .unwrap();
    let o = chis(&[
        "sweep",
        cfg.to_str().unwrap(),
        "--param",
        "v0max",
        "--values",
        "0.05,0.166,0.5,2.0",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        let v: f64 = r[0].parse().unwrap();
        assert_eq!(&r[5], "false");
        if v <= 1.0 / 6.0 {
            assert_eq!(&r[6], "true");
        }
    }
}

#[test]
fn order_study_prints_table() {
    let o = chis(&[
        "order-study",
        "scenarios/studies/heat.toml",
        "--refine",
        "space",
        "--levels",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn run_writes_outputs_and_verify_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("short.toml");
    std::fs::write(
        &cfg,
        "name = \"short\"\n[domain]\nextents = [1.0]\nnx = 32\n[model]\ndelta = 1.0\nt_final = 1.0\n\
         [numerics]\ndt = 1e-3\n[checks]\nenabled = [\"mass_conservation\", \"comparison_principles\"]\n",
    )
    .unwrap();
    let out = dir.path().join("runs");
    let o = chis(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    for f in [
        "timeseries.csv",
        "initial.bin",
        "final.bin",
        "scenario.toml",
    ] {
        assert!(out.join("short").join(f).exists(), "{f}");
    }

    let csv_path = dir.path().join("report.csv");
    let o = chis(&[
        "verify",
        cfg.to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("traceability"));
    assert_eq!(
        std::fs::read_to_string(&csv_path).unwrap().lines().count(),
        3
    );

    // equilibrium is far from reached at T = 1, so enabling it fails the scenario
    let text = std::fs::read_to_string(&cfg).unwrap();
    std::fs::write(
        &cfg,
        text.replace("enabled = [", "enabled = [\"equilibrium\", "),
    )
    .unwrap();
    let o = chis(&["verify", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn verify_directory_skips_broken_files_without_aborting() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("a_broken.toml"),
        "[domain]\nextents = [1.0]\nnx = 32\nwhat = 1\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("b_ok.toml"),
        "name = \"ok\"\n[domain]\nextents = [1.0]\nnx = 16\n[model]\ndelta = 1.0\nt_final = 0.1\n[numerics]\ndt = 1e-3\n\
         [checks]\nenabled = [\"mass_conservation\"]\n",
    )
    .unwrap();
    let o = chis(&["verify", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("scenario_load"));
    assert!(text.contains("mass_conservation        ok"));
}
