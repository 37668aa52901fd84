//! End-to-end smoke tests of the `driftlab` binary.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_driftlab"))
}

const RUN_CONFIG: &str = "
[run]
case = weak_lp
p = 4
k = 0.5
t_max = 0.2
mass = 1
u0 = gaussian
u0_width = 0.5
fit_t_lo = 0.02
fit_t_hi = 0.2

[grid]
half_width = 10
n_cells = 256

[drift]
family = stationary

[solver]
dt_max = 0.005
diagnostics_stride = 2
";

#[test]
fn run_then_fit_then_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.txt");
    std::fs::write(&cfg, RUN_CONFIG).unwrap();
    let out_dir = tmp.path().join("out");

    let status = bin()
        .arg("run")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out_dir.join("series.csv").is_file());
    assert!(out_dir.join("report.txt").is_file());
    assert!(out_dir.join("config.txt").is_file());

    let fit = bin()
        .arg("fit-decay")
        .arg(out_dir.join("series.csv"))
        .arg("--t-lo")
        .arg("0.02")
        .arg("--t-hi")
        .arg("0.2")
        .output()
        .unwrap();
    assert!(fit.status.success());
    let text = String::from_utf8_lossy(&fit.stdout);
    assert!(text.contains("decay_exponent ="), "{text}");

    let report = bin().arg("report").arg(&out_dir).output().unwrap();
    assert!(report.status.success());
    let text = String::from_utf8_lossy(&report.stdout);
    assert!(text.contains("classification"), "{text}");
}

#[test]
fn sweep_writes_index_and_report_renders_table() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("sweep.txt");
    std::fs::write(
        &cfg,
        format!("{RUN_CONFIG}\n[sweep]\ncase = weak_lp\np_list = 4\nk_list = 0.5, critic\njobs = 2\nseed = 5\n"),
    )
    .unwrap();
    let out_dir = tmp.path().join("sweep_out");
    let status = bin()
        .arg("sweep")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .arg("--jobs")
        .arg("2")
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out_dir.join("index.csv").is_file());

    let report = bin().arg("report").arg(&out_dir).output().unwrap();
    assert!(report.status.success());
    let text = String::from_utf8_lossy(&report.stdout);
    assert!(text.contains("expected"), "{text}");
    assert!(text.lines().count() >= 4);
}

#[test]
fn verify_suite_runs_and_is_deterministic() {
    let out1 = bin().arg("verify").arg("lorentz").output().unwrap();
    assert!(out1.status.success(), "{}", String::from_utf8_lossy(&out1.stderr));
    let out2 = bin().arg("verify").arg("lorentz").output().unwrap();
    assert_eq!(out1.stdout, out2.stdout);
    let text = String::from_utf8_lossy(&out1.stdout);
    assert!(text.contains("lorentz,rearrangement_preserves_mass,true"), "{text}");

    // unknown suite is an invalid-input error
    let bad = bin().arg("verify").arg("nonsense").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn invalid_config_and_missing_dir_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.txt");
    std::fs::write(&cfg, "[run]\np = 4\nk = frogs\n").unwrap();
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .arg("report")
        .arg(tmp.path().join("does_not_exist"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn table_drift_from_file() {
    let tmp = tempfile::tempdir().unwrap();
    let table = tmp.path().join("drift.txt");
    std::fs::write(&table, "# x b\n-10 1\n0 0\n10 -1\n").unwrap();
    let cfg = tmp.path().join("run.txt");
    std::fs::write(
        &cfg,
        format!(
            "
[run]
case = weak_lp
p = inf
k = 1
t_max = 0.05
u0_width = 0.5

[grid]
half_width = 10
n_cells = 256

[drift]
family = table
path = {}

[solver]
dt_max = 0.002
",
            table.display()
        ),
    )
    .unwrap();
    let out_dir = tmp.path().join("out");
    let status = bin()
        .arg("run")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let report = std::fs::read_to_string(out_dir.join("report.txt")).unwrap();
    assert!(report.contains("classification = completed"), "{report}");
}
