use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn zoo(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../../zoo/{name}.cfg"))
}

fn mwl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mwl"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(mwl(&["bogus"]).status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let out = mwl(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("delta-tail"));
}

#[test]
fn simulation_runners_need_a_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mwl(&["lyapunov", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_config_file_is_a_usage_error() {
    let out = mwl(&["wlln", "--config", "/nonexistent/x.cfg"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn clt_refuses_heavy_tails() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mwl(&[
        "clt",
        "--config",
        zoo("diag-heavy15").to_str().unwrap(),
        "--replicas",
        "2",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gclt"));
}

#[test]
fn gclt_on_the_heavy_zoo_entry_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("out");
    let out = mwl(&[
        "gclt",
        "--config",
        zoo("rhd15").to_str().unwrap(),
        "--seed",
        "7",
        "--out",
        dir.to_str().unwrap(),
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(dir.join("report.json").exists());
    assert!(dir.join("gclt.csv").exists());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 7);
    assert_eq!(report["passed"], true);
    assert!(report["notes"][0].as_str().unwrap().contains("asymptotic"));
}

#[test]
fn dichotomy_verify_without_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mwl(&[
        "dichotomy-verify",
        "--replicas",
        "3",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("dichotomy.csv").exists());
}

#[test]
fn failing_thresholds_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("strict.cfg");
    std::fs::write(
        &cfg,
        "[steplaw]\nzoo = \"sl2-pair\"\n[grid]\nn_max = 64\nreplicas = 4\nblocks = 4\n\
         [stats]\n[stats.thresholds]\nmax_final_ratio = 1e-9\n",
    )
    .unwrap();
    let out = mwl(&[
        "wlln",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}
