use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tubenode::config::parse_config;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tubenode"))
        .arg(sub)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

const TUBE: &str = "[geometry]\nkind = constant\nr0 = 0.01\n\
                    [discretization]\nn_elems = 40\nns = 40\nnr = 4\ndt = 2e-5\nt_final = 2e-3\n";

#[test]
fn verify_node_passes_on_constant_tube() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "tube.ini", TUBE);
    let out = run("verify-node", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out/run_defects.csv").exists());
    assert!(dir.path().join("out/run_verify.txt").exists());
}

#[test]
fn corrupted_operator_fails_check() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{TUBE}[verify]\ncorrupt_l_scale = 1.01\n");
    let cfg = write_config(dir.path(), "bad.ini", &text);
    let out = run("verify-node", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("failed"));
}

#[test]
fn negative_alpha_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{TUBE}[physics]\nalpha = -1\n");
    let cfg = write_config(dir.path(), "neg.ini", &text);
    let out = run("simulate-webster", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("physics.alpha"));
}

#[test]
fn missing_config_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("verify-node", &dir.path().join("nope.ini"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tight_curvature_fails_geometry_report() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[geometry]\nkind = constant\nr0 = 0.01\nkappa = 150\n";
    let cfg = write_config(dir.path(), "curved.ini", text);
    let out = run("geometry-report", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn geometry_report_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[geometry]\nkind = cone\nr0 = 0.01\nr1 = 0.02\nn_samples = 11\n";
    let cfg = write_config(dir.path(), "cone.ini", text);
    let out = run("geometry-report", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let table = fs::read_to_string(dir.path().join("out/run_geometry.csv")).unwrap();
    assert!(table.starts_with("#schema=1\ns,R,Rp,kappa,A,eta,Sigma,W\n"));
    assert_eq!(table.lines().count(), 2 + 11);
}

#[test]
fn compare_averages_rejects_cone() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[geometry]\nkind = cone\nr0 = 0.01\nr1 = 0.02\n";
    let cfg = write_config(dir.path(), "cone.ini", text);
    let out = run("compare-averages", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("geometry.kind"));
}

#[test]
fn out_of_band_pulse_only_warns() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{TUBE}[input]\nkind = gaussian\ncenter = 2e-4\nwidth = 2e-5\n");
    let cfg = write_config(dir.path(), "fast.ini", &text);
    let out = run("compare-averages", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("warning: input bandwidth"));
}

#[test]
fn run_meta_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(dir.path(), "tube.ini", TUBE);
    let out_dir = dir.path().join("out");
    let out = run("simulate-webster", &cfg_path, &out_dir, &["--seed", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let meta = parse_config(out_dir.join("run.meta")).unwrap();
    let mut cfg = parse_config(&cfg_path).unwrap();
    cfg.output.directory = out_dir;
    cfg.verify.seed = 11;
    assert_eq!(meta, cfg);
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "tube.ini", TUBE);
    for (sub, file) in [("simulate-webster", "run_webster.csv"), ("simulate-cylinder", "run_cylinder_ledger.csv")] {
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        assert_eq!(run(sub, &cfg, &a, &[]).status.code(), Some(0));
        assert_eq!(run(sub, &cfg, &b, &[]).status.code(), Some(0));
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap());
    }
}

#[test]
fn several_configs_run_in_parallel() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_config(dir.path(), "a.ini", TUBE);
    let b = write_config(dir.path(), "b.ini", &format!("{TUBE}[verify]\ncorrupt_l_scale = 1.01\n"));
    let out = Command::new(env!("CARGO_BIN_EXE_tubenode"))
        .args(["verify-node", "--jobs", "2", "--config"])
        .arg(&a)
        .arg("--config")
        .arg(&b)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(dir.path().join("out/a/run.meta").exists());
    assert!(dir.path().join("out/b/run.meta").exists());
}
