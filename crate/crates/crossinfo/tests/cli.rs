use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use crossinfo::OUTPUT_DIR_ENV;

fn crossinfo(args: &[&str], env_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_crossinfo"));
    cmd.args(args).env_remove(OUTPUT_DIR_ENV);
    if let Some(d) = env_dir {
        cmd.env(OUTPUT_DIR_ENV, d);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn validate_echoes_normalized_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "backend = \"two_level_test\"\nsteps = 11\n");
    let out = crossinfo(&["validate", "--config", &cfg], None);
    assert!(out.status.success());
    let echo: toml::Table = String::from_utf8(out.stdout).unwrap().parse().unwrap();
    assert_eq!(echo["steps"].as_integer(), Some(11));
    assert_eq!(echo["g"].as_float(), Some(0.01));
}

#[test]
fn config_errors_exit_2_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "backend = \"ising\"\nsteps = 1\n");
    let out = crossinfo(&["run", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("steps"));

    let cfg = write_config(dir.path(), "backend = \"quadrupole\"\nstop = 0.5\n");
    let out = crossinfo(&["validate", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("deformation"));
}

#[test]
fn missing_files_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.toml").display().to_string();
    assert_eq!(crossinfo(&["validate", "--config", &missing], None).status.code(), Some(4));
    let empty = dir.path().display().to_string();
    assert_eq!(crossinfo(&["report", &empty], None).status.code(), Some(4));
}

#[test]
fn output_dir_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let (from_file, from_env, from_flag) = (dir.path().join("file"), dir.path().join("env"), dir.path().join("flag"));
    let text = format!(
        "backend = \"two_level_test\"\nsteps = 21\nrefine_levels = 10\noutput_dir = {}\n",
        toml::Value::String(from_file.display().to_string())
    );
    let cfg = write_config(dir.path(), &text);

    assert!(crossinfo(&["run", "--config", &cfg], Some(&from_env)).status.success());
    assert!(from_env.join("manifest.json").exists() && !from_file.exists());

    let flag = from_flag.display().to_string();
    let out = crossinfo(&["run", "--config", &cfg, "--output-dir", &flag, "--set", "steps=31"], Some(&from_env));
    assert!(out.status.success());
    let spectrum = fs::read_to_string(from_flag.join("spectrum.csv")).unwrap();
    assert_eq!(spectrum.lines().count(), 1 + 2 * 31);

    assert!(crossinfo(&["run", "--config", &cfg], None).status.success());
    assert!(from_file.join("crossings.csv").exists());

    let report = crossinfo(&["report", &flag], None);
    assert!(report.status.success());
}
