use std::path::Path;
use std::process::{Command, Output};

use asgap::pipeline::verify::smoke_config;

fn asgap(config: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asgap"))
        .arg("--config")
        .arg(config)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn smoke(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("smoke.toml");
    std::fs::write(&path, smoke_config(dir.join("out"), 1).to_toml()).unwrap();
    path
}

#[test]
fn help_and_bad_arguments() {
    let missing = Path::new("/nonexistent/asgap.toml");
    assert_eq!(code(&asgap(missing, &["--help"])), 0);
    assert_eq!(code(&asgap(missing, &["--version"])), 0);
    assert_eq!(code(&asgap(missing, &["frobnicate"])), 1);
    let o = asgap(missing, &["generate"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not found"));
}

#[test]
fn default_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = asgap(Path::new("unused.toml"), &["default-config"]);
    assert_eq!(code(&o), 0);
    let path = dir.path().join("asgap.toml");
    std::fs::write(&path, &o.stdout).unwrap();
    asgap::pipeline::ExperimentConfig::load(&path).unwrap();

    std::fs::write(&path, "[suite]\nbogus = 1\n").unwrap();
    assert_eq!(code(&asgap(&path, &["generate"])), 1);
}

#[test]
fn stages_cache_refuse_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let config = smoke(dir.path());

    // Out of order: features before its inputs exist.
    assert_eq!(code(&asgap(&config, &["features"])), 1);

    let o = asgap(&config, &["run"]);
    assert_eq!(code(&o), 1, "run needs sample first");
    for stage in ["generate", "sample", "run", "features"] {
        let o = asgap(&config, &[stage]);
        assert_eq!(code(&o), 0, "{stage}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = asgap(&config, &["generate"]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "generate: up to date");

    // A different suite over the same output directory is refused...
    let text = std::fs::read_to_string(&config).unwrap();
    let changed = dir.path().join("changed.toml");
    std::fs::write(&changed, text.replace("instances = [1, 2]", "instances = [1, 3]")).unwrap();
    assert_ne!(std::fs::read_to_string(&changed).unwrap(), text);
    assert_eq!(code(&asgap(&changed, &["generate"])), 2);

    // ...and a corrupted artifact fails verification.
    let csv = dir.path().join("out/features/ela.csv");
    let mut body = std::fs::read_to_string(&csv).unwrap();
    body.push_str("tampered\n");
    std::fs::write(&csv, body).unwrap();
    let o = asgap(&config, &["verify", "--replay-workers", "2"]);
    assert_eq!(code(&o), 3);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("FAIL") && l.contains("features")), "{stdout}");
    assert!(stdout.lines().any(|l| l.starts_with("PASS")), "{stdout}");
}
