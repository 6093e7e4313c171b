use std::process::Command;

fn zeno() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_zeno"));
    c.env_remove("ZENO_OUT_DIR");
    c
}

#[test]
fn lists_presets() {
    let out = zeno().arg("presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 8);
    assert!(text.contains("fig2"));
}

#[test]
fn unknown_preset_suggests_and_exits_one() {
    let out = zeno().args(["preset", "fig7"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("did you mean"), "{err}");
}

#[test]
fn malformed_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[run]\nexperiment = \"m_sweep\"\nm_values = [10]\n").unwrap();
    let out = zeno().arg("run").arg(&path).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn preset_writes_into_env_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = zeno()
        .args(["preset", "fig2", "--workers", "2"])
        .env("ZENO_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("fig2.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# zeno 0.1.0 seed=1 preset=fig2"));
    assert_eq!(lines.next(), Some("realization_index,log_P,log_P_star"));
    assert_eq!(lines.count(), 100);
    assert!(dir.path().join("fig2.svg").exists());
}

#[test]
fn rate_subcommand_writes_both_tables() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rate.toml");
    std::fs::write(
        &path,
        r#"
[distribution]
kind = "discrete"
values = ["1 ns", "3 ns"]
probs = [0.5, 0.5]

[run]
experiment = "rate"
m = 20
realizations = 2000
seed = 9
bins = 21

[output]
csv = "rate.csv"
"#,
    )
    .unwrap();
    let out = zeno()
        .arg("rate")
        .arg(&path)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("rate.csv")).unwrap();
    assert!(csv.starts_with("# zeno 0.1.0 seed=9"));
    assert!(dir.path().join("rate_empirical.csv").exists());
}
