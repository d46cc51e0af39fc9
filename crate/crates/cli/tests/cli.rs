use std::path::Path;
use std::process::{Command, Output};

fn segmint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_segmint")).args(args).output().unwrap()
}

fn ok(args: &[&str]) {
    let out = segmint(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn generate(dir: &Path) -> String {
    let gen = dir.join("gen");
    ok(&["generate", "--seed", "5", "--out", gen.to_str().unwrap()]);
    gen.join("data.csv").to_string_lossy().into_owned()
}

fn small_pipeline(data: &str, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["pipeline", "--input", data, "--k-max", "5", "--restarts", "5", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    segmint(&args)
}

#[test]
fn pipeline_writes_expected_artifacts_and_leaves_input_alone() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path());
    let before = std::fs::read(&data).unwrap();
    let out = dir.path().join("run");
    let res = small_pipeline(&data, &out, &[]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    for f in [
        "manifest.json",
        "run_config.json",
        "preprocess_log.json",
        "sweep_kmeans.json",
        "sweep_clara.json",
        "scores.csv",
        "selection.json",
        "profiles.json",
        "groups.json",
        "ranking.csv",
        "notes.json",
        "boxplots_kmeans.svg",
        "biplot_clara.svg",
        "assignments/kmeans_k02.csv",
    ] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    assert_eq!(std::fs::read(&data).unwrap(), before);
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().contains(".tmp-"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path());
    let out = dir.path().join("run");
    assert!(small_pipeline(&data, &out, &["--seed", "3"]).status.success());
    let first = std::fs::read(out.join("manifest.json")).unwrap();
    assert!(small_pipeline(&data, &out, &["--seed", "3"]).status.success());
    assert_eq!(std::fs::read(out.join("manifest.json")).unwrap(), first);
}

#[test]
fn missing_ratings_file_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path());
    let res = small_pipeline(&data, &dir.path().join("run"), &["--ratings", "/nonexistent/ratings.csv"]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("/nonexistent/ratings.csv"));
    assert!(!dir.path().join("run").exists());
}

#[test]
fn missing_input_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let res = segmint(&["sweep", "--out", dir.path().join("x").to_str().unwrap()]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("input"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path());
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, format!(r#"{{"input": "{data}", "seed": 1, "tau": 0.9}}"#)).unwrap();
    let out = dir.path().join("run");
    ok(&["preprocess", "--config", cfg.to_str().unwrap(), "--seed", "42", "--out", out.to_str().unwrap()]);
    let resolved: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("run_config.json")).unwrap()).unwrap();
    assert_eq!(resolved["seed"], 42);
    assert_eq!(resolved["tau"], 0.9);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"seeed": 1}"#).unwrap();
    let res = segmint(&["generate", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("g").to_str().unwrap()]);
    assert!(!res.status.success());
}
