use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn eegflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eegflow"))
        .args(args)
        .env_remove("EEGFLOW_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_spec(dir: &Path, json: &str) -> PathBuf {
    let p = dir.join("spec.json");
    fs::write(&p, json).unwrap();
    p
}

fn small_dataset(dir: &Path) -> PathBuf {
    let spec = write_spec(dir, r#"{"n_subjects": 1, "seed": 2}"#);
    let data = dir.join("data");
    let o = eegflow(&["synth", "--spec", s(&spec), "--out", s(&data)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    data
}

#[test]
fn synth_single_type1_trial() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), r#"{"n_subjects": 1, "model_types": [1]}"#);
    let out = dir.path().join("data");
    let o = eegflow(&["synth", "--spec", s(&spec), "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("wrote 1 trials"));
    let csvs: Vec<_> = fs::read_dir(&out)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "csv"))
        .collect();
    assert_eq!(csvs.len(), 1);
    assert!(out.join("artifacts.json").is_file());

    let feats = dir.path().join("features");
    let o = eegflow(&["extract", "--dataset", s(&out), "--out", s(&feats)]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("40 rows x 53 columns"));
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(code(&eegflow(&["synth", "--spec", s(&missing), "--out", s(dir.path())])), 1);
    assert_eq!(code(&eegflow(&["synth"])), 1);
    assert_eq!(code(&eegflow(&["frobnicate"])), 1);
    assert_eq!(code(&eegflow(&["run", "--dataset", s(dir.path()), "--out", "x", "--seed", "minus-one"])), 1);
    let o = Command::new(env!("CARGO_BIN_EXE_eegflow"))
        .args(["synth", "--out", s(&dir.path().join("d"))])
        .env("EEGFLOW_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    assert_eq!(code(&eegflow(&["--help"])), 0);
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let o = eegflow(&["extract", "--dataset", s(&empty), "--out", s(&dir.path().join("f"))]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));

    let bad = write_spec(dir.path(), r#"{"n_subjects": 0}"#);
    assert_eq!(code(&eegflow(&["synth", "--spec", s(&bad), "--out", s(&dir.path().join("d"))])), 2);
    let typo = write_spec(dir.path(), r#"{"n_subject": 2}"#);
    assert_eq!(code(&eegflow(&["synth", "--spec", s(&typo), "--out", s(&dir.path().join("d"))])), 2);

    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"split_fraction": 1.5}"#).unwrap();
    let data = small_dataset(dir.path());
    let o = eegflow(&["run", "--dataset", s(&data), "--config", s(&cfg), "--out", s(&dir.path().join("r"))]);
    assert_eq!(code(&o), 2);
}

fn manifest_paths(run: &Path) -> Vec<PathBuf> {
    let m: serde_json::Value = serde_json::from_slice(&fs::read(run.join("manifest.json")).unwrap()).unwrap();
    m["artifacts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| PathBuf::from(a["path"].as_str().unwrap()))
        .collect()
}

#[test]
fn run_writes_manifest_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_dataset(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = Command::new(env!("CARGO_BIN_EXE_eegflow"))
            .args(["run", "--dataset", s(&data), "--seed", "5", "--out", s(out)])
            .env("EEGFLOW_THREADS", if out == &a { "1" } else { "3" })
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stdout).contains("gbt"));
    }
    let paths = manifest_paths(&a);
    assert!(paths.len() >= 5);
    assert!(paths.iter().all(|p| p.is_file()));
    for rel in [
        "config.json",
        "features/features.csv",
        "features/epochs.json",
        "selection/selection.json",
        "selection/top10.csv",
        "selection/fused.csv",
        "eval/accuracy.csv",
        "eval/confusion/gbt_selected.csv",
        "eval/models/gbt_all.json",
    ] {
        assert_eq!(fs::read(a.join(rel)).unwrap(), fs::read(b.join(rel)).unwrap(), "{rel}");
    }
}

#[test]
fn staged_commands_chain() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_dataset(dir.path());
    let feats = dir.path().join("features");
    let sel = dir.path().join("selection");
    let eval = dir.path().join("eval");
    assert_eq!(code(&eegflow(&["extract", "--dataset", s(&data), "--out", s(&feats)])), 0);
    let features = feats.join("features.csv");
    let o = eegflow(&["select", "--features", s(&features), "--selected-k", "8", "--out", s(&sel)]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("fused (8)"));
    let fused = fs::read_to_string(sel.join("fused.csv")).unwrap();
    assert_eq!(fused.lines().count(), 9);
    let o = eegflow(&[
        "eval",
        "--features",
        s(&features),
        "--selection",
        s(&sel.join("selection.json")),
        "--out",
        s(&eval),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8_lossy(&o.stdout).to_string();
    assert!(table.contains("selected = 8 features"), "{table}");
    assert_eq!(fs::read_to_string(eval.join("table4.csv")).unwrap().lines().count(), 7);

    // selection computed on other columns is rejected
    let pc = dir.path().join("pc");
    assert_eq!(code(&eegflow(&["extract", "--dataset", s(&data), "--per-channel", "--out", s(&pc)])), 0);
    let o = eegflow(&[
        "eval",
        "--features",
        s(&pc.join("features.csv")),
        "--selection",
        s(&sel.join("selection.json")),
        "--out",
        s(&dir.path().join("e2")),
    ]);
    assert_eq!(code(&o), 2);
}
