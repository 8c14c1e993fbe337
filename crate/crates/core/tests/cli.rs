use std::path::Path;
use std::process::{Command, Output};

use skqd::experiment::config_from_manifest;

const SMALL_SKQD: &str = r#"{"kind":"skqd","n":[4,5],"d":5,"shots":[20,200],"seeds":3,"seed":7}"#;

fn skqd(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_skqd"));
    cmd.args(args).env_remove("SKQD_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn skqd")
}

fn run_config(dir: &Path, text: &str, extra: &[&str], envs: &[(&str, &str)]) -> Output {
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, text).unwrap();
    let out = dir.join("out");
    let mut args = vec!["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    skqd(&args, envs)
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(name)).unwrap()
}

fn manifest(dir: &Path, kind: &str) -> serde_json::Value {
    serde_json::from_str(&read(dir, &format!("{kind}.manifest.json"))).unwrap()
}

/// CSV with the timing column blanked.
fn without_seconds(csv: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "seconds").unwrap();
    lines
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            f[col] = "";
            f.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn run_writes_table_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), SMALL_SKQD, &[], &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(dir.path(), "skqd.csv");
    assert!(csv.starts_with(
        "method,size,param,d,shots,seed,dim,energy,reference,abs_error,rel_error,seconds"
    ));
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 3);
    let m = manifest(dir.path(), "skqd");
    assert_eq!(m["kind"], "skqd");
    assert_eq!(m["rows"], 12);
    assert_eq!(m["config"]["seed"], 7);
    assert!(m["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn runs_are_deterministic_up_to_timing() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run_config(a.path(), SMALL_SKQD, &["--threads", "1"], &[])
        .status
        .success());
    assert!(run_config(b.path(), SMALL_SKQD, &["--threads", "3"], &[])
        .status
        .success());
    assert_eq!(
        without_seconds(&read(a.path(), "skqd.csv")),
        without_seconds(&read(b.path(), "skqd.csv"))
    );
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        r#"{"kind":"skqd","n":[4],"shotz":[10]}"#,
        &[],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
    let out = run_config(dir.path(), r#"{"kind":"nope"}"#, &[], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_count_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    assert!(
        run_config(dir.path(), SMALL_SKQD, &[], &[("SKQD_THREADS", "2")])
            .status
            .success()
    );
    assert_eq!(manifest(dir.path(), "skqd")["threads"], 2);
    // the flag wins over the variable
    assert!(run_config(
        dir.path(),
        SMALL_SKQD,
        &["--threads", "1"],
        &[("SKQD_THREADS", "2")]
    )
    .status
    .success());
    assert_eq!(manifest(dir.path(), "skqd")["threads"], 1);
    let out = run_config(dir.path(), SMALL_SKQD, &[], &[("SKQD_THREADS", "many")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_override_changes_samples_and_is_recorded() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run_config(a.path(), SMALL_SKQD, &[], &[]).status.success());
    assert!(
        run_config(b.path(), SMALL_SKQD, &["--seed-override", "99"], &[])
            .status
            .success()
    );
    let m = manifest(b.path(), "skqd");
    assert_eq!(m["seed_override"], 99);
    assert_eq!(m["config"]["seed"], 99);
    assert_ne!(
        without_seconds(&read(a.path(), "skqd.csv")),
        without_seconds(&read(b.path(), "skqd.csv"))
    );
}

#[test]
fn manifest_reproduces_the_run() {
    let a = tempfile::tempdir().unwrap();
    assert!(
        run_config(a.path(), SMALL_SKQD, &["--seed-override", "5"], &[])
            .status
            .success()
    );
    let text = read(a.path(), "skqd.manifest.json");
    let cfg = config_from_manifest(&text).unwrap();
    let b = tempfile::tempdir().unwrap();
    let regenerated = serde_json::to_string(&cfg).unwrap();
    assert!(run_config(b.path(), &regenerated, &[], &[])
        .status
        .success());
    assert_eq!(
        without_seconds(&read(a.path(), "skqd.csv")),
        without_seconds(&read(b.path(), "skqd.csv"))
    );
}

#[test]
fn siam_run_writes_correlations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"kind":"siam","bath_sites":7,"u":[2.0],"d":4,"shots":[300],"uniform_shots":100}"#;
    let out = run_config(dir.path(), cfg, &[], &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let corr = read(dir.path(), "siam.correlations.csv");
    assert!(corr.starts_with("u,shots,j,spin,density,spin_reference,density_reference"));
    let files = manifest(dir.path(), "siam")["files"].clone();
    assert!(files
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f == "siam.correlations.csv"));
}

#[test]
fn verify_bounds_small_grid_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = skqd(
        &[
            "verify-bounds",
            "--grid",
            "small",
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &[],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let m = manifest(dir.path(), "verify-bounds");
    assert_eq!(m["violations"], 0);
    let report: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "verify-bounds.report.json")).unwrap();
    assert_eq!(report["grid"], "small");
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg = skqd::experiment::ExperimentConfig::from_json(&text)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.validate().unwrap();
        seen += 1;
    }
    assert_eq!(seen, 6);
}
