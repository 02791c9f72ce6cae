use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wglab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wglab")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn rk_prints_240() {
    let o = wglab(&["local", "rk", "--k", "4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "240");
}

#[test]
fn bad_k_is_usage_error() {
    let o = wglab(&["local", "rk", "--k", "0"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("`k`"));
    assert_eq!(code(&wglab(&["local", "rk", "--k", "four"])), 2);
    assert_eq!(code(&wglab(&["local", "rk"])), 2);
    assert_eq!(code(&wglab(&["no-such-command"])), 2);
}

#[test]
fn exhaustive_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = wglab(&["waring-pair", "--q", "16", "--k", "2", "--s", "16", "--strategy", "exhaustive", "--out", out]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("verdict: pair"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("waring_pair.json")).unwrap()).unwrap();
    assert_eq!(report["result"]["verdict"], "pair");
}

#[test]
fn not_pair_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = wglab(&["waring-pair", "--q", "5", "--k", "2", "--s", "2", "--strategy", "exhaustive", "--out", out]);
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("waring_pair.json")).unwrap()).unwrap();
    assert_eq!(report["result"]["verdict"], "not-pair");
    assert_eq!(report["result"]["witness"]["subset"], serde_json::json!([1, 4]));
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn same_seed_same_bytes() {
    let runs: [&[&str]; 3] = [
        &["waring-pair", "--q", "81", "--k", "2", "--s", "16", "--strategy", "sampled", "--trials", "500"],
        &["arcs", "--w", "2", "--k", "2", "--n", "4096", "--samples", "50"],
        &["majorant", "--w", "2", "--k", "2", "--n", "4096", "--subset", "bernoulli:0.8"],
    ];
    for args in runs {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        for d in [&a, &b] {
            let mut full = args.to_vec();
            full.extend(["--seed", "7", "--out", d.path().to_str().unwrap()]);
            assert_eq!(code(&wglab(&full)), 0, "{args:?}");
        }
        let (fa, fb) = (read_all(a.path()), read_all(b.path()));
        assert!(fa.iter().any(|(n, _)| n.ends_with(".json")));
        assert_eq!(fa, fb, "{args:?}");
    }
}

#[test]
fn dry_run_computes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reports");
    let o = wglab(&["--dry-run", "coverage", "--k", "2", "--s", "5", "--lo", "5000", "--hi", "20000", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("\"work\""));
    assert!(!out.exists());
    let bad = wglab(&["--dry-run", "coverage", "--k", "2", "--s", "5", "--lo", "9", "--hi", "1"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("out");
    fs::write(&cfg, format!("# coverage probe\nk = 2\ns = 3\nlo = 5000\nhi = 20000\nout = {}\n", out.display())).unwrap();
    let o = wglab(&["coverage", "--config", cfg.to_str().unwrap(), "--s", "5"]);
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("coverage.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["s"], 5);
    assert_eq!(report["result"]["exceptions"], serde_json::json!([]));
    let csv = fs::read_to_string(out.join("coverage.csv")).unwrap();
    assert!(csv.starts_with("n,admissible,represented\n5000,"));
    assert!(!csv.contains('\r'));
    assert_eq!(fs::read_to_string(out.join("exceptions.txt")).unwrap(), "");

    fs::write(&cfg, "k = 2\ns = 3\nlo = 1\nhi = 10\nspeed = fast\n").unwrap();
    let o = wglab(&["coverage", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("speed"));
    fs::write(&cfg, "k 2\n").unwrap();
    assert_eq!(code(&wglab(&["coverage", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn csv_floats_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = wglab(&["restrict", "--w", "2", "--k", "2", "--n", "1024", "--b", "1", "--out", out]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("restrict.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let mantissa = row[4].split('e').next().unwrap();
    assert_eq!(mantissa.replace(['.', '-'], "").len(), 12, "{}", row[4]);

    let o = wglab(&["local", "lemma43", "--p", "3", "--k", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("\"count\":27"));
    assert_eq!(code(&wglab(&["majorant", "--w", "2", "--k", "2", "--n", "1024", "--b", "3", "--out", out])), 2);
}
