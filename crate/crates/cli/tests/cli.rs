use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn percolab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_percolab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .current_dir(workspace_root())
        .output()
        .expect("binary runs")
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// File name to contents; the manifest loses its wall-time field.
fn snapshot(dir: &Path) -> BTreeMap<String, String> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let mut text = std::fs::read_to_string(&path).unwrap();
        if name == "manifest.json" {
            let mut m: serde_json::Value = serde_json::from_str(&text).unwrap();
            m.as_object_mut().unwrap().remove("wall_time_secs");
            text = m.to_string();
        }
        files.insert(name, text);
    }
    files
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().last().expect("stderr is not empty");
    serde_json::from_str(line).expect("last stderr line is JSON")
}

const RUNS: &[&[&str]] = &[
    &["generate", "--model", "swg", "--n", "500", "--c", "1.5"],
    &["generate", "--model", "regular", "--n", "200", "--d", "3"],
    &["percolate", "--n", "500", "--p", "0.6"],
    &["components", "--model", "matching", "--n", "1000", "--p", "0.7"],
    &["visit", "--n", "5000", "--p", "0.7", "--algorithm", "parallel", "--initiators", "0,2500"],
    &["visit", "--n", "5000", "--p", "0.7", "--algorithm", "search-erdos"],
    &["visit", "--model", "matching", "--n", "5000", "--p", "0.8", "--algorithm", "search-matching"],
    &["visit", "--n", "2000", "--p", "0.5", "--algorithm", "bfs-cluster", "--initiators", "7"],
    &["epidemic", "--n", "2000", "--p", "0.5", "--incubation", "geometric:0.5", "--trials", "20"],
    &["gw", "--law", "compound-zeta:1000:0.3:1", "--trials", "200", "--b0", "3"],
    &["threshold", "--n", "2000", "--trials", "5", "--tol", "0.05"],
    &["scaling", "--p", "0.3", "--n-list", "1000,2000", "--trials", "4"],
    &["equivalence", "--graph", "fixtures/six.edges", "--p", "0.4", "--trials", "2000"],
];

#[test]
fn same_seed_gives_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    for (i, args) in RUNS.iter().enumerate() {
        let a = tmp.path().join(format!("{i}a"));
        let b = tmp.path().join(format!("{i}b"));
        let mut with_seed = args.to_vec();
        with_seed.extend(["--seed", "11"]);
        let oa = percolab(&a, &with_seed);
        assert!(oa.status.success(), "{args:?}: {}", String::from_utf8_lossy(&oa.stderr));
        // thread count must not leak into the numbers
        let mut one_job = with_seed.clone();
        one_job.extend(["--jobs", "1"]);
        assert!(percolab(&b, &one_job).status.success());
        assert_eq!(snapshot(&a), snapshot(&b), "{args:?}");
    }
}

#[test]
fn csv_files_carry_header_and_seed_line() {
    let tmp = tempfile::tempdir().unwrap();
    for (i, args) in RUNS.iter().enumerate() {
        let dir = tmp.path().join(i.to_string());
        let mut with_seed = args.to_vec();
        with_seed.extend(["--seed", "5"]);
        assert!(percolab(&dir, &with_seed).status.success());
        for (name, text) in snapshot(&dir) {
            if name.ends_with(".csv") {
                let first = text.lines().next().unwrap();
                assert!(!first.starts_with('#') && first.contains(','), "{name}: {first}");
                assert_eq!(text.lines().last().unwrap(), "# seed=5", "{name}");
            }
        }
        let m = manifest(&dir);
        assert_eq!(m["seed"], 5);
        assert!(m["git_describe"].is_string());
        assert!(m["wall_time_secs"].is_f64());
    }
}

#[test]
fn manifest_replays_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    // no --seed: the entropy seed must land in the manifest
    let o = percolab(&first, &["epidemic", "--n", "3000", "--p", "0.6", "--k-attempts", "2", "--trials", "5"]);
    assert!(o.status.success());
    let config = first.join("manifest.json");
    let second = tmp.path().join("second");
    let o = percolab(&second, &["epidemic", "--config", config.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(snapshot(&first), snapshot(&second));
}

#[test]
fn flags_override_the_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("sweep.json");
    std::fs::write(&config, r#"{"n": 600, "c": 2.0, "seed": 3, "model": "swg"}"#).unwrap();
    let dir = tmp.path().join("run");
    let o = percolab(&dir, &["generate", "--config", config.to_str().unwrap(), "--n", "800"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&dir);
    assert_eq!(m["params"]["n"], 800);
    assert_eq!(m["params"]["c"], 2.0);
    assert_eq!(m["seed"], 3);
}

#[test]
fn parameter_errors_exit_2_with_json() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["generate", "--model", "matching", "--n", "7"],
        &["percolate", "--n", "100", "--p", "1.5"],
        &["visit", "--model", "regular", "--n", "100"],
        &["visit", "--n", "100", "--initiators", "100"],
        &["epidemic", "--n", "100", "--incubation", "weekly"],
        &["gw", "--law", "poisson:2"],
        &["threshold", "--n", "500"],
        &["scaling", "--n-list", "2000,1000"],
        &["generate", "--n", "100", "--jobs", "0"],
        &["teleport"],
        &["gw", "--b0", "many"],
    ];
    for args in cases {
        let o = percolab(tmp.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = stderr_json(&o);
        assert_eq!(err["exit_code"], 2);
        assert!(err["message"].as_str().is_some_and(|m| !m.is_empty()));
    }
    let missing = tmp.path().join("nope.json");
    let o = percolab(tmp.path(), &["gw", "--config", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "config");
}

#[test]
fn ambiguous_threshold_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    // a classifier that never commits leaves every probe ambiguous
    let o = percolab(
        tmp.path(),
        &["threshold", "--n", "2000", "--trials", "3", "--theta", "0.99", "--beta", "0.01", "--seed", "1"],
    );
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "ambiguous");
    let bracket = std::fs::read_to_string(tmp.path().join("bracket.csv")).unwrap();
    assert!(bracket.lines().nth(1).unwrap().contains(",true,"));
    assert_eq!(manifest(tmp.path())["summary"]["ambiguous"], true);
}

#[test]
fn help_and_version_succeed() {
    let tmp = tempfile::tempdir().unwrap();
    for flag in ["--help", "--version"] {
        let o = percolab(tmp.path(), &[flag]);
        assert!(o.status.success());
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn threshold_example_brackets_the_closed_form() {
    let tmp = tempfile::tempdir().unwrap();
    let o = percolab(
        tmp.path(),
        &["threshold", "--model", "swg", "--c", "1", "--n", "200000", "--tol", "0.02", "--seed", "7"],
    );
    assert!(o.status.success());
    let text = std::fs::read_to_string(tmp.path().join("bracket.csv")).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let (lo, hi): (f64, f64) = (row[0].parse().unwrap(), row[1].parse().unwrap());
    let target = 2f64.sqrt() - 1.0;
    assert!(lo <= target && target <= hi && hi - lo <= 0.04, "[{lo}, {hi}]");
}

#[test]
fn equivalence_example_is_within_tolerance() {
    let tmp = tempfile::tempdir().unwrap();
    let o = percolab(
        tmp.path(),
        &["equivalence", "--graph", "fixtures/six.edges", "--p", "0.5", "--trials", "100000", "--seed", "2"],
    );
    assert!(o.status.success());
    let m = manifest(tmp.path());
    assert_eq!(m["summary"]["exact_enumeration"], true);
    assert!(m["summary"]["max_tv_rf_exact"].as_f64().unwrap() <= 0.01);
    let report = std::fs::read_to_string(tmp.path().join("equivalence.csv")).unwrap();
    assert!(report.starts_with("statistic,tv_rf_percolation,tv_rf_exact\nfinal_size,"));
    assert!(report.contains("\nlevel_1,"));

    // three attempts at 0.2 against single shots at 0.488
    let k = tmp.path().join("k");
    let o = percolab(
        &k,
        &["equivalence", "--graph", "fixtures/six.edges", "--p", "0.2", "--k-attempts", "3", "--trials", "100000"],
    );
    assert!(o.status.success());
    assert!(manifest(&k)["summary"]["max_tv_rf_exact"].as_f64().unwrap() <= 0.01);
}
