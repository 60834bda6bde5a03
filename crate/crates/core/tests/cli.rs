use std::path::Path;
use std::process::{Command, Output};

const TINY: &str = r#"
[experiment]
seed = 11
runs = 3
samples = 12
methods = ["rbm", "sa-chimera", "sqa-bipartite", "external-stacked", "dqn"]

[sa]
sweeps = 5
reads = 4
snapshot_interval = 4

[sqa]
sweeps = 5
reads = 4
snapshot_interval = 4

[external]
sweeps = 5
reads = 4
stacked = 6
snapshot_interval = 4

[heatmap]
betas = [1.0, 2.0]
gammas = [0.0, 0.5]
runs = 2
samples = 4
"#;

fn ferl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ferl")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn missing_config_names_the_path() {
    let out = ferl(&["curves", "--config", "/nonexistent/ferl.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/nonexistent/ferl.toml"), "{}", stderr(&out));
}

#[test]
fn unknown_flags_print_usage() {
    let out = ferl(&["curves", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).to_lowercase().contains("usage"));
}

#[test]
fn bad_config_values_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    for text in ["[agent]\nlearning_rate = -1.0\n", "[agent]\nno_such_key = 1\n", "[heatmap]\nbetas = []\n"] {
        let config = write_config(dir.path(), text);
        let out = ferl(&["heatmap", "--config", &config]);
        assert_eq!(out.status.code(), Some(1), "{text}: {}", stderr(&out));
    }
    let out = ferl(&["curves", "--jobs", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn runtime_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("pool.txt");
    let out = ferl(&[
        "sample",
        "--topology",
        "/nonexistent/net.txt",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn sample_writes_a_pool_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), TINY);
    let pool = dir.path().join("pool.txt");
    let pool_arg = pool.to_str().unwrap();
    let out = ferl(&["sample", "--config", &config, "--out", pool_arg, "--sampler", "sqa", "--state", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&pool).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert!(!rows.is_empty());
    for row in rows {
        let tokens: Vec<&str> = row.split(' ').collect();
        // sqa rows are whole effective configurations: 8 replicas of 16 spins
        assert_eq!(tokens.len(), 8 * 16);
        assert!(tokens.iter().all(|t| *t == "1" || *t == "-1"), "{row}");
    }
    let missing_out = ferl(&["sample", "--config", &config]);
    assert_eq!(missing_out.status.code(), Some(1));
}

#[test]
fn curves_are_identical_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), TINY);
    let run = |jobs: &str| {
        let path = dir.path().join(format!("curves-{jobs}.csv"));
        let out = ferl(&["curves", "--config", &config, "--jobs", jobs, "--out", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr(&out));
        std::fs::read(path).unwrap()
    };
    let one = run("1");
    assert_eq!(one, run("8"));
    let text = String::from_utf8(one).unwrap();
    assert_eq!(text.lines().next(), Some("method,sample,mean_fidelity,stderr"));
    assert_eq!(text.lines().count(), 1 + 5 * 12);

    // a different seed gives a different curve
    let out = ferl(&["curves", "--config", &config, "--seed", "12"]);
    assert!(out.status.success());
    assert_ne!(out.stdout, text.as_bytes());
}

#[test]
fn heatmap_emits_every_cell() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), TINY);
    let out = ferl(&["heatmap", "--config", &config, "--jobs", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("beta,gamma,avg_fidelity"));
    let cells: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(cells.len(), 4);
    for c in &cells {
        assert!((0.0..=1.0).contains(&c[2]));
    }
}

#[test]
fn oracle_check_passes_on_a_clean_checkout() {
    let out = ferl(&["oracle-check"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.lines().count() >= 6);
    assert!(report.lines().all(|l| l.starts_with("PASS ")));
}
