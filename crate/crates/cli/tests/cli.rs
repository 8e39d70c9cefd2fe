use std::path::Path;
use std::process::{Command, Output};

fn hereditary(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hereditary")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Column `name` of the first data row of a CSV document.
fn csv_field(text: &str, name: &str) -> String {
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let headers = rows.headers().unwrap().clone();
    let i = headers.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name} in {headers:?}"));
    rows.records().next().unwrap().unwrap()[i].to_string()
}

#[test]
fn metric_volume_is_one_half() {
    let out = hereditary(&["volume", "--property", "metric", "--n", "3", "--samples", "1000000", "--seed", "42"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let est: f64 = csv_field(&text, "estimate").parse().unwrap();
    let sigma = (0.25f64 / 1e6).sqrt();
    assert!((est - 0.5).abs() <= 3.0 * sigma, "{est}");
    assert_eq!(csv_field(&text, "seed"), "42");
    assert_eq!(csv_field(&text, "samples_or_k"), "1000000");
    assert_eq!(csv_field(&text, "version"), env!("CARGO_PKG_VERSION"));
}

#[test]
fn weighted_extremal_entropy() {
    let out = hereditary(&["extremal", "--property", "weighted", "--s", "3", "--r", "1.5", "--n", "3", "--grid-k", "6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ent: f64 = csv_field(&stdout(&out), "entropy_nats").parse().unwrap();
    assert!((ent - 3.0 * 2f64.ln()).abs() < 1e-12, "{ent}");
}

#[test]
fn starved_volume_exits_3() {
    let out = hereditary(&["volume", "--property", "lipschitz", "--c", "0.5", "--n", "12", "--samples", "1000"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_2() {
    let out = hereditary(&["volume", "--property", "metric", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let out = hereditary(&["teleport"]);
    assert_eq!(out.status.code(), Some(2));
    // a stochastic run without a seed
    let out = hereditary(&["volume", "--property", "metric", "--n", "3", "--samples", "1000"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scientific_counts_and_ratios() {
    let out = hereditary(&["volume", "--property", "lipschitz", "--c", "1/2", "--n", "1", "--samples", "2e5", "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(csv_field(&text, "samples_or_k"), "200000");
    let est: f64 = csv_field(&text, "estimate").parse().unwrap();
    assert!((est - 0.75).abs() <= 3.0 * (0.1875f64 / 2e5).sqrt());
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "trend.json",
        r#"{"command":"trend","property":{"kind":"lipschitz","c":0.5},"levels":"1..=3","samples":"1e5","seed":7}"#,
    );
    let mut outputs = Vec::new();
    for workers in ["1", "4", "16"] {
        let path = dir.path().join(format!("out{workers}.csv"));
        let out = hereditary(&["--config", &config, "--workers", workers, "--output", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert!(!outputs[0].is_empty());
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn batch_config_adds_run_ids() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "batch.json",
        r#"[
            {"command":"volume","run-id":"a","property":{"kind":"metric"},"n":3,"samples":10000,"seed":1},
            {"command":"volume","run-id":"b","property":{"kind":"metric"},"n":4,"samples":10000,"seed":2},
            {"command":"stanley-wilf","pattern":"132","levels":[4],"samples":"1e5","seed":3}
        ]"#,
    );
    let out = hereditary(&["--config", &config]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("run_id,"), "{text}");
    assert!(lines[1].starts_with("a,metric,3,"));
    assert!(lines[2].starts_with("b,metric,4,"));
    assert!(lines[3].starts_with("run_id,"), "header repeats when the schema changes");
    assert!(lines[4].starts_with("3,"), "unnamed runs are numbered");
}

#[test]
fn json_reports_embed_seed_samples_and_version() {
    let out = hereditary(&[
        "--format", "json", "stanley-wilf", "--pattern", "132", "--levels", "4,5", "--samples", "1e5", "--seed", "11",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    let run = &v["runs"][0];
    assert_eq!(run["config"]["seed"], 11);
    assert_eq!(run["config"]["samples"], 100_000);
    let rows = run["result"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["exact"], 14);
    assert_eq!(rows[1]["exact"], 42);
}

#[test]
fn graphon_and_container_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.json", r#"{"k":2,"m":1,"grid":[[[1,0]]]}"#);
    let u = write(dir.path(), "u.json", r#"{"k":2,"m":1,"grid":[[[0.5,0.5]]]}"#);
    let out = hereditary(&["graphon", "--op", "cut", "--graphon", &w, "--other", &u]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cut: f64 = csv_field(&stdout(&out), "value").parse().unwrap();
    // |1 - 1/2| + |0 - 1/2| over the whole square
    assert!((cut - 1.0).abs() < 1e-12, "{cut}");

    let out = hereditary(&[
        "containers",
        "--property-json",
        r#"{"kind":"forb","boxes":[{"n":1,"family":"hypercube-vertices","coords":[[["0","1/2"]],[["0","1/2"]]]}]}"#,
        "--source", "1", "--n", "3", "--grid-k", "2", "--epsilon", "0.2", "--seed", "5",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(csv_field(&text, "exhaustive_violations"), "0");
    assert_eq!(csv_field(&text, "badness_within"), "true");
}
