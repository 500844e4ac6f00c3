use std::path::PathBuf;
use std::process::{Command, Output};

use pargrowth_cli::config::ExperimentConfig;
use pargrowth_cli::record::RunRecord;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pargrowth"));
    c.env_remove("PARGROWTH_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn summary(o: &Output) -> Value {
    json_lines(o).pop().unwrap()["summary"].clone()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pargrowth-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn group_stats_sl2_f5() {
    let o = run(&["group-stats", "-n", "2", "-p", "5", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&o);
    let cells: Vec<u64> = lines[..2].iter().map(|v| v["size"].as_u64().unwrap()).collect();
    assert_eq!(cells, vec![20, 100]);
    let s = &lines[2]["summary"];
    assert_eq!(s["order"], 120);
    assert_eq!(s["borel"], 20);
}

#[test]
fn group_stats_sl3_f2() {
    let o = run(&["group-stats", "-n", "3", "-p", "2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(summary(&o)["order"], 168);
}

#[test]
fn composite_modulus_is_a_usage_error() {
    let o = run(&["group-stats", "-n", "2", "-p", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("modulus must be prime"), "{}", stderr(&o));
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(run(&["group-stats", "-p"]).status.code(), Some(2));
    assert_eq!(run(&["zaremba", "--alphabet", "0,1"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["group-stats", "-p", "5", "--json", "--csv"]).status.code(), Some(2));
}

#[test]
fn bruhat_round_trip() {
    let o = run(&["bruhat", "-n", "3", "-p", "2", "--inclusion", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&o);
    let sizes: Vec<u64> = lines[..6].iter().map(|v| v["size"].as_u64().unwrap()).collect();
    assert_eq!(sizes, vec![8, 16, 16, 32, 32, 64]);
    assert_eq!(lines[6]["summary"]["failures"], 0);
}

#[test]
fn growth_random_sets() {
    let o = run(&["growth-verify", "-p", "7", "--trials", "30", "--seed", "3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&o);
    assert_eq!(lines.len(), 31);
    assert!(lines[..30].iter().all(|v| v["holds"] == true));
    assert_eq!(lines[30]["summary"]["held"], 30);
}

#[test]
fn growth_tightness_fixture() {
    let o = run(&["growth-verify", "-p", "7", "--tightness", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let s = summary(&o);
    assert_eq!(s["ap_equals_a"], true);
    assert_eq!(s["pa_equals_a"], true);
    assert_eq!(s["size_a"], s["p_times_one_plus_q"]);
    assert_eq!(s["size_a"], 42 * 8);
}

#[test]
fn growth_against_a_parabolic_of_sl3() {
    let o = run(&["growth", "-n", "3", "-p", "3", "--parabolic", "1", "--trials", "10", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(summary(&o)["held"], 10);
}

#[test]
fn qr_example_needs_three_products() {
    let o = run(&["growth-verify", "--qr-example", "-p", "7", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let first = summary(&o)["first"].as_u64().unwrap();
    assert!(first >= 3);
}

#[test]
fn fourier_checks() {
    let o = run(&["fourier", "-p", "7", "--check", "wiener", "--trials", "100", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(summary(&o)["passes"], 100);
    let o = run(&["fourier-check", "-p", "13", "--check", "parseval"]);
    assert_eq!(o.status.code(), Some(0));
    for check in ["inverse", "conv", "bound", "cor32"] {
        let o = run(&["fourier-check", "-p", "11", "--check", check, "--trials", "20", "--json"]);
        assert_eq!(o.status.code(), Some(0), "{check}");
        assert_eq!(summary(&o)["passes"], 20, "{check}");
    }
}

#[test]
fn fourier_rejects_even_p() {
    for p in ["2", "8"] {
        assert_eq!(run(&["fourier", "-p", p, "--check", "parseval"]).status.code(), Some(2), "p = {p}");
    }
}

#[test]
fn zaremba_single_prime() {
    let o = run(&["zaremba", "-p", "7", "--alphabet", "1,2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&o);
    assert_eq!(lines[0]["a"], 5);
    assert_eq!(lines[0]["q"], 7);
    assert_eq!(lines[0]["digits"], serde_json::json!([1, 2, 2]));
}

#[test]
fn zaremba_empty_range_is_silent() {
    let o = run(&["zaremba", "--p-min", "24", "--p-max", "28", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn zaremba_range_and_csv() {
    let o = run(&["zaremba", "--p-max", "200", "--alphabet", "1..5", "--csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rows = text.lines();
    assert_eq!(rows.next().unwrap(), "p,q,a,digits,multiple_index,exponent");
    assert_eq!(rows.count(), 46);
    // the summary goes to stderr in CSV mode
    let s: Value = serde_json::from_str(stderr(&o).lines().next().unwrap()).unwrap();
    assert_eq!(s["max_exponent"], 1.0);
}

#[test]
fn zaremba_miss_exits_1() {
    let o = run(&["zaremba", "-p", "5", "--alphabet", "1", "--limit", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("p = 5"));
}

#[test]
fn zaremba_strategies_agree() {
    let a = run(&["zaremba", "--p-max", "150", "--alphabet", "2,3", "--json"]);
    let b = run(&["zaremba", "--p-max", "150", "--alphabet", "2,3", "--strategy", "scan", "--json"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn dimension_slopes() {
    let o = run(&["dimension", "--alphabet", "1,2", "--Q", "100,1000,10000", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let s2 = summary(&o)["slope"].as_f64().unwrap();
    let o = run(&["dimension", "--alphabet", "1..3", "--Q", "100,1000,10000", "--json"]);
    let s3 = summary(&o)["slope"].as_f64().unwrap();
    assert!(s2 < s3);
}

#[test]
fn dimension_single_q() {
    let o = run(&["dimension", "--Q", "100"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("need ≥ 2 points"));
}

#[test]
fn cf_expand_examples() {
    let o = run(&["cf-expand", "2", "7", "--json"]);
    assert_eq!(summary(&o)["digits"], serde_json::json!([3, 2]));
    let o = run(&["cf-expand", "--digits", "1,2", "--json"]);
    let s = summary(&o);
    assert_eq!(s["continuant"], serde_json::json!(["1", "2", "1", "3"]));
    assert_eq!(s["det"], "1");
    let o = run(&["cf-expand", "5", "7", "--alphabet", "1,2", "--json"]);
    assert_eq!(summary(&o)["in_alphabet"], true);
    assert_eq!(run(&["cf-expand", "1", "0"]).status.code(), Some(2));
}

#[test]
fn modular_set_statistics() {
    let o = run(&["modular-set", "-p", "101", "--sigma", "--lambda", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = summary(&o);
    assert_eq!(s["size"], s["even_strings"]);
    assert_eq!(s["sigma"]["bound_cosets"], true);
    assert_eq!(s["lambda"]["energies"][0]["energy_exact"], true);
    let o = run(&["modular-set", "-p", "13", "--parity", "both", "--list", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(run(&["modular-set", "-p", "13", "--parity", "odd", "--sigma"]).status.code(), Some(2));
}

#[test]
fn shipped_config_is_the_acceptance_suite() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/suite.json");
    let cfg = ExperimentConfig::load(path.as_ref()).unwrap();
    assert_eq!(cfg, ExperimentConfig::acceptance(0));
}

#[test]
fn malformed_configs_exit_2() {
    let dir = scratch("bad");
    let cases = [
        ("syntax.json", "{\"version\": 1,\n  \"name\": \"x\",\n  \"checks\": [\n", "line"),
        ("unknown.json", r#"{"version": 1, "name": "x", "checks": [], "colour": "red"}"#, "colour"),
        ("param.json", r#"{"version": 1, "name": "x", "checks": [{"check": "dimension", "alphabat": [1]}]}"#, "alphabat"),
        ("version.json", r#"{"version": 9, "name": "x", "checks": [{"check": "borel-classes"}]}"#, "version"),
    ];
    for (file, text, needle) in cases {
        let path = dir.join(file);
        std::fs::write(&path, text).unwrap();
        let o = run(&["experiment", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{file}");
        assert!(stderr(&o).contains(needle), "{file}: {}", stderr(&o));
    }
    assert_eq!(run(&["experiment", dir.join("missing.json").to_str().unwrap()]).status.code(), Some(2));
}

const SMALL: &str = r#"{
  "version": 1,
  "name": "small",
  "seed": 11,
  "checks": [
    {"check": "growth", "primes": [7], "trials": 40, "fixtures": 10},
    {"check": "fourier", "primes": [5, 7], "trials": 10, "cor32_trials": 30},
    {"check": "borel-classes"},
    {"check": "zaremba", "runs": [{"alphabet": [1, 2], "p_max": 100, "max_exponent": 2}]}
  ]
}"#;

#[test]
fn experiment_is_deterministic_across_jobs() {
    let dir = scratch("det");
    let cfg = dir.join("small.json");
    std::fs::write(&cfg, SMALL).unwrap();
    let mut payloads = Vec::new();
    for jobs in ["1", "3"] {
        let rec = dir.join(format!("rec-{jobs}.json"));
        let o = run(&["experiment", cfg.to_str().unwrap(), "--jobs", jobs, "--out", rec.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let r = RunRecord::from_json(&std::fs::read_to_string(&rec).unwrap()).unwrap();
        assert_eq!((r.passed, r.failed), (4, 0));
        payloads.push(r.payload());
    }
    assert_eq!(payloads[0], payloads[1]);
}

#[test]
fn experiment_json_lines_and_out_dir() {
    let dir = scratch("outdir");
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, SMALL).unwrap();
    let o = bin()
        .args(["experiment", cfg.to_str().unwrap(), "--json"])
        .env("PARGROWTH_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&o);
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[4]["summary"]["passed"], 4);
    let r = RunRecord::from_json(&std::fs::read_to_string(dir.join("small.json")).unwrap()).unwrap();
    assert_eq!(r.results.len(), 4);
}

#[test]
fn failing_experiment_exits_1_with_witness() {
    let dir = scratch("fail");
    let cfg = dir.join("fail.json");
    // a window that excludes the true slope
    let text = r#"{"version": 1, "name": "fail", "checks": [
        {"check": "dimension", "qs": [100, 1000], "lo": 1.5, "hi": 1.6}]}"#;
    std::fs::write(&cfg, text).unwrap();
    let rec = dir.join("rec.json");
    let o = run(&["experiment", cfg.to_str().unwrap(), "--out", rec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("slope"), "{}", stderr(&o));
    let r = RunRecord::from_json(&std::fs::read_to_string(&rec).unwrap()).unwrap();
    assert_eq!(r.failed, 1);
}

#[test]
fn out_flag_writes_file() {
    let dir = scratch("out");
    let path = dir.join("stats.csv");
    let o = run(&["group-stats", "-p", "7", "--csv", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("w,length,size,expected"));
}

#[test]
fn same_seed_same_output() {
    let a = run(&["fourier", "-p", "11", "--check", "bound", "--trials", "25", "--seed", "5", "--json"]);
    let b = run(&["fourier", "-p", "11", "--check", "bound", "--trials", "25", "--seed", "5", "--json", "--jobs", "2"]);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["fourier", "-p", "11", "--check", "bound", "--trials", "25", "--seed", "6", "--json"]);
    assert_ne!(a.stdout, c.stdout);
}
