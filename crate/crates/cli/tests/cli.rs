use std::process::{Command, Output};

use serde_json::Value;

fn tamellc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tamellc"))
        .args(args)
        .env_remove("TAMELLC_BUDGET")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn enumerate_counts() {
    let v = json(&tamellc(&["-p", "5", "-l", "2", "-N", "1", "enumerate-pairs"]));
    assert_eq!(v.as_array().unwrap().len(), 20);
    let v = json(&tamellc(&["-p", "5", "-l", "2", "-N", "1", "enumerate-pairs", "--orbits"]));
    assert_eq!(v.as_array().unwrap().len(), 10);
}

#[test]
fn induce_places_varpi_in_the_corner() {
    let v = json(&tamellc(&["-p", "3", "-l", "2", "induce", "--exponents", "1", "--varpi", "1/4"]));
    assert_eq!(v["trselp"]["frobenius_image"]["scalars"], serde_json::json!(["0/1", "1/4"]));
    assert_eq!(v["trselp"]["normal_form"], true);
}

#[test]
fn non_admissible_pair_is_rejected() {
    let out = tamellc(&["-p", "3", "-l", "2", "induce", "--exponents", "4"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not admissible"));
}

#[test]
fn chi_phi_negates_varpi_for_quadratic() {
    let v = json(&tamellc(&["-p", "3", "-l", "2", "chi-phi", "--exponents", "1", "--varpi", "1/4"]));
    assert_eq!(v["dbr"]["chi_phi"]["varpi_value"], "3/4");
    assert_eq!(v["agree"], true);
}

#[test]
fn conjugation_dump_and_unsupported_case() {
    let v = json(&tamellc(&["-p", "7", "-l", "3", "-k", "5", "conjugation"]));
    assert_eq!(v["weyl"], serde_json::json!([1, 2, 0]));
    assert_eq!(v["precision"], 5);
    let out = tamellc(&["-p", "5", "-l", "3", "conjugation"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported presentation"));
}

#[test]
fn dl_table_formats() {
    let v = json(&tamellc(&["-p", "3", "-l", "2", "dl-table"]));
    assert_eq!(v["group_order"], 48);
    assert_eq!(v["rows"].as_array().unwrap().len(), 6);
    let out = tamellc(&["-p", "3", "-l", "2", "dl-table", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 8);
    let v = json(&tamellc(&["-p", "7", "-l", "3", "dl-table"]));
    assert_eq!(v.as_array().unwrap().len(), (343 - 7) / 3);
    assert_eq!(v[0]["dim"], 6 * 48);
}

#[test]
fn verify_is_deterministic_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.kv");
    std::fs::write(&cfg, "# small run\np = 3\nell = 2\nN = 4\nchecks = conjugation, mackey\n").unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = tamellc(&["--config", cfg.to_str().unwrap(), "verify", "-o", path.to_str().unwrap()]);
        assert!(out.status.success());
    }
    // the output path is part of the echoed config, so compare the rest
    let load = |p: &std::path::Path| {
        let mut v: Value = serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap();
        v["config"]["output"] = Value::Null;
        v
    };
    assert_eq!(load(&a), load(&b));
    let ja = std::fs::read(&a).unwrap();
    let v: Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(v["summary"]["pairs"], 24);
    assert_eq!(v["summary"]["agree"], 24);
    assert_eq!(v["summary"]["packet_size"], 1);

    let out = tamellc(&["--config", cfg.to_str().unwrap(), "verify", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 25);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",agree")));
}

#[test]
fn budget_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_tamellc"))
        .args(["-p", "5", "-l", "2", "verify"])
        .env("TAMELLC_BUDGET", "10")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
    // a flag overrides the environment
    let out = Command::new(env!("CARGO_BIN_EXE_tamellc"))
        .args(["-p", "5", "-l", "2", "-N", "1", "--budget", "1000", "verify"])
        .env("TAMELLC_BUDGET", "10")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn factorization_demo() {
    let v = json(&tamellc(&["-p", "3", "-l", "2", "demo-factorization", "--exponents", "1", "--varpi", "1/4"]));
    assert_eq!(v["intermediates_differ"], true);
    assert_eq!(v["same_target"], true);
    assert_eq!(v["delta_chi_varpi"], "1/2");
    let v = json(&tamellc(&["-p", "7", "-l", "3", "demo-factorization"]));
    assert_eq!(v["intermediates_differ"], false);
    assert_eq!(v["same_target"], true);
}

#[test]
fn bad_config_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.kv");
    std::fs::write(&cfg, "colour = red\n").unwrap();
    let out = tamellc(&["--config", cfg.to_str().unwrap(), "verify"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown config key"));
}
