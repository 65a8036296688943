use std::process::{Command, Output};

use serde_json::Value;

fn firstgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_firstgap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn tail_csv_has_closed_form_row() {
    let out = firstgap(&["tail", "--family", "constant", "--mu", "1", "--ell", "1", "--horizon", "5", "--step", "1/64"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("t,P,neglogP\n"));
    let row = text.lines().find(|l| l.starts_with("5.0000000000000000e-1,")).unwrap();
    let p: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((p - (1.0 - 1.5 * (-1f64).exp())).abs() < 1e-9);
    assert_eq!(text.lines().count(), 1 + 5 * 64 + 1);
}

#[test]
fn classify_log_growth_is_positive_probability_infinite() {
    let out = firstgap(&["--output", "json", "classify", "--family", "loggrowth", "--b", "2", "--a", "1", "--ell", "1"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "PositiveProbabilityInfinite");
    assert!(v["evidence"].is_object());
}

#[test]
fn simulate_is_byte_identical() {
    let args = ["simulate", "--family", "constant", "--mu", "1", "--ell", "1", "--horizon", "6", "--paths", "5000", "--seed", "17"];
    let (a, b) = (firstgap(&args), firstgap(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = firstgap(&["simulate", "--family", "constant", "--mu", "1", "--ell", "1", "--horizon", "6", "--paths", "5000", "--seed", "18"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn json_config_round_trips_into_an_equivalent_command() {
    let flags = firstgap(&["--output", "json", "tail", "--family", "log_growth", "--a", "1", "--b", "0.5", "--ell", "1", "--horizon", "3", "--step", "1/32"]);
    assert!(flags.status.success());
    let doc: Value = serde_json::from_str(&stdout(&flags)).unwrap();
    let rate = doc["rate"].to_string();
    let replay = firstgap(&["--output", "json", "tail", "--rate", &rate, "--ell", "1", "--horizon", "3", "--step", "1/32"]);
    assert_eq!(flags.stdout, replay.stdout);
}

#[test]
fn restart_json_reports_verdict_and_tail() {
    let out = firstgap(&[
        "--output", "json", "restart", "--mu-star", "1", "--rate-family", "power_law", "--a", "1", "--b", "1",
        "--task-size", "1", "--t", "1.5,2,3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"]["verdict"], "AlmostSurelyFinite");
    let p: Vec<f64> = serde_json::from_value(v["P"].clone()).unwrap();
    assert!(p.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn discrete_csv_and_asympt_json() {
    let out = firstgap(&["discrete", "--family", "constant", "--p", "0.5", "--ell", "2", "--n-max", "10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("n,mass,tail\n"));
    assert_eq!(text.lines().count(), 11);

    let out = firstgap(&["--output", "json", "asympt", "--family", "constant", "--mu", "2", "--ell", "1"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["regime"], "Exponential");
    assert!((v["gamma"].as_f64().unwrap() - 0.4063757399599599).abs() < 1e-12);
}

#[test]
fn exit_statuses() {
    let code = |args: &[&str]| firstgap(args).status.code();
    assert_eq!(code(&["selftest"]), Some(0));
    assert_eq!(code(&["tail", "--family", "constant", "--mu", "-1", "--ell", "1", "--horizon", "2"]), Some(2));
    assert_eq!(code(&["tail", "--family", "constant", "--mu", "1", "--ell", "1", "--horizon", "2", "--step", "1/2"]), Some(2));
    assert_eq!(code(&["classify", "--ell", "1"]), Some(2));
    assert_eq!(
        code(&["restart", "--mu-star", "1", "--rate-family", "constant", "--r", "1", "--task-size", "1", "--t", "5000"]),
        Some(4)
    );
    let out = firstgap(&["restart", "--mu-star", "1", "--rate-family", "constant", "--r", "1", "--task-size", "1", "--t", "5000"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
    assert!(out.stdout.is_empty());
}
