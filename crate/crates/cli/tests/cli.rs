//! End-to-end behaviour of the `algest` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn algest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_algest")).args(args).output().expect("run algest")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("algest-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn construct_writes_the_exchange_grammar() {
    let o = algest(&["construct", "--model", "periodic-gaussian", "--clazz", "mle"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("# model: periodic-gaussian"));
    assert!(text.contains("# total_degree_product: 5"));
    assert!(text.contains("4*a^5"));
}

#[test]
fn construct_then_reduce_from_file() {
    let mle = tmp("mle.txt");
    let o = algest(&["construct", "--model", "log-marginal", "--clazz", "mle", "--out", mle.to_str().unwrap()]);
    assert!(o.status.success());
    let red = tmp("red.txt");
    let o = algest(&["reduce", "--input", mle.to_str().unwrap(), "--k", "2", "--out", red.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(red).unwrap();
    assert!(text.contains("# clazz: reduced-first-order"));
    assert!(text.contains("# certificate k=2 holds=true"));
}

#[test]
fn reduce_rejects_a_non_mle_system() {
    let sys = tmp("second.txt");
    let o = algest(&["construct", "--model", "periodic-gaussian", "--clazz", "second-order", "--out", sys.to_str().unwrap()]);
    assert!(o.status.success());
    let o = algest(&["reduce", "--input", sys.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reduce_rejects_k_outside_two_and_three() {
    assert_eq!(algest(&["reduce", "--k", "4"]).status.code(), Some(2));
}

#[test]
fn ceiling_breach_exits_with_three() {
    let o = algest(&["reduce", "--model", "log-marginal", "--max-basis", "3"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn unknown_model_is_a_usage_error() {
    assert_eq!(algest(&["construct", "--model", "nope"]).status.code(), Some(2));
}

#[test]
fn solve_reports_the_selected_root() {
    let csv = tmp("paths.csv");
    let o = algest(&[
        "solve",
        "--model",
        "periodic-gaussian",
        "--clazz",
        "mle",
        "--data",
        "-2,-2,-0.5",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("paths: 5"));
    assert!(text.contains("estimate_unknowns: 0.500000000000"), "{text}");
    let report = std::fs::read_to_string(csv).unwrap();
    assert_eq!(report.lines().next().unwrap(), "path,status,steps,residual,re_1,im_1");
    assert_eq!(report.lines().count(), 6);
}

#[test]
fn solve_without_real_roots_exits_with_four() {
    let o = algest(&["solve", "--model", "log-marginal", "--clazz", "mle", "--data", "1,1,1,1,1,1"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("paths: 500"));
}

#[test]
fn solve_checks_the_data_length() {
    let o = algest(&["solve", "--model", "toy-linear", "--clazz", "mle", "--data", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_is_byte_reproducible_without_timing() {
    let args = ["simulate", "--model", "toy-linear", "--truth", "0.3", "--n-grid", "100,1000", "--trials", "5", "--no-timing"];
    let a = algest(&args);
    let b = algest(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().next().unwrap(), "model,estimator,N,trials,mse,bias_1,bias_2,mean_time_s,fail_rate");
    assert_eq!(text.lines().count(), 1 + 2 * 3);
}

#[test]
fn simulate_writes_long_format() {
    let long = tmp("long.csv");
    let o = algest(&[
        "simulate", "--model", "periodic-gaussian", "--n-grid", "100", "--trials", "3", "--no-timing", "--long",
        long.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(long).unwrap();
    assert_eq!(text.lines().next().unwrap(), "N,estimator,metric,value");
    assert!(text.contains("100,mle+bc,mse,"));
}

#[test]
fn simulate_rejects_an_off_model_truth() {
    let o = algest(&["simulate", "--model", "periodic-gaussian", "--truth", "1.5", "--trials", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_writes_one_row_per_estimator() {
    let o = algest(&["bench", "--model", "toy-linear", "--clazz", "mle,second-order", "--data", "0.2,0.1", "--reps", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("estimator,paths,reps,mean_s,std_s"));
    assert!(lines.next().unwrap().starts_with("mle,3,2,"));
    assert!(lines.next().unwrap().starts_with("second-order,"));
    assert!(text.contains("# speedup mle/second-order:"));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let cfg = tmp("algest.toml");
    std::fs::write(&cfg, "model = \"periodic-gaussian\"\nclazz = \"mle\"\n").unwrap();
    let o = algest(&["--config", cfg.to_str().unwrap(), "construct"]);
    assert!(stdout(&o).contains("# model: periodic-gaussian"));
    let o = algest(&["--config", cfg.to_str().unwrap(), "construct", "--model", "toy-linear"]);
    assert!(stdout(&o).contains("# model: toy-linear"));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let cfg = tmp("bad.toml");
    std::fs::write(&cfg, "modle = \"x\"\n").unwrap();
    assert_eq!(algest(&["--config", cfg.to_str().unwrap(), "construct"]).status.code(), Some(2));
}

#[test]
fn shipped_config_parses() {
    let shipped = concat!(env!("CARGO_MANIFEST_DIR"), "/algest.toml");
    let o = algest(&["--config", shipped, "construct", "--model", "toy-linear"]);
    assert!(o.status.success());
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_algest")).env("ALGEST_THREADS", "many").arg("selftest").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selftest_passes() {
    let o = algest(&["selftest"]);
    let text = stdout(&o);
    assert!(o.status.success(), "{text}");
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
}
