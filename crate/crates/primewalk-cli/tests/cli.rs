use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_primewalk")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("primewalk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn chowla_single_row() {
    let o = run(&["chowla", "--schedule", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "x,log_chowla_sum");
    assert_eq!(data.len(), 2);
    assert!(data[1].starts_with("1000,"));
    assert!(text.contains("# build=") && text.contains("# seed=1"));
}

#[test]
fn chowla_window_column() {
    let o = run(&["chowla", "--schedule", "1000,5000", "--w", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("x,log_chowla_sum,log_chowla_window_sum"));
    assert_eq!(run(&["chowla", "--schedule", "1000", "--w", "2"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["chowla", "--schedule", "1000,10"][..],
        &["chowla", "--schedule", "abc"],
        &["spectrum", "--N", "ten"],
        &["verify", "--suite", "nope"],
        &["verify"],
        &["bogus"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    let o = run(&["verify", "--suite", "nope"]);
    let err = String::from_utf8(o.stderr).unwrap();
    for s in ["arith", "trace", "shapes", "coloring", "geom", "codec", "sieve"] {
        assert!(err.contains(s));
    }
}

#[test]
fn config_file_then_flags() {
    let path = scratch("run.cfg");
    std::fs::write(&path, "N = 300\nH0=11\nH=40\nseed=9\n").unwrap();
    let p = path.to_str().unwrap();
    let a = json(&run(&["spectrum", "--config", p]));
    assert_eq!(a["config"]["N"], "300");
    assert_eq!(a["seed"], 9);
    let b = json(&run(&["spectrum", "--config", p, "--N", "400"]));
    assert_eq!(b["config"]["N"], "400");
    assert_eq!(b["config"]["H"], "40");
}

#[test]
fn reruns_are_identical() {
    let args = ["spectrum", "--N", "700", "--seed", "3"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert!(v["build"].as_str().unwrap().starts_with("0.1.0-"));
    assert!(v["dense"]["abs_diff"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn empty_prime_set_spectrum() {
    let v = json(&run(&["spectrum", "--H0", "24", "--H", "28"]));
    assert_eq!(v["value"], 0.0);
    assert_eq!(v["primes"], 0);
}

#[test]
fn out_file_and_verify() {
    let path = scratch("geom.json");
    let o = run(&["verify", "--suite", "geom", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["suite"], "geom");
    assert_eq!(v["passed"], true);
    assert!(v["checks"][0]["detail"].as_str().unwrap().starts_with("200 instances"));
}
