//! End-to-end checks of the ordstat binary: exit codes, output formats, and
//! agreement with the oracle algorithm through the real command line.

use std::path::PathBuf;
use std::process::{Command, Output};

fn ordstat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ordstat"))
        .args(args)
        .output()
        .expect("spawn ordstat")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn tmp_path(name: &str) -> PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("ordstat-test-{}-{name}", std::process::id()));
    path
}

#[test]
fn select_inline_data() {
    let out = ordstat(&["select", "--algo", "repeated3", "--i", "2", "--data", "3,1,2"]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out).trim(), "2");
}

#[test]
fn select_from_generator() {
    let out = ordstat(&["select", "--algo", "shifting4", "--i", "1", "--gen", "sorted:n=10"]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out).trim(), "1");
}

#[test]
fn select_agrees_with_oracle() {
    let args = ["--i", "500", "--gen", "uniform:n=1000:seed=7"];
    let classic = ordstat(&[&["select", "--algo", "classic5"], &args[..]].concat());
    let oracle = ordstat(&[&["select", "--algo", "oracle"], &args[..]].concat());
    assert!(classic.status.success() && oracle.status.success());
    assert_eq!(stdout_of(&classic), stdout_of(&oracle));
}

#[test]
fn select_from_file_with_floats() {
    let path = tmp_path("input.txt");
    std::fs::write(&path, "2.5\n1\n-3\n2\n").unwrap();
    let out = ordstat(&["select", "--algo", "hybrid4", "--i", "3", "--file", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out).trim(), "2");
    std::fs::remove_file(&path).ok();
}

#[test]
fn select_trace_json_and_csv() {
    let csv_path = tmp_path("trace.csv");
    let out = ordstat(&[
        "select",
        "--algo",
        "repeated3",
        "--i",
        "40",
        "--gen",
        "uniform:n=200:seed=1",
        "--trace",
        "--trace-csv",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("\"total_comparisons\""));
    assert!(text.contains("\"result_key\""));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("iter,n,i,algo,policy,pivot_rank,a1,a2,cmp_delta"));
    std::fs::remove_file(&csv_path).ok();
}

#[test]
fn malformed_input_is_usage_error() {
    let out = ordstat(&["select", "--algo", "repeated3", "--i", "1", "--data", "1,two,3"]);
    assert_eq!(out.status.code(), Some(2));

    let out = ordstat(&["select", "--algo", "nonsense", "--i", "1", "--data", "1,2"]);
    assert_eq!(out.status.code(), Some(2));

    let out = ordstat(&["select", "--algo", "repeated3", "--i", "1", "--gen", "uniform:n=0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rank_out_of_range_is_rejected() {
    let out = ordstat(&["select", "--algo", "classic5", "--i", "4", "--data", "3,1,2"]);
    assert!(!out.status.success());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_small_run_passes() {
    let out = ordstat(&[
        "verify",
        "--max-exhaustive",
        "4",
        "--trials",
        "2",
        "--sizes",
        "50,100",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("PASS"));
    assert!(text.contains("equivalence checks"));
}

#[test]
fn bench_writes_deterministic_csv() {
    let path_a = tmp_path("bench-a.csv");
    let path_b = tmp_path("bench-b.csv");
    for path in [&path_a, &path_b] {
        let out = ordstat(&[
            "bench",
            "--algos",
            "repeated3,oracle",
            "--sizes",
            "64,256",
            "--target",
            "nine-quantiles",
            "--reps",
            "3",
            "--seed",
            "5",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let a = std::fs::read_to_string(&path_a).unwrap();
    let b = std::fs::read_to_string(&path_b).unwrap();
    assert_eq!(a, b);
    assert!(a.starts_with("algo,n,target,reps,mean_cmp,max_cmp,mean_cmp_per_elem,mean_depth"));
    assert_eq!(a.lines().count(), 1 + 2 * 2);
    std::fs::remove_file(&path_a).ok();
    std::fs::remove_file(&path_b).ok();
}

#[test]
fn bench_accepts_spec_file() {
    let spec_path = tmp_path("spec.json");
    std::fs::write(
        &spec_path,
        r#"{
            "algorithms": ["hybrid4"],
            "sizes": [32, 64],
            "target": "middle",
            "generator": "organpipe",
            "seed": 1,
            "repetitions": 2
        }"#,
    )
    .unwrap();
    let out = ordstat(&["bench", "--spec", spec_path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("hybrid4,32,middle,2,"));
    std::fs::remove_file(&spec_path).ok();

    let bad_path = tmp_path("bad-spec.json");
    std::fs::write(&bad_path, r#"{"sizes": [1]}"#).unwrap();
    let out = ordstat(&["bench", "--spec", bad_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(&bad_path).ok();
}

#[test]
fn probe_emits_fits_without_verdict() {
    let csv_path = tmp_path("probe.csv");
    let fit_path = tmp_path("probe-fits.json");
    let out = ordstat(&[
        "probe",
        "--sizes",
        "100,400,2000,10000",
        "--reps",
        "2",
        "--out",
        csv_path.to_str().unwrap(),
        "--fit-out",
        fit_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    // 6 probe algorithms x 4 sizes + header.
    assert_eq!(csv.lines().count(), 25);
    let fits = std::fs::read_to_string(&fit_path).unwrap();
    for required in ["classic3-lower", "classic3-upper", "classic4-lower", "classic4-upper", "slope", "residuals"] {
        assert!(fits.contains(required), "missing {required}");
    }
    for banned in ["verdict", "linear", "conclusion"] {
        assert!(!fits.to_lowercase().contains(banned), "verdict language {banned}");
    }
    std::fs::remove_file(&csv_path).ok();
    std::fs::remove_file(&fit_path).ok();
}

#[test]
fn probe_rejects_unfittable_sizes() {
    let out = ordstat(&["probe", "--sizes", "100,200,400,800", "--reps", "1"]);
    assert_eq!(out.status.code(), Some(2));
}
