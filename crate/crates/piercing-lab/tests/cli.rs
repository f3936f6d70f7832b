//! End-to-end checks of the binary: subcommands, exit codes, and
//! process-level determinism of emitted files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_piercing-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("piercing-lab-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn generate_instance(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let mut args = vec![
        "generate",
        "--n",
        "12",
        "--seed",
        "42",
        "--out",
        path.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn generate_is_deterministic_across_processes() {
    let dir = tmp_dir("gen");
    let a = generate_instance(&dir, "a.json", &[]);
    let b = generate_instance(&dir, "b.json", &[]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = generate_instance(&dir, "c.json", &["--class", "unit-squares"]);
    assert!(std::fs::read_to_string(&c).unwrap().contains("polygon"));
}

#[test]
fn analyze_text_and_json() {
    let dir = tmp_dir("analyze");
    let inst = generate_instance(&dir, "inst.json", &[]);
    let out = run(&["analyze", inst.to_str().unwrap(), "--self-check"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("fractional τ*"), "{text}");
    let out = run(&["analyze", inst.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n"], 12);
}

#[test]
fn pierce_all_methods_succeed() {
    let dir = tmp_dir("pierce");
    let inst = generate_instance(&dir, "inst.json", &[]);
    for method in ["pipeline", "greedy", "exact"] {
        let out = run(&[
            "pierce",
            inst.to_str().unwrap(),
            "--method",
            method,
            "--seed",
            "7",
        ]);
        assert_eq!(
            code(&out),
            0,
            "method {method}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(String::from_utf8_lossy(&out.stdout).contains("pierced 12 regions"));
    }
}

#[test]
fn pierce_rejects_infeasible_p() {
    let dir = tmp_dir("notp2");
    // three far-apart discs are not (2,2) or (3,2)
    let path = dir.join("disjoint.json");
    std::fs::write(
        &path,
        r#"{"regions": [
            {"type": "disc", "cx": 0.0, "cy": 0.0, "r": 1.0},
            {"type": "disc", "cx": 5.0, "cy": 0.0, "r": 1.0},
            {"type": "disc", "cx": 10.0, "cy": 0.0, "r": 1.0}
        ]}"#,
    )
    .unwrap();
    let out = run(&["pierce", path.to_str().unwrap(), "--p", "3"]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn experiment_writes_deterministic_csv() {
    let dir = tmp_dir("exp");
    let csv_a = dir.join("a.csv");
    let csv_b = dir.join("b.csv");
    for path in [&csv_a, &csv_b] {
        let out = run(&[
            "experiment",
            "--n",
            "10,14",
            "--p",
            "3,5",
            "--trials",
            "1",
            "--seed",
            "99",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read_to_string(&csv_a).unwrap();
    assert_eq!(a, std::fs::read_to_string(&csv_b).unwrap());
    assert!(a.starts_with(
        "seed,n,p,nu_exact,tau_frac,pipeline_size,greedy_size,greedy_iterations,exact_opt,ms_lp,ms_net,ms_greedy"
    ));
    assert_eq!(a.lines().count(), 5); // header + 4 rows
}

#[test]
fn experiment_respects_thread_cap() {
    let dir = tmp_dir("threads");
    let csv = dir.join("t.csv");
    let out = bin()
        .env("PIERCING_LAB_THREADS", "1")
        .args([
            "experiment",
            "--n",
            "10",
            "--p",
            "3",
            "--trials",
            "2",
            "--seed",
            "5",
            "--out",
            csv.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_reports_all_checks() {
    let dir = tmp_dir("verify");
    let inst = generate_instance(&dir, "inst.json", &[]);
    let out = run(&["verify", inst.to_str().unwrap(), "--resolution", "100"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    for check in [
        "candidate dominance",
        "hereditary 3-linearity",
        "sandwich: ν ≤ τ*",
        "pipeline stabs every region",
        "greedy selections pairwise disjoint",
        "turán intersection bound",
        "deep-edge certificate",
    ] {
        assert!(
            text.contains(&format!("[PASS] {check}")),
            "missing [PASS] {check} in:\n{text}"
        );
    }
}

#[test]
fn experiment_records_partial_failures_and_exits_nonzero() {
    // n beyond the exact-packing budget: the row records the failure, the
    // run continues, the CSV is still written, and the exit code signals it
    let dir = tmp_dir("partial");
    let csv = dir.join("partial.csv");
    let out = run(&[
        "experiment",
        "--n",
        "45,10",
        "--p",
        "3",
        "--trials",
        "1",
        "--seed",
        "3",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 3); // header + both rows
    let bad_row = text.lines().nth(1).unwrap();
    assert!(bad_row.starts_with(&format!("{},45,3,", bad_row.split(',').next().unwrap())));
    assert!(bad_row.ends_with(",,,,,,,,")); // all stages empty
    // the in-budget row still completed
    let good_row = text.lines().nth(2).unwrap();
    assert!(!good_row.contains(",,,,,,,,"));
}

#[test]
fn exit_codes_for_bad_input_and_budget() {
    let dir = tmp_dir("codes");
    // unreadable file
    let out = run(&["analyze", dir.join("missing.json").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    // malformed JSON carries position diagnostics
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"regions\": [{\"type\": \"disc\"").unwrap();
    let out = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
    // exact method over the oracle budget
    let big = dir.join("big.json");
    let regions: Vec<String> = (0..45)
        .map(|i| format!(r#"{{"type": "disc", "cx": {}.0, "cy": 0.0, "r": 1.0}}"#, 3 * i))
        .collect();
    std::fs::write(&big, format!(r#"{{"regions": [{}]}}"#, regions.join(","))).unwrap();
    let out = run(&["pierce", big.to_str().unwrap(), "--p", "50", "--method", "exact"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}
