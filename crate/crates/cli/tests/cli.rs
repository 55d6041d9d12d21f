//! Behavior of the command-line interface: exit codes, CSV shape,
//! output redirection.

use std::process::Command;

fn selfsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_selfsim"))
}

fn run(args: &[&str]) -> (Option<i32>, String, String) {
    let out = selfsim().args(args).output().expect("binary should run");
    (
        out.status.code(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn solve_csv_has_header_and_strictly_increasing_f() {
    let (code, stdout, _) = run(&["solve", "--a0", "-1", "--a1", "1", "--eta-end", "10"]);
    assert_eq!(code, Some(0));
    let mut lines = stdout.lines();
    assert!(lines.next().unwrap().starts_with("# selfsim "));
    assert_eq!(lines.next().unwrap(), "eta,f,g");
    let mut prev = f64::NEG_INFINITY;
    let mut rows = 0;
    for line in lines {
        let mut cols = line.split(',');
        let eta: f64 = cols.next().unwrap().parse().unwrap();
        let f: f64 = cols.next().unwrap().parse().unwrap();
        // Strictly increasing until the per-row increment g·Δη drops
        // below one ulp of the limit; nondecreasing always.
        if eta <= 5.0 {
            assert!(f > prev, "f column must increase strictly at eta = {eta}");
        } else {
            assert!(f >= prev, "f column must never decrease at eta = {eta}");
        }
        prev = f;
        rows += 1;
    }
    assert_eq!(rows, 1001);
}

#[test]
fn crossing_reports_bound_with_slack() {
    let (code, stdout, _) = run(&["crossing", "--a0", "-1", "--a1", "1"]);
    assert_eq!(code, Some(0));
    let get = |key: &str| -> f64 {
        stdout
            .lines()
            .find_map(|l| l.strip_prefix(&format!("{key}=")))
            .unwrap_or_else(|| panic!("missing {key} in:\n{stdout}"))
            .parse()
            .unwrap()
    };
    assert!(get("t1") <= get("t1_bound"));
    assert!(get("t1_slack") > 0.0);
    assert!(get("g_at_t1") <= get("g_bound"));
}

#[test]
fn residual_stays_within_budget() {
    let (code, stdout, _) = run(&["residual", "--nx", "50", "--ny", "50"]);
    assert_eq!(code, Some(0));
    let max: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("max_residual="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(max <= 1e-7, "max residual {max}");
}

#[test]
fn coefficient_is_absorbed_for_field_commands() {
    // Doubling A while halving the initial data gives the same field.
    let (code_a, out_a, _) = run(&[
        "field",
        "--coeff-a",
        "2",
        "--a0",
        "-0.5",
        "--a1",
        "0.5",
        "--nx",
        "5",
        "--ny",
        "5",
    ]);
    let (code_b, out_b, _) = run(&["field", "--nx", "5", "--ny", "5"]);
    assert_eq!(code_a, Some(0));
    assert_eq!(code_b, Some(0));
    // Same grid values apart from the provenance line.
    let body = |s: &str| s.lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&out_a), body(&out_b));
}

#[test]
fn invalid_arguments_exit_2() {
    let cases: &[&[&str]] = &[
        &["crossing", "--a0", "1"],
        &["crossing", "--a1", "-1"],
        &["solve", "--coeff-a", "0"],
        &["solve", "--eta-end", "-1"],
        &["energy", "--y2", "0.5"],
        &["contours", "--levels", "5"],
        &["crossing", "--no-such-flag"],
    ];
    for args in cases {
        let (code, _, stderr) = run(args);
        assert_eq!(code, Some(2), "args {args:?} gave stderr:\n{stderr}");
    }
}

#[test]
fn runtime_failures_exit_1() {
    let (code, _, stderr) = run(&["solve", "--max-steps", "3"]);
    assert_eq!(code, Some(1));
    assert!(stderr.contains("step count exhausted"), "stderr: {stderr}");
}

#[test]
fn output_flag_and_directory_override() {
    let dir = std::env::temp_dir().join("selfsim-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let out = selfsim()
        .args(["crossing", "--output", "crossing.txt"])
        .env("SELFSIM_OUTPUT_DIR", &dir)
        .output()
        .expect("binary should run");
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(dir.join("crossing.txt")).unwrap();
    assert!(written.contains("t1="));
    std::fs::remove_dir_all(&dir).ok();
}
