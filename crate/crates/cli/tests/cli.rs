use std::path::PathBuf;
use std::process::{Command, Output};

fn kb(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/kb")
        .join(format!("{name}.plog"))
}

fn plog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plog"))
        .args(args)
        .env_remove("PLOG_WORLD_CAP")
        .output()
        .expect("run plog")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn check_ravens_is_feasible() {
    let o = plog(&["check", kb("ravens").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("SUBADD: ok"));
    assert!(out.contains("ELIG: ok"));
    assert!(out.contains("LP-FEASIBLE"));
}

#[test]
fn check_conflict_reports_subadditivity() {
    let o = plog(&["check", kb("conflict").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(
        out.contains("SUBADD: disjoint {2} (p & q) -> 1 (p): sum 0.4 exceeds 0.3"),
        "{out}"
    );
    assert!(out.contains("LP-INFEASIBLE"));
}

#[test]
fn check_nested_is_hierarchical() {
    let o = plog(&["check", kb("nested").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("HIER: yes, depth 3"));
}

#[test]
fn check_parse_error_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir, "bad.plog", "prop p\nbelieve p = 1.5\n");
    assert_eq!(code(&plog(&["check", &path])), 2);
    let path = write(&dir, "bad2.plog", "prop p\nbelieve (p & = 0.5\n");
    assert_eq!(code(&plog(&["check", &path])), 2);
    assert_eq!(code(&plog(&["check", "/nonexistent/kb.plog"])), 2);
}

#[test]
fn world_cap_exceeded_exits_3() {
    let path = kb("ravens");
    let o = Command::new(env!("CARGO_BIN_EXE_plog"))
        .args(["check", path.to_str().unwrap()])
        .env("PLOG_WORLD_CAP", "5")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
    let o = plog(&["--world-cap", "4", "query", path.to_str().unwrap(), "B(1)"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn query_monty_hall_switch() {
    let o = plog(&[
        "query",
        kb("monty-hall").to_str().unwrap(),
        "prizeDoor(d2)",
        "--given",
        "playerFirstSelection(d1) & hostSelection(d3)",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "0.666666666667");
}

#[test]
fn query_true_and_certain_consequence() {
    let o = plog(&["query", kb("ravens").to_str().unwrap(), "True"]);
    assert_eq!(stdout(&o).trim(), "1.000000000000");
    let o = plog(&["query", kb("ravens").to_str().unwrap(), "B(1) & B(2)"]);
    assert_eq!(stdout(&o).trim(), "1.000000000000");
    let o = plog(&["query", kb("ravens").to_str().unwrap(), "B(6)"]);
    assert_eq!(stdout(&o).trim(), "0.500000000000");
}

#[test]
fn query_infeasible_exits_1() {
    let o = plog(&["query", kb("conflict").to_str().unwrap(), "p"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("LP-INFEASIBLE"));
}

#[test]
fn query_zero_condition_exits_4() {
    let o = plog(&[
        "query",
        kb("nested").to_str().unwrap(),
        "q",
        "--given",
        "p & ~p",
    ]);
    assert_eq!(code(&o), 4);
}

#[test]
fn query_unknown_name_exits_2() {
    let o = plog(&["query", kb("nested").to_str().unwrap(), "zz"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn extend_table_round_trips_as_prior() {
    let dir = tempfile::tempdir().unwrap();
    let nested = kb("nested");
    let o = plog(&["extend", nested.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let table = stdout(&o);
    assert!(table.starts_with("# plog belief"));
    let prior = write(&dir, "prior.txt", &table);
    // Projecting a belief that already satisfies the constraints leaves it fixed.
    let o = plog(&[
        "query",
        nested.to_str().unwrap(),
        "p & ~q",
        "--prior",
        &prior,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "0.300000000000");
}

#[test]
fn extend_report_lists_multipliers() {
    let o = plog(&["extend", kb("nested").to_str().unwrap(), "--report"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("multipliers:"));
    assert!(out.contains("KL = "));
}

#[test]
fn extend_rejects_bad_tolerance() {
    let o = plog(&[
        "extend",
        kb("nested").to_str().unwrap(),
        "--tolerance",
        "-1",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn dogmatic_prior_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let prior = write(&dir, "prior.txt", "# plog belief\n# atoms: p q r\n0 1\n");
    let o = plog(&["extend", kb("nested").to_str().unwrap(), "--prior", &prior]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn dimacs_dump_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("cnf");
    let o = plog(&[
        "--dimacs-dir",
        dump.to_str().unwrap(),
        "check",
        kb("nested").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let files: Vec<_> = std::fs::read_dir(&dump).unwrap().collect();
    assert!(!files.is_empty());
    let first = std::fs::read_to_string(files[0].as_ref().unwrap().path()).unwrap();
    assert!(first.lines().any(|l| l.starts_with("p cnf ")));
}

fn csv_column(out: &str, col: usize) -> Vec<f64> {
    out.lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn confirm_naive_predictive_is_flat() {
    let o = plog(&["confirm", "--mixture", "iid:1.0@0.5", "--n", "30"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(
        out.lines().next(),
        Some("n,prefix_prob,posterior_universal,predictive")
    );
    let pred = csv_column(&out, 3);
    assert_eq!(pred.len(), 31);
    assert!(pred.iter().all(|&p| p == 0.5));
}

#[test]
fn confirm_mixture_posterior_converges() {
    let o = plog(&[
        "confirm",
        "--mixture",
        "alltrue:0.5,iid:0.5@0.5",
        "--n",
        "20",
    ]);
    let post = csv_column(&stdout(&o), 2);
    assert!(*post.last().unwrap() >= 0.999999);
    let o = plog(&["confirm", "--mixture", "alltrue:1.0", "--n", "5"]);
    for col in 1..4 {
        assert!(csv_column(&stdout(&o), col).iter().all(|&v| v == 1.0));
    }
}

#[test]
fn confirm_malformed_spec_exits_2() {
    assert_eq!(code(&plog(&["confirm", "--mixture", "iid:0.5"])), 2);
    assert_eq!(code(&plog(&["confirm", "--mixture", "alltrue:0.4"])), 2);
}

#[test]
fn examples() {
    let o = plog(&["example", "monty-hall"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("P(win by switching)                 = 0.666666666667"));
    assert!(out.contains("P(win by staying)                   = 0.333333333333"));
    assert_eq!(code(&plog(&["example", "ravens"])), 0);
    let o = plog(&["example", "naive-ravens"]);
    assert!(stdout(&o).contains("0.500000000000"));
    assert_eq!(code(&plog(&["example", "nope"])), 2);
}

#[test]
fn output_is_deterministic() {
    let path = kb("monty-hall");
    let args = ["extend", path.to_str().unwrap(), "--report"];
    assert_eq!(stdout(&plog(&args)), stdout(&plog(&args)));
}
