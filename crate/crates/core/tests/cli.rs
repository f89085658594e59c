use std::fs;
use std::io::Write;
use std::process::{Command, Output, Stdio};

use oelab::family::parse_family;
use oelab::report::{parse_report, ReportKind, Value};
use tempfile::TempDir;

fn oelab(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_oelab"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn oelab");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn construct_then_op_through_files() {
    let dir = TempDir::new().unwrap();
    let fam = dir.path().join("a.fam");
    let rep = dir.path().join("a.json");
    let o = oelab(
        &["construct", "--kind", "as_extended", "--n", "12", "--s", "4", "-o", fam.to_str().unwrap(), "--report", rep.to_str().unwrap()],
        "",
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let family = parse_family(&fs::read_to_string(&fam).unwrap()).unwrap();
    assert_eq!(family.len(), 16);
    let report = parse_report(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(report.kind, ReportKind::Construction);

    let o = oelab(&["op", "--family", fam.to_str().unwrap()], "");
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "6");
}

#[test]
fn search_min_writes_witness() {
    let dir = TempDir::new().unwrap();
    let wit = dir.path().join("w.fam");
    let o = oelab(&["search-min", "--n", "4", "--size", "6", "--mode", "odd", "--canonical", "--witness-out", wit.to_str().unwrap()], "");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = parse_report(&stdout(&o)).unwrap();
    assert_eq!(report.kind, ReportKind::Search);
    let Some(Value::Int(m)) = report.values.get("minimum_op") else { panic!("no minimum") };
    let witness = parse_family(&fs::read_to_string(&wit).unwrap()).unwrap();
    assert_eq!(witness.len(), 6);
    let o = oelab(&["op"], &fs::read_to_string(&wit).unwrap());
    assert_eq!(stdout(&o).trim(), m.to_string());
}

#[test]
fn bound_check_exit_codes() {
    let family = stdout(&oelab(&["construct", "--kind", "as_family", "--n", "10", "--s", "3"], ""));
    let o = oelab(&["bound-check", "--bound", "oddtown_lower_bound", "--s", "3"], &family);
    assert_eq!(o.status.code(), Some(0));
    let o = oelab(&["bound-check", "--bound", "oddtown_lower_bound", "--s", "9", "--format", "csv"], &family);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("not-applicable"));
    let o = oelab(&["bound-check", "--bound", "no_such_bound"], &family);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn malformed_family_is_an_error() {
    let o = oelab(&["op"], "n=3\n1 7\n");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_is_thread_independent() {
    let args = |t: &'static str| {
        vec!["--threads", t, "sweep", "--command", "search-min", "--range", "size=3..7", "--", "--n", "4", "--mode", "even"]
    };
    let one = oelab(&args("1"), "");
    let four = oelab(&args("4"), "");
    assert!(one.status.success(), "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, four.stdout);
    let csv = stdout(&one);
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.lines().next().unwrap().starts_with("kind,"));
}
