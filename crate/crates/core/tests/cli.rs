use std::process::{Command, Output};

use ghz_entangle::MeasureReport;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghz-entangle"))
        .args(args)
        .output()
        .expect("spawn ghz-entangle")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn reproduce_paper_table() {
    let o = bin(&["--reproduce-paper"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(
        text.lines().filter(|l| l.ends_with("PASS")).count(),
        5,
        "{text}"
    );
    assert!(text.contains("5/5 checks passed"));
}

#[test]
fn reproduce_paper_natural_log() {
    let o = bin(&["--reproduce-paper", "--log-base", "2.718281828459045"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0.571"), "{}", stdout(&o));
}

#[test]
fn negative_control_fails() {
    let o = bin(&["--reproduce-paper", "--inject-x-scale", "0.95"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn config_errors_exit_two() {
    for args in [
        &["--n", "0"][..],
        &["--n", "8..2"],
        &["--epsilon", "-0.1"],
        &["--epsilon", "0:1:0"],
        &["--log-base", "-3"],
        &["--format", "yaml"],
        &["--n", "11", "--verify-matrices"],
    ] {
        let o = bin(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn unwritable_output_exits_one() {
    let o = bin(&["--out", "/nonexistent-dir/report.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn json_output_parses_and_is_deterministic() {
    let args = ["--n", "2..6", "--epsilon", "0:1:0.05", "--format", "json"];
    let a = bin(&args);
    let b = bin(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let reports: Vec<MeasureReport> = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(reports.len(), 5 * 21);
    assert!(reports
        .windows(2)
        .all(|w| (w[0].n, w[0].epsilon) < (w[1].n, w[1].epsilon)));
    let odd = reports.iter().find(|r| r.n == 3).unwrap();
    assert_eq!(odd.e_bipartite_avg, None);
}

#[test]
fn csv_and_json_agree() {
    let common = ["--n", "2..5", "--epsilon", "0:1:0.1"];
    let csv_out = bin(&[&common[..], &["--format", "csv"]].concat());
    let json_out = bin(&[&common[..], &["--format", "json"]].concat());
    let reports: Vec<MeasureReport> = serde_json::from_slice(&json_out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(csv_out.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        ghz_entangle::report::COLUMNS
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), reports.len());
    for (row, r) in rows.iter().zip(&reports) {
        assert_eq!(row[0].parse::<usize>().unwrap(), r.n);
        assert_eq!(row[2].parse::<f64>().unwrap(), r.x);
        assert_eq!(row[10].parse::<f64>().unwrap(), r.e_teleport);
        match r.e_bipartite_avg {
            Some(v) => assert_eq!(row[9].parse::<f64>().unwrap(), v),
            None => assert!(row[9].is_empty()),
        }
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("ghz-entangle-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.csv");
    let o = bin(&["--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("n,epsilon,x"));
    assert_eq!(text.lines().count(), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn table_reports_the_four_ion_point() {
    let o = bin(&[]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# entanglement columns in log 2 units"));
    assert!(
        text.contains("0.824") && text.contains("nonseparable"),
        "{text}"
    );
}

#[test]
fn checks_and_matrix_verification_pass() {
    let o = bin(&[
        "--n",
        "2..6",
        "--epsilon",
        "0:1:0.05",
        "--checks",
        "--verify-matrices",
        "--format",
        "csv",
    ]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(o.status.code(), Some(0), "{err}");
    assert!(!err.contains("FAIL"));
    assert!(err.contains("check PASS ppt_flip_brackets_threshold"));
}
