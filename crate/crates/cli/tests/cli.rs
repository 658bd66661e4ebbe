use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn pcdecomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcdecomp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn validate_exit_codes() {
    let ok = pcdecomp(&["validate", data("exam.csv").to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = pcdecomp(&["validate", data("bad.csv").to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("reciprocity"));
}

#[test]
fn looser_reciprocity_tolerance_accepts_rounded_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rounded.csv");
    std::fs::write(&path, "1,3\n0.333,1\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(pcdecomp(&["validate", p]).status.code(), Some(2));
    assert_eq!(pcdecomp(&["validate", p, "--recip-tol", "1e-2"]).status.code(), Some(0));
}

#[test]
fn weights_two_decimals() {
    let o = pcdecomp(&["weights", data("exam.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "A 0.58\nB 0.31\nC 0.11\n");
}

#[test]
fn inconsistency_and_worst_triad() {
    let o = pcdecomp(&["inconsistency", data("exam.csv").to_str().unwrap()]);
    assert_eq!(stdout(&o), "inconsistency 0.166667\nworst triad (1, 2, 3) 0.166667\n");
}

#[test]
fn decompose_prints_k() {
    let o = pcdecomp(&["decompose", data("exam.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("k = 1.062659\n"), "{text}");
    assert!(text.contains("Y = 1.882072"));
    assert!(text.contains("A_L"));
}

#[test]
fn decompose_rejects_four_by_four() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("four.csv");
    std::fs::write(&path, "1,1,1,1\n1,1,1,1\n1,1,1,1\n1,1,1,1\n").unwrap();
    let o = pcdecomp(&["decompose", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn approximate_outputs_consistent_component_as_csv() {
    let o = pcdecomp(&["approximate", data("exam.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<Vec<f64>> = stdout(&o)
        .lines()
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert!((rows[0][1] * rows[1][2] / rows[0][2] - 1.0).abs() < 1e-13);
}

#[test]
fn iterate_trace() {
    let o = pcdecomp(&["iterate", data("exam.csv").to_str().unwrap(), "--tol", "1e-9", "--max-iter", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("converged true"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with(char::is_numeric) && l.contains('e')).count(), 2);
}

#[test]
fn json_input_with_labels() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exam.json");
    std::fs::write(
        &path,
        r#"{"labels":["hard","medium","easy"],"matrix":[[1,2,5],[0.5,1,3],[0.2,0.3333333333,1]]}"#,
    )
    .unwrap();
    let o = pcdecomp(&["weights", path.to_str().unwrap()]);
    assert_eq!(stdout(&o), "hard 0.58\nmedium 0.31\neasy 0.11\n");
    let forced = pcdecomp(&["--format", "csv", "weights", path.to_str().unwrap()]);
    assert_eq!(forced.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(pcdecomp(&[]).status.code(), Some(1));
    assert_eq!(pcdecomp(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(pcdecomp(&["weights", "/nonexistent/file.csv"]).status.code(), Some(1));
    assert_eq!(pcdecomp(&["--format", "xml", "weights", "x.csv"]).status.code(), Some(1));
    let exam = data("exam.csv");
    assert_eq!(pcdecomp(&["iterate", exam.to_str().unwrap(), "--max-iter", "0"]).status.code(), Some(1));
    assert_eq!(pcdecomp(&["--help"]).status.code(), Some(0));
}

#[test]
fn parse_error_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ragged.csv");
    std::fs::write(&path, "1,2\n0.5\n").unwrap();
    let o = pcdecomp(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn run_in_process() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = pcdecomp_cli::run(
        ["pcdecomp", "weights", data("exam.csv").to_str().unwrap()],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(out).unwrap(), "A 0.58\nB 0.31\nC 0.11\n");
}
