use std::path::PathBuf;
use std::process::{Command, Output};

fn stquad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stquad")).args(args).env_remove("STQUAD_RULES_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rules_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../rules")
}

#[test]
fn sequences_variant_b_in_three_dimensions() {
    let o = stquad(&["sequences", "--dim", "3", "--variant", "b"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().collect::<Vec<_>>(), ["111", "110", "101", "011"]);
}

#[test]
fn decomps_of_61_pentatope_points() {
    let o = stquad(&["decomps", "--element", "pentatope", "--points", "61"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with('S')).count(), 24);
    assert!(text.lines().any(|l| l == "S1^1 S3^1 S4^1 S5^1"));
}

#[test]
fn verify_table_rule() {
    let path = rules_dir().join("pentatope/9-151.txt");
    let o = stquad(&["verify", "--rule", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
    let o = stquad(&["verify", "--rule", path.to_str().unwrap(), "--strength", "10"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn generate_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rule.txt");
    let o = stquad(&[
        "generate",
        "--element",
        "pentatope",
        "--strength",
        "2",
        "--points",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = stquad(&["verify", "--rule", out.to_str().unwrap(), "--extended"]);
    assert!(o.status.success());
}

#[test]
fn generate_reports_failure_with_code_two() {
    // two points cannot carry a fully symmetric pentatope rule
    let o = stquad(&["generate", "--element", "pentatope", "--strength", "2", "--points", "2", "--starts", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn export_duffy_is_verifiable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("duffy.txt");
    let o = stquad(&["export-duffy", "--element", "tetprism", "--axis-points", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let o = stquad(&["verify", "--rule", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn exactness_csv_shape() {
    let o = stquad(&["exactness", "--element", "pentatope", "--strengths", "9", "--p-max", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("element,strength,p_or_m,h,J,J_inf,percent_error"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn convergence_csv_rows() {
    let o = stquad(&["convergence", "--element", "tesseract", "--strengths", "6", "--function", "f3", "--m", "1,2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn catalog_lists_bundled_rules() {
    let o = stquad(&["catalog"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l.starts_with("pentatope,9,151,151")));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(stquad(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(stquad(&["decomps", "--element", "cube", "--points", "3"]).status.code(), Some(64));
    let o = stquad(&["decomps", "--element", "pentatope", "--points", "0"]);
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    assert_eq!(stquad(&["--jobs", "0", "catalog"]).status.code(), Some(64));
    assert_eq!(stquad(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_rule_file_is_an_io_error() {
    let o = stquad(&["verify", "--rule", "/nonexistent/rule.txt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: io:"));
}
