use std::process::Command;

fn barricade(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_barricade")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    barricade(args).status.code().unwrap()
}

const EXAMPLE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/minimal.json");

#[test]
fn success_and_usage_errors() {
    assert_eq!(code(&["gallery", "parabola", "--no-meta"]), 0);
    assert_eq!(code(&["gallery", "no_such_item"]), 2);
    assert_eq!(code(&["gallery"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["analyze", "/definitely/missing.json"]), 2);
    assert_eq!(code(&["analyze", EXAMPLE, "--tol", "-1"]), 2);
}

#[test]
fn schema_violation_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, r#"{"schema":"barricade/1","dimension":2,"tasks":[{"ssp":"nowhere"}]}"#).unwrap();
    let out = barricade(&["analyze", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere"));
}

#[test]
fn mismatch_exits_1() {
    // a tolerance coarser than the true gap collapses it
    assert_eq!(code(&["gallery", "l1_slices", "--tol", "0.5", "--no-meta"]), 1);
}

#[test]
fn unwritable_output_exits_3() {
    assert_eq!(code(&["gallery", "parabola", "--out", "/nonexistent-dir/r.json"]), 3);
}

#[test]
fn out_file_and_byte_identical_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert_eq!(code(&["analyze", EXAMPLE, "--no-meta", "--out", a.to_str().unwrap()]), 0);
    assert_eq!(code(&["analyze", EXAMPLE, "--no-meta", "--parallel", "--out", b.to_str().unwrap()]), 0);
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let r = barricade::Report::from_json(std::str::from_utf8(&ta).unwrap()).unwrap();
    assert_eq!(r.scenario.as_deref(), Some("minimal"));
    assert!(r.meta.is_none());
}

#[test]
fn solve_subcommand_and_manifest() {
    let out = barricade(&["solve", EXAMPLE, "--no-meta", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let r = barricade::Report::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(r.seed, 7);
    assert!(r.tasks.iter().all(|t| t.task.starts_with("solve")));

    let out = barricade(&["gallery", "hyperbola_line", "--manifest"]);
    assert_eq!(out.status.code(), Some(0));
    let s = barricade::parse_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(s.tasks.len(), 1);
}

#[test]
fn gallery_all_exits_0() {
    let out = barricade(&["gallery", "--all", "--no-meta"]);
    assert_eq!(out.status.code(), Some(0));
    let r = barricade::Report::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(r.all_match());
    assert_eq!(r.tasks.iter().filter(|t| t.expected.is_some()).count(), 12);
}
