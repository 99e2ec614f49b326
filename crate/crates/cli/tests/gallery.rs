use std::time::Instant;

use barricade::gallery::{self, NAMES};
use barricade::{Report, RunOptions};

fn opts() -> RunOptions {
    RunOptions { parallel: false, meta: false, solve_only: false }
}

fn run(name: &str, n: Option<usize>) -> Report {
    let it = gallery::item(name, n).unwrap();
    gallery::run_item(&it, &it.scenario, opts()).unwrap()
}

fn task<'a>(r: &'a Report, prefix: &str) -> &'a barricade::report::TaskResult {
    r.tasks.iter().find(|t| t.task.starts_with(prefix)).unwrap()
}

#[test]
fn full_gallery_matches_within_budget() {
    let start = Instant::now();
    let mut reports = Vec::new();
    for name in NAMES {
        let r = run(name, None);
        let checked: Vec<_> = r.tasks.iter().filter(|t| t.expected.is_some()).collect();
        assert_eq!(checked.len(), 1, "{name}");
        assert_eq!(r.tasks.iter().filter(|t| t.anchor.is_some()).count(), 1, "{name}");
        assert_eq!(checked[0].matches, Some(true), "{name}: {} vs {:?}", checked[0].status, checked[0].expected);
        reports.push(r);
    }
    assert!(start.elapsed().as_secs_f64() < 60.0);
    let merged = gallery::merge(reports);
    assert!(merged.all_match());
    assert_eq!(Report::from_json(&merged.to_json()).unwrap(), merged);
}

#[test]
fn certificates_carry_witnesses_and_margins() {
    for name in NAMES {
        for t in run(name, None).tasks {
            match t.status.as_str() {
                "StronglySeparated" => {
                    let m = t.certificate["revalidated_margin"].as_f64().unwrap();
                    assert!(m > 0.0, "{name}: {m}");
                }
                "LacksSSP" => {
                    assert!(t.certificate["witness"].is_array(), "{name}");
                    assert_eq!(t.certificate["witness_barrier"]["class"], "BoundaryPoint");
                    assert_eq!(t.certificate["witness_support"]["finite"], true);
                }
                _ => {}
            }
        }
    }
}

#[test]
fn l2_gap_table_row() {
    let r = run("l2_slices", Some(6));
    let t = task(&r, "gap_table");
    assert_eq!(t.status, "StrictlyDecreasing");
    let rows = t.certificate["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    let row5 = rows.iter().find(|r| r["k"] == 5).unwrap();
    assert!((row5["gap"].as_f64().unwrap() - 1.0 / 3.0).abs() <= 1e-12 / 3.0);
}

#[test]
fn ex53_reports_nonattainment() {
    let r = run("ex53", None);
    let t = task(&r, "solve");
    assert_eq!(t.status, "HypothesesFailed");
    assert_eq!(t.certificate["nonattainment"], true);
    assert_eq!(t.certificate["failed"][0], "ssp");
    let v = t.certificate["solution"]["value"].as_f64().unwrap();
    assert!(v > 0.0 && v < 1e-3);
    assert_eq!(task(&r, "conditions").status, "Cond10");
}

#[test]
fn hyperbola_line_ray_and_gaps() {
    let r = run("hyperbola_line", None);
    let c = &r.tasks[0].certificate;
    assert_eq!(c["common_ray"][0], 1.0);
    let gaps: Vec<f64> = c["gap_sequence"].as_array().unwrap().iter().map(|g| g["gap"].as_f64().unwrap()).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn hyperbola_barrier_probes() {
    let r = run("hyperbola_barrier", None);
    let probes = r.tasks[0].certificate["probes"].as_array().unwrap();
    let class = |d: [f64; 2]| {
        probes
            .iter()
            .find(|p| p["direction"][0] == d[0] && p["direction"][1] == d[1])
            .map(|p| p["barrier"]["class"].as_str().unwrap().to_string())
            .unwrap()
    };
    assert_eq!(class([-1.0, -1.0]), "InteriorPoint");
    assert_eq!(class([-1.0, 0.0]), "BoundaryPoint");
    assert_eq!(class([0.0, -1.0]), "BoundaryPoint");
    assert_eq!(class([1.0, -1.0]), "Outside");
}
