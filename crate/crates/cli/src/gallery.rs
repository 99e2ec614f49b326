//! Canonical example scenarios with recorded expectations.

use std::collections::BTreeMap;

use barricade_core::separation::counterexample_pair;
use barricade_core::Error;

use crate::report::Report;
use crate::runner::{run, RunError, RunOptions};
use crate::scenario::{FnSpec, PhiSpec, Scenario, SetSpec, TaskSpec, ToleranceSpec, SCHEMA};

pub const DEFAULT_N: usize = 6;

pub const NAMES: [&str; 12] = [
    "hyperbola_line",
    "hyperbola_barrier",
    "parabola",
    "exp_epigraph",
    "remark41_halfplane",
    "remark41_ball",
    "remark41_cone",
    "ex52",
    "ex53",
    "remark51",
    "l2_slices",
    "l1_slices",
];

#[derive(Debug, Clone)]
pub struct GalleryItem {
    pub name: &'static str,
    pub anchor: &'static str,
    /// Index of the task whose status is checked.
    pub primary: usize,
    pub expected: &'static str,
    pub scenario: Scenario,
}

fn scenario(dimension: usize, sets: Vec<(&str, SetSpec)>, functions: Vec<(&str, FnSpec)>, tasks: Vec<TaskSpec>) -> Scenario {
    Scenario {
        schema: SCHEMA.into(),
        dimension,
        sets: sets.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<BTreeMap<_, _>>(),
        functions: functions.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        tasks,
        tolerances: ToleranceSpec::default(),
        seed: 0,
    }
}

fn s(x: &str) -> String {
    x.to_string()
}

fn pair_specs(name: &str, n: usize) -> Result<(SetSpec, SetSpec), Error> {
    let p = counterexample_pair(name, n)?;
    let spec = |c| SetSpec::from_set(c).expect("explicit representation");
    Ok((spec(&p.c), spec(&p.d)))
}

fn epigraph(phi: PhiSpec) -> SetSpec {
    SetSpec::Epigraph1d { phi, shift: 0.0 }
}

fn x_axis() -> SetSpec {
    SetSpec::Hpoly {
        a: vec![vec![0.0, 1.0], vec![0.0, -1.0]],
        b: vec![0.0, 0.0],
    }
}

/// `0 <= x_{k+1} <= k/(k+1) x_k` for `k = 1..n-1`.
fn truncated_cone(n: usize) -> SetSpec {
    let mut a = Vec::new();
    for k in 1..n {
        let mut lo = vec![0.0; n];
        lo[k] = -1.0;
        a.push(lo);
        let mut hi = vec![0.0; n];
        hi[k] = 1.0;
        hi[k - 1] = -(k as f64) / (k as f64 + 1.0);
        a.push(hi);
    }
    let b = vec![0.0; a.len()];
    SetSpec::Hpoly { a, b }
}

fn unit(n: usize, i: usize, s: f64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = s;
    v
}

/// Build a gallery item; `n` sizes the truncated families.
pub fn item(name: &str, n: Option<usize>) -> Result<GalleryItem, Error> {
    let n = n.unwrap_or(DEFAULT_N);
    if n < 2 {
        return Err(Error::Invalid("gallery size n must be at least 2".into()));
    }
    let it = |name, anchor, primary, expected, scenario| GalleryItem {
        name,
        anchor,
        primary,
        expected,
        scenario,
    };
    Ok(match name {
        "hyperbola_line" => {
            let (c, d) = pair_specs("hyperbola_line", 2)?;
            it(
                "hyperbola_line",
                "C = {x > 0, xy >= 1} and the x-axis D: disjoint, distance 0",
                0,
                "NotStronglySeparable",
                scenario(2, vec![("C", c), ("D", d)], vec![], vec![TaskSpec::Separate(s("C"), s("D"))]),
            )
        }
        "hyperbola_barrier" => {
            let (c, d) = pair_specs("hyperbola_line", 2)?;
            it(
                "hyperbola_barrier",
                "barc(C) is the closed negative quadrant; barc(D) is the y-axis",
                2,
                "LacksSSP",
                scenario(
                    2,
                    vec![("C", c), ("D", d)],
                    vec![],
                    vec![TaskSpec::Analyze(s("C")), TaskSpec::Analyze(s("D")), TaskSpec::Ssp(s("C"))],
                ),
            )
        }
        "parabola" => it(
            "parabola",
            "epi x^2: barc = {v < 0} ∪ {0}, strong separation property holds",
            1,
            "HasSSP",
            scenario(
                2,
                vec![("P", epigraph(PhiSpec::Square))],
                vec![],
                vec![TaskSpec::Analyze(s("P")), TaskSpec::Ssp(s("P"))],
            ),
        ),
        "exp_epigraph" => it(
            "exp_epigraph",
            "epi e^x: Int barc = {u > 0 > v}, strong separation property fails",
            1,
            "LacksSSP",
            scenario(
                2,
                vec![("E", epigraph(PhiSpec::Exp))],
                vec![],
                vec![TaskSpec::Analyze(s("E")), TaskSpec::Ssp(s("E"))],
            ),
        ),
        "remark41_halfplane" => it(
            "remark41_halfplane",
            "{y <= 0}: locally compact, Int barc empty",
            1,
            "LacksSSP",
            scenario(
                2,
                vec![("H", SetSpec::Hpoly { a: vec![vec![0.0, 1.0]], b: vec![0.0] })],
                vec![],
                vec![TaskSpec::Classify(s("H"), vec![0.0, 1.0]), TaskSpec::Ssp(s("H"))],
            ),
        ),
        "remark41_ball" => it(
            "remark41_ball",
            "closed unit ball, truncated: Int barc is everything",
            1,
            "HasSSP",
            scenario(
                n,
                vec![("B", SetSpec::Ball { center: vec![0.0; n], radius: 1.0 })],
                vec![],
                vec![TaskSpec::Classify(s("B"), unit(n, 0, -1.0)), TaskSpec::Ssp(s("B"))],
            ),
        ),
        "remark41_cone" => it(
            "remark41_cone",
            "cone 0 <= x_{k+1} <= k/(k+1) x_k, truncated: -e_1 in Int barc",
            0,
            "InteriorPoint",
            scenario(
                n,
                vec![("K", truncated_cone(n))],
                vec![],
                vec![TaskSpec::Classify(s("K"), unit(n, 0, -1.0)), TaskSpec::Ssp(s("K"))],
            ),
        ),
        "ex52" => it(
            "ex52",
            "min x^2 + y over epi x^2: solution set nonempty and compact",
            0,
            "NonemptyCompact",
            scenario(
                2,
                vec![("M", epigraph(PhiSpec::Square))],
                vec![(
                    "f",
                    FnSpec::Lift { index: 0, phi: PhiSpec::Square, a: Some(vec![0.0, 1.0]), beta: 0.0 },
                )],
                vec![TaskSpec::Solve(s("M"), s("f")), TaskSpec::Conditions(s("f"))],
            ),
        ),
        "ex53" => it(
            "ex53",
            "min e^-x - sqrt(xy) over the x-axis: infimum 0 not attained",
            0,
            "HypothesesFailed",
            scenario(
                2,
                vec![("M", x_axis())],
                vec![("f", FnSpec::ExpMinusSqrtProduct)],
                vec![TaskSpec::Solve(s("M"), s("f")), TaskSpec::Conditions(s("f"))],
            ),
        ),
        "remark51" => it(
            "remark51",
            "-sqrt(x) on x >= 0: horizon condition on sublevels holds, not coercive",
            0,
            "Cond9",
            scenario(
                1,
                vec![],
                vec![("g", FnSpec::Lift { index: 0, phi: PhiSpec::NegSqrt, a: None, beta: 0.0 })],
                vec![TaskSpec::Conditions(s("g"))],
            ),
        ),
        "l2_slices" | "l1_slices" => {
            let (c, d) = pair_specs(name, n)?;
            let (nm, anchor) = if name == "l2_slices" {
                ("l2_slices", "weighted simplex slices, truncated: gaps 2/(k+1)")
            } else {
                ("l1_slices", "weighted l1 slices, truncated: gaps 1/k")
            };
            it(
                nm,
                anchor,
                0,
                "StronglySeparated",
                scenario(
                    n,
                    vec![("C", c), ("D", d)],
                    vec![],
                    vec![TaskSpec::Separate(s("C"), s("D")), TaskSpec::GapTable { name: name.into(), n }],
                ),
            )
        }
        other => return Err(Error::UnknownName(other.into())),
    })
}

/// Run one item and mark its primary task against the expectation.
pub fn run_item(item: &GalleryItem, scenario: &Scenario, opts: RunOptions) -> Result<Report, RunError> {
    let mut r = run(scenario, opts)?;
    r.scenario = Some(item.name.into());
    for t in r.tasks.iter_mut() {
        if t.index == item.primary {
            t.anchor = Some(item.anchor.into());
            t.expected = Some(item.expected.into());
            t.matches = Some(t.status == item.expected);
        }
    }
    Ok(r)
}

/// Concatenate item reports, prefixing task labels with the item name.
pub fn merge(reports: Vec<Report>) -> Report {
    let mut tasks = Vec::new();
    let mut meta = None;
    let mut seed = 0;
    for r in reports {
        let item = r.scenario.clone().unwrap_or_default();
        seed = r.seed;
        if let Some(m) = r.meta {
            let total: &mut crate::report::Meta = meta.get_or_insert(crate::report::Meta { wall_time_ms: 0.0, ..m.clone() });
            total.wall_time_ms += m.wall_time_ms;
        }
        for mut t in r.tasks {
            t.task = format!("{item}:{}", t.task);
            t.index = tasks.len();
            tasks.push(t);
        }
    }
    Report {
        schema: crate::report::SCHEMA.into(),
        scenario: Some("gallery".into()),
        seed,
        meta,
        tasks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_item_builds_with_a_primary_task() {
        for name in NAMES {
            let it = item(name, None).unwrap();
            assert_eq!(it.name, name);
            assert!(it.primary < it.scenario.tasks.len());
            it.scenario.validate().unwrap();
        }
        assert!(matches!(item("nope", None), Err(Error::UnknownName(_))));
        assert!(item("l2_slices", Some(1)).is_err());
    }

    #[test]
    fn cone_rows() {
        let SetSpec::Hpoly { a, b } = truncated_cone(3) else { unreachable!() };
        assert_eq!(a.len(), 4);
        assert_eq!(a[1], vec![-0.5, 1.0, 0.0]);
        assert_eq!(b, vec![0.0; 4]);
    }
}
