//! Task execution.

use std::time::Instant;

use barricade_core::cone::interior_barrier_nonempty;
use barricade_core::horizon::{BoundedBelow, ConditionReport, DirectionProbe};
use barricade_core::separation::{counterexample_pair, separate_with, GapPair};
use barricade_core::{
    certify_and_solve, check_coercive, check_cond10, check_cond9, classify_barrier, recession_cone, ssp_verdict,
    support, BarrierClassification, CatalogFn, Conclusion, ConvexSet, Error, ExistenceReport, ExistenceRoute,
    SeparationOutcome, SspStatus, SupportValue, Truth, Unbounded, Vector,
};
use serde_json::{json, Value};
use thiserror::Error;

use crate::report::{num, nums, vec_value, Meta, Report, TaskResult, SCHEMA};
use crate::scenario::{Model, Scenario, ScenarioError, TaskSpec};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("resource exhausted: {0}")]
    Resource(String),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub parallel: bool,
    /// Attach wall times.
    pub meta: bool,
    /// Keep only solve and conditions tasks.
    pub solve_only: bool,
}

struct Outcome {
    status: String,
    certificate: Value,
    bounds: Option<Value>,
}

impl Outcome {
    fn new(status: impl Into<String>, certificate: Value) -> Self {
        Outcome {
            status: status.into(),
            certificate,
            bounds: None,
        }
    }

    fn bounds(mut self, b: Value) -> Self {
        self.bounds = Some(b);
        self
    }
}

pub fn run(scenario: &Scenario, opts: RunOptions) -> Result<Report, RunError> {
    let start = Instant::now();
    let model = scenario.build()?;
    let tasks: Vec<(usize, &TaskSpec)> = scenario
        .tasks
        .iter()
        .enumerate()
        .filter(|(_, t)| !opts.solve_only || t.is_solve())
        .collect();
    let exec = |(i, t): &(usize, &TaskSpec)| -> Result<TaskResult, RunError> {
        let t0 = Instant::now();
        let o = execute(scenario, &model, t)?;
        Ok(TaskResult {
            index: *i,
            task: t.label(),
            status: o.status,
            certificate: o.certificate,
            bounds: o.bounds,
            anchor: None,
            expected: None,
            matches: None,
            wall_time_ms: opts.meta.then(|| t0.elapsed().as_secs_f64() * 1e3),
        })
    };
    let results: Vec<Result<TaskResult, RunError>> = if opts.parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = tasks.iter().map(|t| scope.spawn(move || exec(t))).collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|_| Err(RunError::Resource("worker thread panicked".into()))))
                .collect()
        })
    } else {
        tasks.iter().map(exec).collect()
    };
    let tasks = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Report {
        schema: SCHEMA.into(),
        scenario: None,
        seed: scenario.seed,
        meta: opts.meta.then(|| Meta {
            tool: "barricade".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        }),
        tasks,
    })
}

fn execute(sc: &Scenario, m: &Model, task: &TaskSpec) -> Result<Outcome, RunError> {
    let tol = sc.tolerances;
    let r = match task {
        TaskSpec::Analyze(s) => analyze(&m.sets[s], tol.tol),
        TaskSpec::Separate(a, b) => separate_task(&m.sets[a], &m.sets[b], tol.tol, tol.max_iter),
        TaskSpec::Ssp(s) => ssp_task(&m.sets[s], tol.tol),
        TaskSpec::Solve(s, f) => solve_task(&m.sets[s], &m.functions[f], tol.solve_tol, tol.max_iter),
        TaskSpec::Classify(s, x) => classify_task(&m.sets[s], &Vector::from_column_slice(x), tol.tol),
        TaskSpec::Conditions(f) => Ok(conditions_task(&m.functions[f], tol.solve_tol)),
        TaskSpec::GapTable { name, n } => gap_table(name, *n),
    };
    r.or_else(error_outcome)
}

/// Convergence and inconclusive failures become statuses; deadlines abort.
fn error_outcome(e: Error) -> Result<Outcome, RunError> {
    Ok(match e {
        Error::Deadline(what) => return Err(RunError::Resource(what.into())),
        Error::Convergence {
            context,
            iterations,
            residual,
            best,
            partner,
            bounds,
        } => {
            let o = Outcome::new(
                "ConvergenceError",
                json!({
                    "context": context,
                    "iterations": iterations,
                    "residual": num(residual),
                    "best": best.as_ref().map(vec_value),
                    "partner": partner.as_ref().map(vec_value),
                }),
            );
            match bounds {
                Some((lo, hi)) => o.bounds(json!({"lower": num(lo), "upper": num(hi)})),
                None => o,
            }
        }
        Error::Inconclusive { context, lower_bound } => {
            let o = Outcome::new("Inconclusive", json!({ "context": context }));
            match lower_bound {
                Some(lo) => o.bounds(json!({ "lower": num(lo) })),
                None => o,
            }
        }
        Error::SolveIncomplete(rep) => Outcome::new("ConvergenceError", existence_json(&rep)),
        other => Outcome::new(other.kind(), json!({ "message": other.to_string() })),
    })
}

fn support_json(sv: &SupportValue) -> Value {
    match sv {
        SupportValue::Finite { value, argsup } => json!({
            "finite": true,
            "value": num(*value),
            "argsup": argsup.as_ref().map(vec_value),
        }),
        SupportValue::Infinite(Unbounded::Ray(r)) => json!({"finite": false, "ray": vec_value(r)}),
        SupportValue::Infinite(Unbounded::Path(p)) => json!({
            "finite": false,
            "path": p.iter().map(vec_value).collect::<Vec<_>>(),
        }),
    }
}

fn classification_json(c: &BarrierClassification) -> Value {
    match c {
        BarrierClassification::InteriorPoint { alpha, radius } => {
            json!({"class": "InteriorPoint", "alpha": num(*alpha), "radius": num(*radius)})
        }
        BarrierClassification::BoundaryPoint => json!({"class": "BoundaryPoint"}),
        BarrierClassification::Outside(u) => match u {
            Unbounded::Ray(r) => json!({"class": "Outside", "ray": vec_value(r)}),
            Unbounded::Path(p) => json!({"class": "Outside", "path": p.iter().map(vec_value).collect::<Vec<_>>()}),
        },
    }
}

fn class_tag(c: &BarrierClassification) -> &'static str {
    match c {
        BarrierClassification::InteriorPoint { .. } => "InteriorPoint",
        BarrierClassification::BoundaryPoint => "BoundaryPoint",
        BarrierClassification::Outside(_) => "Outside",
    }
}

/// Sign patterns in {-1,0,1}^n for n <= 3, coordinate directions otherwise.
fn probe_directions(n: usize) -> Vec<Vector> {
    if n <= 3 {
        let mut out = Vec::new();
        for code in 0..3usize.pow(n as u32) {
            let mut c = code;
            let v = Vector::from_fn(n, |_, _| {
                let d = (c % 3) as f64 - 1.0;
                c /= 3;
                d
            });
            if v.iter().any(|&x| x != 0.0) {
                out.push(v);
            }
        }
        out
    } else {
        (0..n)
            .flat_map(|i| [1.0, -1.0].map(|s| Vector::from_fn(n, |j, _| if j == i { s } else { 0.0 })))
            .collect()
    }
}

fn analyze(s: &ConvexSet, tol: f64) -> Result<Outcome, Error> {
    let rec = recession_cone(s);
    let bounded = s.is_bounded();
    let mut probes = Vec::new();
    for d in probe_directions(s.dimension()) {
        let sv = support(s, &d, tol)?;
        let class = classify_barrier(s, &d, tol)?;
        probes.push(json!({
            "direction": vec_value(&d),
            "support": support_json(&sv),
            "barrier": classification_json(&class),
        }));
    }
    let cert = json!({
        "kind": s.kind_name(),
        "dimension": s.dimension(),
        "bounded": bounded,
        "recession": {
            "exact": rec.is_exact(),
            "generators": rec.generators().iter().map(vec_value).collect::<Vec<_>>(),
        },
        "interior_barrier_nonempty": interior_barrier_nonempty(s),
        "probes": probes,
    });
    Ok(Outcome::new(if bounded { "Bounded" } else { "Unbounded" }, cert))
}

fn hyperplane_json(h: &barricade_core::Hyperplane) -> Value {
    json!({"xstar": vec_value(&h.xstar), "alpha": num(h.alpha), "margin": num(h.margin)})
}

fn gaps_json(gaps: &[GapPair]) -> Value {
    Value::Array(
        gaps.iter()
            .map(|g| json!({"k": g.k, "gap": num(g.gap), "c": vec_value(&g.c), "d": vec_value(&g.d)}))
            .collect(),
    )
}

fn separate_task(c: &ConvexSet, d: &ConvexSet, tol: f64, max_iter: usize) -> Result<Outcome, Error> {
    let out = separate_with(c, d, tol, max_iter)?;
    let tag = out.tag();
    Ok(match &out {
        SeparationOutcome::StronglySeparated { hyperplane, dist, cp, dp } => {
            let sc = support(c, &hyperplane.xstar, tol)?.value();
            let sd = support(d, &-&hyperplane.xstar, tol)?.value();
            let revalidated = -sd - sc;
            Outcome::new(
                tag,
                json!({
                    "hyperplane": hyperplane_json(hyperplane),
                    "revalidated_margin": num(revalidated),
                    "dist": num(*dist),
                    "cp": vec_value(cp),
                    "dp": vec_value(dp),
                }),
            )
            .bounds(json!({"lower": num(hyperplane.margin), "upper": num(*dist)}))
        }
        SeparationOutcome::SeparatedOnly { hyperplane } => {
            Outcome::new(tag, json!({ "hyperplane": hyperplane_json(hyperplane) }))
        }
        SeparationOutcome::NotStronglySeparable { common_ray, gap_sequence } => {
            let last = gap_sequence.last().map_or(f64::INFINITY, |g| g.gap);
            Outcome::new(
                tag,
                json!({
                    "common_ray": common_ray.as_ref().map(vec_value),
                    "gap_sequence": gaps_json(gap_sequence),
                }),
            )
            .bounds(json!({"lower": num(0.0), "upper": num(last)}))
        }
        SeparationOutcome::Intersecting { point } => {
            Outcome::new(tag, json!({ "point": vec_value(point) })).bounds(json!({"lower": num(0.0), "upper": num(0.0)}))
        }
    })
}

fn ssp_task(s: &ConvexSet, tol: f64) -> Result<Outcome, Error> {
    let v = ssp_verdict(s, tol)?;
    Ok(match &v.status {
        SspStatus::HasSsp => Outcome::new("HasSSP", json!({ "rule": v.rule.tag() })),
        SspStatus::LacksSsp { witness } => {
            let class = classify_barrier(s, witness, tol)?;
            let sv = support(s, witness, tol)?;
            Outcome::new(
                "LacksSSP",
                json!({
                    "rule": v.rule.tag(),
                    "witness": vec_value(witness),
                    "witness_support": support_json(&sv),
                    "witness_barrier": classification_json(&class),
                }),
            )
        }
        SspStatus::Inconclusive => Outcome::new("Inconclusive", json!({ "rule": v.rule.tag() })),
    })
}

fn classify_task(s: &ConvexSet, x: &Vector, tol: f64) -> Result<Outcome, Error> {
    let class = classify_barrier(s, x, tol)?;
    let sv = support(s, x, tol)?;
    Ok(Outcome::new(
        class_tag(&class),
        json!({"xstar": vec_value(x), "barrier": classification_json(&class), "support": support_json(&sv)}),
    ))
}

fn probe_json(p: &DirectionProbe) -> Value {
    json!({
        "direction": vec_value(&p.direction),
        "base": p.base.as_ref().map(vec_value),
        "horizon": num(p.horizon),
        "lambdas": nums(&p.lambdas),
        "values": nums(&p.values),
        "diverges": p.diverges,
    })
}

fn condition_json(c: &ConditionReport) -> Value {
    json!({
        "condition": c.condition.tag(),
        "holds": c.holds.tag(),
        "samples": c.samples,
        "witness": c.witness().map(probe_json),
    })
}

fn bounded_below_json(b: &BoundedBelow) -> Value {
    json!({"holds": b.holds.tag(), "probe_value": num(b.probe_value)})
}

fn route_tag(r: ExistenceRoute) -> &'static str {
    match r {
        ExistenceRoute::SspCond10 => "ssp_cond10",
        ExistenceRoute::SublevelCond9 => "sublevel_cond9",
        ExistenceRoute::BoundedConstraint => "bounded_constraint",
    }
}

fn existence_json(r: &ExistenceReport) -> Value {
    let (route, failed, open) = match &r.conclusion {
        Conclusion::NonemptyCompact(route) => (Some(route_tag(*route)), vec![], vec![]),
        Conclusion::HypothesesFailed(h) => (None, h.clone(), vec![]),
        Conclusion::Inconclusive(h) => (None, vec![], h.clone()),
    };
    json!({
        "route": route,
        "failed": failed,
        "undecided": open,
        "ssp": {
            "status": match &r.ssp.status {
                SspStatus::HasSsp => "HasSSP",
                SspStatus::LacksSsp { .. } => "LacksSSP",
                SspStatus::Inconclusive => "Inconclusive",
            },
            "rule": r.ssp.rule.tag(),
            "witness": r.ssp.witness().map(vec_value),
        },
        "bounded_below": bounded_below_json(&r.bounded_below),
        "cond10": condition_json(&r.cond10),
        "cond9": r.cond9.iter().map(condition_json).collect::<Vec<_>>(),
        "solution": r.solution.as_ref().map(|s| json!({
            "x": vec_value(&s.x),
            "value": num(s.value),
            "kkt_residual": num(s.kkt_residual),
        })),
        "nonattainment": r.nonattainment,
    })
}

fn conclusion_tag(c: &Conclusion) -> &'static str {
    match c {
        Conclusion::NonemptyCompact(_) => "NonemptyCompact",
        Conclusion::HypothesesFailed(_) => "HypothesesFailed",
        Conclusion::Inconclusive(_) => "Inconclusive",
    }
}

fn solve_task(m: &ConvexSet, f: &CatalogFn, tol: f64, max_iter: usize) -> Result<Outcome, Error> {
    let r = certify_and_solve(m, f, tol, max_iter)?;
    let o = Outcome::new(conclusion_tag(&r.conclusion), existence_json(&r));
    Ok(match &r.solution {
        Some(s) => o.bounds(json!({ "upper": num(s.value) })),
        None => o,
    })
}

fn conditions_task(f: &CatalogFn, tol: f64) -> Outcome {
    let reports = [check_coercive(f, tol), check_cond9(f, tol), check_cond10(f, tol)];
    let status = if let Some(r) = reports.iter().find(|r| r.holds == Truth::True) {
        match r.condition.tag() {
            "coercive" => "Coercive",
            "cond9" => "Cond9",
            _ => "Cond10",
        }
    } else if reports.iter().any(|r| r.holds == Truth::Inconclusive) {
        "Inconclusive"
    } else {
        "None"
    };
    Outcome::new(
        status,
        json!({
            "function": f.label(),
            "conditions": reports.iter().map(condition_json).collect::<Vec<_>>(),
        }),
    )
}

fn gap_table(name: &str, n: usize) -> Result<Outcome, Error> {
    let p = counterexample_pair(name, n)?;
    let decreasing = p.gaps.windows(2).all(|w| w[1].gap < w[0].gap);
    let rows: Vec<Value> = p.gaps.iter().map(|g| json!({"k": g.k, "gap": num(g.gap)})).collect();
    Ok(Outcome::new(
        if decreasing { "StrictlyDecreasing" } else { "NotDecreasing" },
        json!({"name": name, "n": n, "expected_separation": p.expected.tag(), "rows": rows}),
    ))
}
