//! Horizon functions, the existence conditions built on them, and an
//! existence certifier with a projected-subgradient solver.

use nalgebra::DVector;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{clamp_to_domain, CatalogFn};
use crate::cone::{ssp_verdict, ConeRep, SspVerdict};
use crate::error::{check_dim, check_finite, Error, Result};
use crate::geometry::ConvexSet;
use crate::linalg::{normalized, sphere_directions, unit};
use crate::Vector;

#[derive(Debug, Clone, PartialEq)]
pub enum HorizonMethod {
    ClosedForm,
    /// Difference quotients at `lambda = 2^k`.
    NumericLimit { estimates: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorizonValue {
    pub value: f64,
    pub method: HorizonMethod,
}

fn check_direction(f: &CatalogFn, v: &Vector) -> Result<()> {
    check_dim(f.dim(), v.len())?;
    check_finite(v, "direction")?;
    if v.iter().all(|&x| x == 0.0) {
        return Err(Error::Invalid("horizon direction must be nonzero".into()));
    }
    Ok(())
}

/// Closed-form horizon value `f^inf(v)`.
pub fn horizon(f: &CatalogFn, v: &Vector) -> Result<HorizonValue> {
    check_direction(f, v)?;
    Ok(HorizonValue {
        value: f.horizon(v),
        method: HorizonMethod::ClosedForm,
    })
}

const LAMBDA_DOUBLINGS: i32 = 20;

/// Horizon value from difference quotients along `x0 + lambda v`, where
/// `x0` is the first catalog base point. Quotients whose increments stop
/// shrinking are read as `+inf`.
pub fn horizon_numeric(f: &CatalogFn, v: &Vector) -> Result<HorizonValue> {
    check_direction(f, v)?;
    let x0 = f.base_points().into_iter().find(|x| f.value(x).is_finite()).ok_or_else(|| {
        Error::Invalid("catalog function has no finite base point".into())
    })?;
    let f0 = f.value(&x0);
    let mut estimates = Vec::new();
    for k in 0..=LAMBDA_DOUBLINGS {
        let lam = 2f64.powi(k);
        let q = (f.value(&(&x0 + v * lam)) - f0) / lam;
        if !q.is_finite() || q > 1e12 {
            if estimates.is_empty() {
                return Ok(HorizonValue {
                    value: f64::INFINITY,
                    method: HorizonMethod::ClosedForm,
                });
            }
            return Ok(HorizonValue {
                value: f64::INFINITY,
                method: HorizonMethod::NumericLimit { estimates },
            });
        }
        estimates.push(q);
    }
    let k = estimates.len();
    let (d1, d2) = (estimates[k - 1] - estimates[k - 2], estimates[k - 2] - estimates[k - 3]);
    let value = if d1 > 1e-9 && d1 >= 0.9 * d2 {
        f64::INFINITY
    } else {
        estimates[k - 1]
    };
    Ok(HorizonValue {
        value,
        method: HorizonMethod::NumericLimit { estimates },
    })
}

/// `{v : f^inf(v) <= 0}`, exact for catalog functions.
pub fn horizon_zero_cone(f: &CatalogFn) -> ConeRep {
    ConeRep::PolyhedralH {
        a: f.horizon_zero_rows(),
    }
}

/// Three-valued verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Inconclusive,
}

impl Truth {
    pub fn tag(&self) -> &'static str {
        match self {
            Truth::True => "true",
            Truth::False => "false",
            Truth::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    Coercive,
    Cond9,
    Cond10,
}

impl ConditionKind {
    pub fn tag(&self) -> &'static str {
        match self {
            ConditionKind::Coercive => "coercive",
            ConditionKind::Cond9 => "cond9",
            ConditionKind::Cond10 => "cond10",
        }
    }
}

/// Values of `f(base + lambda v)` along a probed direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionProbe {
    pub direction: Vector,
    pub base: Option<Vector>,
    pub horizon: f64,
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
    pub diverges: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub condition: ConditionKind,
    pub holds: Truth,
    /// For false verdicts the first entry is the violating direction.
    pub witnesses: Vec<DirectionProbe>,
    /// Base points tried per direction (cond9) or sphere samples (coercive).
    pub samples: usize,
}

impl ConditionReport {
    pub fn witness(&self) -> Option<&DirectionProbe> {
        self.witnesses.first()
    }
}

/// Coercivity: `f^inf(v) > 0` for all `v != 0`.
pub fn check_coercive(f: &CatalogFn, tol: f64) -> ConditionReport {
    let gens = horizon_zero_cone(f).generators();
    let n = f.dim();
    let samples = sphere_directions(n, 512, 0);
    let probe = |v: &Vector| DirectionProbe {
        direction: v.clone(),
        base: None,
        horizon: f.horizon(v),
        lambdas: Vec::new(),
        values: Vec::new(),
        diverges: false,
    };
    if let Some(worst) = gens.iter().min_by(|a, b| f.horizon(a).total_cmp(&f.horizon(b))) {
        return ConditionReport {
            condition: ConditionKind::Coercive,
            holds: Truth::False,
            witnesses: vec![probe(worst)],
            samples: samples.len(),
        };
    }
    let min = samples.iter().min_by(|a, b| f.horizon(a).total_cmp(&f.horizon(b))).expect("nonempty");
    let holds = if f.horizon(min) > tol { Truth::True } else { Truth::False };
    ConditionReport {
        condition: ConditionKind::Coercive,
        holds,
        witnesses: vec![probe(min)],
        samples: samples.len(),
    }
}

/// Probe `f(x + 2^k v)` and decide divergence to `-inf`: the values must
/// decrease monotonically and either pass `-1e6` or keep decrements from
/// shrinking.
pub fn probe_divergence(f: &CatalogFn, x: &Vector, v: &Vector) -> DirectionProbe {
    let mut lambdas = Vec::new();
    let mut values = Vec::new();
    for k in 0..=LAMBDA_DOUBLINGS {
        let lam = 2f64.powi(k);
        lambdas.push(lam);
        values.push(f.value(&(x + v * lam)));
    }
    let f0 = f.value(x);
    let mut seq = vec![f0];
    seq.extend(values.iter().cloned());
    let monotone = seq.iter().all(|y| y.is_finite()) && seq.windows(2).all(|w| w[1] < w[0]);
    let last = *seq.last().expect("nonempty");
    let decs: Vec<f64> = seq.windows(2).map(|w| w[0] - w[1]).collect();
    let tail = &decs[decs.len() - 4..];
    let sustained = tail.windows(2).all(|w| w[1] >= 0.9 * w[0]);
    DirectionProbe {
        direction: v.clone(),
        base: Some(x.clone()),
        horizon: f.horizon(v),
        lambdas,
        values,
        diverges: monotone && (last < -1e6 || sustained),
    }
}

/// Directions to test: cone generators, then normalized pairwise sums,
/// ordered lexicographically (descending) for reproducible witnesses.
fn test_directions(f: &CatalogFn) -> Vec<Vector> {
    let mut gens = horizon_zero_cone(f).generators();
    gens.sort_by(|a, b| {
        b.iter()
            .zip(a.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out = gens.clone();
    for i in 0..gens.len() {
        for j in (i + 1)..gens.len() {
            if let Some(s) = normalized(&(&gens[i] + &gens[j])) {
                out.push(s);
            }
        }
    }
    out
}

fn default_bases(f: &CatalogFn) -> Vec<Vector> {
    let n = f.dim();
    let bounds = f.domain_bounds();
    let mut bases = f.base_points();
    let mut grid = vec![DVector::zeros(n)];
    for i in 0..n {
        grid.push(unit(n, i));
        grid.push(-unit(n, i));
    }
    for mut g in grid {
        clamp_to_domain(&mut g, &bounds, 1e-3);
        bases.push(g);
    }
    bases.retain(|x| f.value(x).is_finite());
    bases
}

/// Condition (10): every nonzero `v` with `f^inf(v) <= 0` admits some base
/// point along which `f` diverges to `-inf`.
pub fn check_cond10(f: &CatalogFn, _tol: f64) -> ConditionReport {
    let dirs = test_directions(f);
    let bases = default_bases(f);
    let mut witnesses = Vec::new();
    let mut holds = Truth::True;
    for v in &dirs {
        let mut found = None;
        let mut first_fail = None;
        for x in &bases {
            let p = probe_divergence(f, x, v);
            if p.diverges {
                found = Some(p);
                break;
            }
            first_fail.get_or_insert(p);
        }
        match found {
            Some(p) => witnesses.push(p),
            None => {
                holds = Truth::False;
                let fail = first_fail.unwrap_or_else(|| DirectionProbe {
                    direction: v.clone(),
                    base: None,
                    horizon: f.horizon(v),
                    lambdas: Vec::new(),
                    values: Vec::new(),
                    diverges: false,
                });
                witnesses.insert(0, fail);
                break;
            }
        }
    }
    ConditionReport {
        condition: ConditionKind::Cond10,
        holds,
        witnesses,
        samples: bases.len(),
    }
}

const COND9_SAMPLES: usize = 24;

/// 24 deterministic points of the domain, starting with the origin moved
/// into the domain.
fn domain_samples(f: &CatalogFn) -> Vec<Vector> {
    let n = f.dim();
    let bounds = f.domain_bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut out = Vec::with_capacity(COND9_SAMPLES);
    let mut origin = DVector::zeros(n);
    clamp_to_domain(&mut origin, &bounds, 1e-3);
    out.push(origin);
    out.extend(f.base_points());
    while out.len() < COND9_SAMPLES {
        let mut x = DVector::from_fn(n, |_, _| rng.random_range(-5.0..5.0));
        clamp_to_domain(&mut x, &bounds, 1e-3);
        out.push(x);
    }
    out.truncate(COND9_SAMPLES);
    out.retain(|x| f.value(x).is_finite());
    out
}

/// Condition (9): divergence along every such `v` from every sampled base
/// point. True verdicts are "true on the samples".
pub fn check_cond9(f: &CatalogFn, _tol: f64) -> ConditionReport {
    let dirs = test_directions(f);
    let bases = domain_samples(f);
    let mut witnesses = Vec::new();
    for v in &dirs {
        for x in &bases {
            let p = probe_divergence(f, x, v);
            if !p.diverges {
                return ConditionReport {
                    condition: ConditionKind::Cond9,
                    holds: Truth::False,
                    witnesses: vec![p],
                    samples: bases.len(),
                };
            }
        }
        if let Some(x) = bases.first() {
            witnesses.push(probe_divergence(f, x, v));
        }
    }
    ConditionReport {
        condition: ConditionKind::Cond9,
        holds: Truth::True,
        witnesses,
        samples: bases.len(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundedBelow {
    pub holds: Truth,
    /// Lowest objective value seen by the descent probe.
    pub probe_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vector,
    pub value: f64,
    pub kkt_residual: f64,
}

/// Which argument established existence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExistenceRoute {
    /// SSP of M, bounded below, condition (10).
    SspCond10,
    /// Condition (9) on every constraint of a sublevel M, bounded below,
    /// condition (10).
    SublevelCond9,
    /// M bounded (compact), f finite somewhere on it.
    BoundedConstraint,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Conclusion {
    NonemptyCompact(ExistenceRoute),
    HypothesesFailed(Vec<String>),
    Inconclusive(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceReport {
    pub ssp: SspVerdict,
    pub bounded_below: BoundedBelow,
    pub cond10: ConditionReport,
    /// Condition (9) per constraint when M is a sublevel system.
    pub cond9: Vec<ConditionReport>,
    pub conclusion: Conclusion,
    pub solution: Option<Solution>,
    pub nonattainment: bool,
    /// `(|x_k|, f(x_k))` samples from the last quarter of the best run.
    pub trace: Vec<(f64, f64)>,
}

const RESTARTS: usize = 10;
const UNBOUNDED_BELOW: f64 = -1e6;

struct Run {
    best_x: Vector,
    best_f: f64,
    trace: Vec<(f64, f64)>,
}

/// Check the existence hypotheses for `min f over M` and solve it.
pub fn certify_and_solve(m: &ConvexSet, f: &CatalogFn, tol: f64, max_iter: usize) -> Result<ExistenceReport> {
    check_dim(m.dimension(), f.dim())?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    let ssp = ssp_verdict(m, crate::Tolerances::default().cone)?;
    let cond10 = check_cond10(f, tol);
    let cond9: Vec<ConditionReport> = match m {
        ConvexSet::Sublevel(sys) => sys.constraints().iter().map(|g| check_cond9(g, tol)).collect(),
        _ => Vec::new(),
    };

    let runs = solve_runs(m, f, max_iter)?;
    let best = runs
        .into_iter()
        .min_by(|a, b| {
            a.best_f.total_cmp(&b.best_f).then_with(|| {
                a.best_x
                    .iter()
                    .zip(b.best_x.iter())
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        })
        .ok_or_else(|| Error::inconclusive("no feasible start in the domain of f", None))?;
    let probe_value = best.best_f.min(doubling_probe(m, f, &best.best_x, max_iter)?);
    let bounded_below = BoundedBelow {
        holds: if probe_value < UNBOUNDED_BELOW { Truth::False } else { Truth::True },
        probe_value,
    };
    let nonattainment = drifting(&best.trace, tol);

    let ssp_ok = ssp.has_ssp();
    let bb_ok = bounded_below.holds == Truth::True;
    let c10_ok = cond10.holds == Truth::True;
    let c9_ok = !cond9.is_empty() && cond9.iter().all(|r| r.holds == Truth::True);
    let conclusion = if ssp_ok && bb_ok && c10_ok {
        Conclusion::NonemptyCompact(ExistenceRoute::SspCond10)
    } else if c9_ok && bb_ok && c10_ok {
        Conclusion::NonemptyCompact(ExistenceRoute::SublevelCond9)
    } else if m.is_bounded() && best.best_f.is_finite() {
        Conclusion::NonemptyCompact(ExistenceRoute::BoundedConstraint)
    } else {
        let mut failed = Vec::new();
        let mut unknown = Vec::new();
        match &ssp.status {
            crate::cone::SspStatus::HasSsp => {}
            crate::cone::SspStatus::LacksSsp { .. } => failed.push("ssp".to_string()),
            crate::cone::SspStatus::Inconclusive => unknown.push("ssp".to_string()),
        }
        if !bb_ok {
            failed.push("bounded_below".into());
        }
        match cond10.holds {
            Truth::True => {}
            Truth::False => failed.push("cond10".into()),
            Truth::Inconclusive => unknown.push("cond10".into()),
        }
        if failed.is_empty() {
            Conclusion::Inconclusive(unknown)
        } else {
            Conclusion::HypothesesFailed(failed)
        }
    };

    let mut report = ExistenceReport {
        ssp,
        bounded_below,
        cond10,
        cond9,
        conclusion,
        solution: None,
        nonattainment,
        trace: best.trace.clone(),
    };
    if !bb_ok {
        return Ok(report);
    }
    let mut x = best.best_x;
    let mut kkt = kkt_residual(m, f, &x)?;
    if kkt > tol {
        x = polish(m, f, x, tol, max_iter)?;
        kkt = kkt_residual(m, f, &x)?;
    }
    let solution = Solution {
        value: f.value(&x),
        x,
        kkt_residual: kkt,
    };
    if kkt > tol {
        report.solution = None;
        if matches!(report.conclusion, Conclusion::NonemptyCompact(_)) {
            report.trace.push((solution.x.norm(), solution.value));
            return Err(Error::SolveIncomplete(Box::new(report)));
        }
        return Ok(report);
    }
    report.solution = Some(solution);
    Ok(report)
}

/// Feasible starts inside dom f: base points of f and seeded perturbations,
/// projected onto M.
fn starts(m: &ConvexSet, f: &CatalogFn, max_iter: usize) -> Result<Vec<Vector>> {
    let tol = crate::Tolerances::default().projection;
    let n = f.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut anchors = f.base_points();
    anchors.push(m.point());
    let mut out = Vec::new();
    let mut attempt = 0;
    while out.len() < RESTARTS && attempt < 20 * RESTARTS {
        let anchor = &anchors[attempt % anchors.len()];
        let jitter = if attempt < anchors.len() {
            DVector::zeros(n)
        } else {
            DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
        };
        attempt += 1;
        let p = match m.project(&(anchor + jitter), tol, max_iter) {
            Ok(p) => p,
            Err(Error::Convergence { .. }) => continue,
            Err(e) => return Err(e),
        };
        if f.value(&p).is_finite() {
            out.push(p);
        }
    }
    Ok(out)
}

fn solve_runs(m: &ConvexSet, f: &CatalogFn, max_iter: usize) -> Result<Vec<Run>> {
    let tol = crate::Tolerances::default().projection;
    let budget = (max_iter / RESTARTS).max(200);
    let mut runs = Vec::new();
    for x0 in starts(m, f, max_iter)? {
        let a = x0.norm().max(1.0);
        let mut x = x0.clone();
        let mut fx = f.value(&x);
        let mut best = (fx, x.clone());
        let mut trace = Vec::new();
        for k in 1..=budget {
            let g = f.descent_gradient(&x);
            let Some(dir) = normalized(&g) else { break };
            let step = a / (k as f64).sqrt();
            let y = match m.project(&(&x - dir * step), tol, max_iter) {
                Ok(y) => y,
                Err(Error::Convergence { .. }) => break,
                Err(e) => return Err(e),
            };
            let fy = f.value(&y);
            if !fy.is_finite() {
                break;
            }
            x = y;
            fx = fy;
            if fx < best.0 {
                best = (fx, x.clone());
            }
            if 4 * k >= 3 * budget {
                trace.push((x.norm(), fx));
            }
            if fx < UNBOUNDED_BELOW {
                break;
            }
        }
        let _ = fx;
        runs.push(Run {
            best_x: best.1,
            best_f: best.0,
            trace,
        });
    }
    Ok(runs)
}

/// Lowest value of `f(P_M(x - 2^k d))` for the normalized descent
/// direction `d`, `k < 40`.
fn doubling_probe(m: &ConvexSet, f: &CatalogFn, x: &Vector, max_iter: usize) -> Result<f64> {
    let tol = crate::Tolerances::default().projection;
    let mut low = f.value(x);
    let Some(dir) = normalized(&f.descent_gradient(x)) else {
        return Ok(low);
    };
    for k in 0..40 {
        let y = match m.project(&(x - &dir * 2f64.powi(k)), tol, max_iter) {
            Ok(y) => y,
            Err(Error::Convergence { .. }) => break,
            Err(e) => return Err(e),
        };
        let fy = f.value(&y);
        if fy.is_finite() {
            low = low.min(fy);
        }
        if low < UNBOUNDED_BELOW {
            break;
        }
    }
    Ok(low)
}

/// Norms keep growing over the trace while the objective barely moves.
fn drifting(trace: &[(f64, f64)], tol: f64) -> bool {
    if trace.len() < 8 {
        return false;
    }
    let (n0, f0) = trace[0];
    let (n1, f1) = *trace.last().expect("nonempty");
    let rising = trace.windows(2).filter(|w| w[1].0 > w[0].0).count();
    n1 > 1.05 * n0 && rising * 10 >= (trace.len() - 1) * 9 && (f0 - f1).abs() < tol
}

/// `|P_M(x - g) - x|` for the descent gradient `g`.
pub fn kkt_residual(m: &ConvexSet, f: &CatalogFn, x: &Vector) -> Result<f64> {
    let g = f.descent_gradient(x);
    let p = m.project(&(x - g), 1e-12, 10_000).or_else(|e| match e {
        Error::Convergence { best: Some(b), .. } => Ok(b),
        other => Err(other),
    })?;
    Ok((p - x).norm())
}

/// Projected gradient with Armijo backtracking.
fn polish(m: &ConvexSet, f: &CatalogFn, mut x: Vector, tol: f64, max_iter: usize) -> Result<Vector> {
    let ptol = 1e-12;
    let mut fx = f.value(&x);
    let mut t = 1.0;
    for _ in 0..max_iter.min(5_000) {
        let g = f.descent_gradient(&x);
        let mut accepted = false;
        for _ in 0..60 {
            let y = match m.project(&(&x - &g * t), ptol, max_iter) {
                Ok(y) => y,
                Err(Error::Convergence { best: Some(b), .. }) => b,
                Err(e) => return Err(e),
            };
            let fy = f.value(&y);
            let d = &y - &x;
            if fy.is_finite() && fy <= fx + g.dot(&d) + d.norm_squared() / (2.0 * t) {
                accepted = d.norm() > 0.0 && fy <= fx;
                if accepted {
                    x = y;
                    fx = fy;
                }
                break;
            }
            t *= 0.5;
        }
        if !accepted || kkt_residual(m, f, &x)? <= 0.01 * tol {
            break;
        }
        t *= 2.0;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog1D;
    use crate::geometry::{Ball, Epigraph1D, HPolyhedron};
    use nalgebra::DMatrix;

    fn v(xs: &[f64]) -> Vector {
        DVector::from_column_slice(xs)
    }

    fn ex52_f() -> CatalogFn {
        CatalogFn::lift(2, 0, Catalog1D::Square, Some(v(&[0.0, 1.0])), 0.0).unwrap()
    }

    #[test]
    fn horizon_examples() {
        assert_eq!(horizon(&ex52_f(), &v(&[0.0, -1.0])).unwrap().value, -1.0);
        let ex53 = CatalogFn::exp_minus_sqrt_product();
        assert_eq!(horizon(&ex53, &v(&[1.0, 1.0])).unwrap().value, -1.0);
        let h1 = horizon(&ex53, &v(&[1.0, 4.0])).unwrap().value;
        let h3 = horizon(&ex53, &v(&[3.0, 12.0])).unwrap().value;
        assert!((h3 - 3.0 * h1).abs() < 1e-12);
    }

    #[test]
    fn numeric_horizon_agrees() {
        let h = horizon_numeric(&ex52_f(), &v(&[0.0, -1.0])).unwrap();
        assert!((h.value + 1.0).abs() < 1e-12);
        let h = horizon_numeric(&ex52_f(), &v(&[1.0, 0.0])).unwrap();
        assert!(h.value.is_infinite());
    }

    #[test]
    fn zero_cone_of_example_function() {
        let g = horizon_zero_cone(&ex52_f()).generators();
        assert_eq!(g.len(), 1);
        assert!((&g[0] - v(&[0.0, -1.0])).norm() < 1e-12);
    }

    #[test]
    fn coercivity() {
        let r = check_coercive(&ex52_f(), 1e-9);
        assert_eq!(r.holds, Truth::False);
        let w = &r.witness().unwrap().direction;
        assert!(w[0].abs() < 1e-12 && w[1] < 0.0);
        let sq = CatalogFn::quadratic(DMatrix::identity(2, 2), v(&[0.0, 0.0]), 0.0).unwrap();
        assert_eq!(check_coercive(&sq, 1e-9).holds, Truth::True);
    }

    #[test]
    fn ex53_conditions() {
        let f = CatalogFn::exp_minus_sqrt_product();
        let c10 = check_cond10(&f, 1e-9);
        assert_eq!(c10.holds, Truth::True);
        let c9 = check_cond9(&f, 1e-9);
        assert_eq!(c9.holds, Truth::False);
        let w = c9.witness().unwrap();
        assert_eq!(w.direction, v(&[1.0, 0.0]));
        assert_eq!(w.base.as_ref().unwrap(), &v(&[0.0, 0.0]));
        for (lam, val) in w.lambdas.iter().zip(&w.values) {
            assert!((val - (-lam).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn neg_sqrt_satisfies_cond9() {
        let f = CatalogFn::lift(1, 0, Catalog1D::NegSqrtDom, None, 0.0).unwrap();
        assert_eq!(check_cond9(&f, 1e-9).holds, Truth::True);
        assert_eq!(check_coercive(&f, 1e-9).holds, Truth::False);
    }

    #[test]
    fn constant_affine_fails_cond9() {
        let f = CatalogFn::affine(v(&[0.0, 0.0]), 1.0).unwrap();
        assert_eq!(check_cond9(&f, 1e-9).holds, Truth::False);
    }

    #[test]
    fn parabola_problem_solves() {
        let m: ConvexSet = Epigraph1D::new(Catalog1D::Square, 0.0).unwrap().into();
        let r = certify_and_solve(&m, &ex52_f(), 1e-6, 10_000).unwrap();
        assert_eq!(r.conclusion, Conclusion::NonemptyCompact(ExistenceRoute::SspCond10));
        let s = r.solution.unwrap();
        assert!(s.x.norm() <= 1e-5 && s.value.abs() <= 1e-6, "{s:?}");
    }

    #[test]
    fn ex53_on_axis() {
        let m: ConvexSet = HPolyhedron::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, -1.0]), v(&[0.0, 0.0]))
            .unwrap()
            .into();
        let r = certify_and_solve(&m, &CatalogFn::exp_minus_sqrt_product(), 1e-6, 10_000).unwrap();
        assert_eq!(r.conclusion, Conclusion::HypothesesFailed(vec!["ssp".into()]));
        assert!(r.nonattainment);
        let s = r.solution.unwrap();
        assert!(s.value > 0.0 && s.value < 1e-3, "{s:?}");
    }

    #[test]
    fn linear_over_ball() {
        let m: ConvexSet = Ball::new(v(&[0.0, 0.0]), 1.0).unwrap().into();
        let f = CatalogFn::affine(v(&[1.0, 0.0]), 0.0).unwrap();
        let r = certify_and_solve(&m, &f, 1e-6, 10_000).unwrap();
        assert!(matches!(r.conclusion, Conclusion::NonemptyCompact(_)));
        let s = r.solution.unwrap();
        assert!((s.x - v(&[-1.0, 0.0])).norm() < 1e-6);
        assert!((s.value + 1.0).abs() < 1e-9);
    }
}
