//! Distances between convex sets, separating hyperplanes and
//! non-separability witnesses.

use nalgebra::{DMatrix, DVector};

use crate::catalog::Catalog1D;
use crate::cone::{h_cone_generators, recession_cone};
use crate::error::{check_dim, Error, Result};
use crate::geometry::{ConvexSet, Epigraph1D, HPolyhedron};
use crate::linalg::{normalized, unit};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::support::support;
use crate::{Matrix, Vector};

/// `{x : <xstar, x> = alpha}` with `sup_C <xstar, .> <= alpha <= inf_D <xstar, .>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    pub xstar: Vector,
    pub alpha: f64,
    /// Certified lower bound on `inf_D - sup_C`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapPair {
    pub k: usize,
    pub c: Vector,
    pub d: Vector,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeparationOutcome {
    StronglySeparated {
        hyperplane: Hyperplane,
        dist: f64,
        cp: Vector,
        dp: Vector,
    },
    SeparatedOnly {
        hyperplane: Hyperplane,
    },
    NotStronglySeparable {
        common_ray: Option<Vector>,
        gap_sequence: Vec<GapPair>,
    },
    Intersecting {
        point: Vector,
    },
}

impl SeparationOutcome {
    pub fn tag(&self) -> &'static str {
        match self {
            SeparationOutcome::StronglySeparated { .. } => "StronglySeparated",
            SeparationOutcome::SeparatedOnly { .. } => "SeparatedOnly",
            SeparationOutcome::NotStronglySeparable { .. } => "NotStronglySeparable",
            SeparationOutcome::Intersecting { .. } => "Intersecting",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceBounds {
    pub lower: f64,
    pub upper: f64,
    pub cp: Vector,
    pub dp: Vector,
    pub iterations: usize,
}

fn sigma(s: &ConvexSet, x: &Vector, tol: f64) -> Result<f64> {
    Ok(support(s, x, tol)?.value())
}

/// `inf_D <x*, .> - sup_C <x*, .>` for `x* = (dp - cp) / |dp - cp|`,
/// clipped at zero.
fn dual_bound(c: &ConvexSet, d: &ConvexSet, cp: &Vector, dp: &Vector, tol: f64) -> Result<f64> {
    let Some(x) = normalized(&(dp - cp)) else {
        return Ok(0.0);
    };
    let sc = sigma(c, &x, tol)?;
    let sd = sigma(d, &-&x, tol)?;
    let gap = -sd - sc;
    Ok(if gap.is_finite() { gap.max(0.0) } else { 0.0 })
}

/// Alternating projections with extrapolation along the last step.
pub fn distance(c: &ConvexSet, d: &ConvexSet, tol: f64, max_iter: usize) -> Result<DistanceBounds> {
    check_dim(c.dimension(), d.dimension())?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    let ptol = (tol * 1e-3).min(1e-9);
    let pc = |x: &Vector| c.project(x, ptol, 10_000);
    let pd = |x: &Vector| d.project(x, ptol, 10_000);

    let mut cx = pc(&c.point())?;
    let mut dx = pd(&cx)?;
    let mut gap = (&cx - &dx).norm();
    let mut beta = 1.0;
    let mut lower = 0.0;
    let mut since_bound = 0;
    for it in 1..=max_iter {
        if gap <= tol {
            lower = dual_bound(c, d, &cx, &dx, tol)?;
            return Ok(DistanceBounds { lower, upper: gap, cp: cx, dp: dx, iterations: it });
        }
        let cn = pc(&dx)?;
        let dn = pd(&cn)?;
        let gn = (&cn - &dn).norm();
        let step = &cn - &cx;
        let (mut cx_next, mut dx_next, mut g_next) = (cn, dn, gn);
        if step.norm() > 0.0 {
            loop {
                let cy = pc(&(&cx_next + &step * beta))?;
                let dy = pd(&cy)?;
                let gy = (&cy - &dy).norm();
                if gy < g_next {
                    (cx_next, dx_next, g_next) = (cy, dy, gy);
                    beta *= 2.0;
                    if beta > 1e12 || g_next <= tol {
                        break;
                    }
                } else {
                    beta = 1.0;
                    break;
                }
            }
        }
        let stalled = gap - g_next <= 1e-3 * tol;
        (cx, dx, gap) = (cx_next, dx_next, g_next);
        since_bound += 1;
        if stalled || since_bound >= 16 {
            since_bound = 0;
            lower = dual_bound(c, d, &cx, &dx, tol)?;
            if gap - lower <= tol {
                return Ok(DistanceBounds { lower, upper: gap, cp: cx, dp: dx, iterations: it });
            }
        }
    }
    if gap <= tol {
        lower = dual_bound(c, d, &cx, &dx, tol)?;
        return Ok(DistanceBounds { lower, upper: gap, cp: cx, dp: dx, iterations: max_iter });
    }
    Err(Error::Convergence {
        context: "distance",
        iterations: max_iter,
        residual: gap - lower,
        best: Some(cx),
        partner: Some(dx),
        bounds: Some((lower, gap)),
    })
}

const ESCALATIONS: u32 = 3;

/// Separation with the default budget of 10^4 iterations.
pub fn separate(c: &ConvexSet, d: &ConvexSet, tol: f64) -> Result<SeparationOutcome> {
    separate_with(c, d, tol, 10_000)
}

pub fn separate_with(c: &ConvexSet, d: &ConvexSet, tol: f64, max_iter: usize) -> Result<SeparationOutcome> {
    check_dim(c.dimension(), d.dimension())?;
    let mut last = None;
    for round in 0..=ESCALATIONS {
        let budget = max_iter * 4usize.pow(round);
        let b = match distance(c, d, tol, budget) {
            Ok(b) => b,
            Err(Error::Convergence { best: Some(cp), partner: Some(dp), bounds: Some((lower, upper)), iterations, .. }) => {
                DistanceBounds { lower, upper, cp, dp, iterations }
            }
            Err(e) => return Err(e),
        };
        if b.lower > tol {
            return strongly_separated(c, d, b, tol);
        }
        if b.upper <= tol {
            return zero_gap(c, d, b, tol);
        }
        if b.upper - b.lower <= tol {
            // converged inside the tie region
            last = Some(b);
            break;
        }
        last = Some(b);
    }
    let b = last.expect("at least one round");
    if let (ConvexSet::HPoly(hc), ConvexSet::HPoly(hd)) = (c, d) {
        if let Some(h) = weak_separator(hc, hd) {
            return Ok(SeparationOutcome::SeparatedOnly { hyperplane: h });
        }
    }
    Err(Error::Convergence {
        context: "separate",
        iterations: b.iterations,
        residual: b.upper - b.lower,
        best: Some(b.cp),
        partner: Some(b.dp),
        bounds: Some((b.lower, b.upper)),
    })
}

fn strongly_separated(c: &ConvexSet, d: &ConvexSet, b: DistanceBounds, tol: f64) -> Result<SeparationOutcome> {
    let xstar = normalized(&(&b.dp - &b.cp)).expect("positive gap");
    let sup_c = sigma(c, &xstar, tol)?;
    let inf_d = -sigma(d, &-&xstar, tol)?;
    Ok(SeparationOutcome::StronglySeparated {
        hyperplane: Hyperplane {
            xstar,
            alpha: 0.5 * (sup_c + inf_d),
            margin: b.lower,
        },
        dist: b.upper,
        cp: b.cp,
        dp: b.dp,
    })
}

fn zero_gap(c: &ConvexSet, d: &ConvexSet, b: DistanceBounds, tol: f64) -> Result<SeparationOutcome> {
    for v in common_rays(c, d) {
        if let Some(seq) = gap_sequence(c, d, &v, tol)? {
            return Ok(SeparationOutcome::NotStronglySeparable {
                common_ray: Some(v),
                gap_sequence: seq,
            });
        }
    }
    Ok(SeparationOutcome::Intersecting {
        point: (&b.cp + &b.dp) * 0.5,
    })
}

/// Generators of `rec(C) ∩ rec(D)` from the stacked H-representations.
pub fn common_rays(c: &ConvexSet, d: &ConvexSet) -> Vec<Vector> {
    let hc = recession_cone(c).to_h();
    let hd = recession_cone(d).to_h();
    let n = c.dimension();
    let h = DMatrix::from_fn(hc.nrows() + hd.nrows(), n, |i, j| {
        if i < hc.nrows() {
            hc[(i, j)]
        } else {
            hd[(i - hc.nrows(), j)]
        }
    });
    h_cone_generators(&h)
}

/// March `2^k` along `v` from the starting projection pair, re-project onto
/// the other set, and keep the strictly decreasing gaps.
fn gap_sequence(c: &ConvexSet, d: &ConvexSet, v: &Vector, tol: f64) -> Result<Option<Vec<GapPair>>> {
    let ptol = (tol * 1e-3).min(1e-9);
    let cp = c.project(&c.point(), ptol, 10_000)?;
    let dp = d.project(&cp, ptol, 10_000)?;
    for from_d in [true, false] {
        let mut seq: Vec<GapPair> = Vec::new();
        for k in 0..64 {
            let lam = 2f64.powi(k);
            let (cx, dx) = if from_d {
                let cx = c.project(&(&dp + v * lam), ptol, 10_000)?;
                let dx = d.project(&cx, ptol, 10_000)?;
                (cx, dx)
            } else {
                let dx = d.project(&(&cp + v * lam), ptol, 10_000)?;
                let cx = c.project(&dx, ptol, 10_000)?;
                (cx, dx)
            };
            let gap = (&cx - &dx).norm();
            if seq.last().is_none_or(|p| gap < p.gap) {
                seq.push(GapPair { k: k as usize, c: cx, d: dx, gap });
            }
            if gap < tol {
                break;
            }
        }
        let last = seq.last().map_or(f64::INFINITY, |p| p.gap);
        if seq.len() >= 2 && last > 0.0 && last < 10.0 * tol {
            return Ok(Some(seq));
        }
    }
    Ok(None)
}

/// Farkas LP: `u, w >= 0`, `A^T u + B^T w = 0`, `sum u + sum w = 1`,
/// minimizing `a.u + b.w`; a nonpositive optimum with `A^T u != 0`
/// separates.
fn weak_separator(c: &HPolyhedron, d: &HPolyhedron) -> Option<Hyperplane> {
    let (a, b) = (c.a(), d.a());
    let (mc, md, n) = (a.nrows(), b.nrows(), a.ncols());
    let obj: Vec<f64> = c.b().iter().chain(d.b().iter()).map(|x| -x).collect();
    let mut lp = LinearProgram::new(obj).with_nonneg(vec![true; mc + md]);
    for j in 0..n {
        let coeffs = a.column(j).iter().chain(b.column(j).iter()).cloned().collect();
        lp.add_row(coeffs, Relation::Eq, 0.0);
    }
    lp.add_row(vec![1.0; mc + md], Relation::Eq, 1.0);
    let LpOutcome::Optimal { x, value } = lp.solve() else {
        return None;
    };
    if -value > 1e-12 {
        return None;
    }
    let u = DVector::from_column_slice(&x[..mc]);
    let raw = a.transpose() * &u;
    let scale = raw.norm();
    let xstar = normalized(&raw)?;
    let w = DVector::from_column_slice(&x[mc..]);
    let sup_c = c.b().dot(&u) / scale;
    let inf_d = -d.b().dot(&w) / scale;
    Some(Hyperplane {
        xstar,
        alpha: 0.5 * (sup_c + inf_d),
        margin: (inf_d - sup_c).max(0.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedStatus {
    StronglySeparated,
    NotStronglySeparable,
}

impl ExpectedStatus {
    pub fn tag(&self) -> &'static str {
        match self {
            ExpectedStatus::StronglySeparated => "StronglySeparated",
            ExpectedStatus::NotStronglySeparable => "NotStronglySeparable",
        }
    }
}

/// A named pair of sets with point pairs whose gaps shrink.
#[derive(Debug, Clone)]
pub struct CounterexamplePair {
    pub c: ConvexSet,
    pub d: ConvexSet,
    pub expected: ExpectedStatus,
    pub gaps: Vec<GapPair>,
}

pub const COUNTEREXAMPLE_NAMES: [&str; 3] = ["hyperbola_line", "l2_slices", "l1_slices"];

/// `{x >= 0 : sum w_i x_i = 1}`.
fn weighted_slice(weights: &[f64]) -> Result<ConvexSet> {
    let n = weights.len();
    let mut a = DMatrix::zeros(n + 2, n);
    let mut b = DVector::zeros(n + 2);
    for (j, w) in weights.iter().enumerate() {
        a[(0, j)] = *w;
        a[(1, j)] = -w;
        a[(j + 2, j)] = -1.0;
    }
    b[0] = 1.0;
    b[1] = -1.0;
    Ok(HPolyhedron::new(a, b)?.into())
}

fn pair(k: usize, c: Vector, d: Vector) -> GapPair {
    let gap = (&c - &d).norm();
    GapPair { k, c, d, gap }
}

/// Finite-dimensional versions of the classical non-separable pairs.
pub fn counterexample_pair(name: &str, n: usize) -> Result<CounterexamplePair> {
    match name {
        "hyperbola_line" => {
            if n != 2 {
                return Err(Error::Invalid("hyperbola_line lives in R^2".into()));
            }
            let c: ConvexSet = Epigraph1D::new(Catalog1D::Reciprocal, 0.0)?.into();
            let line: Matrix = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, -1.0]);
            let d: ConvexSet = HPolyhedron::new(line, DVector::zeros(2))?.into();
            let gaps = (0..=10)
                .map(|k| {
                    let lam = 2f64.powi(k as i32);
                    pair(k, DVector::from_vec(vec![lam, 1.0 / lam]), DVector::from_vec(vec![lam, 0.0]))
                })
                .collect();
            Ok(CounterexamplePair { c, d, expected: ExpectedStatus::NotStronglySeparable, gaps })
        }
        "l2_slices" | "l1_slices" => {
            if n < 2 {
                return Err(Error::Invalid("slice truncations need n >= 2".into()));
            }
            let l2 = name == "l2_slices";
            let (wc, wd): (Vec<f64>, Vec<f64>) = (1..=n)
                .map(|i| {
                    let i = i as f64;
                    if l2 {
                        (1.0 / i, 1.0 / (i + 1.0))
                    } else {
                        (1.0, i / (i + 1.0))
                    }
                })
                .unzip();
            let gaps = (1..n)
                .map(|k| {
                    let kf = k as f64;
                    if l2 {
                        let xi = unit(n, k - 1) * kf;
                        let mut zeta = xi.clone();
                        zeta[0] += 2.0 / (kf + 1.0);
                        pair(k, xi, zeta)
                    } else {
                        let xi = unit(n, k - 1);
                        let zeta = &xi * ((kf + 1.0) / kf);
                        pair(k, xi, zeta)
                    }
                })
                .collect();
            Ok(CounterexamplePair {
                c: weighted_slice(&wc)?,
                d: weighted_slice(&wd)?,
                expected: ExpectedStatus::StronglySeparated,
                gaps,
            })
        }
        other => Err(Error::UnknownName(other.to_string())),
    }
}
