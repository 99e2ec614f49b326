//! Support functions `sigma_C(x*) = sup { <x*, c> : c in C }`.

use nalgebra::DVector;

use crate::cone::recession_cone;
use crate::error::{check_dim, check_finite, Error, Result};
use crate::geometry::{ConvexSet, Epigraph1D, SublevelSystem};
use crate::linalg::{normalized, sphere_directions};
use crate::lp::LpOutcome;
use crate::Vector;

/// Why a support value is infinite.
#[derive(Debug, Clone, PartialEq)]
pub enum Unbounded {
    /// A unit recession direction with positive pairing.
    Ray(Vector),
    /// Points of the set along which the pairing grows without bound; used
    /// where no recession direction pairs positively.
    Path(Vec<Vector>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SupportValue {
    Finite { value: f64, argsup: Option<Vector> },
    Infinite(Unbounded),
}

impl SupportValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, SupportValue::Finite { .. })
    }

    /// The value, `+inf` when infinite.
    pub fn value(&self) -> f64 {
        match self {
            SupportValue::Finite { value, .. } => *value,
            SupportValue::Infinite(_) => f64::INFINITY,
        }
    }

    pub fn ray(&self) -> Option<&Vector> {
        match self {
            SupportValue::Infinite(Unbounded::Ray(r)) => Some(r),
            _ => None,
        }
    }
}

/// Support function of `s` at `xstar`.
pub fn support(s: &ConvexSet, xstar: &Vector, tol: f64) -> Result<SupportValue> {
    check_dim(s.dimension(), xstar.len())?;
    check_finite(xstar, "dual vector")?;
    if xstar.iter().all(|&x| x == 0.0) {
        return Ok(SupportValue::Finite {
            value: 0.0,
            argsup: Some(s.point()),
        });
    }
    match s {
        ConvexSet::HPoly(p) => Ok(match p.maximize(xstar) {
            LpOutcome::Optimal { x, value } => SupportValue::Finite {
                value,
                argsup: Some(DVector::from_vec(x)),
            },
            LpOutcome::Unbounded { ray } => {
                let r = normalized(&DVector::from_vec(ray)).expect("simplex ray is nonzero");
                SupportValue::Infinite(Unbounded::Ray(r))
            }
            LpOutcome::Infeasible => unreachable!("polyhedra are nonempty by construction"),
        }),
        ConvexSet::VSet(v) => {
            let scale = xstar.norm();
            if let Some(r) = v.rays().iter().find(|r| r.dot(xstar) > 1e-12 * scale) {
                return Ok(SupportValue::Infinite(Unbounded::Ray(r.clone())));
            }
            let best = v
                .points()
                .iter()
                .max_by(|a, b| a.dot(xstar).total_cmp(&b.dot(xstar)))
                .expect("nonempty");
            Ok(SupportValue::Finite {
                value: best.dot(xstar),
                argsup: Some(best.clone()),
            })
        }
        ConvexSet::Ball(b) => {
            let n = xstar.norm();
            Ok(SupportValue::Finite {
                value: xstar.dot(b.center()) + b.radius() * n,
                argsup: Some(b.center() + xstar * (b.radius() / n)),
            })
        }
        ConvexSet::Epigraph(e) => Ok(epigraph_support(e, xstar[0], xstar[1])),
        ConvexSet::Sublevel(sys) => sublevel_support(s, sys, xstar, tol),
    }
}

pub fn in_barrier_cone(s: &ConvexSet, xstar: &Vector, tol: f64) -> Result<bool> {
    Ok(support(s, xstar, tol)?.is_finite())
}

fn epigraph_support(e: &Epigraph1D, u: f64, v: f64) -> SupportValue {
    let phi = e.phi();
    let h = e.shift();
    let pairing = |g: &Vector| u * g[0] + v * g[1];
    let scale = u.hypot(v);
    let ray = || {
        phi.epigraph_recession_generators()
            .into_iter()
            .find(|g| pairing(g) > 1e-12 * scale)
    };
    let path = |right: bool| {
        let x0 = phi.base_point();
        let pts = (0..16)
            .map(|k| {
                let step = 4f64.powi(k);
                let x = if right {
                    x0 + step
                } else {
                    let dom = phi.domain();
                    if dom.lo.is_finite() {
                        dom.lo + (x0 - dom.lo) * 0.25f64.powi(k)
                    } else {
                        x0 - step
                    }
                };
                DVector::from_vec(vec![x, phi.value(x) + h])
            })
            .filter(|p: &Vector| p.iter().all(|c| c.is_finite()))
            .collect();
        Unbounded::Path(pts)
    };
    if v > 0.0 {
        return SupportValue::Infinite(Unbounded::Ray(DVector::from_vec(vec![0.0, 1.0])));
    }
    if v < 0.0 {
        let s = u / -v;
        let c = phi.conjugate(s);
        if c.is_finite() {
            let argsup = phi
                .conjugate_argmax(s)
                .map(|x| DVector::from_vec(vec![x, phi.value(x) + h]));
            return SupportValue::Finite {
                value: -v * c + v * h,
                argsup,
            };
        }
        if let Some(r) = ray() {
            return SupportValue::Infinite(Unbounded::Ray(r));
        }
        let dom = phi.conjugate_domain();
        return SupportValue::Infinite(path(s >= dom.hi));
    }
    // v == 0, u != 0
    let dom = phi.domain();
    let edge = if u > 0.0 { dom.hi } else { dom.lo };
    if edge.is_finite() {
        let closed = if u > 0.0 { dom.hi_closed } else { dom.lo_closed };
        let argsup = closed.then(|| DVector::from_vec(vec![edge, phi.value(edge) + h]));
        return SupportValue::Finite {
            value: u * edge,
            argsup,
        };
    }
    match ray() {
        Some(r) => SupportValue::Infinite(Unbounded::Ray(r)),
        None => SupportValue::Infinite(path(u > 0.0)),
    }
}

const BOX_DOUBLINGS: i32 = 20;

/// Sublevel systems: exact recession generators decide positive pairings;
/// otherwise cutting-plane maxima over growing boxes are extrapolated.
fn sublevel_support(s: &ConvexSet, sys: &SublevelSystem, xstar: &Vector, tol: f64) -> Result<SupportValue> {
    let unit = xstar / xstar.norm();
    let gens = recession_cone(s).generators();
    let mu = gens.iter().map(|g| g.dot(&unit)).fold(f64::NEG_INFINITY, f64::max);
    if mu > 1e-9 {
        let g = gens
            .iter()
            .max_by(|a, b| a.dot(&unit).total_cmp(&b.dot(&unit)))
            .expect("nonempty when mu is finite");
        return Ok(SupportValue::Infinite(Unbounded::Ray(g.clone())));
    }
    let interior = mu < -1e-9 || gens.is_empty();
    let mut values = Vec::new();
    let mut points = Vec::new();
    for k in 0..=BOX_DOUBLINGS {
        let radius = 2f64.powi(k);
        let m = sys.maximize_in_box(xstar, radius, tol);
        values.push(m.lower);
        points.push(m.argmax);
        let len = values.len();
        if len >= 3 {
            let d1 = values[len - 2] - values[len - 3];
            let d2 = values[len - 1] - values[len - 2];
            let level = tol * (1.0 + values[len - 1].abs());
            // the box no longer binds
            if d1.abs() <= level && d2.abs() <= level && (interior || k >= 8) {
                return Ok(SupportValue::Finite {
                    value: values[len - 1],
                    argsup: points.pop(),
                });
            }
        }
    }
    let incs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let tail = &incs[incs.len() - 6..];
    let ratios: Vec<f64> = tail
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
        .collect();
    let last = *values.last().expect("nonempty");
    if !interior && tail.iter().all(|&d| d > 0.0) && tail.iter().sum::<f64>() > 1e-6 && ratios.iter().all(|&r| r >= 0.9) {
        let path = points.split_off(points.len() - 8);
        return Ok(SupportValue::Infinite(Unbounded::Path(path)));
    }
    if ratios.iter().all(|&r| r <= 0.75) {
        let rmax = ratios.iter().cloned().fold(0.0, f64::max);
        let remaining = tail.last().unwrap().max(0.0) * rmax / (1.0 - rmax);
        if remaining <= 1e-6 * (1.0 + last.abs()) {
            return Ok(SupportValue::Finite {
                value: last + remaining,
                argsup: None,
            });
        }
    }
    Err(Error::inconclusive(
        format!("support of sublevel system: increments {tail:?} neither settle nor persist"),
        Some(last),
    ))
}

/// Points of `s` on the sphere of radius `radius` about the origin, found
/// by projecting spread targets and moving along segments to the witness.
pub(crate) fn shell_points(
    s: &ConvexSet,
    radius: f64,
    extra: &[Vector],
    count: usize,
    seed: u64,
    tol: f64,
) -> Vec<Vector> {
    let n = s.dimension();
    let w = s.point();
    let mut dirs = sphere_directions(n, count, seed);
    dirs.extend(extra.iter().cloned());
    let mut out = Vec::new();
    if w.norm() >= radius {
        return out;
    }
    for d in dirs {
        for scale in [1.0, 4.0, 16.0] {
            let target = &d * (radius * scale);
            let Ok(p) = s.project(&target, tol, 5_000) else { break };
            if p.norm() >= radius {
                out.push(onto_sphere(&w, &p, radius));
                break;
            }
        }
    }
    out
}

/// Point of the segment `[w, p]` with norm `radius` (`|w| < radius <= |p|`).
fn onto_sphere(w: &Vector, p: &Vector, radius: f64) -> Vector {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if (w + (p - w) * mid).norm() < radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    w + (p - w) * hi
}

/// Numeric estimate of `limsup <x*, c> / |c|` over `c` in `s`: the shell
/// suprema at the given radii, smoothed to a nonincreasing sequence, and
/// its last value.
pub fn normalized_limsup_estimate(s: &ConvexSet, xstar: &Vector, radii: &[f64]) -> Result<f64> {
    check_dim(s.dimension(), xstar.len())?;
    check_finite(xstar, "dual vector")?;
    if s.is_bounded() {
        return Err(Error::Invalid("limsup estimate needs an unbounded set".into()));
    }
    if radii.is_empty() || radii.iter().any(|&r| r.is_nan() || r <= 0.0) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("radii must be positive and strictly increasing".into()));
    }
    let tol = 1e-9;
    let extra = recession_cone(s).generators();
    let xn = xstar.norm().max(1e-300);
    let w = s.point();
    let mut estimates = Vec::new();
    for &r in radii {
        let pts = shell_points(s, r, &extra, 128, 17, tol);
        let mut best = f64::NEG_INFINITY;
        for mut c in pts {
            let mut val = xstar.dot(&c);
            for _ in 0..20 {
                let Ok(q) = s.project(&(&c + xstar * (0.1 * r / xn)), tol, 5_000) else { break };
                if q.norm() < r {
                    break;
                }
                let q = onto_sphere(&w, &q, r);
                let qv = xstar.dot(&q);
                if qv <= val + 1e-12 * r {
                    break;
                }
                c = q;
                val = qv;
            }
            best = best.max(val / r);
        }
        if best.is_finite() {
            estimates.push(best);
        }
    }
    if estimates.is_empty() {
        return Err(Error::inconclusive("no shell points found at the given radii", None));
    }
    let fitted = pava_nonincreasing(&estimates);
    Ok(*fitted.last().expect("nonempty"))
}

/// Least-squares nonincreasing fit (pool adjacent violators).
fn pava_nonincreasing(ys: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::new();
    for &y in ys {
        blocks.push((y, 1));
        while blocks.len() >= 2 {
            let (b, nb) = blocks[blocks.len() - 1];
            let (a, na) = blocks[blocks.len() - 2];
            if a >= b {
                break;
            }
            blocks.pop();
            blocks.pop();
            let total = na + nb;
            blocks.push(((a * na as f64 + b * nb as f64) / total as f64, total));
        }
    }
    blocks.into_iter().flat_map(|(v, k)| std::iter::repeat_n(v, k)).collect()
}

/// Radius of a ball about the origin containing a bounded set.
pub fn bounding_radius(s: &ConvexSet, tol: f64) -> Result<Option<f64>> {
    if !s.is_bounded() {
        return Ok(None);
    }
    let n = s.dimension();
    let mut sq = 0.0;
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        let hi = support(s, &e, tol)?.value();
        let lo = -support(s, &(-e), tol)?.value();
        let m = hi.abs().max(lo.abs());
        sq += m * m;
    }
    Ok(Some(sq.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{Catalog1D, CatalogFn};
    use crate::geometry::{Ball, HPolyhedron};
    use nalgebra::DMatrix;

    fn v(xs: &[f64]) -> Vector {
        DVector::from_column_slice(xs)
    }

    fn epi(phi: Catalog1D) -> ConvexSet {
        Epigraph1D::new(phi, 0.0).unwrap().into()
    }

    #[test]
    fn parabola_and_exp_values() {
        let s = support(&epi(Catalog1D::Square), &v(&[1.0, -1.0]), 1e-9).unwrap();
        assert!((s.value() - 0.25).abs() < 1e-12);
        let s = support(&epi(Catalog1D::Exp), &v(&[1.0, -1.0]), 1e-9).unwrap();
        assert!((s.value() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_dual_vector_gives_zero() {
        let s = support(&epi(Catalog1D::Exp), &v(&[0.0, 0.0]), 1e-9).unwrap();
        assert_eq!(s.value(), 0.0);
    }

    #[test]
    fn axis_line_has_infinite_support_along_axis() {
        let line: ConvexSet = HPolyhedron::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, -1.0]), v(&[0.0, 0.0]))
            .unwrap()
            .into();
        let s = support(&line, &v(&[1.0, 0.0]), 1e-9).unwrap();
        let r = s.ray().unwrap();
        assert!((r - v(&[1.0, 0.0])).norm() < 1e-12);
    }

    #[test]
    fn barrier_cone_examples() {
        assert!(in_barrier_cone(&epi(Catalog1D::Square), &v(&[0.0, -1.0]), 1e-9).unwrap());
        assert!(!in_barrier_cone(&epi(Catalog1D::Square), &v(&[0.0, 1.0]), 1e-9).unwrap());
        let ball: ConvexSet = Ball::new(v(&[1.0, 2.0]), 3.0).unwrap().into();
        assert!(in_barrier_cone(&ball, &v(&[-5.0, 7.0]), 1e-9).unwrap());
    }

    #[test]
    fn epigraph_paths_grow() {
        for (phi, x) in [
            (Catalog1D::Square, v(&[1.0, 0.0])),
            (Catalog1D::NegSqrtDom, v(&[0.0, -1.0])),
            (Catalog1D::Exp, v(&[1.0, 0.0])),
        ] {
            match support(&epi(phi), &x, 1e-9).unwrap() {
                SupportValue::Infinite(Unbounded::Path(pts)) => {
                    let vals: Vec<f64> = pts.iter().map(|p| p.dot(&x)).collect();
                    assert!(vals.windows(2).all(|w| w[1] > w[0]));
                    assert!(*vals.last().unwrap() > 100.0);
                }
                other => panic!("{phi:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn epigraph_horizontal_slice() {
        let s = support(&epi(Catalog1D::NegSqrtDom), &v(&[-1.0, 0.0]), 1e-9).unwrap();
        assert_eq!(s.value(), 0.0);
        let s = support(&epi(Catalog1D::Reciprocal), &v(&[-2.0, 0.0]), 1e-9).unwrap();
        assert_eq!(s.value(), 0.0);
        assert!(!support(&epi(Catalog1D::Abs), &v(&[1.0, 0.0]), 1e-9).unwrap().is_finite());
    }

    #[test]
    fn sublevel_support_cases() {
        // hyperbola region 1/x - y <= 0
        let f = CatalogFn::lift(2, 0, Catalog1D::Reciprocal, Some(v(&[0.0, -1.0])), 0.0).unwrap();
        let s: ConvexSet = SublevelSystem::new(vec![f]).unwrap().into();
        let up = support(&s, &v(&[1.0, 1.0]), 1e-9).unwrap();
        assert!(up.ray().is_some());
        let inner = support(&s, &v(&[-1.0, -1.0]), 1e-9).unwrap();
        assert!((inner.value() + 2.0).abs() < 1e-6, "{inner:?}");
        let edge = support(&s, &v(&[-1.0, 0.0]), 1e-9).unwrap();
        assert!(edge.is_finite() && edge.value().abs() < 1e-5, "{edge:?}");
    }

    #[test]
    fn limsup_on_parabola() {
        let e = epi(Catalog1D::Square);
        let est = normalized_limsup_estimate(&e, &v(&[0.0, -1.0]), &[10.0, 100.0, 1000.0]).unwrap();
        assert!(est <= -0.99, "{est}");
    }

    #[test]
    fn pava_smooths() {
        assert_eq!(pava_nonincreasing(&[3.0, 1.0, 2.0]), vec![3.0, 1.5, 1.5]);
    }
}
