//! Recession and barrier cones, interior tests for the barrier cone and the
//! strong separation property.
//!
//! In R^n the closure of the barrier cone is the polar of the recession
//! cone, and a convex set and its closure share their interior, so
//! `Int barc(C) = Int(rec(C)°)`. Interior verdicts are cross-checked
//! against the growth criterion `<x*, c> <= -alpha |c|` for `|c| >= R`.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, check_finite, Error, Result};
use crate::geometry::ConvexSet;
use crate::linalg::{canonical_sign, normalized, nullspace, push_unique, rank_col_piv, row, sphere_directions, stack_rows, unit};
use crate::support::{bounding_radius, shell_points, support, SupportValue, Unbounded};
use crate::{Matrix, Tolerances, Vector};

/// A closed convex cone.
#[derive(Debug, Clone, PartialEq)]
pub enum ConeRep {
    /// `{v : A v <= 0}`; zero rows are not stored.
    PolyhedralH { a: Matrix },
    /// `cone(generators)`; an empty list is `{0}`.
    PolyhedralV { dim: usize, generators: Vec<Vector> },
    /// Unit directions known to lie in the cone; not exhaustive.
    Sampled { dim: usize, directions: Vec<Vector> },
}

impl ConeRep {
    pub fn dim(&self) -> usize {
        match self {
            ConeRep::PolyhedralH { a } => a.ncols(),
            ConeRep::PolyhedralV { dim, .. } | ConeRep::Sampled { dim, .. } => *dim,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, ConeRep::Sampled { .. })
    }

    /// Unit generators. Lines in the cone appear as both signs of a basis.
    pub fn generators(&self) -> Vec<Vector> {
        match self {
            ConeRep::PolyhedralH { a } => h_cone_generators(a),
            ConeRep::PolyhedralV { generators, .. } => generators.clone(),
            ConeRep::Sampled { directions, .. } => directions.clone(),
        }
    }

    /// An H-representation (rows of the polar's generators).
    pub fn to_h(&self) -> Matrix {
        match self {
            ConeRep::PolyhedralH { a } => a.clone(),
            ConeRep::PolyhedralV { dim, generators } | ConeRep::Sampled { dim, directions: generators } => {
                let g = stack_rows(generators, *dim);
                let polar = h_cone_generators(&g);
                stack_rows(&polar, *dim)
            }
        }
    }

    pub fn contains(&self, v: &Vector, tol: f64) -> bool {
        let h = self.to_h();
        (0..h.nrows()).all(|i| h.row(i).dot(&v.transpose()) <= tol * v.norm().max(1.0))
    }

    /// Whether the cone is `{0}`.
    pub fn is_trivial(&self) -> bool {
        self.generators().is_empty()
    }
}

/// Unit generators of `{v : H v <= 0}`: a lineality basis (both signs) plus
/// extreme rays of the pointed part, by enumerating rank-deficient row
/// subsets.
pub fn h_cone_generators(h: &Matrix) -> Vec<Vector> {
    let n = h.ncols();
    let rows: Vec<Vector> = (0..h.nrows()).filter_map(|i| normalized(&row(h, i))).collect();
    let hn = stack_rows(&rows, n);
    let lineality = nullspace(&hn, 1e-10);
    let mut gens = Vec::new();
    for l in &lineality {
        gens.push(canonical_sign(l.clone()));
        gens.push(-canonical_sign(l.clone()));
    }
    let d = n - lineality.len();
    if d == 0 {
        return gens;
    }
    // orthonormal basis of the complement of the lineality space
    let comp = if lineality.is_empty() {
        DMatrix::identity(n, n)
    } else {
        let lmat = stack_rows(&lineality, n);
        let basis = nullspace(&lmat, 1e-10);
        stack_rows(&basis, n).transpose()
    };
    let reduced = &hn * &comp;
    let feasible = |w: &Vector| (&reduced * w).iter().all(|&x| x <= 1e-9);
    let mut rays: Vec<Vector> = Vec::new();
    let consider = |w: Vector, rays: &mut Vec<Vector>| {
        for cand in [w.clone(), -w] {
            if feasible(&cand) {
                if let Some(g) = normalized(&(&comp * cand)) {
                    push_unique(rays, g, 1e-9);
                }
            }
        }
    };
    if d == 1 {
        consider(DVector::from_element(1, 1.0), &mut rays);
    } else {
        for subset in (0..reduced.nrows()).combinations(d - 1) {
            let sub = stack_rows(&subset.iter().map(|&i| row(&reduced, i)).collect::<Vec<_>>(), d);
            if rank_col_piv(&sub, 1e-10) != d - 1 {
                continue;
            }
            let ns = nullspace(&sub, 1e-10);
            if let Some(w) = ns.into_iter().next() {
                consider(w, &mut rays);
            }
        }
    }
    gens.extend(rays);
    gens
}

/// Recession cone; exact for every representation.
pub fn recession_cone(s: &ConvexSet) -> ConeRep {
    let n = s.dimension();
    match s {
        ConvexSet::HPoly(p) => ConeRep::PolyhedralH { a: p.a().clone() },
        ConvexSet::VSet(v) => ConeRep::PolyhedralV {
            dim: n,
            generators: v.rays().to_vec(),
        },
        ConvexSet::Ball(_) => ConeRep::PolyhedralV {
            dim: n,
            generators: Vec::new(),
        },
        ConvexSet::Epigraph(e) => ConeRep::PolyhedralV {
            dim: 2,
            generators: e.phi().epigraph_recession_generators(),
        },
        ConvexSet::Sublevel(sys) => ConeRep::PolyhedralH {
            a: sys.horizon_rows().clone(),
        },
    }
}

/// Position of `x*` relative to the barrier cone.
#[derive(Debug, Clone, PartialEq)]
pub enum BarrierClassification {
    /// `<x*, c> <= -alpha |c|` for all `c` in the set with `|c| >= radius`.
    InteriorPoint { alpha: f64, radius: f64 },
    /// In the barrier cone but not in its interior.
    BoundaryPoint,
    /// Support is infinite.
    Outside(Unbounded),
}

impl BarrierClassification {
    pub fn is_interior(&self) -> bool {
        matches!(self, BarrierClassification::InteriorPoint { .. })
    }
}

const SCAN_RADII: [f64; 7] = [1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6];

/// Classify a nonzero `x*` as interior, boundary or outside of the barrier
/// cone.
pub fn classify_barrier(s: &ConvexSet, xstar: &Vector, tol: f64) -> Result<BarrierClassification> {
    check_dim(s.dimension(), xstar.len())?;
    check_finite(xstar, "dual vector")?;
    let norm = xstar.norm();
    if norm == 0.0 {
        return Err(Error::Invalid(
            "classify_barrier needs a nonzero x*; 0 is interior iff the set is bounded".into(),
        ));
    }
    let unit_x = xstar / norm;
    let gens = recession_cone(s).generators();
    if gens.is_empty() {
        let r = bounding_radius(s, Tolerances::default().projection)?.unwrap_or(0.0);
        return Ok(BarrierClassification::InteriorPoint {
            alpha: norm,
            radius: r + 1.0,
        });
    }
    let (mu, arg) = gens
        .iter()
        .map(|g| (g.dot(&unit_x), g))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .expect("nonempty");
    if mu < -tol {
        let alpha = -mu * norm / 2.0;
        return match growth_radius(s, xstar, alpha, &gens) {
            Some(radius) => Ok(BarrierClassification::InteriorPoint { alpha, radius }),
            None => Err(Error::inconclusive(
                "interior margin from the recession cone not confirmed on shell samples",
                None,
            )),
        };
    }
    let sigma = support(s, xstar, Tolerances::default().projection)?;
    if mu > tol {
        return Ok(match sigma {
            SupportValue::Infinite(_) => BarrierClassification::Outside(Unbounded::Ray(arg.clone())),
            SupportValue::Finite { .. } => BarrierClassification::BoundaryPoint,
        });
    }
    Ok(match sigma {
        SupportValue::Finite { .. } => BarrierClassification::BoundaryPoint,
        SupportValue::Infinite(cert) => BarrierClassification::Outside(cert),
    })
}

/// Smallest scan radius beyond which sampled points obey the growth bound.
fn growth_radius(s: &ConvexSet, xstar: &Vector, alpha: f64, gens: &[Vector]) -> Option<f64> {
    let tol = Tolerances::default().projection;
    let mut violated_at: Option<usize> = None;
    let w = s.point();
    for (k, &r) in SCAN_RADII.iter().enumerate() {
        let mut pts = shell_points(s, r, gens, 24, 3, tol);
        pts.extend(gens.iter().map(|g| &w + g * r));
        let bad = pts
            .iter()
            .any(|c| c.norm() >= r * (1.0 - 1e-12) && xstar.dot(c) > -alpha * c.norm() + 1e-9 * c.norm());
        if bad {
            violated_at = Some(k);
        }
    }
    match violated_at {
        None => Some(SCAN_RADII[0]),
        Some(k) if k + 1 < SCAN_RADII.len() => Some(SCAN_RADII[k + 1]),
        Some(_) => None,
    }
}

/// Which rule produced an SSP verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SspRule {
    Bounded,
    AffineHull,
    PolyhedralPolar,
    CatalogConjugate,
    PlanarBoundaryRays,
    SampledBarrier,
}

impl SspRule {
    pub fn tag(&self) -> &'static str {
        match self {
            SspRule::Bounded => "bounded",
            SspRule::AffineHull => "affine_hull",
            SspRule::PolyhedralPolar => "polyhedral_polar",
            SspRule::CatalogConjugate => "catalog_conjugate",
            SspRule::PlanarBoundaryRays => "planar_boundary_rays",
            SspRule::SampledBarrier => "sampled_barrier",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SspStatus {
    HasSsp,
    /// `witness` is in the barrier cone but not in its interior.
    LacksSsp { witness: Vector },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SspVerdict {
    pub status: SspStatus,
    pub rule: SspRule,
}

impl SspVerdict {
    fn new(status: SspStatus, rule: SspRule) -> Self {
        SspVerdict { status, rule }
    }

    pub fn has_ssp(&self) -> bool {
        self.status == SspStatus::HasSsp
    }

    pub fn witness(&self) -> Option<&Vector> {
        match &self.status {
            SspStatus::LacksSsp { witness } => Some(witness),
            _ => None,
        }
    }
}

/// Decide whether `barc(S) = Int barc(S) ∪ {0}`.
pub fn ssp_verdict(s: &ConvexSet, tol: f64) -> Result<SspVerdict> {
    if s.is_bounded() {
        return Ok(SspVerdict::new(SspStatus::HasSsp, SspRule::Bounded));
    }
    if let Some(normal) = affine_hull_normal(s)? {
        return Ok(SspVerdict::new(SspStatus::LacksSsp { witness: normal }, SspRule::AffineHull));
    }
    let rec = recession_cone(s);
    match s {
        ConvexSet::HPoly(_) | ConvexSet::VSet(_) => {
            let h = rec.to_h();
            let candidates: Vec<Vector> = (0..h.nrows()).filter_map(|i| normalized(&row(&h, i))).collect();
            for c in candidates {
                if boundary_in_barrier(s, &c, tol)? {
                    return Ok(SspVerdict::new(SspStatus::LacksSsp { witness: c }, SspRule::PolyhedralPolar));
                }
            }
            Ok(SspVerdict::new(SspStatus::HasSsp, SspRule::PolyhedralPolar))
        }
        ConvexSet::Epigraph(e) => {
            let phi = e.phi();
            let conj = phi.conjugate_domain();
            if let Some(&end) = conj.closed_endpoints().first() {
                let w = DVector::from_vec(vec![end, -1.0]);
                return Ok(SspVerdict::new(SspStatus::LacksSsp { witness: w }, SspRule::CatalogConjugate));
            }
            let dom = phi.domain();
            if dom.lo.is_finite() {
                let w = DVector::from_vec(vec![-1.0, 0.0]);
                return Ok(SspVerdict::new(SspStatus::LacksSsp { witness: w }, SspRule::CatalogConjugate));
            }
            if dom.hi.is_finite() {
                let w = DVector::from_vec(vec![1.0, 0.0]);
                return Ok(SspVerdict::new(SspStatus::LacksSsp { witness: w }, SspRule::CatalogConjugate));
            }
            Ok(SspVerdict::new(SspStatus::HasSsp, SspRule::CatalogConjugate))
        }
        ConvexSet::Sublevel(_) => {
            let h = rec.to_h();
            let mut candidates: Vec<Vector> = (0..h.nrows()).filter_map(|i| normalized(&row(&h, i))).collect();
            let polar_gens = h_cone_generators(&stack_rows(&rec.generators(), s.dimension()));
            for g in polar_gens {
                push_unique(&mut candidates, g, 1e-9);
            }
            let mut all_outside = true;
            for c in &candidates {
                match classify_barrier(s, c, tol) {
                    Ok(BarrierClassification::BoundaryPoint) => {
                        return Ok(SspVerdict::new(
                            SspStatus::LacksSsp { witness: c.clone() },
                            SspRule::SampledBarrier,
                        ));
                    }
                    Ok(BarrierClassification::Outside(_)) => {}
                    Ok(BarrierClassification::InteriorPoint { .. }) | Err(_) => all_outside = false,
                }
            }
            if s.dimension() == 2 && all_outside {
                return Ok(SspVerdict::new(SspStatus::HasSsp, SspRule::PlanarBoundaryRays));
            }
            for d in sphere_directions(s.dimension(), 256, 0) {
                if let Ok(BarrierClassification::BoundaryPoint) = classify_barrier(s, &d, tol) {
                    return Ok(SspVerdict::new(SspStatus::LacksSsp { witness: d }, SspRule::SampledBarrier));
                }
            }
            Ok(SspVerdict::new(SspStatus::Inconclusive, SspRule::SampledBarrier))
        }
        ConvexSet::Ball(_) => unreachable!("balls are bounded"),
    }
}

fn boundary_in_barrier(s: &ConvexSet, c: &Vector, tol: f64) -> Result<bool> {
    Ok(matches!(classify_barrier(s, c, tol)?, BarrierClassification::BoundaryPoint))
}

/// Normal of a proper affine hull, detected from 2n + 2 projected probes.
fn affine_hull_normal(s: &ConvexSet) -> Result<Option<Vector>> {
    let n = s.dimension();
    let w = s.point();
    let reach = 10.0 * (1.0 + w.norm());
    let mut dirs: Vec<Vector> = (0..n).flat_map(|i| [unit(n, i), -unit(n, i)]).collect();
    dirs.extend(sphere_directions(n, 2, 11).into_iter().take(2));
    let tol = Tolerances::default().projection;
    let mut diffs = Vec::new();
    for d in dirs {
        let p = match s.project(&(&w + d * reach), tol, 10_000) {
            Ok(p) => p,
            Err(Error::Convergence { best: Some(b), .. }) => b,
            Err(e) => return Err(e),
        };
        diffs.push(p - &w);
    }
    let m = stack_rows(&diffs, n);
    if rank_col_piv(&m, 1e-9) == n {
        return Ok(None);
    }
    let scaled = &m / m.amax().max(1e-300);
    let normal = nullspace(&scaled, 1e-9)
        .into_iter()
        .next()
        .map(canonical_sign)
        .unwrap_or_else(|| unit(n, 0));
    Ok(Some(normal))
}

/// Whether `Int barc(S)` is nonempty, i.e. whether the recession cone is
/// pointed (contains no line).
pub fn interior_barrier_nonempty(s: &ConvexSet) -> bool {
    let h = recession_cone(s).to_h();
    h.nrows() > 0 && nullspace(&h, 1e-10).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{Catalog1D, CatalogFn};
    use crate::geometry::{Ball, Epigraph1D, HPolyhedron, SublevelSystem, VSet};

    fn v(xs: &[f64]) -> Vector {
        DVector::from_column_slice(xs)
    }

    fn epi(phi: Catalog1D) -> ConvexSet {
        Epigraph1D::new(phi, 0.0).unwrap().into()
    }

    fn axis() -> ConvexSet {
        HPolyhedron::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, -1.0]), v(&[0.0, 0.0]))
            .unwrap()
            .into()
    }

    #[test]
    fn generators_of_quadrant_and_halfplane() {
        let q = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -1.0]);
        let g = h_cone_generators(&q);
        assert_eq!(g.len(), 2);
        let h = DMatrix::from_row_slice(1, 2, &[0.0, 1.0]);
        let g = h_cone_generators(&h);
        assert_eq!(g.len(), 3);
    }

    #[test]
    fn parabola_classification() {
        let c = classify_barrier(&epi(Catalog1D::Square), &v(&[0.0, -1.0]), 1e-7).unwrap();
        assert!(c.is_interior(), "{c:?}");
        let c = classify_barrier(&epi(Catalog1D::Exp), &v(&[0.0, -1.0]), 1e-7).unwrap();
        assert_eq!(c, BarrierClassification::BoundaryPoint);
        let c = classify_barrier(&axis(), &v(&[1.0, 0.0]), 1e-7).unwrap();
        match c {
            BarrierClassification::Outside(Unbounded::Ray(r)) => assert!((r - v(&[1.0, 0.0])).norm() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ssp_examples() {
        assert!(ssp_verdict(&epi(Catalog1D::Square), 1e-7).unwrap().has_ssp());
        let e = ssp_verdict(&epi(Catalog1D::Exp), 1e-7).unwrap();
        assert_eq!(e.witness(), Some(&v(&[0.0, -1.0])));
        let d = ssp_verdict(&axis(), 1e-7).unwrap();
        assert_eq!(d.rule, SspRule::AffineHull);
        assert!((d.witness().unwrap() - v(&[0.0, 1.0])).norm() < 1e-9);
        let ball: ConvexSet = Ball::new(v(&[0.0, 0.0]), 1.0).unwrap().into();
        assert!(ssp_verdict(&ball, 1e-7).unwrap().has_ssp());
    }

    #[test]
    fn half_line_has_ssp_but_half_plane_does_not() {
        let ray: ConvexSet = VSet::new(vec![v(&[0.0])], vec![v(&[1.0])]).unwrap().into();
        assert!(ssp_verdict(&ray, 1e-7).unwrap().has_ssp());
        let half: ConvexSet = HPolyhedron::new(DMatrix::from_row_slice(1, 2, &[0.0, 1.0]), v(&[0.0]))
            .unwrap()
            .into();
        let verdict = ssp_verdict(&half, 1e-7).unwrap();
        assert!(!verdict.has_ssp());
        let w = verdict.witness().unwrap();
        assert!(matches!(classify_barrier(&half, w, 1e-7).unwrap(), BarrierClassification::BoundaryPoint));
    }

    #[test]
    fn hyperbola_region_lacks_ssp() {
        let f = CatalogFn::lift(2, 0, Catalog1D::Reciprocal, Some(v(&[0.0, -1.0])), 0.0).unwrap();
        let s: ConvexSet = SublevelSystem::new(vec![f]).unwrap().into();
        let verdict = ssp_verdict(&s, 1e-7).unwrap();
        assert!(!verdict.has_ssp(), "{verdict:?}");
    }

    #[test]
    fn disk_via_sublevel_is_bounded() {
        let f = CatalogFn::quadratic(DMatrix::identity(2, 2), v(&[0.0, 0.0]), -1.0).unwrap();
        let s: ConvexSet = SublevelSystem::new(vec![f]).unwrap().into();
        assert!(ssp_verdict(&s, 1e-7).unwrap().has_ssp());
        assert!(classify_barrier(&s, &v(&[1.0, 2.0]), 1e-7).unwrap().is_interior());
    }

    #[test]
    fn to_h_roundtrip() {
        let cone = ConeRep::PolyhedralV {
            dim: 2,
            generators: vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])],
        };
        assert!(cone.contains(&v(&[1.0, 2.0]), 1e-12));
        assert!(!cone.contains(&v(&[-1.0, 2.0]), 1e-12));
    }
}
