use nalgebra::DVector;

use super::hpoly::{lp_over, project_rows};
use super::Boundedness;
use crate::catalog::{clamp_to_domain, domain_rows, CatalogFn, DomainBound};
use crate::error::{Error, Result};
use crate::linalg::{normalized, row, stack_rows};
use crate::lp::LpOutcome;
use crate::{Matrix, Vector};

/// `{x : f_i(x) <= 0 for all i}` for catalog functions `f_i`.
#[derive(Debug, Clone)]
pub struct SublevelSystem {
    constraints: Vec<CatalogFn>,
    bounds: Vec<DomainBound>,
    witness: Vector,
    horizon_rows: Matrix,
    bounded: bool,
}

/// Result of maximizing a linear function by cutting planes.
#[derive(Debug, Clone)]
pub struct LinearMax {
    /// Value of the outer approximation; an upper bound.
    pub upper: f64,
    /// Best value at a feasible point; a lower bound.
    pub lower: f64,
    pub argmax: Vector,
}

const MAX_CUTS: usize = 400;

impl SublevelSystem {
    /// Validates dimensions and searches for a (preferably strictly)
    /// feasible point; failure of the search is reported as an empty set.
    pub fn new(constraints: Vec<CatalogFn>) -> Result<Self> {
        let Some(first) = constraints.first() else {
            return Err(Error::Invalid("sublevel system needs at least one constraint".into()));
        };
        let n = first.dim();
        for f in &constraints {
            if f.dim() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: f.dim(),
                });
            }
        }
        let bounds: Vec<DomainBound> = constraints.iter().flat_map(|f| f.domain_bounds()).collect();
        let rows: Vec<Vector> = constraints
            .iter()
            .flat_map(|f| {
                let h = f.horizon_zero_rows();
                (0..h.nrows()).map(move |i| row(&h, i)).collect::<Vec<_>>()
            })
            .collect();
        let horizon_rows = stack_rows(&rows, n);
        let bounded = cone_is_trivial(&horizon_rows);
        let mut sys = SublevelSystem {
            constraints,
            bounds,
            witness: DVector::zeros(n),
            horizon_rows,
            bounded,
        };
        sys.witness = sys.find_witness()?;
        Ok(sys)
    }

    pub fn dim(&self) -> usize {
        self.witness.len()
    }

    pub fn constraints(&self) -> &[CatalogFn] {
        &self.constraints
    }

    pub fn witness(&self) -> &Vector {
        &self.witness
    }

    /// Rows `H` with `rec = {v : H v <= 0}`; exact for catalog constraints.
    pub fn horizon_rows(&self) -> &Matrix {
        &self.horizon_rows
    }

    pub fn boundedness(&self) -> Boundedness {
        if self.bounded {
            Boundedness::Bounded
        } else {
            Boundedness::Unbounded
        }
    }

    pub fn in_domain(&self, x: &Vector) -> bool {
        self.constraints.iter().all(|f| f.in_domain(x))
    }

    /// `max_i f_i(x)`.
    pub fn max_value(&self, x: &Vector) -> f64 {
        self.constraints.iter().map(|f| f.value(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Constraint residual `max(0, max_i f_i(x))`; infinite off the domain.
    pub fn residual(&self, x: &Vector) -> f64 {
        self.max_value(x).max(0.0)
    }

    fn find_witness(&self) -> Result<Vector> {
        let n = self.dim();
        let mut starts: Vec<Vector> = self.constraints.iter().flat_map(|f| f.base_points()).collect();
        starts.push(DVector::zeros(n));
        let mut best: Option<(f64, Vector)> = None;
        for s in starts {
            for target in [-1.0, -1e-2, -1e-4, 0.0] {
                let (val, x) = self.polyak_descent(s.clone(), target);
                if best.as_ref().is_none_or(|b| val < b.0) {
                    best = Some((val, x));
                }
                if val < -1e-6 {
                    break;
                }
            }
            if best.as_ref().is_some_and(|b| b.0 < -1e-6) {
                break;
            }
        }
        match best {
            Some((val, x)) if val <= 0.0 => Ok(x),
            Some((val, _)) => Err(Error::Empty(format!(
                "feasibility probe found no point (best max f_i = {val:.3e})"
            ))),
            None => Err(Error::Empty("feasibility probe found no point".into())),
        }
    }

    fn polyak_descent(&self, mut x: Vector, target: f64) -> (f64, Vector) {
        clamp_to_domain(&mut x, &self.bounds, 1e-3);
        let mut best = (self.max_value(&x), x.clone());
        for _ in 0..2000 {
            let (i, val) = self.argmax_constraint(&x);
            if val < best.0 {
                best = (val, x.clone());
            }
            if val <= target && val < -1e-6 {
                break;
            }
            let g = self.constraints[i].descent_gradient(&x);
            let gg = g.norm_squared();
            if gg <= 1e-300 || !val.is_finite() {
                break;
            }
            x -= g * ((val - target).max(1e-12) / gg);
            clamp_to_domain(&mut x, &self.bounds, 1e-9);
        }
        best
    }

    fn argmax_constraint(&self, x: &Vector) -> (usize, f64) {
        self.constraints
            .iter()
            .enumerate()
            .map(|(i, f)| (i, f.value(x)))
            .fold((0, f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 { c } else { acc })
    }

    /// Largest `t` in [0, 1] with `witness + t (p - witness)` feasible.
    fn boundary_point(&self, p: &Vector) -> Vector {
        let w = &self.witness;
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if self.max_value(&(w + (p - w) * mid)) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        w + (p - w) * lo
    }

    /// Linearizations of the constraints that are active or violated at `z`.
    fn cuts_at(&self, z: &Vector, out: &mut Vec<(Vector, f64)>) -> usize {
        let mut added = 0;
        for f in &self.constraints {
            let v = f.value(z);
            if !v.is_finite() || v < -1e-9 {
                continue;
            }
            let Some(g) = f.subgradient(z) else { continue };
            let norm = g.norm();
            if norm <= 1e-14 {
                continue;
            }
            let a = &g / norm;
            let b = (g.dot(z) - v) / norm;
            let dup = out.iter().any(|(a2, b2)| (a2 - &a).norm() < 1e-12 && (b2 - b).abs() < 1e-12 * (1.0 + b.abs()));
            if !dup {
                out.push((a, b));
                added += 1;
            }
        }
        added
    }

    /// Cuts at a point `p` where some constraint is infinite: linearize at
    /// points of `[z, p]` approaching `p` from the feasible point `z`.
    fn cuts_toward(&self, z: &Vector, p: &Vector, out: &mut Vec<(Vector, f64)>) -> usize {
        if self.max_value(p).is_finite() {
            return 0;
        }
        let mut added = 0;
        for j in [1, 3, 6, 10, 15, 21, 28, 36] {
            let t = 1.0 - 0.5f64.powi(j);
            let q = z + (p - z) * t;
            if self.max_value(&q).is_finite() {
                added += self.cuts_at(&q, out);
            }
        }
        added
    }

    fn initial_cuts(&self) -> Vec<(Vector, f64)> {
        let (a, b) = domain_rows(&self.bounds, self.dim());
        (0..a.nrows()).map(|i| (row(&a, i), b[i])).collect()
    }

    /// Outer-approximation projection: project onto accumulated cuts, then
    /// cut off the result at itself and at the boundary point toward the
    /// witness.
    pub fn project(&self, x: &Vector, tol: f64, max_iter: usize) -> Result<Vector> {
        if self.residual(x) == 0.0 {
            return Ok(x.clone());
        }
        let mut cuts = self.initial_cuts();
        let mut best_feasible = self.boundary_point(x);
        let mut best_dist = (&best_feasible - x).norm();
        let mut last = x.clone();
        for _ in 0..MAX_CUTS.min(max_iter.max(1)) {
            let p = if cuts.is_empty() {
                x.clone()
            } else {
                let (a, b) = unpack(&cuts, self.dim());
                project_rows(&a, &b, x, tol, max_iter)?
            };
            let r = self.residual(&p);
            if r <= 0.1 * tol {
                return Ok(p);
            }
            last = p.clone();
            let mut added = self.cuts_at(&p, &mut cuts);
            let z = self.boundary_point(&p);
            let dz = (&z - x).norm();
            if dz < best_dist {
                best_dist = dz;
                best_feasible = z.clone();
            }
            added += self.cuts_at(&z, &mut cuts);
            added += self.cuts_toward(&z, &p, &mut cuts);
            if added == 0 {
                break;
            }
        }
        let r = self.residual(&last);
        if r <= tol {
            return Ok(last);
        }
        Err(Error::Convergence {
            context: "sublevel projection",
            iterations: cuts.len(),
            residual: r,
            best: Some(best_feasible),
            partner: None,
            bounds: None,
        })
    }

    /// Maximize `c . x` over the set intersected with the box of half-width
    /// `radius` around the witness, by Kelley-type cutting planes.
    pub fn maximize_in_box(&self, c: &Vector, radius: f64, tol: f64) -> LinearMax {
        let n = self.dim();
        let mut cuts = self.initial_cuts();
        for i in 0..n {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            cuts.push((e.clone(), self.witness[i] + radius));
            cuts.push((-e, radius - self.witness[i]));
        }
        let mut lower = c.dot(&self.witness);
        let mut argmax = self.witness.clone();
        let mut upper = f64::INFINITY;
        for _ in 0..MAX_CUTS {
            let (a, b) = unpack(&cuts, n);
            let LpOutcome::Optimal { x, value } = lp_over(&a, &b, c.iter().cloned().collect()) else {
                break;
            };
            upper = upper.min(value);
            let p = DVector::from_vec(x);
            if self.residual(&p) <= 0.1 * tol {
                lower = value;
                argmax = p;
                break;
            }
            let z = self.boundary_point(&p);
            if c.dot(&z) > lower {
                lower = c.dot(&z);
                argmax = z.clone();
            }
            if upper - lower <= tol * (1.0 + lower.abs()) {
                break;
            }
            let added = self.cuts_at(&p, &mut cuts)
                + self.cuts_at(&z, &mut cuts)
                + self.cuts_toward(&z, &p, &mut cuts);
            if added == 0 {
                break;
            }
        }
        LinearMax {
            upper: upper.max(lower),
            lower,
            argmax,
        }
    }
}

fn unpack(cuts: &[(Vector, f64)], n: usize) -> (Matrix, Vector) {
    let rows: Vec<Vector> = cuts.iter().map(|c| c.0.clone()).collect();
    (stack_rows(&rows, n), DVector::from_iterator(cuts.len(), cuts.iter().map(|c| c.1)))
}

/// Whether `{v : H v <= 0}` is `{0}`, decided by LPs over the unit box.
pub(crate) fn cone_is_trivial(h: &Matrix) -> bool {
    let n = h.ncols();
    if h.nrows() == 0 {
        return false;
    }
    let mut rows: Vec<Vector> = (0..h.nrows()).filter_map(|i| normalized(&row(h, i))).collect();
    let mut rhs = vec![0.0; rows.len()];
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        rows.push(e.clone());
        rows.push(-e);
        rhs.push(1.0);
        rhs.push(1.0);
    }
    let a = stack_rows(&rows, n);
    let b = DVector::from_vec(rhs);
    (0..n).all(|i| {
        [1.0, -1.0].iter().all(|&s| {
            let mut c = vec![0.0; n];
            c[i] = s;
            match lp_over(&a, &b, c) {
                LpOutcome::Optimal { value, .. } => value <= 1e-9,
                _ => false,
            }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog1D;
    use nalgebra::DMatrix;

    fn v(xs: &[f64]) -> Vector {
        DVector::from_column_slice(xs)
    }

    fn disk() -> SublevelSystem {
        let q = DMatrix::identity(2, 2);
        SublevelSystem::new(vec![CatalogFn::quadratic(q, v(&[0.0, 0.0]), -1.0).unwrap()]).unwrap()
    }

    #[test]
    fn disk_projection() {
        let s = disk();
        assert_eq!(s.boundedness(), Boundedness::Bounded);
        let p = s.project(&v(&[3.0, 4.0]), 1e-9, 10_000).unwrap();
        assert!((p - v(&[0.6, 0.8])).norm() < 1e-6);
    }

    #[test]
    fn parabola_region_projection() {
        // x^2 - y <= 0
        let f = CatalogFn::lift(2, 0, Catalog1D::Square, Some(v(&[0.0, -1.0])), 0.0).unwrap();
        let s = SublevelSystem::new(vec![f]).unwrap();
        let p = s.project(&v(&[0.0, -1.0]), 1e-9, 10_000).unwrap();
        assert!(p.norm() < 1e-6, "{p}");
        assert_eq!(s.boundedness(), Boundedness::Unbounded);
    }

    #[test]
    fn infeasible_system_rejected() {
        let q = DMatrix::identity(1, 1);
        let f = CatalogFn::quadratic(q, v(&[0.0]), 1.0).unwrap();
        assert!(matches!(SublevelSystem::new(vec![f]), Err(Error::Empty(_))));
    }

    #[test]
    fn linear_max_over_disk() {
        let s = disk();
        let m = s.maximize_in_box(&v(&[1.0, 1.0]), 10.0, 1e-9);
        assert!((m.lower - 2f64.sqrt()).abs() < 1e-6);
        assert!(m.upper >= m.lower);
    }
}
