use nalgebra::DVector;

use crate::catalog::Catalog1D;
use crate::error::{check_dim, Error, Result};
use crate::Vector;

/// `{(x, y) : y >= phi(x) + shift}` in R^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Epigraph1D {
    phi: Catalog1D,
    shift: f64,
}

impl Epigraph1D {
    pub fn new(phi: Catalog1D, shift: f64) -> Result<Self> {
        if !shift.is_finite() {
            return Err(Error::NonFinite("epigraph shift"));
        }
        if let Catalog1D::Linear { slope } = phi {
            if !slope.is_finite() {
                return Err(Error::NonFinite("linear slope"));
            }
        }
        Ok(Epigraph1D { phi, shift })
    }

    pub fn phi(&self) -> Catalog1D {
        self.phi
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn witness(&self) -> Vector {
        let x = self.phi.base_point();
        DVector::from_vec(vec![x, self.phi.value(x) + self.shift + 1.0])
    }

    pub fn contains_exact(&self, p: &Vector) -> bool {
        let v = self.phi.value(p[0]);
        v.is_finite() && p[1] >= v + self.shift
    }

    fn excess(&self, x: f64, b: f64) -> f64 {
        self.phi.value(x) + self.shift - b
    }

    /// Derivative of `(x - a)^2 + max(phi(x) + shift - b, 0)^2`, which is
    /// nondecreasing on the domain.
    fn dfun(&self, x: f64, a: f64, b: f64) -> f64 {
        let e = self.excess(x, b);
        let tail = if e > 0.0 { 2.0 * e * self.phi.derivative(x) } else { 0.0 };
        2.0 * (x - a) + tail
    }

    /// Projection by root-finding on the boundary parametrization.
    pub fn project(&self, p: &Vector) -> Result<Vector> {
        check_dim(2, p.len())?;
        if self.contains_exact(p) {
            return Ok(p.clone());
        }
        let (a, b) = (p[0], p[1]);
        let dom = self.phi.domain();
        let f = |x: f64| self.dfun(x, a, b);
        // bracket [lo, hi] with f(lo) <= 0 <= f(hi)
        let (mut lo, mut hi);
        let start = if dom.contains(a) { a } else { dom.lo };
        if dom.contains(start) && f(start) == 0.0 {
            return Ok(self.point_at(start, b));
        }
        if dom.contains(start) && f(start) > 0.0 {
            hi = start;
            let mut step = 1.0f64.max(a.abs());
            loop {
                let cand = start - step;
                if !dom.contains(cand) {
                    if dom.lo_closed {
                        if f(dom.lo) >= 0.0 {
                            return Ok(self.point_at(dom.lo, b));
                        }
                        lo = dom.lo;
                    } else {
                        lo = shrink_to_open_end(dom.lo, hi, &f);
                    }
                    break;
                }
                if f(cand) <= 0.0 {
                    lo = cand;
                    break;
                }
                hi = cand;
                step *= 2.0;
            }
        } else {
            // f(start) < 0 or start is an open endpoint
            lo = if dom.contains(start) {
                start
            } else {
                shrink_to_open_end(dom.lo, dom.lo + 1.0, &f)
            };
            let mut step = 1.0f64.max(lo.abs());
            loop {
                let cand = lo + step;
                if f(cand) >= 0.0 {
                    hi = cand;
                    break;
                }
                lo = cand;
                step *= 2.0;
                if !step.is_finite() {
                    return Err(Error::convergence("epigraph projection bracket", 2000, f64::NAN, None));
                }
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = if (lo - a).abs() <= (hi - a).abs() && dom.contains(lo) { lo } else { hi };
        let cands = [lo, hi, x];
        let best = cands
            .iter()
            .filter(|c| dom.contains(**c))
            .map(|&c| (c, self.point_at(c, b)))
            .min_by(|u, w| (&u.1 - p).norm().total_cmp(&(&w.1 - p).norm()))
            .map(|u| u.1)
            .expect("bracket lies in the domain");
        Ok(best)
    }

    fn point_at(&self, x: f64, b: f64) -> Vector {
        DVector::from_vec(vec![x, (self.phi.value(x) + self.shift).max(b)])
    }
}

/// A point just inside an open left endpoint where `f` is nonpositive.
fn shrink_to_open_end(end: f64, right: f64, f: &impl Fn(f64) -> f64) -> f64 {
    let mut gap = (right - end).max(1e-300);
    for _ in 0..1100 {
        let x = end + gap;
        if x > end && f(x) <= 0.0 {
            return x;
        }
        gap *= 0.5;
    }
    end + f64::MIN_POSITIVE
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        DVector::from_column_slice(xs)
    }

    /// Grid-and-refine distance to the graph of phi + shift.
    fn grid_projection(e: &Epigraph1D, p: &Vector) -> Vector {
        let dom = e.phi().domain();
        let mut best = (f64::INFINITY, 0.0);
        let (lo, hi) = (p[0] - 20.0, p[0] + 20.0);
        let scan = |lo: f64, hi: f64, steps: usize, best: &mut (f64, f64)| {
            for k in 0..=steps {
                let x = lo + (hi - lo) * k as f64 / steps as f64;
                if !dom.contains(x) {
                    continue;
                }
                let q = e.point_at(x, p[1]);
                let d = (&q - p).norm();
                if d < best.0 {
                    *best = (d, x);
                }
            }
        };
        scan(lo, hi, 200_000, &mut best);
        let w = 40.0 / 200_000.0;
        scan(best.1 - w, best.1 + w, 100_000, &mut best);
        e.point_at(best.1, p[1])
    }

    #[test]
    fn projections_match_grid() {
        let pts = [v(&[0.0, -1.0]), v(&[2.0, 1.0]), v(&[-1.5, -3.0]), v(&[-2.0, 0.5]), v(&[0.3, -0.2])];
        for phi in Catalog1D::ALL {
            let e = Epigraph1D::new(phi, 0.0).unwrap();
            for p in &pts {
                let q = e.project(p).unwrap();
                let g = grid_projection(&e, p);
                let dq = (&q - p).norm();
                let dg = if e.contains_exact(p) { 0.0 } else { (&g - p).norm() };
                assert!(dq <= dg + 1e-7, "{phi:?} {p:?}: {dq} vs grid {dg}");
                assert!(e.contains_exact(&q) || e.excess(q[0], q[1]) < 1e-12);
            }
        }
    }

    #[test]
    fn parabola_projection_of_point_below_vertex() {
        let e = Epigraph1D::new(Catalog1D::Square, 0.0).unwrap();
        assert!(e.project(&v(&[0.0, -1.0])).unwrap().norm() < 1e-15);
    }

    #[test]
    fn far_point_on_reciprocal_branch() {
        let e = Epigraph1D::new(Catalog1D::Reciprocal, 0.0).unwrap();
        let q = e.project(&v(&[1e8, 0.0])).unwrap();
        assert!((q[0] - 1e8).abs() < 1e-6);
        assert!((q[1] - 1e-8).abs() < 1e-12);
    }
}
