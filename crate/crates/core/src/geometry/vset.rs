use nalgebra::{DMatrix, DVector};

use crate::error::{check_finite, Error, Result};
use crate::linalg::lstsq;
use crate::{Matrix, Vector};

/// `conv(points) + cone(rays)` with unit rays.
#[derive(Debug, Clone)]
pub struct VSet {
    points: Vec<Vector>,
    rays: Vec<Vector>,
    // columns: points then rays
    gens: Matrix,
}

impl VSet {
    pub fn new(points: Vec<Vector>, rays: Vec<Vector>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::Invalid("vset needs at least one point".into()));
        };
        let n = first.len();
        if n == 0 {
            return Err(Error::Invalid("dimension must be at least 1".into()));
        }
        for p in points.iter().chain(&rays) {
            if p.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: p.len(),
                });
            }
            check_finite(p, "vset generator")?;
        }
        let mut unit_rays = Vec::with_capacity(rays.len());
        for r in rays {
            let norm = r.norm();
            if norm <= 1e-14 {
                return Err(Error::Invalid("vset rays must be nonzero".into()));
            }
            unit_rays.push(r / norm);
        }
        let mut gens = DMatrix::zeros(n, points.len() + unit_rays.len());
        for (j, g) in points.iter().chain(&unit_rays).enumerate() {
            gens.set_column(j, g);
        }
        Ok(VSet {
            points,
            rays: unit_rays,
            gens,
        })
    }

    pub fn dim(&self) -> usize {
        self.gens.nrows()
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn rays(&self) -> &[Vector] {
        &self.rays
    }

    /// Active-set solve of `min |G z - x|` over `z >= 0` with the point
    /// weights summing to one.
    pub fn project(&self, x: &Vector, _tol: f64, max_iter: usize) -> Result<Vector> {
        let k = self.points.len();
        let total = self.gens.ncols();
        let is_point = |j: usize| j < k;
        let scale = 1.0 + x.amax() + self.gens.amax();
        let start = (0..k)
            .min_by(|&i, &j| {
                let di = (&self.points[i] - x).norm();
                let dj = (&self.points[j] - x).norm();
                di.total_cmp(&dj)
            })
            .expect("nonempty");
        let mut z = DVector::zeros(total);
        z[start] = 1.0;
        let mut free = vec![start];
        for _ in 0..max_iter.max(4 * total + 8) {
            let (s, nu) = self.solve_free(x, &free, k);
            let mut s_full = DVector::zeros(total);
            for (pos, &j) in free.iter().enumerate() {
                s_full[j] = s[pos];
            }
            if s.iter().all(|&v| v > 0.0) {
                z = s_full;
                let g = self.gens.transpose() * (&self.gens * &z - x);
                let mut worst = None;
                let mut worst_val = -1e-12 * scale * scale;
                for j in 0..total {
                    if free.contains(&j) {
                        continue;
                    }
                    let w = g[j] + if is_point(j) { nu } else { 0.0 };
                    if w < worst_val {
                        worst_val = w;
                        worst = Some(j);
                    }
                }
                match worst {
                    Some(j) => free.push(j),
                    None => return Ok(&self.gens * z),
                }
            } else {
                let mut alpha = 1.0;
                for &j in &free {
                    if s_full[j] <= 0.0 {
                        let a = z[j] / (z[j] - s_full[j]);
                        if a < alpha {
                            alpha = a;
                        }
                    }
                }
                z = &z + (&s_full - &z) * alpha;
                free.retain(|&j| z[j] > 1e-15);
                for j in 0..total {
                    if !free.contains(&j) {
                        z[j] = 0.0;
                    }
                }
                if !free.iter().any(|&j| is_point(j)) {
                    // keep the simplex constraint representable
                    let j = (0..k).max_by(|&a, &b| z[a].total_cmp(&z[b])).unwrap_or(0);
                    free.push(j);
                }
            }
        }
        let p = &self.gens * &z;
        Err(Error::convergence("vset projection", max_iter, (&p - x).norm(), Some(p)))
    }

    /// Equality-constrained least squares on the free columns. Returns the
    /// free coefficients and the multiplier of the simplex constraint.
    fn solve_free(&self, x: &Vector, free: &[usize], k: usize) -> (Vector, f64) {
        let f = free.len();
        let mut kkt = DMatrix::zeros(f + 1, f + 1);
        let mut rhs = DVector::zeros(f + 1);
        for (a, &i) in free.iter().enumerate() {
            let gi = self.gens.column(i);
            for (b, &j) in free.iter().enumerate() {
                kkt[(a, b)] = gi.dot(&self.gens.column(j));
            }
            rhs[a] = gi.dot(x);
            if i < k {
                kkt[(a, f)] = 1.0;
                kkt[(f, a)] = 1.0;
            }
        }
        rhs[f] = 1.0;
        let sol = lstsq(&kkt, &rhs);
        (sol.rows(0, f).into_owned(), sol[f])
    }
}
