use nalgebra::DVector;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{lstsq, nnls, row, stack_rows};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::{Matrix, Vector};

/// `{x : A x <= b}` with unit-norm rows.
#[derive(Debug, Clone)]
pub struct HPolyhedron {
    a: Matrix,
    b: Vector,
    witness: Vector,
    bounded: bool,
}

impl HPolyhedron {
    /// Zero rows are dropped (an infeasible zero row makes the set empty);
    /// the remaining rows are scaled to unit length. Emptiness is decided by
    /// an LP at construction.
    pub fn new(a: Matrix, b: Vector) -> Result<Self> {
        check_dim(a.nrows(), b.len())?;
        if a.ncols() == 0 {
            return Err(Error::Invalid("dimension must be at least 1".into()));
        }
        if a.iter().chain(b.iter()).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("polyhedron data"));
        }
        let n = a.ncols();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for i in 0..a.nrows() {
            let r = row(&a, i);
            let norm = r.norm();
            if norm <= 1e-14 {
                if b[i] < -1e-12 {
                    return Err(Error::Empty(format!("row {i} reads 0 <= {}", b[i])));
                }
                continue;
            }
            rows.push(r / norm);
            rhs.push(b[i] / norm);
        }
        if rows.is_empty() {
            return Err(Error::Invalid("polyhedron needs at least one nonzero row".into()));
        }
        let a = stack_rows(&rows, n);
        let b = DVector::from_vec(rhs);
        let witness = chebyshev_point(&a, &b)?;
        let bounded = (0..n).all(|i| {
            [1.0, -1.0].iter().all(|&s| {
                let mut c = vec![0.0; n];
                c[i] = s;
                matches!(lp_over(&a, &b, c), LpOutcome::Optimal { .. })
            })
        });
        Ok(HPolyhedron {
            a,
            b,
            witness,
            bounded,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    pub fn witness(&self) -> &Vector {
        &self.witness
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    /// `max_i (a_i x - b_i)`, clipped below at zero.
    pub fn residual(&self, x: &Vector) -> f64 {
        (&self.a * x - &self.b).iter().cloned().fold(0.0, f64::max)
    }

    /// Maximize `c . x` over the polyhedron.
    pub fn maximize(&self, c: &Vector) -> LpOutcome {
        lp_over(&self.a, &self.b, c.iter().cloned().collect())
    }

    pub fn project(&self, x: &Vector, tol: f64, max_iter: usize) -> Result<Vector> {
        project_rows(&self.a, &self.b, x, tol, max_iter)
    }
}

/// Projection onto `{x : a x <= b}` for unit-norm rows: Dykstra sweeps over
/// the halfspaces, finished by an active-set solve of the KKT system.
pub(crate) fn project_rows(a: &Matrix, b: &Vector, x: &Vector, tol: f64, max_iter: usize) -> Result<Vector> {
    if residual(a, b, x) == 0.0 {
        return Ok(x.clone());
    }
    if let Some(p) = polish(a, b, x, Vec::new()) {
        return Ok(p);
    }
    if let Some(p) = polish(a, b, x, least_distance_active(a, b, x)) {
        return Ok(p);
    }
    let m = a.nrows();
    let mut lam = vec![0.0; m];
    let mut xc = x.clone();
    for sweep in 1..=max_iter {
        let prev = xc.clone();
        for (i, li) in lam.iter_mut().enumerate() {
            let ai = a.row(i);
            let y = &xc + ai.transpose() * *li;
            let viol = (ai * &y)[0] - b[i];
            *li = viol.max(0.0);
            xc = y - ai.transpose() * *li;
        }
        if sweep % 25 == 0 || (&xc - &prev).norm() <= 1e-14 * (1.0 + xc.norm()) {
            let active: Vec<usize> = (0..m).filter(|&i| lam[i] > 0.0).collect();
            if let Some(p) = polish(a, b, x, active) {
                return Ok(p);
            }
        }
    }
    let residual = residual(a, b, &xc);
    if residual <= tol {
        return Ok(xc);
    }
    Err(Error::convergence("polyhedron projection", max_iter, residual, Some(xc)))
}

/// Active rows of the projection, from the least-distance problem
/// `min |z|` s.t. `-a z >= a x - b` solved through NNLS.
fn least_distance_active(a: &Matrix, b: &Vector, x: &Vector) -> Vec<usize> {
    let (m, n) = (a.nrows(), a.ncols());
    let h = a * x - b;
    let e = Matrix::from_fn(n + 1, m, |r, c| if r < n { -a[(c, r)] } else { h[c] });
    let mut f = DVector::zeros(n + 1);
    f[n] = 1.0;
    let u = nnls(&e, &f);
    (0..m).filter(|&i| u[i] > 0.0).collect()
}

/// Active-set solve of the projection KKT system from a starting guess
/// of active rows. Returns a point satisfying KKT to rounding accuracy.
fn polish(a: &Matrix, b: &Vector, x: &Vector, mut work: Vec<usize>) -> Option<Vector> {
    let m = a.nrows();
    let scale = 1.0 + b.amax() + x.amax();
    for _ in 0..(4 * m + 16) {
        let p = if work.is_empty() {
            x.clone()
        } else {
            let rows: Vec<Vector> = work.iter().map(|&i| row(a, i)).collect();
            let aw = stack_rows(&rows, a.ncols());
            let bw = DVector::from_iterator(work.len(), work.iter().map(|&i| b[i]));
            let mut z = lstsq(&aw, &(&aw * x - &bw));
            z += lstsq(&aw, &(&aw * (x - &z) - &bw));
            let lam = lstsq(&aw.transpose(), &z);
            let (imin, lmin) = lam
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, &l)| if l < acc.1 { (i, l) } else { acc });
            if lmin < -1e-12 * scale {
                work.remove(imin);
                continue;
            }
            x - z
        };
        let abs_p = p.abs() + x.abs();
        let slack = (a.abs() * &abs_p + b.abs()).add_scalar(1.0) * 1e-14;
        let viol = a * &p - b - slack;
        let (jmax, vmax) = viol
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        if vmax > 0.0 {
            if work.contains(&jmax) {
                return None;
            }
            work.push(jmax);
            continue;
        }
        return Some(p);
    }
    None
}

fn residual(a: &Matrix, b: &Vector, x: &Vector) -> f64 {
    (a * x - b).iter().cloned().fold(0.0, f64::max)
}

pub(crate) fn lp_over(a: &Matrix, b: &Vector, objective: Vec<f64>) -> LpOutcome {
    let mut lp = LinearProgram::new(objective);
    for i in 0..a.nrows() {
        lp.add_row(a.row(i).iter().cloned().collect(), Relation::Le, b[i]);
    }
    lp.solve()
}

/// Centre of a largest inscribed ball (radius capped at 1), or any feasible
/// point for flat polyhedra.
fn chebyshev_point(a: &Matrix, b: &Vector) -> Result<Vector> {
    let n = a.ncols();
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    let mut lp = LinearProgram::new(obj);
    for i in 0..a.nrows() {
        let mut r: Vec<f64> = a.row(i).iter().cloned().collect();
        r.push(1.0);
        lp.add_row(r, Relation::Le, b[i]);
    }
    let mut cap = vec![0.0; n + 1];
    cap[n] = 1.0;
    lp.add_row(cap, Relation::Le, 1.0);
    match lp.solve() {
        LpOutcome::Optimal { x, value } if value >= -1e-9 => Ok(DVector::from_iterator(n, x.into_iter().take(n))),
        LpOutcome::Optimal { .. } | LpOutcome::Infeasible => {
            Err(Error::Empty("polyhedron has no feasible point".into()))
        }
        LpOutcome::Unbounded { .. } => unreachable!("inscribed radius is capped"),
    }
}
