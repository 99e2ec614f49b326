#![allow(dead_code)]

use barricade_core::geometry::HPolyhedron;
use barricade_core::{Matrix, Vector};
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn v(xs: &[f64]) -> Vector {
    DVector::from_column_slice(xs)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(r: &mut ChaCha8Rng, n: usize) -> Vector {
    DVector::from_fn(n, |_, _| r.random_range(-1.0..1.0))
}

/// `m` random halfspaces, each with slack in `[0.1, 1]` at `x0`.
pub fn random_hpoly(r: &mut ChaCha8Rng, n: usize, m: usize, x0: &Vector) -> (Matrix, Vector) {
    let a = DMatrix::from_fn(m, n, |_, _| r.random_range(-1.0..1.0));
    let b = DVector::from_fn(m, |i, _| (a.row(i) * x0)[0] + r.random_range(0.1..1.0));
    (a, b)
}

/// `{y >= 0 : A^T y = x*}` is feasible, decided by an independent LP.
pub fn dual_cone_oracle(a: &Matrix, xstar: &Vector) -> bool {
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let ys: Vec<_> = (0..a.nrows()).map(|_| p.add_var(0.0, (0.0, f64::INFINITY))).collect();
    for j in 0..a.ncols() {
        let terms: Vec<_> = ys.iter().enumerate().map(|(i, &y)| (y, a[(i, j)])).collect();
        p.add_constraint(terms.as_slice(), ComparisonOp::Eq, xstar[j]);
    }
    p.solve().is_ok()
}

/// `max c.x` subject to `A x <= b`, `None` when unbounded or infeasible.
pub fn lp_max(a: &Matrix, b: &Vector, c: &Vector) -> Option<f64> {
    let mut p = Problem::new(OptimizationDirection::Maximize);
    let xs: Vec<_> = (0..a.ncols())
        .map(|j| p.add_var(c[j], (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    for i in 0..a.nrows() {
        let terms: Vec<_> = xs.iter().enumerate().map(|(j, &x)| (x, a[(i, j)])).collect();
        p.add_constraint(terms.as_slice(), ComparisonOp::Le, b[i]);
    }
    p.solve().ok().map(|s| s.objective()).filter(|v| v.is_finite())
}

/// Whether `{A x <= b} ∩ {B x <= d}` is empty.
pub fn disjoint(c: &HPolyhedron, d: &HPolyhedron) -> bool {
    let a = DMatrix::from_fn(c.a().nrows() + d.a().nrows(), c.a().ncols(), |i, j| {
        if i < c.a().nrows() {
            c.a()[(i, j)]
        } else {
            d.a()[(i - c.a().nrows(), j)]
        }
    });
    let b = DVector::from_iterator(a.nrows(), c.b().iter().chain(d.b().iter()).cloned());
    let mut p = Problem::new(OptimizationDirection::Maximize);
    let xs: Vec<_> = (0..a.ncols()).map(|_| p.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    for i in 0..a.nrows() {
        let terms: Vec<_> = xs.iter().enumerate().map(|(j, &x)| (x, a[(i, j)])).collect();
        p.add_constraint(terms.as_slice(), ComparisonOp::Le, b[i]);
    }
    matches!(p.solve(), Err(minilp::Error::Infeasible))
}
