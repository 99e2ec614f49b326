//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Matrix, Vector};

/// Orthonormal basis of `{v : m v = 0}`. Singular values below
/// `tol * max(1, sigma_max)` count as zero.
pub fn nullspace(m: &Matrix, tol: f64) -> Vec<Vector> {
    let n = m.ncols();
    if n == 0 {
        return Vec::new();
    }
    if m.nrows() == 0 {
        return (0..n).map(|i| unit(n, i)).collect();
    }
    // Pad to at least n rows so the SVD returns a full right basis.
    let rows = m.nrows().max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = tol * smax.max(1.0);
    let mut out = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= cutoff {
            out.push(vt.row(i).transpose().into_owned());
        }
    }
    out
}

/// Numerical rank by column-pivoted QR with a relative threshold.
pub fn rank_col_piv(m: &Matrix, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let qr = m.clone().col_piv_qr();
    let r = qr.r();
    let k = r.nrows().min(r.ncols());
    let lead = r[(0, 0)].abs();
    if lead == 0.0 {
        return 0;
    }
    (0..k).filter(|&i| r[(i, i)].abs() > tol * lead.max(1.0)).count()
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn lstsq(a: &Matrix, b: &Vector) -> Vector {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = 1e-13 * smax.max(1e-300) * (a.nrows().max(a.ncols()) as f64);
    svd.solve(b, eps)
        .unwrap_or_else(|_| DVector::zeros(a.ncols()))
}

pub fn unit(n: usize, i: usize) -> Vector {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

/// Returns `v / |v|`, or `None` for a (numerically) zero vector.
pub fn normalized(v: &Vector) -> Option<Vector> {
    let n = v.norm();
    if n > 1e-300 && n.is_finite() {
        Some(v / n)
    } else {
        None
    }
}

/// Flip sign so the first component with magnitude above 1e-12 is positive.
pub fn canonical_sign(mut v: Vector) -> Vector {
    if let Some(x) = v.iter().find(|x| x.abs() > 1e-12) {
        if *x < 0.0 {
            v.neg_mut();
        }
    }
    v
}

/// Push `v` onto `list` unless a vector within `tol` is already present.
pub fn push_unique(list: &mut Vec<Vector>, v: Vector, tol: f64) {
    if !list.iter().any(|u| (u - &v).norm() <= tol) {
        list.push(v);
    }
}

fn halton(index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const PRIMES: [usize; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic, well-spread unit vectors in R^n.
///
/// n = 1 gives {+1, -1}; n = 2 gives equally spaced angles with a seeded
/// phase; higher dimensions use a seeded, Cranley-Patterson rotated Halton
/// sequence pushed through the Box-Muller transform.
pub fn sphere_directions(n: usize, count: usize, seed: u64) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match n {
        0 => Vec::new(),
        1 => vec![DVector::from_element(1, 1.0), DVector::from_element(1, -1.0)],
        2 => {
            let phase: f64 = rng.random::<f64>() * std::f64::consts::TAU / count.max(1) as f64;
            (0..count)
                .map(|k| {
                    let t = phase + std::f64::consts::TAU * k as f64 / count as f64;
                    DVector::from_vec(vec![t.cos(), t.sin()])
                })
                .collect()
        }
        _ => {
            let dims = 2 * n.div_ceil(2);
            let shifts: Vec<f64> = (0..dims).map(|_| rng.random::<f64>()).collect();
            let mut out = Vec::with_capacity(count);
            let mut idx = 1;
            while out.len() < count {
                let mut g = Vec::with_capacity(dims);
                for pair in 0..dims / 2 {
                    let b1 = PRIMES[(2 * pair) % PRIMES.len()];
                    let b2 = PRIMES[(2 * pair + 1) % PRIMES.len()];
                    let u1 = (halton(idx, b1) + shifts[2 * pair]).fract().max(1e-12);
                    let u2 = (halton(idx, b2) + shifts[2 * pair + 1]).fract();
                    let r = (-2.0 * u1.ln()).sqrt();
                    let t = std::f64::consts::TAU * u2;
                    g.push(r * t.cos());
                    g.push(r * t.sin());
                }
                g.truncate(n);
                if let Some(v) = normalized(&DVector::from_vec(g)) {
                    out.push(v);
                }
                idx += 1;
            }
            out
        }
    }
}

/// Row `i` of `m` as an owned column vector.
pub fn row(m: &Matrix, i: usize) -> Vector {
    m.row(i).transpose().into_owned()
}

/// Stack row vectors into a matrix with `n` columns (empty list allowed).
pub fn stack_rows(rows: &[Vector], n: usize) -> Matrix {
    let mut m = DMatrix::zeros(rows.len(), n);
    for (i, r) in rows.iter().enumerate() {
        m.set_row(i, &r.transpose());
    }
    m
}

/// Nonnegative least squares `min |e u - f|`, `u >= 0` (Lawson-Hanson).
pub fn nnls(e: &Matrix, f: &Vector) -> Vector {
    let m = e.ncols();
    let mut u = DVector::zeros(m);
    let mut passive = vec![false; m];
    let scale = e.amax().max(1.0) * f.amax().max(1.0);
    let tol = 1e-12 * scale * (m.max(1) as f64);
    for _ in 0..(3 * m + 10) {
        let w = e.transpose() * (f - e * &u);
        let Some((j, wj)) = (0..m)
            .filter(|&j| !passive[j])
            .map(|j| (j, w[j]))
            .max_by(|x, y| x.1.total_cmp(&y.1))
        else {
            break;
        };
        if wj <= tol {
            break;
        }
        passive[j] = true;
        for _ in 0..(3 * m + 10) {
            let idx: Vec<usize> = (0..m).filter(|&i| passive[i]).collect();
            let ep = Matrix::from_fn(e.nrows(), idx.len(), |r, c| e[(r, idx[c])]);
            let sp = lstsq(&ep, f);
            if sp.iter().all(|&x| x > 0.0) {
                u.fill(0.0);
                for (c, &i) in idx.iter().enumerate() {
                    u[i] = sp[c];
                }
                break;
            }
            let alpha = idx
                .iter()
                .enumerate()
                .filter(|(c, _)| sp[*c] <= 0.0)
                .map(|(c, &i)| u[i] / (u[i] - sp[c]))
                .fold(f64::INFINITY, f64::min);
            for (c, &i) in idx.iter().enumerate() {
                u[i] += alpha * (sp[c] - u[i]);
                if u[i] <= tol * 1e-3 {
                    u[i] = 0.0;
                    passive[i] = false;
                }
            }
            if idx.iter().all(|&i| !passive[i]) {
                break;
            }
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nnls_small() {
        let e = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let u = nnls(&e, &DVector::from_vec(vec![2.0, -1.0]));
        assert_eq!(u, DVector::from_vec(vec![2.0, 0.0]));
    }

    #[test]
    fn nullspace_of_wide_matrix() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let ns = nullspace(&m, 1e-10);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!((m.clone() * v).norm() < 1e-12);
        }
    }

    #[test]
    fn rank_detects_dependent_rows() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, -1.0, -2.0]);
        assert_eq!(rank_col_piv(&m, 1e-9), 1);
    }

    #[test]
    fn sphere_directions_are_unit_and_deterministic() {
        let a = sphere_directions(4, 32, 7);
        let b = sphere_directions(4, 32, 7);
        assert_eq!(a.len(), 32);
        for (u, v) in a.iter().zip(&b) {
            assert!((u.norm() - 1.0).abs() < 1e-12);
            assert_eq!(u, v);
        }
    }
}
