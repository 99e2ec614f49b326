//! Dense two-phase tableau simplex with Bland's rule.
//!
//! Sized for desk-scale problems (tens of rows and columns). Every call
//! builds its own tableau, so the solver holds no shared state.

const PIVOT_EPS: f64 = 1e-10;
const COST_EPS: f64 = 1e-10;
const FEAS_EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// `maximize objective . x` subject to `rows`, with `x_j >= 0` where
/// `nonneg[j]` and free otherwise.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    n: usize,
    objective: Vec<f64>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
    nonneg: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    /// `ray` is a direction of the feasible region along which the
    /// objective increases without bound.
    Unbounded { ray: Vec<f64> },
    Infeasible,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            n,
            objective,
            rows: Vec::new(),
            nonneg: vec![false; n],
        }
    }

    pub fn with_nonneg(mut self, nonneg: Vec<bool>) -> Self {
        assert_eq!(nonneg.len(), self.n);
        self.nonneg = nonneg;
        self
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.n);
        self.rows.push((coeffs, rel, rhs));
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).solve(self)
    }
}

struct Tableau {
    // m rows of width ncols + 1; last column is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
    // columns of the structural variables: (plus, minus) per original var
    var_cols: Vec<(usize, Option<usize>)>,
    artificial_start: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let mut var_cols = Vec::with_capacity(lp.n);
        let mut col = 0;
        for j in 0..lp.n {
            if lp.nonneg[j] {
                var_cols.push((col, None));
                col += 1;
            } else {
                var_cols.push((col, Some(col + 1)));
                col += 2;
            }
        }
        let structural = col;
        // normalise signs so every rhs is nonnegative
        let rows: Vec<(Vec<f64>, Relation, f64)> = lp
            .rows
            .iter()
            .map(|(a, rel, b)| {
                if *b < 0.0 {
                    let flipped = match rel {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (a.iter().map(|x| -x).collect(), flipped, -b)
                } else {
                    (a.clone(), *rel, *b)
                }
            })
            .collect();
        let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let ncols = structural + n_slack + n_art;
        let artificial_start = structural + n_slack;
        let m = rows.len();
        let mut t = vec![vec![0.0; ncols + 1]; m];
        let mut basis = vec![0; m];
        let mut slack = structural;
        let mut art = artificial_start;
        for (i, (a, rel, b)) in rows.iter().enumerate() {
            for (j, &(p, q)) in var_cols.iter().enumerate() {
                t[i][p] = a[j];
                if let Some(q) = q {
                    t[i][q] = -a[j];
                }
            }
            t[i][ncols] = *b;
            match rel {
                Relation::Le => {
                    t[i][slack] = 1.0;
                    basis[i] = slack;
                    slack += 1;
                }
                Relation::Ge => {
                    t[i][slack] = -1.0;
                    slack += 1;
                    t[i][art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
                Relation::Eq => {
                    t[i][art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
            }
        }
        Tableau {
            t,
            basis,
            ncols,
            var_cols,
            artificial_start,
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland-rule iterations for `max cost . x`. Returns the entering
    /// column on unboundedness.
    fn iterate(&mut self, cost: &[f64], allowed: usize) -> Result<(), usize> {
        let max_pivots = 50_000;
        for _ in 0..max_pivots {
            let rhs = self.ncols;
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut r = cost[j];
                for (i, &b) in self.basis.iter().enumerate() {
                    r -= cost[b] * self.t[i][j];
                }
                if r > COST_EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][c];
                if a > PIVOT_EPS {
                    let ratio = self.t[i][rhs] / a;
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12
                                || (ratio <= lr + 1e-12 && self.basis[i] < self.basis[li])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return Err(c),
            }
        }
        // Bland's rule cannot cycle; hitting this means numerical trouble.
        Ok(())
    }

    fn primal(&self, lp: &LinearProgram) -> Vec<f64> {
        let mut full = vec![0.0; self.ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            full[b] = self.t[i][self.ncols];
        }
        self.structural(lp, &full)
    }

    fn structural(&self, lp: &LinearProgram, full: &[f64]) -> Vec<f64> {
        (0..lp.n)
            .map(|j| {
                let (p, q) = self.var_cols[j];
                full[p] - q.map_or(0.0, |q| full[q])
            })
            .collect()
    }

    fn solve(mut self, lp: &LinearProgram) -> LpOutcome {
        let m = self.t.len();
        if self.artificial_start < self.ncols {
            let mut cost = vec![0.0; self.ncols];
            for c in cost.iter_mut().skip(self.artificial_start) {
                *c = -1.0;
            }
            // Phase one is bounded above by zero, so no ray can come back.
            let _ = self.iterate(&cost, self.ncols);
            let infeas: f64 = (0..m)
                .filter(|&i| self.basis[i] >= self.artificial_start)
                .map(|i| self.t[i][self.ncols])
                .sum();
            let scale = 1.0
                + lp.rows
                    .iter()
                    .map(|r| r.2.abs())
                    .fold(0.0, f64::max);
            if infeas > FEAS_EPS * scale {
                return LpOutcome::Infeasible;
            }
            // drive remaining artificial variables out of the basis
            let mut i = 0;
            while i < self.t.len() {
                if self.basis[i] >= self.artificial_start {
                    let col = (0..self.artificial_start)
                        .filter(|j| !self.basis.contains(j))
                        .find(|&j| self.t[i][j].abs() > 1e-9);
                    match col {
                        Some(j) => {
                            self.pivot(i, j);
                            i += 1;
                        }
                        None => {
                            self.t.remove(i);
                            self.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
        }
        let mut cost = vec![0.0; self.ncols];
        for (j, &(p, q)) in self.var_cols.iter().enumerate() {
            cost[p] = lp.objective[j];
            if let Some(q) = q {
                cost[q] = -lp.objective[j];
            }
        }
        match self.iterate(&cost, self.artificial_start) {
            Ok(()) => {
                let x = self.primal(lp);
                let value = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
                LpOutcome::Optimal { x, value }
            }
            Err(c) => {
                let mut dir = vec![0.0; self.ncols];
                dir[c] = 1.0;
                for (i, &b) in self.basis.iter().enumerate() {
                    dir[b] = -self.t[i][c];
                }
                LpOutcome::Unbounded {
                    ray: self.structural(lp, &dir),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_max() {
        // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x, y >= 0 -> (4, 0), 12
        let mut lp = LinearProgram::new(vec![3.0, 2.0]).with_nonneg(vec![true, true]);
        lp.add_row(vec![1.0, 1.0], Relation::Le, 4.0);
        lp.add_row(vec![1.0, 3.0], Relation::Le, 6.0);
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert!((value - 12.0).abs() < 1e-12);
                assert!((x[0] - 4.0).abs() < 1e-12 && x[1].abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn free_variables_and_ge_rows() {
        // min x + y  s.t. x + y >= -3, x - y = 1  (free vars) -> value -3
        let mut lp = LinearProgram::new(vec![-1.0, -1.0]);
        lp.add_row(vec![1.0, 1.0], Relation::Ge, -3.0);
        lp.add_row(vec![1.0, -1.0], Relation::Eq, 1.0);
        match lp.solve() {
            LpOutcome::Optimal { value, x } => {
                assert!((value - 3.0).abs() < 1e-12);
                assert!((x[0] - x[1] - 1.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded_ray_is_a_recession_direction() {
        // max x over {y <= 0, -y <= 0}
        let mut lp = LinearProgram::new(vec![1.0, 0.0]);
        lp.add_row(vec![0.0, 1.0], Relation::Le, 0.0);
        lp.add_row(vec![0.0, -1.0], Relation::Le, 0.0);
        match lp.solve() {
            LpOutcome::Unbounded { ray } => {
                assert!(ray[0] > 0.0);
                assert!(ray[1].abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_detected() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_row(vec![1.0], Relation::Le, 0.0);
        lp.add_row(vec![1.0], Relation::Ge, 1.0);
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic degenerate vertex at the origin.
        let mut lp = LinearProgram::new(vec![10.0, -57.0, -9.0, -24.0])
            .with_nonneg(vec![true; 4]);
        lp.add_row(vec![0.5, -5.5, -2.5, 9.0], Relation::Le, 0.0);
        lp.add_row(vec![0.5, -1.5, -0.5, 1.0], Relation::Le, 0.0);
        lp.add_row(vec![1.0, 0.0, 0.0, 0.0], Relation::Le, 1.0);
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert!((value - 1.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }
}
