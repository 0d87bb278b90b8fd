//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Meant for the small programs that show up here (matrix games, supporting
//! hyperplanes, zero-one entropy maximization); no sparsity, no presolve.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-12;
const COST_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<f64>,
    cmp: Cmp,
    rhs: f64,
}

/// `max/min c^T x` subject to linear rows; variables are nonnegative unless
/// marked free.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    n: usize,
    free: Vec<bool>,
    objective: Vec<f64>,
    maximize: bool,
    rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

impl LinearProgram {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            free: vec![false; n],
            objective: vec![0.0; n],
            maximize: true,
            rows: Vec::new(),
        }
    }

    pub fn maximize(mut self, c: Vec<f64>) -> Self {
        assert_eq!(c.len(), self.n);
        self.objective = c;
        self.maximize = true;
        self
    }

    pub fn minimize(mut self, c: Vec<f64>) -> Self {
        assert_eq!(c.len(), self.n);
        self.objective = c;
        self.maximize = false;
        self
    }

    pub fn set_free(&mut self, j: usize) {
        self.free[j] = true;
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, cmp: Cmp, rhs: f64) {
        assert_eq!(coeffs.len(), self.n);
        self.rows.push(Row { coeffs, cmp, rhs });
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn solve(&self) -> Result<LpSolution> {
        // column layout: [split originals | slacks/surpluses | artificials]
        let mut col_of = Vec::with_capacity(self.n);
        let mut ncols = 0;
        for j in 0..self.n {
            col_of.push(ncols);
            ncols += if self.free[j] { 2 } else { 1 };
        }
        let n_struct = ncols;
        let m = self.rows.len();
        let mut rows: Vec<(Vec<f64>, Cmp, f64)> = Vec::with_capacity(m);
        for r in &self.rows {
            let mut coeffs = vec![0.0; n_struct];
            for j in 0..self.n {
                coeffs[col_of[j]] = r.coeffs[j];
                if self.free[j] {
                    coeffs[col_of[j] + 1] = -r.coeffs[j];
                }
            }
            let (mut cmp, mut rhs) = (r.cmp, r.rhs);
            if rhs < 0.0 {
                coeffs.iter_mut().for_each(|c| *c = -*c);
                rhs = -rhs;
                cmp = match cmp {
                    Cmp::Le => Cmp::Ge,
                    Cmp::Ge => Cmp::Le,
                    Cmp::Eq => Cmp::Eq,
                };
            }
            rows.push((coeffs, cmp, rhs));
        }
        let n_slack = rows.iter().filter(|r| r.1 != Cmp::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Cmp::Le).count();
        let total = n_struct + n_slack + n_art;
        let mut t = Tableau {
            a: vec![vec![0.0; total + 1]; m],
            basis: vec![0; m],
        };
        let (mut s, mut art) = (n_struct, n_struct + n_slack);
        for (i, (coeffs, cmp, rhs)) in rows.iter().enumerate() {
            t.a[i][..n_struct].copy_from_slice(coeffs);
            t.a[i][total] = *rhs;
            match cmp {
                Cmp::Le => {
                    t.a[i][s] = 1.0;
                    t.basis[i] = s;
                    s += 1;
                }
                Cmp::Ge => {
                    t.a[i][s] = -1.0;
                    s += 1;
                    t.a[i][art] = 1.0;
                    t.basis[i] = art;
                    art += 1;
                }
                Cmp::Eq => {
                    t.a[i][art] = 1.0;
                    t.basis[i] = art;
                    art += 1;
                }
            }
        }
        let is_art = |j: usize| j >= n_struct + n_slack && j < total;

        if n_art > 0 {
            let cost: Vec<f64> = (0..total).map(|j| if is_art(j) { -1.0 } else { 0.0 }).collect();
            let allowed = vec![true; total];
            t.run(&cost, &allowed)?;
            let infeas: f64 = (0..m).filter(|&i| is_art(t.basis[i])).map(|i| t.a[i][total]).sum();
            if infeas > FEAS_TOL {
                return Err(Error::Infeasible);
            }
            // drive remaining zero-level artificials out of the basis
            let mut i = 0;
            while i < t.a.len() {
                if is_art(t.basis[i]) {
                    let pivot_col = (0..n_struct + n_slack)
                        .filter(|&j| t.a[i][j].abs() > 1e-9)
                        .max_by(|&x, &y| t.a[i][x].abs().total_cmp(&t.a[i][y].abs()));
                    match pivot_col {
                        Some(j) => t.pivot(i, j),
                        None => {
                            t.a.remove(i);
                            t.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
        }

        let mut cost = vec![0.0; total];
        let sign = if self.maximize { 1.0 } else { -1.0 };
        for j in 0..self.n {
            cost[col_of[j]] = sign * self.objective[j];
            if self.free[j] {
                cost[col_of[j] + 1] = -sign * self.objective[j];
            }
        }
        let allowed: Vec<bool> = (0..total).map(|j| !is_art(j)).collect();
        t.run(&cost, &allowed)?;

        let mut y = vec![0.0; total];
        for (i, &b) in t.basis.iter().enumerate() {
            y[b] = t.a[i][total];
        }
        let x: Vec<f64> = (0..self.n)
            .map(|j| {
                if self.free[j] {
                    y[col_of[j]] - y[col_of[j] + 1]
                } else {
                    y[col_of[j]]
                }
            })
            .collect();
        let objective = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        Ok(LpSolution { x, objective })
    }
}

struct Tableau {
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let width = self.a[r].len();
        let p = self.a[r][c];
        for v in self.a[r].iter_mut() {
            *v /= p;
        }
        self.a[r][c] = 1.0;
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for j in 0..width {
                    row[j] -= f * pivot_row[j];
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost^T y` from the current basic feasible solution.
    fn run(&mut self, cost: &[f64], allowed: &[bool]) -> Result<()> {
        let total = cost.len();
        let max_iter = 50 * (total + self.a.len()) + 1000;
        for _ in 0..max_iter {
            let entering = (0..total).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let reduced = cost[j]
                    - self
                        .a
                        .iter()
                        .zip(&self.basis)
                        .map(|(row, &b)| cost[b] * row[j])
                        .sum::<f64>();
                reduced > COST_TOL
            });
            let Some(c) = entering else {
                return Ok(());
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for (i, row) in self.a.iter().enumerate() {
                if row[c] > PIVOT_TOL {
                    let ratio = row[total] / row[c];
                    let better = match best {
                        None => true,
                        Some((r, _, b)) => ratio < r - 1e-14 || (ratio <= r + 1e-14 && self.basis[i] < b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            let Some((_, r, _)) = best else {
                return Err(Error::Unbounded);
            };
            self.pivot(r, c);
        }
        Err(Error::SimplexCycle)
    }
}
