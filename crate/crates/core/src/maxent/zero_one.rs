//! Zero-one loss: entropy `1 - max p` is piecewise linear, so both halves of
//! the game are linear programs.
//!
//! The robust Bayes act is generally not unique. Among the acts supported on
//! the modes of `P*` with `max_V L(V, zeta) <= h`, equalizers are preferred
//! when they exist; the canonical pick is then the maximin-balanced member.

use serde::Serialize;

use crate::constraints::{GammaTau, VertexSet};
use crate::error::{Error, Result};
use crate::losses::{zero_one_model, MODE_TOL};
use crate::prob::{Act, Distribution, SampleSpace};
use crate::verify::lp::{Cmp, LinearProgram};

use super::{assemble, diagnostics, feasible_vertices, SaddlePoint};

const LP_SLACK: f64 = 1e-10;

/// Coordinate ranges of the set of robust Bayes acts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActFamily {
    /// `[min, max]` of `zeta(x)` over the family, per outcome.
    pub ranges: Vec<[f64; 2]>,
}

impl ActFamily {
    pub fn is_singleton(&self, tol: f64) -> bool {
        self.ranges.iter().all(|[lo, hi]| hi - lo <= tol)
    }
}

/// Saddle point of the zero-one game on `Gamma_tau`.
pub fn solve_zero_one(g: &GammaTau) -> Result<SaddlePoint> {
    let vs = feasible_vertices(g)?;
    let n = g.n();
    let p_star = least_peaked(g)?;
    let h = 1.0 - p_star.as_slice().iter().copied().fold(0.0, f64::max);
    let pmax = 1.0 - h;
    let modes: Vec<usize> = (0..n).filter(|&x| p_star.get(x) >= pmax - MODE_TOL).collect();

    let robust = ActPolytope {
        n,
        modes: &modes,
        vertices: &vs,
        h,
        equalizer: false,
    };
    let equal = ActPolytope {
        equalizer: true,
        ..robust
    };
    let zeta = match equal.canonical() {
        Ok(z) => z,
        Err(Error::Infeasible) => robust.canonical()?,
        Err(e) => return Err(e),
    };
    let family = robust.ranges()?;
    let mut diag = diagnostics("zero_one_lp");
    diag.family = (!family.is_singleton(1e-9)).then_some(family);
    let model = zero_one_model(SampleSpace::indexed(n)?);
    let zeta = Act::distribution(&Distribution::normalized(zeta)?);
    assemble(&model, g, &vs, p_star, zeta, h, diag)
}

/// `min max_x p(x)` over `Gamma_tau`.
fn least_peaked(g: &GammaTau) -> Result<Distribution> {
    let n = g.n();
    // variables p_0..p_{n-1}, s
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut lp = LinearProgram::new(n + 1).minimize(c);
    for x in 0..n {
        let mut row = vec![0.0; n + 1];
        row[x] = 1.0;
        row[n] = -1.0;
        lp.constrain(row, Cmp::Le, 0.0);
    }
    let mut sum = vec![1.0; n + 1];
    sum[n] = 0.0;
    lp.constrain(sum, Cmp::Eq, 1.0);
    for (row, &tau) in g.statistic().rows().iter().zip(g.tau()) {
        let mut r = row.clone();
        r.push(0.0);
        lp.constrain(r, Cmp::Eq, tau);
    }
    let sol = lp.solve()?;
    Distribution::normalized(sol.x[..n].iter().map(|v| v.max(0.0)).collect())
}

/// Randomized acts on the modes with `L(V, zeta) <= h` at every vertex (and
/// `>= h` too when `equalizer`).
#[derive(Clone, Copy)]
struct ActPolytope<'a> {
    n: usize,
    modes: &'a [usize],
    vertices: &'a VertexSet,
    h: f64,
    equalizer: bool,
}

impl ActPolytope<'_> {
    /// LP over `(zeta_m for m in modes, s)`; `s` is an auxiliary variable.
    fn program(&self, objective: Vec<f64>, maximize: bool) -> LinearProgram {
        let m = self.modes.len();
        let mut lp = LinearProgram::new(m + 1);
        lp = if maximize {
            lp.maximize(objective)
        } else {
            lp.minimize(objective)
        };
        let mut sum = vec![1.0; m + 1];
        sum[m] = 0.0;
        lp.constrain(sum, Cmp::Eq, 1.0);
        for v in &self.vertices.vertices {
            // L(V, zeta) = 1 - sum_m V(m) zeta(m)
            let mut row: Vec<f64> = self.modes.iter().map(|&x| v.get(x)).collect();
            row.push(0.0);
            lp.constrain(row.clone(), Cmp::Ge, 1.0 - self.h - LP_SLACK);
            if self.equalizer {
                lp.constrain(row, Cmp::Le, 1.0 - self.h + LP_SLACK);
            }
        }
        lp
    }

    fn expand(&self, x: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.n];
        for (i, &m) in self.modes.iter().enumerate() {
            z[m] = x[i].max(0.0);
        }
        z
    }

    /// Maximize the smallest mode weight, then average the extreme points of
    /// each coordinate over that optimal face.
    fn canonical(&self) -> Result<Vec<f64>> {
        let m = self.modes.len();
        let mut obj = vec![0.0; m + 1];
        obj[m] = 1.0;
        let mut lp = self.program(obj, true);
        for i in 0..m {
            let mut row = vec![0.0; m + 1];
            row[i] = 1.0;
            row[m] = -1.0;
            lp.constrain(row, Cmp::Ge, 0.0);
        }
        let best = lp.solve()?.objective;

        let mut acc = vec![0.0; m];
        let mut count = 0.0;
        for i in 0..m {
            for maximize in [false, true] {
                let mut obj = vec![0.0; m + 1];
                obj[i] = 1.0;
                let mut lp = self.program(obj, maximize);
                for j in 0..m {
                    let mut row = vec![0.0; m + 1];
                    row[j] = 1.0;
                    lp.constrain(row, Cmp::Ge, (best - LP_SLACK).max(0.0));
                }
                let sol = lp.solve()?;
                acc.iter_mut().zip(&sol.x).for_each(|(a, b)| *a += b);
                count += 1.0;
            }
        }
        let mean: Vec<f64> = acc.iter().map(|a| a / count).collect();
        Ok(self.expand(&mean))
    }

    fn ranges(&self) -> Result<ActFamily> {
        let m = self.modes.len();
        let mut ranges = vec![[0.0, 0.0]; self.n];
        for (i, &x) in self.modes.iter().enumerate() {
            let mut obj = vec![0.0; m + 1];
            obj[i] = 1.0;
            let lo = self.program(obj.clone(), false).solve()?.objective;
            let hi = self.program(obj, true).solve()?.objective;
            ranges[x] = [lo.max(0.0), hi.min(1.0)];
        }
        Ok(ActFamily { ranges })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(tau: f64) -> GammaTau {
        GammaTau::scalar(&[-1.0, 0.0, 1.0], tau).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
    }

    #[test]
    fn quarter() {
        let sp = solve_zero_one(&g(0.25)).unwrap();
        assert!(close(sp.p_star.as_slice(), &[1.0 / 6.0, 5.0 / 12.0, 5.0 / 12.0]));
        assert!((sp.h_star - 7.0 / 12.0).abs() < 1e-9);
        assert!(close(&sp.zeta_star.payload, &[0.0, 1.0 / 3.0, 2.0 / 3.0]));
        assert!((sp.beta0.unwrap() - 2.0 / 3.0).abs() < 1e-9);
        assert!((sp.beta.unwrap()[0] + 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn half_has_a_family() {
        let sp = solve_zero_one(&g(0.5)).unwrap();
        assert!(close(sp.p_star.as_slice(), &[0.0, 0.5, 0.5]));
        assert!(close(&sp.zeta_star.payload, &[0.0, 1.0 / 3.0, 2.0 / 3.0]));
        let fam = sp.diagnostics.family.unwrap();
        assert!(fam.ranges[0][1] <= 1e-12);
        assert!(fam.ranges[1][0].abs() < 1e-9 && (fam.ranges[1][1] - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn zero_is_uniform() {
        let sp = solve_zero_one(&g(0.0)).unwrap();
        assert!(close(sp.p_star.as_slice(), &[1.0 / 3.0; 3]));
        assert!((sp.h_star - 2.0 / 3.0).abs() < 1e-9);
        assert!(close(&sp.zeta_star.payload, &[1.0 / 3.0; 3]));
    }

    #[test]
    fn endpoint() {
        let sp = solve_zero_one(&g(1.0)).unwrap();
        assert!(close(sp.p_star.as_slice(), &[0.0, 0.0, 1.0]));
        assert!(sp.h_star.abs() < 1e-12);
        assert!((sp.beta.unwrap()[0] + 1.0).abs() < 1e-9);
    }
}
