//! Brier score: the maximum entropy distribution is affine in `t` on its
//! support, so every candidate support gives a small linear system.

use nalgebra::{DMatrix, DVector};

use crate::constraints::{Combinations, EnumerationLimits, GammaTau};
use crate::error::{Error, Result};
use crate::linalg::min_norm_solve;
use crate::losses::{brier_model, LossModel};
use crate::prob::{Act, Distribution, SampleSpace};

use super::{assemble, diagnostics, feasible_vertices, SaddlePoint};

const NEG_TOL: f64 = 1e-12;
const SYSTEM_TOL: f64 = 1e-10;

/// Saddle point of the Brier game on `Gamma_tau`.
///
/// Supports are tried from largest to smallest (lexicographic within a
/// size); for each, `p = alpha0 + alpha^T t` on the support and zero off it is
/// fitted to the moment constraints. All nonnegative solutions are collected
/// and the one with the largest entropy `1 - sum p^2` wins.
pub fn solve_brier(g: &GammaTau) -> Result<SaddlePoint> {
    let n = g.n();
    let limits = EnumerationLimits::default();
    if n > limits.max_n {
        return Err(Error::CombinatorialBlowup {
            supports: (1u128 << n.min(127)) - 1,
            reason: format!("N = {n} exceeds the enumeration cap {}", limits.max_n),
        });
    }
    let vs = feasible_vertices(g)?;
    let t = g.statistic();
    let k = t.k();

    let mut best: Option<(f64, Vec<f64>)> = None;
    for size in (1..=n).rev() {
        for support in Combinations::new(n, size) {
            // sum_{x in S} [1; t(x)] [1 t(x)^T] alpha = [1; tau]
            let a = DMatrix::from_fn(
                size,
                k + 1,
                |i, j| if j == 0 { 1.0 } else { t.rows()[j - 1][support[i]] },
            );
            let m = a.transpose() * &a;
            let mut rhs = vec![1.0];
            rhs.extend_from_slice(g.tau());
            let (alpha, resid) = min_norm_solve(&m, &DVector::from_vec(rhs));
            if resid > SYSTEM_TOL {
                continue;
            }
            let on = &a * alpha;
            if on.iter().any(|&v| v < -NEG_TOL) {
                continue;
            }
            let mut p = vec![0.0; n];
            for (i, &x) in support.iter().enumerate() {
                p[x] = on[i].max(0.0);
            }
            let h = 1.0 - p.iter().map(|v| v * v).sum::<f64>();
            if best.as_ref().is_none_or(|(hb, _)| h > *hb + 1e-15) {
                best = Some((h, p));
            }
        }
    }
    let (_, p) = best.ok_or(Error::Infeasible)?;
    let p_star = Distribution::normalized(p)?;
    let model = brier_model(SampleSpace::indexed(n)?);
    let h_star = model.entropy(&p_star)?;
    assemble(
        &model,
        g,
        &vs,
        p_star.clone(),
        Act::distribution(&p_star),
        h_star,
        diagnostics("brier_support_enumeration"),
    )
}
