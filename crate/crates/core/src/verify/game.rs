use serde::Serialize;

use crate::error::{Error, Result};

use super::lp::{Cmp, LinearProgram};

/// Finite zero-sum game: rows are Nature's choices, columns the decision
/// maker's; entry `(i, j)` is what the decision maker pays.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGame {
    payoff: Vec<Vec<f64>>,
}

impl MatrixGame {
    pub fn new(payoff: Vec<Vec<f64>>) -> Result<Self> {
        let cols = payoff.first().map(Vec::len).unwrap_or(0);
        if cols == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        for row in &payoff {
            crate::prob::check_len(cols, row.len())?;
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidAct("game payoffs must be finite".into()));
            }
        }
        Ok(Self { payoff })
    }

    pub fn rows(&self) -> usize {
        self.payoff.len()
    }

    pub fn cols(&self) -> usize {
        self.payoff[0].len()
    }

    pub fn payoff(&self) -> &[Vec<f64>] {
        &self.payoff
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameSolution {
    pub value: f64,
    /// Nature's maximin mixture over rows.
    pub row_strategy: Vec<f64>,
    /// Decision maker's minimax mixture over columns.
    pub col_strategy: Vec<f64>,
    /// `value - min_j (row^T L)_j`, nonnegative up to round-off.
    pub row_margin: f64,
    /// `max_i (L col)_i - value`.
    pub col_margin: f64,
}

/// Mixed-strategy value of a finite zero-sum game via its primal/dual LPs.
pub fn lp_game_value(game: &MatrixGame) -> Result<GameSolution> {
    let (m, n) = (game.rows(), game.cols());
    let l = &game.payoff;

    // Nature: max v s.t. sum_i y_i L_ij >= v for all j, sum y = 1
    let mut c = vec![0.0; m + 1];
    c[m] = 1.0;
    let mut nature = LinearProgram::new(m + 1).maximize(c);
    nature.set_free(m);
    for j in 0..n {
        let mut row: Vec<f64> = l.iter().map(|r| r[j]).collect();
        row.push(-1.0);
        nature.constrain(row, Cmp::Ge, 0.0);
    }
    let mut ones = vec![1.0; m];
    ones.push(0.0);
    nature.constrain(ones, Cmp::Eq, 1.0);
    let ns = nature.solve()?;

    // decision maker: min v s.t. sum_j L_ij w_j <= v for all i, sum w = 1
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut dm = LinearProgram::new(n + 1).minimize(c);
    dm.set_free(n);
    for row in l {
        let mut r = row.clone();
        r.push(-1.0);
        dm.constrain(r, Cmp::Le, 0.0);
    }
    let mut ones = vec![1.0; n];
    ones.push(0.0);
    dm.constrain(ones, Cmp::Eq, 1.0);
    let ds = dm.solve()?;

    let row_strategy = clean(&ns.x[..m]);
    let col_strategy = clean(&ds.x[..n]);
    let value = 0.5 * (ns.objective + ds.objective);
    let lower = (0..n)
        .map(|j| (0..m).map(|i| row_strategy[i] * l[i][j]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let upper = l
        .iter()
        .map(|row| row.iter().zip(&col_strategy).map(|(a, b)| a * b).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(GameSolution {
        value,
        row_strategy,
        col_strategy,
        row_margin: value - lower,
        col_margin: upper - value,
    })
}

fn clean(x: &[f64]) -> Vec<f64> {
    let v: Vec<f64> = x.iter().map(|&a| a.max(0.0)).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|a| a / s).collect()
}
