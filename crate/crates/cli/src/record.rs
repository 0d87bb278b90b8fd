//! Flat result rows and their CSV encoding.

use maxent_core::maxent::SaddlePoint;
use maxent_core::Error;

/// First line of every sweep CSV; bump when columns change.
pub const SCHEMA: &str = "# schema: maxent-sweep/1";

/// Formats with 12 significant digits, fixed notation for moderate exponents,
/// trailing zeros trimmed, and `-0` printed as `0`.
pub fn fmt12(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim(&format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Short machine-readable name of a failure, used in sentinel rows.
pub fn error_code(e: &Error) -> &'static str {
    match e {
        Error::Infeasible => "infeasible",
        Error::CombinatorialBlowup { .. } => "combinatorial_blowup",
        Error::NewtonDivergence { .. } => "newton_divergence",
        Error::MaxIterExceeded { .. } => "max_iter_exceeded",
        Error::SimplexCycle => "simplex_cycle",
        Error::Unbounded => "unbounded",
        Error::Unsupported { .. } => "unsupported",
        Error::UndefinedExpectation => "undefined_expectation",
        Error::InfiniteReferenceLoss(_) => "infinite_reference_loss",
        _ => "invalid_input",
    }
}

/// Column layout of a sweep for `k` constraints, `n` outcomes and an act
/// payload of length `act_dim`.
#[derive(Debug, Clone, Copy)]
pub struct Layout {
    pub k: usize,
    pub n: usize,
    pub act_dim: usize,
}

impl Layout {
    pub fn header(&self) -> String {
        let mut cols = Vec::new();
        cols.extend(indexed("tau", self.k));
        cols.push("h".into());
        cols.push("beta0".into());
        cols.extend(indexed("beta", self.k));
        cols.extend(indexed("p", self.n));
        cols.extend(indexed("zeta", self.act_dim));
        for c in [
            "is_linear",
            "is_regular",
            "is_equalizer",
            "tau_interior",
            "bayes_margin",
            "vertex_margin",
            "verified",
            "status",
        ] {
            cols.push(c.into());
        }
        cols.join(",")
    }

    /// One row; `scale` multiplies loss-valued columns (h, beta, margins).
    pub fn row(&self, sp: &SaddlePoint, scale: f64) -> String {
        let mut cells: Vec<String> = sp.tau.iter().map(|v| fmt12(*v)).collect();
        cells.push(fmt12(sp.h_star * scale));
        cells.push(opt(sp.beta0.map(|b| b * scale)));
        match &sp.beta {
            Some(b) => cells.extend(b.iter().map(|v| fmt12(v * scale))),
            None => cells.extend(std::iter::repeat_n(String::new(), self.k)),
        }
        cells.extend(sp.p_star.as_slice().iter().map(|v| fmt12(*v)));
        cells.extend(sp.zeta_star.payload.iter().map(|v| fmt12(*v)));
        let f = sp.flags;
        for b in [f.is_linear, f.is_regular, f.is_equalizer, f.tau_interior] {
            cells.push(b.to_string());
        }
        cells.push(fmt12(sp.diagnostics.bayes_margin * scale));
        cells.push(fmt12(sp.diagnostics.vertex_margin * scale));
        cells.push(sp.diagnostics.verified.to_string());
        cells.push("ok".into());
        cells.join(",")
    }

    /// Row for a tau whose solve failed: tau filled in, every other value
    /// empty, status `error:<code>`.
    pub fn sentinel(&self, tau: &[f64], err: &Error) -> String {
        let mut cells: Vec<String> = tau.iter().map(|v| fmt12(*v)).collect();
        let blanks = 2 + self.k + self.n + self.act_dim + 7;
        cells.extend(std::iter::repeat_n(String::new(), blanks));
        cells.push(format!("error:{}", error_code(err)));
        cells.join(",")
    }
}

fn indexed(name: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{name}_{i}")).collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt12).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt12(0.5), "0.5");
        assert_eq!(fmt12(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt12(-1.0 / 3.0), "-0.333333333333");
        assert_eq!(fmt12(123456.0), "123456");
        assert_eq!(fmt12(1e-20), "1e-20");
        assert_eq!(fmt12(-1.234e15), "-1.234e15");
        assert_eq!(fmt12(-0.0), "0");
        assert_eq!(fmt12(1.0986122886681098), "1.09861228867");
        assert_eq!(fmt12(0.0001), "0.0001");
    }

    #[test]
    fn sentinel_has_header_width() {
        let l = Layout { k: 1, n: 3, act_dim: 3 };
        let cols = l.header().split(',').count();
        assert_eq!(l.sentinel(&[2.0], &Error::Infeasible).split(',').count(), cols);
    }
}
