//! Generalized maximum entropy and robust Bayes acts on finite sample spaces.
//!
//! A decision problem is a [`LossModel`](losses::LossModel): Nature draws
//! `X` from some `P`, the decision maker takes an act and pays `L(X, act)`.
//! The generalized entropy `H(P)` is the Bayes loss against `P`. Restricting
//! Nature to a mean-value polytope `{P : E_P(T) = tau}` gives a zero-sum game
//! whose saddle-point pairs the maximum-entropy distribution with the robust
//! (minimax) act.
//!
//! Modules:
//!
//! - [`prob`]: sample spaces, distributions, statistics, acts, expected loss
//! - [`losses`]: Brier, log, zero-one, quadratic and separable Bregman models
//! - [`divergence`]: discrepancy, divergence, relative models, Pythagorean checks
//! - [`constraints`]: the polytope `Gamma_tau` and its vertices
//! - [`maxent`]: saddle-point solvers, conjugate duality, family traces
//! - [`verify`]: LP game solver and saddle-point oracles
//! - [`derived`]: derived games and redundancy-capacity

pub mod constraints;
pub mod derived;
pub mod divergence;
pub mod error;
pub mod ext_real;
pub mod linalg;
pub mod losses;
pub mod maxent;
pub mod prob;
pub mod sampling;
pub mod verify;

pub use error::{Error, Result};
pub use ext_real::ExtReal;
pub use losses::LossModel;
pub use prob::{Act, ActKind, BaseMeasure, Distribution, SampleSpace, Statistic};
