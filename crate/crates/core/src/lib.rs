//! First-gap times of inhomogeneous Poisson processes.
//!
//! `D` is the first epoch of a Poisson process with intensity `μ(t)` that is
//! followed by an empty interval of length `ℓ`. The crate computes its tail
//! exactly (a delay-differential equation), classifies whether it is finite,
//! gives asymptotic forms of `−log P(D > t)`, simulates it, and covers the
//! discrete analogue (runs of ones in non-stationary Bernoulli trials) and the
//! completion time of a task under RESTART with a time-varying service rate.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod bernoulli;
pub mod cli;
pub mod dde;
pub mod error;
pub mod finiteness;
pub mod intensity;
pub mod montecarlo;
pub mod quadrature;
pub mod restart;
pub mod roots;

pub use dde::{solve_tail, TailCurve};
pub use error::{Error, Result};
pub use finiteness::{ClassificationVerdict, Verdict};
pub use intensity::{Family, RateFunction};
