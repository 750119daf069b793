//! Bayesian physics-informed extreme learning machines (BPIELM).
//!
//! A single hidden layer of frozen random `tanh` neurons turns a linear PDE
//! with boundary and interior sensors into a dense linear system
//! `H w = Y`. The baseline ([`pielm`]) solves it with a truncated
//! pseudoinverse. The Bayesian solver ([`bayes`]) places a Gaussian prior on
//! `w`, tunes the prior precision and noise variance with MacKay's evidence
//! procedure, and yields a predictive mean and variance at any point.
//!
//! Inverse problems whose source is a known linear combination of functions
//! with unknown coefficients are handled by appending those coefficients as
//! extra unknown columns ([`assembly::assemble_inverse`]).
//!
//! Feature `parallel` (on by default) computes matrix rows and predictions
//! on the rayon pool; without it everything runs on the calling thread with
//! bit-identical output.

pub mod assembly;
pub mod basis;
pub mod bayes;
mod error;
pub mod metrics;
pub mod operators;
mod par;
pub mod pielm;
pub mod problems;
pub mod rng;

pub use error::{Error, Result};

use std::sync::Arc;

/// A point in the (x, y) plane. Time-dependent 1D problems put `t` in `y`;
/// steady 1D problems keep `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub const fn on_line(x: f64) -> Self {
        Point { x, y: 0.0 }
    }
}

/// A shared real-valued function of a point.
pub type ScalarField = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

/// Wraps a closure as a [`ScalarField`].
pub fn field<F>(f: F) -> ScalarField
where
    F: Fn(Point) -> f64 + Send + Sync + 'static,
{
    Arc::new(f)
}
