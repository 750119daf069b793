//! The non-Bayesian baseline: minimum-norm least squares through a truncated
//! Moore-Penrose pseudoinverse.

use nalgebra::{DVector, SVD};

use crate::assembly::CollocationSystem;
use crate::basis::RandomBasis;
use crate::{par, Error, Point, Result};

/// Default relative singular-value cutoff for an `rows x cols` system:
/// `1e-12 * max(rows, cols)`.
pub fn default_relative_cutoff(rows: usize, cols: usize) -> f64 {
    1e-12 * rows.max(cols) as f64
}

/// Output weights (and trailing parameters) from the pseudoinverse solve.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSolution {
    pub omega: DVector<f64>,
    /// Number of singular values kept.
    pub rank: usize,
    /// Absolute cutoff applied to singular values.
    pub svd_cutoff: f64,
}

impl PointSolution {
    /// Network output at `points` (parameter columns are ignored).
    pub fn predict(&self, basis: &RandomBasis, points: &[Point]) -> Vec<f64> {
        let w = &self.omega.as_slice()[..basis.len()];
        par::map_indexed(points.len(), |i| basis.evaluate(w, points[i]))
    }

    /// Trailing entries after the `n_basis` weights.
    pub fn parameters(&self, n_basis: usize) -> &[f64] {
        &self.omega.as_slice()[n_basis.min(self.omega.len())..]
    }
}

/// `omega = H^+ Y`, zeroing singular values below
/// `relative_cutoff * s_max`.
pub fn solve_pinv(system: &CollocationSystem, relative_cutoff: f64) -> Result<PointSolution> {
    if !(relative_cutoff > 0.0 && relative_cutoff.is_finite()) {
        return Err(Error::invalid(format!(
            "relative cutoff must be positive, got {relative_cutoff}"
        )));
    }
    let h = system.h();
    if h.iter().chain(system.y().iter()).any(|v| !v.is_finite()) {
        return Err(Error::numerical("pseudoinverse of a non-finite system"));
    }
    let svd = SVD::try_new(h.clone(), true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::numerical("SVD of the collocation matrix"))?;
    let (u, v_t) = match (&svd.u, &svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::numerical("SVD did not return singular vectors")),
    };
    let s_max = svd.singular_values.max();
    let cutoff = relative_cutoff * s_max;
    let uty = u.tr_mul(system.y());
    let mut coeffs = DVector::zeros(svd.singular_values.len());
    let mut rank = 0;
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            coeffs[k] = uty[k] / s;
            rank += 1;
        }
    }
    let omega = v_t.tr_mul(&coeffs);
    if omega.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("pseudoinverse solution is not finite"));
    }
    Ok(PointSolution {
        omega,
        rank,
        svd_cutoff: cutoff,
    })
}
