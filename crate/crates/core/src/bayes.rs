//! Bayesian linear regression over a collocation system.
//!
//! Prior `w ~ N(0, eta^-1 I)`, likelihood `Y | w ~ N(H w, sigma2 I)`. The
//! posterior is Gaussian with
//!
//! ```text
//! Sigma = (eta I + H^T H / sigma2)^-1
//! mu    = Sigma H^T Y / sigma2
//! ```
//!
//! The hyperparameters are tuned with MacKay's evidence procedure:
//! `gamma = n - eta tr(Sigma)`, `eta <- gamma / |mu|^2`,
//! `sigma2 <- |Y - H mu|^2 / (N - gamma)`.

use nalgebra::{DMatrix, DVector, SVD};

use crate::assembly::CollocationSystem;
use crate::basis::RandomBasis;
use crate::{par, Error, Point, Result};

/// Hyperparameter initialisation and stopping rule for [`fit_evidence`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvidenceConfig {
    /// Initial prior precision.
    pub eta0: f64,
    /// Initial noise variance.
    pub sigma2_0: f64,
    pub max_iterations: usize,
    /// Stop once the max-norm change of `mu` between iterations drops below this.
    pub tolerance: f64,
    /// Hold the noise variance at this value and only update `eta`.
    pub fix_sigma2: Option<f64>,
}

impl Default for EvidenceConfig {
    fn default() -> Self {
        EvidenceConfig {
            eta0: 0.2,
            sigma2_0: 1.0,
            max_iterations: 200,
            tolerance: 1e-6,
            fix_sigma2: None,
        }
    }
}

impl EvidenceConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("eta0", self.eta0)?;
        positive("sigma2_0", self.sigma2_0)?;
        positive("tolerance", self.tolerance)?;
        if let Some(s2) = self.fix_sigma2 {
            positive("fix_sigma2", s2)?;
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

/// Gaussian posterior over all system columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    mu: DVector<f64>,
    sigma: DMatrix<f64>,
    eta: f64,
    sigma2: f64,
    iterations_used: usize,
    converged: bool,
}

impl Posterior {
    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }

    pub fn sigma_mat(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn iterations_used(&self) -> usize {
        self.iterations_used
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn n_cols(&self) -> usize {
        self.mu.len()
    }
}

fn check_hyper(eta: f64, sigma2: f64) -> Result<()> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::invalid(format!("eta must be positive and finite, got {eta}")));
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::invalid(format!(
            "sigma2 must be positive and finite, got {sigma2}"
        )));
    }
    Ok(())
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Posterior for fixed hyperparameters, by Cholesky factorisation of the
/// precision matrix `eta I + H^T H / sigma2`.
pub fn posterior(system: &CollocationSystem, eta: f64, sigma2: f64) -> Result<Posterior> {
    check_hyper(eta, sigma2)?;
    let h = system.h();
    let mut precision = h.tr_mul(h) / sigma2;
    for i in 0..precision.nrows() {
        precision[(i, i)] += eta;
    }
    let chol = precision
        .cholesky()
        .ok_or_else(|| Error::numerical("Cholesky factorisation of the posterior precision"))?;
    let rhs = h.tr_mul(system.y()) / sigma2;
    let mu = chol.solve(&rhs);
    let mut sigma = chol.inverse();
    symmetrize(&mut sigma);
    if mu.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("posterior mean is not finite"));
    }
    Ok(Posterior {
        mu,
        sigma,
        eta,
        sigma2,
        iterations_used: 0,
        converged: true,
    })
}

/// Result of one evidence update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvidenceUpdate {
    pub eta: f64,
    pub sigma2: f64,
    /// Effective number of well-determined parameters.
    pub gamma: f64,
}

fn evidence_update(rows: usize, gamma: f64, mu_sq: f64, rss: f64) -> Result<EvidenceUpdate> {
    if mu_sq == 0.0 {
        return Err(Error::DegenerateFit);
    }
    let dof = rows as f64 - gamma;
    if dof.is_nan() || dof <= 0.0 {
        return Err(Error::IllPosedEvidence { rows, effective: gamma });
    }
    let update = EvidenceUpdate {
        eta: gamma / mu_sq,
        sigma2: rss / dof,
        gamma,
    };
    if !(update.eta > 0.0 && update.eta.is_finite()) {
        return Err(Error::numerical(format!("evidence update gave eta = {}", update.eta)));
    }
    if !(update.sigma2 > 0.0 && update.sigma2.is_finite()) {
        return Err(Error::numerical(format!(
            "evidence update gave sigma2 = {}",
            update.sigma2
        )));
    }
    Ok(update)
}

/// One MacKay re-estimation of `(eta, sigma2)` from the current posterior.
pub fn evidence_step(system: &CollocationSystem, current: &Posterior) -> Result<EvidenceUpdate> {
    if current.n_cols() != system.n_cols() {
        return Err(Error::invalid(format!(
            "posterior has {} columns, system {}",
            current.n_cols(),
            system.n_cols()
        )));
    }
    let gamma = system.n_cols() as f64 - current.eta * current.sigma.trace();
    let rss = system.residual(&current.mu).norm_squared();
    evidence_update(system.n_rows(), gamma, current.mu.norm_squared(), rss)
}

/// `H^T H = V diag(s2) V^T` with a full orthogonal `V`, from one SVD of `H`.
/// With it every evidence iteration costs O(n^2) instead of a fresh
/// factorisation.
struct SpectralGram {
    v: DMatrix<f64>,
    s2: DVector<f64>,
    /// `V^T H^T Y`.
    proj_rhs: DVector<f64>,
}

impl SpectralGram {
    fn new(system: &CollocationSystem) -> Result<Self> {
        let h = system.h();
        let (rows, cols) = h.shape();
        // Zero rows leave H^T H unchanged and make the SVD return a full V.
        let padded = if rows < cols {
            let mut p = DMatrix::zeros(cols, cols);
            p.rows_mut(0, rows).copy_from(h);
            p
        } else {
            h.clone()
        };
        let svd = SVD::try_new(padded, false, true, f64::EPSILON, 0)
            .ok_or_else(|| Error::numerical("SVD of the collocation matrix"))?;
        let v_t = svd
            .v_t
            .ok_or_else(|| Error::numerical("SVD did not return right singular vectors"))?;
        if svd.singular_values.iter().any(|s| !s.is_finite()) {
            return Err(Error::numerical("non-finite singular values"));
        }
        let s2 = svd.singular_values.map(|s| s * s);
        let v = v_t.transpose();
        let proj_rhs = v.tr_mul(&h.tr_mul(system.y()));
        Ok(SpectralGram { v, s2, proj_rhs })
    }

    fn mean(&self, eta: f64, sigma2: f64) -> DVector<f64> {
        let ridge = eta * sigma2;
        let coeffs = DVector::from_iterator(
            self.s2.len(),
            self.s2.iter().zip(self.proj_rhs.iter()).map(|(s2, c)| c / (ridge + s2)),
        );
        &self.v * coeffs
    }

    /// `(tr(Sigma), gamma)`.
    fn trace_and_gamma(&self, eta: f64, sigma2: f64) -> (f64, f64) {
        self.s2.iter().fold((0.0, 0.0), |(tr, g), s2| {
            let lam = s2 / sigma2;
            (tr + 1.0 / (eta + lam), g + lam / (eta + lam))
        })
    }

    fn covariance(&self, eta: f64, sigma2: f64) -> DMatrix<f64> {
        let n = self.v.nrows();
        let mut scaled = self.v.clone();
        for (k, s2) in self.s2.iter().enumerate() {
            let d = 1.0 / (eta + s2 / sigma2);
            scaled.column_mut(k).scale_mut(d);
        }
        let mut sigma = DMatrix::zeros(n, n);
        sigma.gemm(1.0, &scaled, &self.v.transpose(), 0.0);
        symmetrize(&mut sigma);
        sigma
    }
}

/// Alternates posterior and evidence updates until the posterior mean moves
/// by less than `config.tolerance` in max-norm, or `max_iterations` posterior
/// evaluations have been made. Running out of iterations is reported through
/// [`Posterior::converged`], not as an error.
pub fn fit_evidence(system: &CollocationSystem, config: &EvidenceConfig) -> Result<Posterior> {
    config.validate()?;
    let gram = SpectralGram::new(system)?;
    let mut eta = config.eta0;
    let mut sigma2 = config.fix_sigma2.unwrap_or(config.sigma2_0);
    let mut previous: Option<DVector<f64>> = None;
    let mut converged = false;
    let mut iterations = 0;
    let mut mu = DVector::zeros(system.n_cols());

    while iterations < config.max_iterations {
        iterations += 1;
        mu = gram.mean(eta, sigma2);
        if mu.iter().any(|v| !v.is_finite()) {
            return Err(Error::numerical(format!(
                "posterior mean diverged at iteration {iterations}"
            )));
        }
        if let Some(prev) = &previous {
            if (&mu - prev).amax() < config.tolerance {
                converged = true;
                break;
            }
        }
        let (_, gamma) = gram.trace_and_gamma(eta, sigma2);
        let rss = system.residual(&mu).norm_squared();
        let update = evidence_update(system.n_rows(), gamma, mu.norm_squared(), rss)?;
        eta = update.eta;
        if config.fix_sigma2.is_none() {
            sigma2 = update.sigma2;
        }
        previous = Some(mu.clone());
    }
    if !converged {
        // The loop exits after an update; the returned posterior must match
        // the hyperparameters it reports.
        mu = gram.mean(eta, sigma2);
    }

    Ok(Posterior {
        mu,
        sigma: gram.covariance(eta, sigma2),
        eta,
        sigma2,
        iterations_used: iterations,
        converged,
    })
}

/// Predictive mean and variance at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub mean: f64,
    pub variance: f64,
}

impl Prediction {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Predictive distribution of the solution at `points`: mean `h . mu` and
/// variance `sigma2 + h Sigma h^T`, where `h` is the plain feature row padded
/// with zeros over the `n_params` parameter columns.
pub fn predict(
    posterior: &Posterior,
    basis: &RandomBasis,
    points: &[Point],
    n_params: usize,
) -> Result<Vec<Prediction>> {
    let n = basis.len();
    if posterior.n_cols() != n + n_params {
        return Err(Error::invalid(format!(
            "posterior has {} columns but basis has {} neurons and {} parameters",
            posterior.n_cols(),
            n,
            n_params
        )));
    }
    let mu = posterior.mu.rows(0, n);
    let sigma = posterior.sigma.view((0, 0), (n, n));
    Ok(par::map_indexed(points.len(), |i| {
        let mut h = DVector::zeros(n);
        // Order (0, 0) cannot fail.
        let _ = basis.fill_row(points[i], 0, 0, h.as_mut_slice());
        let mean = h.dot(&mu);
        let quad = h.dot(&(sigma * &h)).max(0.0);
        Prediction {
            mean,
            variance: posterior.sigma2 + quad,
        }
    }))
}

/// Posterior mean and standard deviation of one identified PDE parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterEstimate {
    pub mean: f64,
    pub std_dev: f64,
}

/// The trailing columns of the posterior after the `n_basis` weights.
pub fn extract_parameters(posterior: &Posterior, n_basis: usize) -> Result<Vec<ParameterEstimate>> {
    if posterior.n_cols() <= n_basis {
        return Err(Error::NoParameters);
    }
    Ok((n_basis..posterior.n_cols())
        .map(|j| ParameterEstimate {
            mean: posterior.mu[j],
            std_dev: posterior.sigma[(j, j)].max(0.0).sqrt(),
        })
        .collect())
}
