//! Runs experiments: one job per (sweep value, seed), each solved with the
//! requested methods on a shared basis, collocation set and sensor layout.

use std::time::Instant;

use bpielm::assembly::CollocationSystem;
use bpielm::basis::RandomBasis;
use bpielm::bayes::{self, EvidenceConfig, Prediction};
use bpielm::metrics::{self, MetricsReport};
use bpielm::pielm;
use bpielm::problems::{ProblemId, ProblemSpec};
use bpielm::Point;

use crate::config::{ExperimentConfig, Solver, SweepAxis};
use crate::RunError;

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub problem: ProblemId,
    pub seed: u64,
    pub n_neurons: usize,
    pub n_collocation: usize,
    pub n_boundary: usize,
    pub n_data: usize,
    pub noise_sigma: f64,
    pub weight_range: f64,
    pub evidence: EvidenceConfig,
    pub pinv_relative_cutoff: Option<f64>,
    /// Sweep axis and value this run belongs to, if any.
    pub sweep: Option<(SweepAxis, f64)>,
}

impl RunSettings {
    /// Benchmark-size defaults for `problem` with one seed and no noise.
    pub fn new(problem: ProblemId, seed: u64) -> Self {
        let spec = problem.spec();
        let (n_neurons, n_collocation, n_boundary, n_data) = match problem {
            ProblemId::Poisson2dButterfly => (100, 400, 19, 0),
            ProblemId::Advection1d => (150, 400, 28, 0),
            ProblemId::Diffusion1d => (180, 400, 28, 0),
            ProblemId::InversePoisson1d | ProblemId::InverseHelmholtz1d => (100, 100, 2, 18),
        };
        RunSettings {
            problem,
            seed,
            n_neurons,
            n_collocation,
            n_boundary,
            n_data,
            noise_sigma: 0.0,
            weight_range: spec.default_weight_range,
            evidence: EvidenceConfig::default(),
            pinv_relative_cutoff: None,
            sweep: None,
        }
    }
}

/// Predicted solution on the evaluation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub point: Point,
    pub exact: f64,
    pub mean: f64,
    /// Predictive standard deviation (Bayesian runs only).
    pub std_dev: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BayesDetails {
    pub eta: f64,
    pub sigma2: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Outcome of one solver on one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOutcome {
    pub solver: Solver,
    pub metrics: MetricsReport,
    pub lambda: Vec<f64>,
    pub lambda_std: Vec<f64>,
    pub bayes: Option<BayesDetails>,
    pub rank: Option<usize>,
    pub grid: Vec<GridPoint>,
}

/// One run: the settings plus either an outcome or the failure message.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub settings: RunSettings,
    pub solver: Solver,
    pub outcome: Result<SolverOutcome, String>,
}

/// The pieces shared by all solvers of one run.
pub struct Prepared {
    pub spec: ProblemSpec,
    pub basis: RandomBasis,
    pub system: CollocationSystem,
    pub eval_points: Vec<Point>,
    pub exact: Vec<f64>,
    pub assemble_seconds: f64,
}

pub fn prepare(settings: &RunSettings) -> Result<Prepared, bpielm::Error> {
    let spec = settings.problem.spec();
    let basis = spec.basis(settings.n_neurons, settings.weight_range, settings.seed)?;
    let colloc = spec.collocation_points(settings.n_collocation, settings.seed);
    let sensors = spec.place_sensors(
        settings.n_boundary,
        settings.n_data,
        settings.noise_sigma,
        settings.seed,
    )?;
    let start = Instant::now();
    let system = spec.assemble(&basis, &colloc, &sensors)?;
    let assemble_seconds = start.elapsed().as_secs_f64();
    let eval_points = spec.evaluation_points();
    let exact = eval_points.iter().map(|p| spec.exact(*p)).collect();
    Ok(Prepared {
        spec,
        basis,
        system,
        eval_points,
        exact,
        assemble_seconds,
    })
}

fn grid(prep: &Prepared, means: &[f64], stds: Option<Vec<f64>>) -> Vec<GridPoint> {
    prep.eval_points
        .iter()
        .enumerate()
        .map(|(i, p)| GridPoint {
            point: *p,
            exact: prep.exact[i],
            mean: means[i],
            std_dev: stds.as_ref().map(|s| s[i]),
        })
        .collect()
}

fn with_params(report: MetricsReport, spec: &ProblemSpec, lambda: &[f64]) -> MetricsReport {
    match &spec.exact_parameters {
        Some(exact) if !lambda.is_empty() => report.with_parameter_errors(lambda, exact),
        _ => report,
    }
}

/// Solves a prepared run with one solver and evaluates it.
pub fn solve(prep: &Prepared, solver: Solver, settings: &RunSettings) -> Result<SolverOutcome, bpielm::Error> {
    let n_params = prep.system.n_params();
    let n_basis = prep.system.n_basis();
    match solver {
        Solver::Bpielm => {
            let start = Instant::now();
            let post = bayes::fit_evidence(&prep.system, &settings.evidence)?;
            let seconds = prep.assemble_seconds + start.elapsed().as_secs_f64();
            let preds: Vec<Prediction> = bayes::predict(&post, &prep.basis, &prep.eval_points, n_params)?;
            let (lambda, lambda_std) = if n_params > 0 {
                bayes::extract_parameters(&post, n_basis)?
                    .into_iter()
                    .map(|p| (p.mean, p.std_dev))
                    .unzip()
            } else {
                (Vec::new(), Vec::new())
            };
            let report = metrics::evaluate(&preds, &prep.exact)?.with_wall_time(seconds);
            let means: Vec<f64> = preds.iter().map(|p| p.mean).collect();
            let stds = preds.iter().map(Prediction::std_dev).collect();
            Ok(SolverOutcome {
                solver,
                metrics: with_params(report, &prep.spec, &lambda),
                lambda,
                lambda_std,
                bayes: Some(BayesDetails {
                    eta: post.eta(),
                    sigma2: post.sigma2(),
                    iterations: post.iterations_used(),
                    converged: post.converged(),
                }),
                rank: None,
                grid: grid(prep, &means, Some(stds)),
            })
        }
        Solver::Pielm => {
            let cutoff = settings
                .pinv_relative_cutoff
                .unwrap_or_else(|| pielm::default_relative_cutoff(prep.system.n_rows(), prep.system.n_cols()));
            let start = Instant::now();
            let sol = pielm::solve_pinv(&prep.system, cutoff)?;
            let seconds = prep.assemble_seconds + start.elapsed().as_secs_f64();
            let means = sol.predict(&prep.basis, &prep.eval_points);
            let lambda = sol.parameters(n_basis).to_vec();
            let report = metrics::evaluate_means(&means, &prep.exact)?.with_wall_time(seconds);
            Ok(SolverOutcome {
                solver,
                metrics: with_params(report, &prep.spec, &lambda),
                lambda,
                lambda_std: Vec::new(),
                bayes: None,
                rank: Some(sol.rank),
                grid: grid(prep, &means, None),
            })
        }
    }
}

/// Runs every requested solver for one settings block. Failures are
/// recorded per solver rather than aborting the experiment.
pub fn run_settings(settings: &RunSettings, solvers: &[Solver]) -> Vec<RunRecord> {
    match prepare(settings) {
        Ok(prep) => solvers
            .iter()
            .map(|&solver| RunRecord {
                settings: settings.clone(),
                solver,
                outcome: solve(&prep, solver, settings).map_err(|e| e.to_string()),
            })
            .collect(),
        Err(e) => solvers
            .iter()
            .map(|&solver| RunRecord {
                settings: settings.clone(),
                solver,
                outcome: Err(e.to_string()),
            })
            .collect(),
    }
}

/// Expands a configuration into per-run settings, sweep-major then seed.
pub fn expand(config: &ExperimentConfig) -> Result<Vec<RunSettings>, RunError> {
    config.validate()?;
    let problem = config.problem_id()?;
    let spec = problem.spec();
    let base = RunSettings {
        problem,
        seed: 0,
        n_neurons: config.n_neurons,
        n_collocation: config.n_collocation,
        n_boundary: config.n_boundary,
        n_data: config.n_data,
        noise_sigma: config.noise_sigma,
        weight_range: config.weight_range.unwrap_or(spec.default_weight_range),
        evidence: config.evidence_config(),
        pinv_relative_cutoff: config.pinv_relative_cutoff,
        sweep: None,
    };
    let points: Vec<Option<(SweepAxis, f64)>> = match &config.sweep {
        None => vec![None],
        Some(s) => s.values.iter().map(|&v| Some((s.axis, v))).collect(),
    };
    let mut out = Vec::with_capacity(points.len() * config.seeds.len());
    for point in points {
        for &seed in &config.seeds {
            let mut s = base.clone();
            s.seed = seed;
            s.sweep = point;
            if let Some((axis, v)) = point {
                match axis {
                    SweepAxis::Neurons => s.n_neurons = v as usize,
                    SweepAxis::Boundary => s.n_boundary = v as usize,
                    SweepAxis::Noise => s.noise_sigma = v,
                }
            }
            out.push(s);
        }
    }
    Ok(out)
}

/// Runs all jobs of `config`, in parallel when the `parallel` feature is on.
/// Records come back in job order, solver order within a job.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunRecord>, RunError> {
    let jobs = expand(config)?;
    let solvers = config.method.solvers();
    #[cfg(feature = "parallel")]
    let nested: Vec<Vec<RunRecord>> = {
        use rayon::prelude::*;
        jobs.par_iter().map(|s| run_settings(s, solvers)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let nested: Vec<Vec<RunRecord>> = jobs.iter().map(|s| run_settings(s, solvers)).collect();
    Ok(nested.into_iter().flatten().collect())
}
