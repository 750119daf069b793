//! JSON experiment configuration.

use std::fs;
use std::path::{Path, PathBuf};

use bpielm::bayes::EvidenceConfig;
use bpielm::problems::ProblemId;
use serde::{Deserialize, Serialize};

use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bpielm,
    Pielm,
    Both,
}

impl Method {
    /// The concrete solvers this selection runs, in output order.
    pub fn solvers(self) -> &'static [Solver] {
        match self {
            Method::Bpielm => &[Solver::Bpielm],
            Method::Pielm => &[Solver::Pielm],
            Method::Both => &[Solver::Bpielm, Solver::Pielm],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Bpielm,
    Pielm,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Bpielm => "bpielm",
            Solver::Pielm => "pielm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Neurons,
    Boundary,
    Noise,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Neurons => "neurons",
            SweepAxis::Boundary => "boundary",
            SweepAxis::Noise => "noise",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// Evidence-procedure settings; defaults match [`EvidenceConfig::default`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvidenceSettings {
    pub eta0: f64,
    pub sigma2_0: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub fix_sigma2: Option<f64>,
}

impl Default for EvidenceSettings {
    fn default() -> Self {
        let d = EvidenceConfig::default();
        EvidenceSettings {
            eta0: d.eta0,
            sigma2_0: d.sigma2_0,
            max_iterations: d.max_iterations,
            tolerance: d.tolerance,
            fix_sigma2: d.fix_sigma2,
        }
    }
}

impl From<EvidenceSettings> for EvidenceConfig {
    fn from(s: EvidenceSettings) -> Self {
        EvidenceConfig {
            eta0: s.eta0,
            sigma2_0: s.sigma2_0,
            max_iterations: s.max_iterations,
            tolerance: s.tolerance,
            fix_sigma2: s.fix_sigma2,
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: String,
    pub method: Method,
    pub n_neurons: usize,
    pub n_collocation: usize,
    pub n_boundary: usize,
    /// Interior data sensors; inverse problems only.
    #[serde(default)]
    pub n_data: usize,
    pub noise_sigma: f64,
    /// Half-width of the uniform input-weight distribution. Defaults to the
    /// problem's shipped value.
    #[serde(default)]
    pub weight_range: Option<f64>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub evidence: EvidenceSettings,
    /// Relative singular-value cutoff for the pseudoinverse baseline.
    /// Defaults to `1e-12 * max(rows, cols)`.
    #[serde(default)]
    pub pinv_relative_cutoff: Option<f64>,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Write one grid CSV per run.
    #[serde(default = "default_true")]
    pub write_grids: bool,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text =
            fs::read_to_string(path).map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn problem_id(&self) -> Result<ProblemId, RunError> {
        self.problem
            .parse()
            .map_err(|e: bpielm::Error| RunError::Config(e.to_string()))
    }

    pub fn evidence_config(&self) -> EvidenceConfig {
        self.evidence.into()
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |msg: String| Err(RunError::Config(msg));
        let problem = self.problem_id()?.spec();
        if self.n_neurons == 0 {
            return bad("n_neurons must be positive".into());
        }
        if self.n_collocation == 0 {
            return bad("n_collocation must be positive".into());
        }
        if self.n_boundary == 0 {
            return bad("n_boundary must be positive".into());
        }
        if problem.domain.is_one_dimensional() && self.n_boundary < 2 {
            return bad(format!("{} needs n_boundary >= 2", problem.name()));
        }
        if self.n_data > 0 && !problem.has_data_sensors {
            return bad(format!(
                "{} takes no interior data sensors (n_data must be 0)",
                problem.name()
            ));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise_sigma must be >= 0, got {}", self.noise_sigma));
        }
        if let Some(r) = self.weight_range {
            if !(r > 0.0 && r.is_finite()) {
                return bad(format!("weight_range must be positive, got {r}"));
            }
        }
        if let Some(c) = self.pinv_relative_cutoff {
            if !(c > 0.0 && c.is_finite()) {
                return bad(format!("pinv_relative_cutoff must be positive, got {c}"));
            }
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        self.evidence_config()
            .validate()
            .map_err(|e| RunError::Config(format!("evidence: {e}")))?;
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return bad("sweep needs at least one value".into());
            }
            for &v in &sweep.values {
                let ok = match sweep.axis {
                    SweepAxis::Neurons => v >= 1.0 && v.fract() == 0.0,
                    SweepAxis::Boundary => {
                        let min = if problem.domain.is_one_dimensional() { 2.0 } else { 1.0 };
                        v >= min && v.fract() == 0.0
                    }
                    SweepAxis::Noise => v >= 0.0 && v.is_finite(),
                };
                if !ok {
                    return bad(format!("invalid {} sweep value {v}", sweep.axis.name()));
                }
            }
        }
        Ok(())
    }
}
