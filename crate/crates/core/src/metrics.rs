//! Error and calibration metrics against an exact solution.

use crate::bayes::Prediction;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub mae: f64,
    pub max_ae: f64,
    /// Fraction of points with `|error| <= 2 * predictive std`. `None` for
    /// point estimates without a variance.
    pub two_sigma_coverage: Option<f64>,
    /// Absolute errors of identified PDE parameters, when the problem has any.
    pub parameter_errors: Option<Vec<f64>>,
    pub n_eval_points: usize,
    pub wall_time_seconds: f64,
}

impl MetricsReport {
    pub fn with_parameter_errors(mut self, estimated: &[f64], exact: &[f64]) -> Self {
        self.parameter_errors = Some(estimated.iter().zip(exact).map(|(e, x)| (e - x).abs()).collect());
        self
    }

    pub fn with_wall_time(mut self, seconds: f64) -> Self {
        self.wall_time_seconds = seconds;
        self
    }
}

fn check_lengths(pred: usize, exact: usize) -> Result<()> {
    if pred == 0 {
        return Err(Error::invalid("no evaluation points"));
    }
    if pred != exact {
        return Err(Error::invalid(format!("{pred} predictions but {exact} exact values")));
    }
    Ok(())
}

fn absolute_errors(means: impl Iterator<Item = f64>, exact: &[f64]) -> (f64, f64) {
    let (sum, max) = means
        .zip(exact)
        .map(|(m, e)| (m - e).abs())
        .fold((0.0, 0.0_f64), |(s, mx), a| (s + a, mx.max(a)));
    (sum / exact.len() as f64, max)
}

/// MAE, Max-AE and two-sigma coverage of predictive distributions.
pub fn evaluate(predictions: &[Prediction], exact: &[f64]) -> Result<MetricsReport> {
    check_lengths(predictions.len(), exact.len())?;
    let (mae, max_ae) = absolute_errors(predictions.iter().map(|p| p.mean), exact);
    let covered = predictions
        .iter()
        .zip(exact)
        .filter(|(p, e)| (p.mean - *e).abs() <= 2.0 * p.variance.max(0.0).sqrt())
        .count();
    Ok(MetricsReport {
        mae,
        max_ae,
        two_sigma_coverage: Some(covered as f64 / exact.len() as f64),
        parameter_errors: None,
        n_eval_points: exact.len(),
        wall_time_seconds: 0.0,
    })
}

/// MAE and Max-AE of point predictions; coverage is not defined.
pub fn evaluate_means(means: &[f64], exact: &[f64]) -> Result<MetricsReport> {
    check_lengths(means.len(), exact.len())?;
    let (mae, max_ae) = absolute_errors(means.iter().copied(), exact);
    Ok(MetricsReport {
        mae,
        max_ae,
        two_sigma_coverage: None,
        parameter_errors: None,
        n_eval_points: exact.len(),
        wall_time_seconds: 0.0,
    })
}

/// Median of a slice; `NaN` for an empty one.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn preds(means: &[f64], variance: f64) -> Vec<Prediction> {
        means.iter().map(|&mean| Prediction { mean, variance }).collect()
    }

    #[test]
    fn small_example() {
        let r = evaluate(&preds(&[1.0, 2.0, 3.0], 1.0), &[1.0, 2.0, 4.0]).unwrap();
        assert!((r.mae - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.max_ae, 1.0);
        assert_eq!(r.two_sigma_coverage, Some(1.0));
        assert_eq!(r.n_eval_points, 3);
    }

    #[test]
    fn exact_predictions() {
        let r = evaluate(&preds(&[0.5, -2.0], 0.0), &[0.5, -2.0]).unwrap();
        assert_eq!((r.mae, r.max_ae, r.two_sigma_coverage), (0.0, 0.0, Some(1.0)));
    }

    #[test]
    fn empty_and_mismatched_inputs_are_rejected() {
        assert!(evaluate(&[], &[]).is_err());
        assert!(evaluate(&preds(&[1.0], 1.0), &[1.0, 2.0]).is_err());
        assert!(evaluate_means(&[], &[]).is_err());
    }

    #[test]
    fn point_estimates_have_no_coverage() {
        let r = evaluate_means(&[1.0, 3.0], &[2.0, 3.0]).unwrap();
        assert_eq!(r.two_sigma_coverage, None);
        assert_eq!(r.mae, 0.5);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }

    proptest! {
        #[test]
        fn mae_bounded_by_max_and_scales(
            errs in prop::collection::vec(-5.0f64..5.0, 1..40),
            c in 0.0f64..10.0,
        ) {
            let exact = vec![0.0; errs.len()];
            let a = evaluate_means(&errs, &exact).unwrap();
            prop_assert!(a.mae <= a.max_ae + 1e-15);
            let scaled: Vec<f64> = errs.iter().map(|e| e * c).collect();
            let b = evaluate_means(&scaled, &exact).unwrap();
            prop_assert!((b.mae - c * a.mae).abs() <= 1e-12 * (1.0 + c * a.mae));
            prop_assert!((b.max_ae - c * a.max_ae).abs() <= 1e-12 * (1.0 + c * a.max_ae));
        }

        #[test]
        fn coverage_monotone_in_variance(
            errs in prop::collection::vec(-3.0f64..3.0, 1..40),
            var in 0.0f64..4.0,
            extra in 0.0f64..4.0,
        ) {
            let exact = vec![0.0; errs.len()];
            let lo = evaluate(&preds(&errs, var), &exact).unwrap();
            let hi = evaluate(&preds(&errs, var + extra), &exact).unwrap();
            let (lo, hi) = (lo.two_sigma_coverage.unwrap(), hi.two_sigma_coverage.unwrap());
            prop_assert!((0.0..=1.0).contains(&lo));
            prop_assert!(hi >= lo);
        }
    }
}
