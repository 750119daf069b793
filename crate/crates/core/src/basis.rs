//! Frozen random `tanh` feature layer and its analytic derivatives.
//!
//! Neuron `j` computes `tanh(z_j)` with `z_j = alpha_j * x + beta_j * y + gamma_j`.
//! Because `z` is affine in the inputs, the chain rule gives every partial
//! derivative in closed form:
//!
//! `d^(kx+ky)/dx^kx dy^ky tanh(z_j) = alpha_j^kx * beta_j^ky * tanh^(kx+ky)(z_j)`.

use nalgebra::DMatrix;
use rand::Rng;

use crate::par;
use crate::rng::{self, Stream};
use crate::{Error, Point, Result};

/// Highest total derivative order with a closed-form activation derivative.
pub const MAX_DERIVATIVE_ORDER: u32 = 3;

/// Default half-width of the uniform weight distribution.
pub const DEFAULT_WEIGHT_RANGE: f64 = 1.0;

/// `d^order tanh / dz^order` evaluated at `z`, for `order` in `0..=3`.
pub fn activation_derivative(z: f64, order: u32) -> Result<f64> {
    let t = z.tanh();
    let s = 1.0 - t * t;
    match order {
        0 => Ok(t),
        1 => Ok(s),
        2 => Ok(-2.0 * t * s),
        3 => Ok((6.0 * t * t - 2.0) * s),
        other => Err(Error::UnsupportedOrder(other)),
    }
}

/// The random input layer of an extreme learning machine.
///
/// Weights are drawn once at construction and never change afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomBasis {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<f64>,
    weight_range: f64,
    seed: u64,
}

impl RandomBasis {
    /// Draws `n` neurons with `alpha`, `beta`, `gamma` independently uniform
    /// on `[-range, range]`, from the basis-weight stream of `seed`.
    pub fn new(n: usize, range: f64, seed: u64) -> Result<Self> {
        Self::validate(n, range)?;
        let mut rng = rng::stream(seed, Stream::BasisWeights);
        let mut draw = |len: usize| -> Vec<f64> { (0..len).map(|_| rng.random_range(-range..=range)).collect() };
        let alpha = draw(n);
        let beta = draw(n);
        let gamma = draw(n);
        Ok(RandomBasis {
            alpha,
            beta,
            gamma,
            weight_range: range,
            seed,
        })
    }

    /// Like [`RandomBasis::new`] but with `beta` forced to zero, for
    /// problems with a single spatial coordinate. `alpha` and `gamma` are
    /// the same draws as the 2D basis with the same seed.
    pub fn new_1d(n: usize, range: f64, seed: u64) -> Result<Self> {
        let mut basis = Self::new(n, range, seed)?;
        basis.beta.iter_mut().for_each(|b| *b = 0.0);
        Ok(basis)
    }

    /// Builds a basis from explicit weights. Used for hand-constructed cases.
    pub fn from_weights(alpha: Vec<f64>, beta: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        let n = alpha.len();
        if beta.len() != n || gamma.len() != n {
            return Err(Error::invalid(format!(
                "weight vectors have lengths {}, {}, {}",
                n,
                beta.len(),
                gamma.len()
            )));
        }
        let range = alpha
            .iter()
            .chain(&beta)
            .chain(&gamma)
            .fold(0.0_f64, |m, w| m.max(w.abs()));
        Self::validate(n, if range > 0.0 { range } else { 1.0 })?;
        if alpha.iter().chain(&beta).chain(&gamma).any(|w| !w.is_finite()) {
            return Err(Error::invalid("basis weights must be finite"));
        }
        Ok(RandomBasis {
            alpha,
            beta,
            gamma,
            weight_range: if range > 0.0 { range } else { 1.0 },
            seed: 0,
        })
    }

    /// Composes the features with the affine map taking the box
    /// `[x.0, x.1] x [y.0, y.1]` onto `[-1, 1]^2`, so the drawn weights act on
    /// normalized coordinates. A degenerate side (1D problems) is left
    /// unscaled. Weight range and seed are kept as drawn.
    pub fn normalized_to(&self, x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        let affine = |(lo, hi): (f64, f64)| -> Result<(f64, f64)> {
            if !(lo.is_finite() && hi.is_finite() && hi >= lo) {
                return Err(Error::invalid(format!("bad normalization interval [{lo}, {hi}]")));
            }
            let half = (hi - lo) / 2.0;
            Ok(if half > 0.0 {
                ((hi + lo) / 2.0, half)
            } else {
                (0.0, 1.0)
            })
        };
        let ((cx, hx), (cy, hy)) = (affine(x)?, affine(y)?);
        let alpha: Vec<f64> = self.alpha.iter().map(|a| a / hx).collect();
        let beta: Vec<f64> = self.beta.iter().map(|b| b / hy).collect();
        let gamma = self
            .gamma
            .iter()
            .zip(alpha.iter().zip(&beta))
            .map(|(g, (a, b))| g - a * cx - b * cy)
            .collect();
        Ok(RandomBasis {
            alpha,
            beta,
            gamma,
            weight_range: self.weight_range,
            seed: self.seed,
        })
    }

    fn validate(n: usize, range: f64) -> Result<()> {
        if n == 0 {
            return Err(Error::invalid("basis needs at least one neuron"));
        }
        if !(range > 0.0 && range.is_finite()) {
            return Err(Error::invalid(format!(
                "weight range must be positive and finite, got {range}"
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn weight_range(&self) -> f64 {
        self.weight_range
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Writes the derivative row `d^(ox+oy)/dx^ox dy^oy tanh(z_j)` at `p`
    /// into `out` (length `n`).
    pub fn fill_row(&self, p: Point, order_x: u32, order_y: u32, out: &mut [f64]) -> Result<()> {
        let order = check_order(order_x, order_y)?;
        debug_assert_eq!(out.len(), self.len());
        for (j, slot) in out.iter_mut().enumerate() {
            let (a, b) = (self.alpha[j], self.beta[j]);
            let z = a * p.x + b * p.y + self.gamma[j];
            let scale = a.powi(order_x as i32) * b.powi(order_y as i32);
            // `order` is validated above, so this cannot fail.
            *slot = scale * activation_derivative(z, order)?;
        }
        Ok(())
    }

    /// A single derivative row at `p`.
    pub fn row(&self, p: Point, order_x: u32, order_y: u32) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        self.fill_row(p, order_x, order_y, &mut out)?;
        Ok(out)
    }

    /// Network output `sum_j w_j tanh(z_j(p))` for output weights `w`
    /// (only the first `n` entries of `w` are used).
    pub fn evaluate(&self, weights: &[f64], p: Point) -> f64 {
        (0..self.len())
            .map(|j| {
                let z = self.alpha[j] * p.x + self.beta[j] * p.y + self.gamma[j];
                weights[j] * z.tanh()
            })
            .sum()
    }
}

pub(crate) fn check_order(order_x: u32, order_y: u32) -> Result<u32> {
    let total = order_x.saturating_add(order_y);
    if total > MAX_DERIVATIVE_ORDER {
        Err(Error::UnsupportedOrder(total))
    } else {
        Ok(total)
    }
}

/// Feature matrix of shape `points.len() x n` whose entry `(i, j)` is the
/// `(order_x, order_y)` partial derivative of neuron `j` at point `i`.
/// With both orders zero this is the plain hidden-layer output.
pub fn feature_matrix(basis: &RandomBasis, points: &[Point], order_x: u32, order_y: u32) -> Result<DMatrix<f64>> {
    check_order(order_x, order_y)?;
    let n = basis.len();
    let mut buf = vec![0.0; points.len() * n];
    par::fill_rows(&mut buf, n, |i, row| {
        // Orders were checked above.
        let _ = basis.fill_row(points[i], order_x, order_y, row);
    });
    Ok(DMatrix::from_row_slice(points.len(), n, &buf))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn activation_closed_forms_at_zero() {
        assert_eq!(activation_derivative(0.0, 0).unwrap(), 0.0);
        assert_eq!(activation_derivative(0.0, 1).unwrap(), 1.0);
        assert_eq!(activation_derivative(0.0, 2).unwrap(), 0.0);
        assert_eq!(activation_derivative(0.0, 3).unwrap(), -2.0);
    }

    #[test]
    fn activation_rejects_order_four() {
        assert_eq!(activation_derivative(0.3, 4), Err(Error::UnsupportedOrder(4)));
    }

    #[test]
    fn activation_derivatives_match_finite_differences() {
        let h = 1e-5;
        for &z in &[-2.0, -0.7, 0.0, 0.5, 1.3] {
            for order in 1..=3 {
                let fwd = activation_derivative(z + h, order - 1).unwrap();
                let bwd = activation_derivative(z - h, order - 1).unwrap();
                let fd = (fwd - bwd) / (2.0 * h);
                let exact = activation_derivative(z, order).unwrap();
                assert!((fd - exact).abs() <= 1e-6, "z={z} order={order}: {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn init_rejects_bad_arguments() {
        assert!(matches!(RandomBasis::new(0, 1.0, 7), Err(Error::InvalidArgument(_))));
        assert!(matches!(RandomBasis::new(5, 0.0, 7), Err(Error::InvalidArgument(_))));
        assert!(matches!(RandomBasis::new(5, -1.0, 7), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            RandomBasis::new(5, f64::NAN, 7),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn weights_lie_in_range_and_are_reproducible() {
        let basis = RandomBasis::new(100, 1.0, 7).unwrap();
        assert_eq!(basis.len(), 100);
        assert!(basis
            .alpha()
            .iter()
            .chain(basis.beta())
            .chain(basis.gamma())
            .all(|w| w.abs() <= 1.0));

        let a = RandomBasis::new(5, 1.0, 7).unwrap();
        let b = RandomBasis::new(5, 1.0, 7).unwrap();
        assert_eq!(a, b);
        let c = RandomBasis::new(5, 1.0, 8).unwrap();
        assert_ne!(a.alpha(), c.alpha());
    }

    #[test]
    fn one_dimensional_basis_has_zero_beta() {
        let b2 = RandomBasis::new(20, 2.0, 3).unwrap();
        let b1 = RandomBasis::new_1d(20, 2.0, 3).unwrap();
        assert!(b1.beta().iter().all(|&b| b == 0.0));
        assert_eq!(b1.alpha(), b2.alpha());
        assert_eq!(b1.gamma(), b2.gamma());
    }

    #[test]
    fn second_x_derivative_vanishes_at_origin_for_centred_neuron() {
        let basis = RandomBasis::from_weights(vec![2.0], vec![0.0], vec![0.0]).unwrap();
        let m = feature_matrix(&basis, &[Point::new(0.0, 0.0)], 2, 0).unwrap();
        assert_eq!(m.shape(), (1, 1));
        assert_eq!(m[(0, 0)], 0.0);
    }

    #[test]
    fn plain_features_lie_in_open_unit_interval() {
        let basis = RandomBasis::new(30, 1.0, 11).unwrap();
        let pts: Vec<Point> = (0..17)
            .map(|i| Point::new(-1.0 + 0.13 * i as f64, 0.5 - 0.07 * i as f64))
            .collect();
        let m = feature_matrix(&basis, &pts, 0, 0).unwrap();
        assert!(m.iter().all(|v| v.abs() < 1.0));
    }

    #[test]
    fn empty_points_give_empty_matrix() {
        let basis = RandomBasis::new(4, 1.0, 1).unwrap();
        let m = feature_matrix(&basis, &[], 1, 0).unwrap();
        assert_eq!(m.shape(), (0, 4));
    }

    #[test]
    fn total_order_above_cap_is_rejected() {
        let basis = RandomBasis::new(4, 1.0, 1).unwrap();
        assert_eq!(
            feature_matrix(&basis, &[Point::default()], 2, 2).unwrap_err(),
            Error::UnsupportedOrder(4)
        );
    }

    #[test]
    fn mixed_partial_matches_finite_difference_of_first_derivative() {
        let basis = RandomBasis::new(10, 1.0, 99).unwrap();
        let pts: Vec<Point> = (0..5)
            .map(|i| Point::new(0.3 * i as f64 - 0.6, 0.2 - 0.15 * i as f64))
            .collect();
        let analytic = feature_matrix(&basis, &pts, 1, 1).unwrap();
        let h = 1e-4;
        let up: Vec<Point> = pts.iter().map(|p| Point::new(p.x, p.y + h)).collect();
        let dn: Vec<Point> = pts.iter().map(|p| Point::new(p.x, p.y - h)).collect();
        let fd = (feature_matrix(&basis, &up, 1, 0).unwrap() - feature_matrix(&basis, &dn, 1, 0).unwrap()) / (2.0 * h);
        for (a, f) in analytic.iter().zip(fd.iter()) {
            assert!((a - f).abs() <= 1e-5 * a.abs().max(1.0), "{a} vs {f}");
        }
    }

    #[test]
    fn rows_depend_only_on_their_point() {
        let basis = RandomBasis::new(8, 1.0, 5).unwrap();
        let pts = [Point::new(0.1, 0.2), Point::new(-0.4, 0.9), Point::new(0.7, -0.3)];
        let rev: Vec<Point> = pts.iter().rev().copied().collect();
        let m = feature_matrix(&basis, &pts, 2, 0).unwrap();
        let r = feature_matrix(&basis, &rev, 2, 0).unwrap();
        for i in 0..3 {
            assert_eq!(m.row(i), r.row(2 - i));
        }
    }

    #[test]
    fn normalized_basis_sees_mapped_coordinates() {
        let raw = RandomBasis::new(6, 2.0, 11).unwrap();
        let norm = raw.normalized_to((-10.0, 10.0), (0.0, 2.0)).unwrap();
        let p = Point::new(4.0, 1.5);
        let mapped = Point::new(0.4, 0.5);
        let a = norm.row(p, 0, 0).unwrap();
        let b = raw.row(mapped, 0, 0).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-14);
        }
        // Chain rule: d/dx picks up 1/half-width.
        let dx = norm.row(p, 1, 0).unwrap();
        let dxi = raw.row(mapped, 1, 0).unwrap();
        for (x, y) in dx.iter().zip(&dxi) {
            assert!((x - y / 10.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn degenerate_side_is_left_alone() {
        let raw = RandomBasis::new_1d(4, 1.0, 2).unwrap();
        let norm = raw.normalized_to((0.0, 2.0), (0.0, 0.0)).unwrap();
        assert_eq!(norm.beta(), raw.beta());
        assert!(raw.normalized_to((1.0, 0.0), (0.0, 0.0)).is_err());
    }
}
