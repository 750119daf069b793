//! The five benchmark problems: 2D Poisson on a butterfly-shaped domain,
//! 1D advection and diffusion in space-time, and inverse 1D Poisson and
//! Helmholtz problems with unknown source coefficients.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::assembly::{assemble_forward, assemble_inverse, BoundarySensor, CollocationSystem, SensorSet};
use crate::basis::RandomBasis;
use crate::operators::{BoundaryCondition, DifferentialTerm, LinearOperator, SeparableSource};
use crate::rng::{self, Stream};
use crate::{field, Error, Point, Result, ScalarField};

/// Grid resolution per axis for 2D evaluation.
pub const GRID_2D: usize = 101;
/// Number of evaluation points for 1D problems.
pub const GRID_1D: usize = 201;

/// Butterfly radius `rho(theta) = 1 + cos(theta) sin(4 theta)`.
pub fn butterfly_radius(theta: f64) -> f64 {
    1.0 + theta.cos() * (4.0 * theta).sin()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainDescriptor {
    /// `{(a rho(t) cos t, b rho(t) sin t)}`, star-shaped about the origin.
    Butterfly {
        a: f64,
        b: f64,
    },
    /// Space-time rectangle; time is the second coordinate.
    Rectangle {
        x: (f64, f64),
        t: (f64, f64),
    },
    Interval {
        x: (f64, f64),
    },
}

impl DomainDescriptor {
    /// Closed-domain membership.
    pub fn contains(&self, p: Point) -> bool {
        const TOL: f64 = 1e-12;
        match *self {
            DomainDescriptor::Butterfly { a, b } => {
                let (sx, sy) = (p.x / a, p.y / b);
                let r = sx.hypot(sy);
                r <= butterfly_radius(sy.atan2(sx)) * (1.0 + TOL)
            }
            DomainDescriptor::Rectangle { x, t } => {
                p.x >= x.0 - TOL && p.x <= x.1 + TOL && p.y >= t.0 - TOL && p.y <= t.1 + TOL
            }
            DomainDescriptor::Interval { x } => p.x >= x.0 - TOL && p.x <= x.1 + TOL && p.y == 0.0,
        }
    }

    /// `((x_min, x_max), (y_min, y_max))`.
    pub fn bounding_box(&self) -> ((f64, f64), (f64, f64)) {
        match *self {
            // rho <= 2.
            DomainDescriptor::Butterfly { a, b } => ((-2.0 * a, 2.0 * a), (-2.0 * b, 2.0 * b)),
            DomainDescriptor::Rectangle { x, t } => (x, t),
            DomainDescriptor::Interval { x } => (x, (0.0, 0.0)),
        }
    }

    pub fn is_one_dimensional(&self) -> bool {
        matches!(self, DomainDescriptor::Interval { .. })
    }

    /// Boundary point at parameter `theta` of a butterfly domain.
    pub fn butterfly_point(&self, theta: f64) -> Option<Point> {
        match *self {
            DomainDescriptor::Butterfly { a, b } => {
                let r = butterfly_radius(theta);
                Some(Point::new(a * r * theta.cos(), b * r * theta.sin()))
            }
            _ => None,
        }
    }

    /// `count` independent uniform samples from the domain.
    pub fn sample_interior<R: Rng>(&self, count: usize, rng: &mut R) -> Vec<Point> {
        let ((x0, x1), (y0, y1)) = self.bounding_box();
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let x = x0 + (x1 - x0) * rng.random::<f64>();
            let p = match self {
                DomainDescriptor::Interval { .. } => Point::on_line(x),
                _ => Point::new(x, y0 + (y1 - y0) * rng.random::<f64>()),
            };
            if self.contains(p) {
                out.push(p);
            }
        }
        out
    }

    /// Tensor grid over the bounding box filtered by membership (2D), or
    /// equidistant points including the end points (1D).
    pub fn evaluation_grid(&self) -> Vec<Point> {
        let ((x0, x1), (y0, y1)) = self.bounding_box();
        let lin = |a: f64, b: f64, n: usize, i: usize| a + (b - a) * i as f64 / (n - 1) as f64;
        match self {
            DomainDescriptor::Interval { .. } => {
                (0..GRID_1D).map(|i| Point::on_line(lin(x0, x1, GRID_1D, i))).collect()
            }
            _ => (0..GRID_2D)
                .flat_map(|j| (0..GRID_2D).map(move |i| Point::new(lin(x0, x1, GRID_2D, i), lin(y0, y1, GRID_2D, j))))
                .filter(|p| self.contains(*p))
                .collect(),
        }
    }
}

/// How boundary sensors are laid out along the domain boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryLayout {
    /// Equal steps in the butterfly angle.
    ButterflyArc,
    /// Split over the initial edge and the two lateral edges in proportion
    /// to edge length. With `periodic`, each lateral sensor time also gets a
    /// `u(x1, t) - u(x2, t) = 0` row.
    RectangleEdges { periodic: bool },
    /// Alternating between the two end points.
    IntervalEndpoints,
}

#[derive(Clone)]
pub enum Source {
    Forward(ScalarField),
    Separable(SeparableSource),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemId {
    Poisson2dButterfly,
    Advection1d,
    Diffusion1d,
    InversePoisson1d,
    InverseHelmholtz1d,
}

impl ProblemId {
    pub const ALL: [ProblemId; 5] = [
        ProblemId::Poisson2dButterfly,
        ProblemId::Advection1d,
        ProblemId::Diffusion1d,
        ProblemId::InversePoisson1d,
        ProblemId::InverseHelmholtz1d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemId::Poisson2dButterfly => "poisson2d_butterfly",
            ProblemId::Advection1d => "advection1d",
            ProblemId::Diffusion1d => "diffusion1d",
            ProblemId::InversePoisson1d => "inverse_poisson1d",
            ProblemId::InverseHelmholtz1d => "inverse_helmholtz1d",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ProblemId::Poisson2dButterfly => "forward 2D Poisson, butterfly domain, boundary sensors",
            ProblemId::Advection1d => "forward 1D advection (c = -2), periodic in x, boundary and initial sensors",
            ProblemId::Diffusion1d => "forward 1D diffusion (v = 0.01) with source, boundary and initial sensors",
            ProblemId::InversePoisson1d => "inverse 1D Poisson, identifies 2 source coefficients",
            ProblemId::InverseHelmholtz1d => "inverse 1D Helmholtz (k^2 = 10), identifies 3 source coefficients",
        }
    }

    pub fn spec(self) -> ProblemSpec {
        match self {
            ProblemId::Poisson2dButterfly => poisson2d_butterfly(),
            ProblemId::Advection1d => advection1d(),
            ProblemId::Diffusion1d => diffusion1d(),
            ProblemId::InversePoisson1d => inverse_poisson1d(),
            ProblemId::InverseHelmholtz1d => inverse_helmholtz1d(),
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown problem '{s}'")))
    }
}

/// A complete benchmark definition.
#[derive(Clone)]
pub struct ProblemSpec {
    pub id: ProblemId,
    pub operator: LinearOperator,
    pub source: Source,
    pub domain: DomainDescriptor,
    pub exact_solution: ScalarField,
    pub exact_parameters: Option<Vec<f64>>,
    pub boundary_layout: BoundaryLayout,
    /// Whether interior data sensors are part of the problem.
    pub has_data_sensors: bool,
    /// Weight range used by the shipped experiment configurations.
    pub default_weight_range: f64,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("id", &self.id)
            .field("domain", &self.domain)
            .field("boundary_layout", &self.boundary_layout)
            .finish_non_exhaustive()
    }
}

/// Boundary and interior sensors for one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorLayout {
    pub boundary: Vec<BoundarySensor>,
    pub data: SensorSet,
}

impl ProblemSpec {
    pub fn name(&self) -> &'static str {
        self.id.name()
    }

    pub fn is_inverse(&self) -> bool {
        matches!(self.source, Source::Separable(_))
    }

    pub fn n_params(&self) -> usize {
        match &self.source {
            Source::Forward(_) => 0,
            Source::Separable(s) => s.len(),
        }
    }

    pub fn exact(&self, p: Point) -> f64 {
        (self.exact_solution)(p)
    }

    /// Right-hand side of `L u = f` at `p`, using the exact parameters for
    /// inverse problems.
    pub fn source_at(&self, p: Point) -> f64 {
        match &self.source {
            Source::Forward(f) => f(p),
            Source::Separable(s) => s.evaluate(self.exact_parameters.as_deref().unwrap_or(&[]), p),
        }
    }

    /// Random basis of the right dimensionality for this domain, acting on
    /// coordinates normalized to the domain's bounding box.
    pub fn basis(&self, n: usize, weight_range: f64, seed: u64) -> Result<RandomBasis> {
        let raw = if self.domain.is_one_dimensional() {
            RandomBasis::new_1d(n, weight_range, seed)?
        } else {
            RandomBasis::new(n, weight_range, seed)?
        };
        let (x, y) = self.domain.bounding_box();
        raw.normalized_to(x, y)
    }

    /// Uniform collocation points from the collocation stream of `seed`.
    pub fn collocation_points(&self, count: usize, seed: u64) -> Vec<Point> {
        let mut rng = rng::stream(seed, Stream::Collocation);
        self.domain.sample_interior(count, &mut rng)
    }

    pub fn evaluation_points(&self) -> Vec<Point> {
        self.domain.evaluation_grid()
    }

    /// Noisy boundary (and, for inverse problems, interior) sensors.
    pub fn place_sensors(&self, n_boundary: usize, n_data: usize, noise_sigma: f64, seed: u64) -> Result<SensorLayout> {
        if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
            return Err(Error::invalid(format!("noise sigma must be >= 0, got {noise_sigma}")));
        }
        if n_boundary == 0 {
            return Err(Error::invalid("need at least one boundary sensor"));
        }
        if n_data > 0 && !self.has_data_sensors {
            return Err(Error::invalid(format!(
                "{} takes no interior data sensors",
                self.name()
            )));
        }
        let conditions = self.boundary_conditions(n_boundary)?;
        let mut rng = rng::stream(seed, Stream::SensorNoise);
        let mut noisy = |p: Point| {
            let eps: f64 = rng.sample(StandardNormal);
            self.exact(p) + noise_sigma * eps
        };
        let boundary = conditions
            .into_iter()
            .map(|condition| BoundarySensor {
                condition,
                value: if condition.is_periodic() {
                    0.0
                } else {
                    noisy(condition.anchor())
                },
            })
            .collect();
        let data_points = self.data_points(n_data);
        let values = data_points.iter().map(|p| noisy(*p)).collect();
        Ok(SensorLayout {
            boundary,
            data: SensorSet::new(data_points, values, noise_sigma)?,
        })
    }

    fn boundary_conditions(&self, n: usize) -> Result<Vec<BoundaryCondition>> {
        match (self.boundary_layout, self.domain) {
            (BoundaryLayout::ButterflyArc, domain) => Ok((0..n)
                .map(|k| {
                    let theta = 2.0 * PI * k as f64 / n as f64;
                    BoundaryCondition::dirichlet(domain.butterfly_point(theta).expect("butterfly domain"))
                })
                .collect()),
            (BoundaryLayout::RectangleEdges { periodic }, DomainDescriptor::Rectangle { x, t }) => {
                let [n_init, n_left, n_right] = allocate_edges(n, x.1 - x.0, t.1 - t.0);
                let mid = |a: f64, b: f64, k: usize, count: usize| a + (b - a) * (k as f64 + 0.5) / count as f64;
                let mut out: Vec<BoundaryCondition> = (0..n_init)
                    .map(|k| BoundaryCondition::initial(Point::new(mid(x.0, x.1, k, n_init), t.0)))
                    .collect();
                out.extend(
                    (0..n_left).map(|k| BoundaryCondition::dirichlet(Point::new(x.0, mid(t.0, t.1, k, n_left)))),
                );
                out.extend(
                    (0..n_right).map(|k| BoundaryCondition::dirichlet(Point::new(x.1, mid(t.0, t.1, k, n_right)))),
                );
                if periodic {
                    let pairs = n_left.max(n_right);
                    for k in 0..pairs {
                        let tk = mid(t.0, t.1, k, pairs);
                        out.push(BoundaryCondition::periodic(Point::new(x.0, tk), Point::new(x.1, tk))?);
                    }
                }
                Ok(out)
            }
            (BoundaryLayout::IntervalEndpoints, DomainDescriptor::Interval { x }) => {
                if n < 2 {
                    return Err(Error::invalid("interval problems need at least two boundary sensors"));
                }
                Ok((0..n)
                    .map(|k| BoundaryCondition::dirichlet(Point::on_line(if k % 2 == 0 { x.0 } else { x.1 })))
                    .collect())
            }
            (layout, domain) => Err(Error::invalid(format!(
                "boundary layout {layout:?} does not fit domain {domain:?}"
            ))),
        }
    }

    /// `n` equidistant interior points, excluding the end points.
    fn data_points(&self, n: usize) -> Vec<Point> {
        let ((x0, x1), _) = self.domain.bounding_box();
        (0..n)
            .map(|i| Point::on_line(x0 + (x1 - x0) * (i + 1) as f64 / (n + 1) as f64))
            .collect()
    }

    /// Assembles the forward or inverse system for this problem.
    pub fn assemble(
        &self,
        basis: &RandomBasis,
        collocation_points: &[Point],
        sensors: &SensorLayout,
    ) -> Result<CollocationSystem> {
        match &self.source {
            Source::Forward(f) => {
                assemble_forward(basis, &self.operator, f.as_ref(), collocation_points, &sensors.boundary)
            }
            Source::Separable(s) => assemble_inverse(
                basis,
                &self.operator,
                s,
                collocation_points,
                &sensors.boundary,
                &sensors.data,
            ),
        }
    }
}

/// Splits `n` sensors over `[initial edge, left edge, right edge]` in
/// proportion to edge length, rounding down and handing the remainder out
/// starting with the initial edge.
pub fn allocate_edges(n: usize, x_len: f64, t_len: f64) -> [usize; 3] {
    let lengths = [x_len, t_len, t_len];
    let total: f64 = lengths.iter().sum();
    let mut counts = lengths.map(|l| (n as f64 * l / total).floor() as usize);
    let mut k = 0;
    while counts.iter().sum::<usize>() < n {
        counts[k % 3] += 1;
        k += 1;
    }
    counts
}

fn term(c: f64, ox: u32, oy: u32) -> DifferentialTerm {
    DifferentialTerm::constant(c, ox, oy).expect("order within cap")
}

/// `u_xx + u_yy = (16x^2 + 64y^2 - 12) exp(-(2x^2 + 4y^2))` on the butterfly
/// domain, exact solution `1/2 + exp(-(2x^2 + 4y^2))`.
pub fn poisson2d_butterfly() -> ProblemSpec {
    ProblemSpec {
        id: ProblemId::Poisson2dButterfly,
        operator: LinearOperator::laplacian_2d(),
        source: Source::Forward(field(|p| {
            (16.0 * p.x * p.x + 64.0 * p.y * p.y - 12.0) * (-(2.0 * p.x * p.x + 4.0 * p.y * p.y)).exp()
        })),
        domain: DomainDescriptor::Butterfly { a: 0.55, b: 0.75 },
        exact_solution: field(|p| 0.5 + (-(2.0 * p.x * p.x + 4.0 * p.y * p.y)).exp()),
        exact_parameters: None,
        boundary_layout: BoundaryLayout::ButterflyArc,
        has_data_sensors: false,
        default_weight_range: 2.0,
    }
}

/// Wave speed of the advection benchmark.
pub const ADVECTION_SPEED: f64 = -2.0;

/// `u_t - c u_x = 0` on `[0,1] x [0,1]` with `c = -2`, periodic in `x`.
pub fn advection1d() -> ProblemSpec {
    let c = ADVECTION_SPEED;
    ProblemSpec {
        id: ProblemId::Advection1d,
        operator: LinearOperator::new(vec![term(1.0, 0, 1), term(-c, 1, 0)]).expect("non-empty"),
        source: Source::Forward(field(|_| 0.0)),
        domain: DomainDescriptor::Rectangle {
            x: (0.0, 1.0),
            t: (0.0, 1.0),
        },
        exact_solution: field(move |p| {
            let xi = (p.x - 0.5 + c * p.y + 0.5).rem_euclid(1.0);
            2.0 / (3.0 * (xi - 0.5)).cosh()
        }),
        exact_parameters: None,
        boundary_layout: BoundaryLayout::RectangleEdges { periodic: true },
        has_data_sensors: false,
        default_weight_range: 5.0,
    }
}

/// Diffusion coefficient of the diffusion benchmark.
pub const DIFFUSION_COEFF: f64 = 0.01;

fn diffusion_factor(s: f64) -> f64 {
    2.0 * (PI * s + PI / 5.0).cos() + 1.5 * (2.0 * PI * s - 3.0 * PI / 5.0).cos()
}

fn diffusion_factor_d1(s: f64) -> f64 {
    -2.0 * PI * (PI * s + PI / 5.0).sin() - 3.0 * PI * (2.0 * PI * s - 3.0 * PI / 5.0).sin()
}

fn diffusion_factor_d2(s: f64) -> f64 {
    -2.0 * PI * PI * (PI * s + PI / 5.0).cos() - 6.0 * PI * PI * (2.0 * PI * s - 3.0 * PI / 5.0).cos()
}

/// `u_t - v u_xx = f` on `[0,1] x [0,2]`, `v = 0.01`, with the separable
/// exact solution `X(x) X(t)`.
pub fn diffusion1d() -> ProblemSpec {
    let v = DIFFUSION_COEFF;
    ProblemSpec {
        id: ProblemId::Diffusion1d,
        operator: LinearOperator::new(vec![term(1.0, 0, 1), term(-v, 2, 0)]).expect("non-empty"),
        source: Source::Forward(field(move |p| {
            diffusion_factor(p.x) * diffusion_factor_d1(p.y) - v * diffusion_factor_d2(p.x) * diffusion_factor(p.y)
        })),
        domain: DomainDescriptor::Rectangle {
            x: (0.0, 1.0),
            t: (0.0, 2.0),
        },
        exact_solution: field(|p| diffusion_factor(p.x) * diffusion_factor(p.y)),
        exact_parameters: None,
        boundary_layout: BoundaryLayout::RectangleEdges { periodic: false },
        has_data_sensors: false,
        default_weight_range: 2.0,
    }
}

/// `u_xx = -l1 sin(0.7x) - l2 cos(1.5x)` on `[-10, 10]`, exact
/// `(l1, l2) = (0.49, 2.25)`.
pub fn inverse_poisson1d() -> ProblemSpec {
    ProblemSpec {
        id: ProblemId::InversePoisson1d,
        operator: LinearOperator::new(vec![term(1.0, 2, 0)]).expect("non-empty"),
        source: Source::Separable(
            SeparableSource::new(
                vec![field(|p| (0.7 * p.x).sin()), field(|p| (1.5 * p.x).cos())],
                field(|_| 0.0),
            )
            .expect("two functions"),
        ),
        domain: DomainDescriptor::Interval { x: (-10.0, 10.0) },
        exact_solution: field(|p| (0.7 * p.x).sin() + (1.5 * p.x).cos() - 0.1 * p.x),
        exact_parameters: Some(vec![0.49, 2.25]),
        boundary_layout: BoundaryLayout::IntervalEndpoints,
        has_data_sensors: true,
        default_weight_range: 8.0,
    }
}

/// Helmholtz wave number squared.
pub const HELMHOLTZ_K2: f64 = 10.0;

/// `u_xx + 10 u = -l1 sin2x cos4x - l2 cos2x sin4x - l3` on `[-2pi, 2pi]`.
/// Substituting the exact `u = sin2x cos4x + 1` fixes
/// `(l1, l2, l3) = (10, 16, -10)`.
pub fn inverse_helmholtz1d() -> ProblemSpec {
    ProblemSpec {
        id: ProblemId::InverseHelmholtz1d,
        operator: LinearOperator::new(vec![term(1.0, 2, 0), term(HELMHOLTZ_K2, 0, 0)]).expect("non-empty"),
        source: Source::Separable(
            SeparableSource::new(
                vec![
                    field(|p| (2.0 * p.x).sin() * (4.0 * p.x).cos()),
                    field(|p| (2.0 * p.x).cos() * (4.0 * p.x).sin()),
                    field(|_| 1.0),
                ],
                field(|_| 0.0),
            )
            .expect("three functions"),
        ),
        domain: DomainDescriptor::Interval {
            x: (-2.0 * PI, 2.0 * PI),
        },
        exact_solution: field(|p| (2.0 * p.x).sin() * (4.0 * p.x).cos() + 1.0),
        exact_parameters: Some(vec![10.0, 16.0, -10.0]),
        boundary_layout: BoundaryLayout::IntervalEndpoints,
        has_data_sensors: true,
        default_weight_range: 8.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::BoundaryKind;

    #[test]
    fn problem_ids_round_trip() {
        for id in ProblemId::ALL {
            assert_eq!(id.name().parse::<ProblemId>().unwrap(), id);
            assert_eq!(id.spec().id, id);
        }
        assert!("heat3d".parse::<ProblemId>().is_err());
    }

    #[test]
    fn exact_values_at_reference_points() {
        assert_eq!(poisson2d_butterfly().exact(Point::new(0.0, 0.0)), 1.5);
        assert_eq!(advection1d().exact(Point::new(0.5, 0.0)), 2.0);
        let x0 = 2.0 * (PI / 5.0).cos() + 1.5 * (3.0 * PI / 5.0).cos();
        assert!((diffusion1d().exact(Point::new(0.0, 0.0)) - x0 * x0).abs() < 1e-15);
        assert_eq!(inverse_poisson1d().exact(Point::on_line(0.0)), 1.0);
        assert_eq!(inverse_helmholtz1d().exact(Point::on_line(0.0)), 1.0);
    }

    #[test]
    fn butterfly_boundary_at_zero_angle() {
        let p = poisson2d_butterfly().domain.butterfly_point(0.0).unwrap();
        assert_eq!(p, Point::new(0.55, 0.0));
    }

    #[test]
    fn advection_is_periodic_in_space() {
        let spec = advection1d();
        for k in 0..20 {
            let t = k as f64 / 19.0;
            let d = spec.exact(Point::new(0.0, t)) - spec.exact(Point::new(1.0, t));
            assert!(d.abs() < 1e-12);
        }
    }

    #[test]
    fn edge_allocation_rounds_toward_initial_edge() {
        assert_eq!(allocate_edges(28, 1.0, 1.0), [10, 9, 9]);
        assert_eq!(allocate_edges(28, 1.0, 2.0), [6, 11, 11]);
        assert_eq!(allocate_edges(2, 1.0, 1.0), [1, 1, 0]);
    }

    #[test]
    fn butterfly_sensors_are_equally_spaced_in_angle() {
        let spec = poisson2d_butterfly();
        let layout = spec.place_sensors(38, 0, 0.0, 1).unwrap();
        assert_eq!(layout.boundary.len(), 38);
        for (k, s) in layout.boundary.iter().enumerate() {
            let theta = 2.0 * PI * k as f64 / 38.0;
            assert_eq!(s.condition.anchor(), spec.domain.butterfly_point(theta).unwrap());
            assert!(spec.domain.contains(s.condition.anchor()));
        }
    }

    #[test]
    fn noiseless_sensors_equal_exact_solution() {
        for id in ProblemId::ALL {
            let spec = id.spec();
            let n_data = if spec.has_data_sensors { 18 } else { 0 };
            let n_b = if spec.domain.is_one_dimensional() { 2 } else { 28 };
            let layout = spec.place_sensors(n_b, n_data, 0.0, 3).unwrap();
            for s in &layout.boundary {
                let expect = if s.condition.is_periodic() {
                    0.0
                } else {
                    spec.exact(s.condition.anchor())
                };
                assert_eq!(s.value, expect);
            }
            for (p, v) in layout.data.points().iter().zip(layout.data.values()) {
                assert_eq!(*v, spec.exact(*p));
            }
        }
    }

    #[test]
    fn advection_lateral_sensors_get_periodic_rows() {
        let layout = advection1d().place_sensors(28, 0, 0.1, 0).unwrap();
        let pairs: Vec<_> = layout.boundary.iter().filter(|s| s.condition.is_periodic()).collect();
        assert_eq!(pairs.len(), 9);
        assert_eq!(layout.boundary.len(), 28 + 9);
        assert!(pairs.iter().all(|s| s.value == 0.0));
        let initial = layout
            .boundary
            .iter()
            .filter(|s| matches!(s.condition.kind(), BoundaryKind::Initial(_)))
            .count();
        assert_eq!(initial, 10);
    }

    #[test]
    fn invalid_sensor_counts_are_rejected() {
        assert!(inverse_poisson1d().place_sensors(1, 18, 0.0, 0).is_err());
        assert!(poisson2d_butterfly().place_sensors(0, 0, 0.0, 0).is_err());
        assert!(poisson2d_butterfly().place_sensors(19, 5, 0.0, 0).is_err());
        assert!(diffusion1d().place_sensors(28, 0, -0.1, 0).is_err());
    }

    #[test]
    fn sensor_placement_is_deterministic() {
        let spec = diffusion1d();
        assert_eq!(
            spec.place_sensors(28, 0, 0.1, 9).unwrap(),
            spec.place_sensors(28, 0, 0.1, 9).unwrap()
        );
    }

    #[test]
    fn collocation_samples_lie_in_domain() {
        for id in ProblemId::ALL {
            let spec = id.spec();
            let pts = spec.collocation_points(300, 5);
            assert_eq!(pts.len(), 300);
            assert!(pts.iter().all(|p| spec.domain.contains(*p)));
        }
    }

    #[test]
    fn evaluation_grids() {
        assert_eq!(inverse_poisson1d().evaluation_points().len(), GRID_1D);
        assert_eq!(diffusion1d().evaluation_points().len(), GRID_2D * GRID_2D);
        let n = poisson2d_butterfly().evaluation_points().len();
        assert!(n > 1000 && n < GRID_2D * GRID_2D, "{n}");
    }

    #[test]
    fn inverse_system_shapes() {
        let spec = inverse_poisson1d();
        let basis = spec.basis(100, 1.0, 0).unwrap();
        let colloc = spec.collocation_points(100, 0);
        let layout = spec.place_sensors(2, 18, 0.05, 0).unwrap();
        let sys = spec.assemble(&basis, &colloc, &layout).unwrap();
        assert_eq!(sys.h().shape(), (120, 102));
    }
}
