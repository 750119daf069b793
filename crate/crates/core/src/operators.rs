//! Linear differential operators, boundary conditions and separable sources
//! as data, and their conversion to constraint rows over a [`RandomBasis`].

use std::fmt;
use std::ops::Add;

use crate::basis::{check_order, RandomBasis};
use crate::{Error, Point, Result, ScalarField};

/// Coefficient multiplying one derivative term.
#[derive(Clone)]
pub enum Coefficient {
    Constant(f64),
    Field(ScalarField),
}

impl Coefficient {
    pub fn at(&self, p: Point) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Field(f) => f(p),
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(c) => write!(f, "{c}"),
            Coefficient::Field(_) => f.write_str("<field>"),
        }
    }
}

/// `coeff(p) * d^(order_x + order_y) / dx^order_x dy^order_y`.
#[derive(Debug, Clone)]
pub struct DifferentialTerm {
    coeff: Coefficient,
    order_x: u32,
    order_y: u32,
}

impl DifferentialTerm {
    pub fn new(coeff: Coefficient, order_x: u32, order_y: u32) -> Result<Self> {
        check_order(order_x, order_y)?;
        Ok(DifferentialTerm {
            coeff,
            order_x,
            order_y,
        })
    }

    /// Constant-coefficient term.
    pub fn constant(coeff: f64, order_x: u32, order_y: u32) -> Result<Self> {
        Self::new(Coefficient::Constant(coeff), order_x, order_y)
    }

    pub fn coeff(&self) -> &Coefficient {
        &self.coeff
    }

    pub fn orders(&self) -> (u32, u32) {
        (self.order_x, self.order_y)
    }
}

/// A linear differential operator: the sum of its terms.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    terms: Vec<DifferentialTerm>,
}

impl LinearOperator {
    pub fn new(terms: Vec<DifferentialTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invalid("operator needs at least one term"));
        }
        Ok(LinearOperator { terms })
    }

    pub fn identity() -> Self {
        LinearOperator {
            terms: vec![DifferentialTerm::constant(1.0, 0, 0).expect("order 0")],
        }
    }

    /// `d^2/dx^2 + d^2/dy^2`.
    pub fn laplacian_2d() -> Self {
        LinearOperator {
            terms: vec![
                DifferentialTerm::constant(1.0, 2, 0).expect("order 2"),
                DifferentialTerm::constant(1.0, 0, 2).expect("order 2"),
            ],
        }
    }

    pub fn terms(&self) -> &[DifferentialTerm] {
        &self.terms
    }

    /// Highest total order among the terms.
    pub fn max_order(&self) -> u32 {
        self.terms.iter().map(|t| t.order_x + t.order_y).max().unwrap_or(0)
    }
}

impl Add for LinearOperator {
    type Output = LinearOperator;

    fn add(mut self, rhs: LinearOperator) -> LinearOperator {
        self.terms.extend(rhs.terms);
        self
    }
}

/// Writes the row `L tanh(z(p))` into `out` (length `basis.len()`), so that
/// `out . w` is the operator applied to the network output at `p`.
pub fn fill_operator_row(basis: &RandomBasis, op: &LinearOperator, p: Point, out: &mut [f64]) -> Result<()> {
    out.iter_mut().for_each(|v| *v = 0.0);
    let mut scratch = vec![0.0; basis.len()];
    for term in &op.terms {
        basis.fill_row(p, term.order_x, term.order_y, &mut scratch)?;
        let c = term.coeff.at(p);
        for (o, s) in out.iter_mut().zip(&scratch) {
            *o += c * s;
        }
    }
    Ok(())
}

/// The operator row at `p` as a fresh vector.
pub fn operator_row(basis: &RandomBasis, op: &LinearOperator, p: Point) -> Result<Vec<f64>> {
    let mut out = vec![0.0; basis.len()];
    fill_operator_row(basis, op, p, &mut out)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryKind {
    /// `u(p)` is measured.
    Dirichlet(Point),
    /// `u(a) - u(b) = 0`.
    PeriodicPair(Point, Point),
    /// `u(p)` is measured on the initial-time edge.
    Initial(Point),
}

/// One boundary or initial constraint. Initial conditions are treated as
/// boundary sensors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCondition {
    kind: BoundaryKind,
}

impl BoundaryCondition {
    pub fn dirichlet(p: Point) -> Self {
        BoundaryCondition {
            kind: BoundaryKind::Dirichlet(p),
        }
    }

    pub fn initial(p: Point) -> Self {
        BoundaryCondition {
            kind: BoundaryKind::Initial(p),
        }
    }

    pub fn periodic(a: Point, b: Point) -> Result<Self> {
        if a == b {
            return Err(Error::invalid("periodic pair needs two distinct points"));
        }
        Ok(BoundaryCondition {
            kind: BoundaryKind::PeriodicPair(a, b),
        })
    }

    pub fn kind(&self) -> &BoundaryKind {
        &self.kind
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.kind, BoundaryKind::PeriodicPair(..))
    }

    /// Point at which a measured value applies; the first point of a pair.
    pub fn anchor(&self) -> Point {
        match self.kind {
            BoundaryKind::Dirichlet(p) | BoundaryKind::Initial(p) => p,
            BoundaryKind::PeriodicPair(a, _) => a,
        }
    }
}

pub fn fill_boundary_row(basis: &RandomBasis, bc: &BoundaryCondition, out: &mut [f64]) {
    // Order (0, 0) is always within the cap.
    match bc.kind {
        BoundaryKind::Dirichlet(p) | BoundaryKind::Initial(p) => {
            let _ = basis.fill_row(p, 0, 0, out);
        }
        BoundaryKind::PeriodicPair(a, b) => {
            let _ = basis.fill_row(a, 0, 0, out);
            for (j, o) in out.iter_mut().enumerate() {
                let z = basis.alpha()[j] * b.x + basis.beta()[j] * b.y + basis.gamma()[j];
                *o -= z.tanh();
            }
        }
    }
}

/// Boundary row: the plain feature row for measured conditions, or the
/// difference of the two feature rows for a periodic pair.
pub fn boundary_row(basis: &RandomBasis, bc: &BoundaryCondition) -> Vec<f64> {
    let mut out = vec![0.0; basis.len()];
    fill_boundary_row(basis, bc, &mut out);
    out
}

/// A source of the form `f(p) = f_residual(p) - sum_j lambda_j phi_j(p)`
/// with known `phi_j` and unknown coefficients `lambda_j`.
///
/// The PDE residual is `L u + sum_j lambda_j phi_j - f_residual`, so the
/// `phi_j` enter the parameter columns with a plus sign.
#[derive(Clone)]
pub struct SeparableSource {
    basis_functions: Vec<ScalarField>,
    residual: ScalarField,
}

impl SeparableSource {
    pub fn new(basis_functions: Vec<ScalarField>, residual: ScalarField) -> Result<Self> {
        if basis_functions.is_empty() {
            return Err(Error::invalid("separable source needs at least one function"));
        }
        Ok(SeparableSource {
            basis_functions,
            residual,
        })
    }

    pub fn len(&self) -> usize {
        self.basis_functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis_functions.is_empty()
    }

    pub fn basis_functions(&self) -> &[ScalarField] {
        &self.basis_functions
    }

    pub fn residual(&self, p: Point) -> f64 {
        (self.residual)(p)
    }

    /// The full source `f_residual(p) - sum_j lambda_j phi_j(p)`.
    pub fn evaluate(&self, lambda: &[f64], p: Point) -> f64 {
        self.residual(p)
            - self
                .basis_functions
                .iter()
                .zip(lambda)
                .map(|(phi, l)| l * phi(p))
                .sum::<f64>()
    }
}

impl fmt::Debug for SeparableSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeparableSource")
            .field("m", &self.basis_functions.len())
            .finish()
    }
}
