//! Collocation systems `H w = Y` for forward problems and
//! `[H_f Phi; H_b 0; H_u 0] [w; lambda] = [f~; b; u]` for inverse problems.

use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};

use crate::basis::RandomBasis;
use crate::operators::{fill_boundary_row, fill_operator_row, BoundaryCondition, LinearOperator, SeparableSource};
use crate::{par, Error, Point, Result};

/// Where a row of the system comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowKind {
    Pde,
    Boundary,
    Data,
}

impl RowKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RowKind::Pde => "pde",
            RowKind::Boundary => "boundary",
            RowKind::Data => "data",
        }
    }
}

/// A boundary condition together with its measured (possibly noisy) value.
/// Periodic pairs carry the target `0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySensor {
    pub condition: BoundaryCondition,
    pub value: f64,
}

/// Noisy point measurements of the solution.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SensorSet {
    points: Vec<Point>,
    values: Vec<f64>,
    noise_sigma: f64,
}

impl SensorSet {
    pub fn new(points: Vec<Point>, values: Vec<f64>, noise_sigma: f64) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} sensor points but {} values",
                points.len(),
                values.len()
            )));
        }
        if noise_sigma.is_nan() || noise_sigma < 0.0 {
            return Err(Error::invalid(format!("noise sigma must be >= 0, got {noise_sigma}")));
        }
        Ok(SensorSet {
            points,
            values,
            noise_sigma,
        })
    }

    pub fn empty() -> Self {
        SensorSet::default()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// The assembled dense system. Columns `0..n_basis` hold output-layer
/// weights, the trailing `n_params` columns hold unknown PDE parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationSystem {
    h: DMatrix<f64>,
    y: DVector<f64>,
    n_basis: usize,
    n_params: usize,
    row_labels: Vec<RowKind>,
}

impl CollocationSystem {
    /// Wraps an explicit system. Parameter columns must be zero on every
    /// non-PDE row.
    pub fn from_parts(h: DMatrix<f64>, y: DVector<f64>, n_params: usize, row_labels: Vec<RowKind>) -> Result<Self> {
        if h.nrows() == 0 {
            return Err(Error::EmptySystem);
        }
        if y.len() != h.nrows() || row_labels.len() != h.nrows() {
            return Err(Error::invalid(format!(
                "H has {} rows, Y has {}, labels {}",
                h.nrows(),
                y.len(),
                row_labels.len()
            )));
        }
        if n_params > h.ncols() {
            return Err(Error::invalid("more parameter columns than columns"));
        }
        let n_basis = h.ncols() - n_params;
        for (i, kind) in row_labels.iter().enumerate() {
            if *kind != RowKind::Pde && (n_basis..h.ncols()).any(|j| h[(i, j)] != 0.0) {
                return Err(Error::invalid(format!(
                    "{} row {i} has non-zero parameter entries",
                    kind.as_str()
                )));
            }
        }
        Ok(CollocationSystem {
            h,
            y,
            n_basis,
            n_params,
            row_labels,
        })
    }

    /// An unlabelled regression system (every row tagged as data, no
    /// parameter columns).
    pub fn regression(h: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        let rows = h.nrows();
        Self::from_parts(h, y, 0, vec![RowKind::Data; rows])
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn n_basis(&self) -> usize {
        self.n_basis
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn n_cols(&self) -> usize {
        self.n_basis + self.n_params
    }

    pub fn n_rows(&self) -> usize {
        self.h.nrows()
    }

    pub fn row_labels(&self) -> &[RowKind] {
        &self.row_labels
    }

    pub fn count(&self, kind: RowKind) -> usize {
        self.row_labels.iter().filter(|k| **k == kind).count()
    }

    /// Multiplies every row of `kind` (and its target) by `scale`.
    ///
    /// All reproduction runs leave rows unweighted.
    pub fn scale_rows(&mut self, kind: RowKind, scale: f64) {
        for i in 0..self.n_rows() {
            if self.row_labels[i] == kind {
                self.h.row_mut(i).scale_mut(scale);
                self.y[i] *= scale;
            }
        }
    }

    /// Residual `H w - Y`.
    pub fn residual(&self, w: &DVector<f64>) -> DVector<f64> {
        &self.h * w - &self.y
    }

    /// Writes the system as CSV: a header, then one line per row with the
    /// row label, the target, and the entries of `H`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "label,y")?;
        for j in 0..self.n_basis {
            write!(out, ",w{j}")?;
        }
        for j in 0..self.n_params {
            write!(out, ",lambda{}", j + 1)?;
        }
        writeln!(out)?;
        for i in 0..self.n_rows() {
            write!(out, "{},{}", self.row_labels[i].as_str(), self.y[i])?;
            for j in 0..self.n_cols() {
                write!(out, ",{}", self.h[(i, j)])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

enum RowSpec<'a> {
    Pde(Point),
    Boundary(&'a BoundarySensor),
    Data(Point, f64),
}

fn build(
    basis: &RandomBasis,
    op: &LinearOperator,
    specs: &[RowSpec<'_>],
    pde_target: &(dyn Fn(Point) -> f64 + Sync),
    params: Option<&SeparableSource>,
) -> Result<CollocationSystem> {
    if specs.is_empty() {
        return Err(Error::EmptySystem);
    }
    // Validate orders once so the row closures cannot fail.
    fill_operator_row(basis, op, Point::default(), &mut vec![0.0; basis.len()])?;

    let n = basis.len();
    let m = params.map_or(0, SeparableSource::len);
    let width = n + m;
    let mut buf = vec![0.0; specs.len() * width];
    par::fill_rows(&mut buf, width, |i, row| {
        let (features, extra) = row.split_at_mut(n);
        match &specs[i] {
            RowSpec::Pde(p) => {
                let _ = fill_operator_row(basis, op, *p, features);
                if let Some(src) = params {
                    for (slot, phi) in extra.iter_mut().zip(src.basis_functions()) {
                        *slot = phi(*p);
                    }
                }
            }
            RowSpec::Boundary(s) => fill_boundary_row(basis, &s.condition, features),
            RowSpec::Data(p, _) => {
                let _ = basis.fill_row(*p, 0, 0, features);
            }
        }
    });
    let targets = par::map_indexed(specs.len(), |i| match &specs[i] {
        RowSpec::Pde(p) => pde_target(*p),
        RowSpec::Boundary(s) => s.value,
        RowSpec::Data(_, v) => *v,
    });
    let labels = specs
        .iter()
        .map(|s| match s {
            RowSpec::Pde(_) => RowKind::Pde,
            RowSpec::Boundary(_) => RowKind::Boundary,
            RowSpec::Data(..) => RowKind::Data,
        })
        .collect();
    Ok(CollocationSystem {
        h: DMatrix::from_row_slice(specs.len(), width, &buf),
        y: DVector::from_vec(targets),
        n_basis: n,
        n_params: m,
        row_labels: labels,
    })
}

/// Forward system: `N_f` PDE rows with target `source(p)`, then `N_b`
/// boundary rows with the measured values.
pub fn assemble_forward(
    basis: &RandomBasis,
    op: &LinearOperator,
    source: &(dyn Fn(Point) -> f64 + Sync),
    collocation_points: &[Point],
    boundary_sensors: &[BoundarySensor],
) -> Result<CollocationSystem> {
    let specs: Vec<RowSpec<'_>> = collocation_points
        .iter()
        .map(|p| RowSpec::Pde(*p))
        .chain(boundary_sensors.iter().map(RowSpec::Boundary))
        .collect();
    build(basis, op, &specs, source, None)
}

/// Inverse system: PDE rows gain `m` trailing entries `phi_j(p)` with target
/// `f_residual(p)`; boundary rows and then interior data rows are
/// zero-padded over the parameter columns.
pub fn assemble_inverse(
    basis: &RandomBasis,
    op: &LinearOperator,
    source: &SeparableSource,
    collocation_points: &[Point],
    boundary_sensors: &[BoundarySensor],
    data_sensors: &SensorSet,
) -> Result<CollocationSystem> {
    if source.is_empty() {
        return Err(Error::invalid("inverse assembly needs at least one parameter"));
    }
    let specs: Vec<RowSpec<'_>> = collocation_points
        .iter()
        .map(|p| RowSpec::Pde(*p))
        .chain(boundary_sensors.iter().map(RowSpec::Boundary))
        .chain(
            data_sensors
                .points()
                .iter()
                .zip(data_sensors.values())
                .map(|(p, v)| RowSpec::Data(*p, *v)),
        )
        .collect();
    let target = |p: Point| source.residual(p);
    build(basis, op, &specs, &target, Some(source))
}
