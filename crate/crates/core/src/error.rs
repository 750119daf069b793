use thiserror::Error;

/// Errors raised by basis construction, assembly and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported derivative order {0} (at most {max} supported)", max = crate::basis::MAX_DERIVATIVE_ORDER)]
    UnsupportedOrder(u32),

    #[error("collocation system has no rows")]
    EmptySystem,

    #[error("degenerate fit: posterior mean is identically zero")]
    DegenerateFit,

    #[error("ill-posed evidence update: {rows} rows against {effective:.3} effective parameters")]
    IllPosedEvidence { rows: usize, effective: f64 },

    #[error("numerical failure in {context}")]
    Numerical { context: String },

    #[error("posterior has no trailing parameter columns")]
    NoParameters,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numerical(context: impl Into<String>) -> Self {
        Error::Numerical {
            context: context.into(),
        }
    }
}
