use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("quadrature did not converge on [{lo}, {hi}] (error estimate {estimate:e})")]
    Quadrature { lo: f64, hi: f64, estimate: f64 },

    #[error("root find did not converge; last bracket [{lo}, {hi}]")]
    RootNotConverged { lo: f64, hi: f64 },

    #[error("series truncated at K={order} has tail bound {tail_bound:e}, above tolerance {tolerance:e}")]
    SeriesTail { order: usize, tail_bound: f64, tolerance: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point lies inside or on the support (distance {distance:e})")]
    InsideSupport { distance: f64 },

    #[error("stencil of step {step:e} comes within {distance:e} of the support")]
    StencilIntersectsSupport { step: f64, distance: f64 },

    #[error("unsupported dimension {dim}: {reason}")]
    UnsupportedDimension { dim: usize, reason: &'static str },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("sequence too short: need {needed} coefficients, have {have}")]
    Arity { needed: usize, have: usize },

    #[error("formal series with zero leading coefficient is not invertible")]
    NotInvertible,

    #[error("density schema: {0}")]
    Schema(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
