use thiserror::Error;

use crate::algebra::WeightVector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("deformation parameters differ: theta = {left} vs theta = {right}")]
    ParamMismatch { left: f64, right: f64 },

    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("transport requires a connection with constant (scalar) coefficients")]
    NonConstantConnection,

    #[error("connection is not flat (largest curvature coefficient {residual:e})")]
    NotFlat { residual: f64 },

    #[error("the zero weight (0,0) does not define a path")]
    ZeroWeight,

    #[error("weight ({}, {}) is not a closed path associated with deck element ({}, {})", .weight.alpha, .weight.beta, .expected.0, .expected.1)]
    PathNotAssociated {
        weight: WeightVector,
        expected: (u32, u32),
    },

    #[error("product leaves the normal-ordered character model: {0}")]
    UnsupportedProduct(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid scenario: {0}")]
    Schema(String),
}

impl Error {
    /// Stable machine-readable identifier used in CLI error bodies.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ParamMismatch { .. } => "param_mismatch",
            Error::RankMismatch { .. } => "rank_mismatch",
            Error::NonConstantConnection => "non_constant_connection",
            Error::NotFlat { .. } => "not_flat",
            Error::ZeroWeight => "zero_weight",
            Error::PathNotAssociated { .. } => "path_not_associated",
            Error::UnsupportedProduct(_) => "unsupported_product",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Schema(_) => "schema",
        }
    }

    /// Input errors (malformed or inconsistent data) as opposed to
    /// mathematical-domain failures on well-formed input.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::ParamMismatch { .. }
                | Error::RankMismatch { .. }
                | Error::InvalidParameter(_)
                | Error::Schema(_)
        )
    }
}
