use thiserror::Error;

use crate::exactalg::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable lists differ: {0:?} vs {1:?}")]
    VariableMismatch(Vec<String>, Vec<String>),
    #[error("exponent overflow in monomial arithmetic")]
    ExponentOverflow,
    #[error("negative exponent on non-Laurent variable `{0}`")]
    LaurentNotAllowed(String),
    #[error("truncation orders differ: {0} vs {1}")]
    TruncationMismatch(u32, u32),
    #[error("number of parameter variables differs: {0} vs {1}")]
    ParameterCountMismatch(usize, usize),
    #[error("weight {0} outside (0, 1/2]")]
    InvalidWeight(Rat),
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("f is not weighted homogeneous of degree 1 (Euler identity fails)")]
    EulerIdentityViolated,
    #[error("f has a nonzero constant term")]
    ConstantTerm,
    #[error("critical point is not isolated (standard monomial count exceeded {0})")]
    NonIsolated(usize),
    #[error("residue pairing degenerate at anti-diagonal position {0}")]
    DegeneratePairing(usize),
    #[error("reduction did not terminate within t-depth {0}")]
    NonTermination(usize),
    #[error("Laurent exponents require the univariate Laurent mode")]
    LaurentModeRequired,
    #[error("operation not available in {0} mode")]
    UnsupportedMode(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("deformation coefficient for direction {0} has a nonzero constant term")]
    OverrideConstantTerm(usize),
    #[error("grading violated in {0}")]
    GradingViolation(String),
    #[error("opposite parameter c[{0},{1}] is not allowed: step {2} is not a positive integer")]
    ForbiddenOppositeParameter(usize, usize, Rat),
    #[error("pairing constant a[{0},{1}] inconsistent: {2}")]
    InconsistentConstants(usize, usize, String),
    #[error("series expansion depth {0} insufficient")]
    ExpansionDepthInsufficient(usize),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid job: {0}")]
    InvalidJob(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::VariableMismatch(..) => "VariableMismatch",
            Error::ExponentOverflow => "ExponentOverflow",
            Error::LaurentNotAllowed(_) => "LaurentNotAllowed",
            Error::TruncationMismatch(..) => "TruncationMismatch",
            Error::ParameterCountMismatch(..) => "ParameterCountMismatch",
            Error::InvalidWeight(_) => "InvalidWeight",
            Error::WeightCount { .. } => "WeightCount",
            Error::EulerIdentityViolated => "EulerIdentityViolated",
            Error::ConstantTerm => "ConstantTerm",
            Error::NonIsolated(_) => "NonIsolated",
            Error::DegeneratePairing(_) => "DegeneratePairing",
            Error::NonTermination(_) => "NonTermination",
            Error::LaurentModeRequired => "LaurentModeRequired",
            Error::UnsupportedMode(_) => "UnsupportedMode",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::OverrideConstantTerm(_) => "OverrideConstantTerm",
            Error::GradingViolation(_) => "GradingViolation",
            Error::ForbiddenOppositeParameter(..) => "ForbiddenOppositeParameter",
            Error::InconsistentConstants(..) => "InconsistentConstants",
            Error::ExpansionDepthInsufficient(_) => "ExpansionDepthInsufficient",
            Error::Internal(_) => "Internal",
            Error::Syntax { .. } => "SyntaxError",
            Error::UnknownVariable(_) => "UnknownVariable",
            Error::InvalidJob(_) => "InvalidJob",
        }
    }

    /// The module that raised the error.
    pub fn module(&self) -> &'static str {
        match self {
            Error::VariableMismatch(..)
            | Error::ExponentOverflow
            | Error::LaurentNotAllowed(_)
            | Error::TruncationMismatch(..)
            | Error::ParameterCountMismatch(..) => "exactalg",
            Error::InvalidWeight(_)
            | Error::WeightCount { .. }
            | Error::EulerIdentityViolated
            | Error::ConstantTerm
            | Error::NonIsolated(_)
            | Error::DegeneratePairing(_) => "singularity",
            Error::NonTermination(_) | Error::LaurentModeRequired | Error::UnsupportedMode(_) => {
                "brieskorn"
            }
            Error::InvalidParameter(_)
            | Error::OverrideConstantTerm(_)
            | Error::GradingViolation(_)
            | Error::ForbiddenOppositeParameter(..) => "unfolding",
            Error::InconsistentConstants(..) => "moduli",
            Error::ExpansionDepthInsufficient(_) => "residue_series",
            Error::Internal(_) => "primitive",
            Error::Syntax { .. } | Error::UnknownVariable(_) | Error::InvalidJob(_) => "cli",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
