use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed number: {0:?}")]
    MalformedNumber(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("not a perfect square")]
    NotAPerfectSquare,
    #[error("negative input to square root")]
    NegativeInput,
    #[error("parameters not on the unit sphere: |u|^2 - 1 = {0}")]
    ParamsNotOnSphere(String),
    #[error("commutativity violated: {0}")]
    CommutativityViolated(String),
    #[error("normalization violated: {0}")]
    NormalizationViolated(String),
    #[error("element is not central: {0}")]
    NotCentral(String),
    #[error("degree {degree} exceeds cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },
    #[error("eigenvalue is irrational: sqrt({0}) is not rational")]
    IrrationalEigenvalue(String),
    #[error("Hochschild boundary of a degree-zero chain")]
    DegreeZero,
    #[error("unitarity precondition fails: {0}")]
    NotUnitaryEnough(String),
    #[error("invalid run specification: {0}")]
    InvalidSpec(String),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
