use thiserror::Error;

/// Errors raised by the arithmetic and analytic layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid discriminant {0}: must be negative and congruent to 0 or 1 mod 4")]
    InvalidDiscriminant(i64),
    #[error("order of discriminant {0} is isomorphic to Z[i] or Z[exp(2 pi i/3)], which is excluded")]
    ExcludedOrder(i64),
    #[error("non-maximal order (conductor {0}) requested without enabling non-maximal orders")]
    NonMaximalOrder(i64),
    #[error("order of discriminant {0} is not norm-Euclidean")]
    UnsupportedOrder(i64),
    #[error("operands belong to different orders")]
    MixedOrder,
    #[error("modulus must be non-zero")]
    ZeroModulus,
    #[error("level generator must be a non-zero non-unit")]
    InvalidLevel,
    #[error("matrix is not in Gamma_0(N): lower-left entry not divisible by the level")]
    NotInGamma0,
    #[error("matrix determinant is {0}, expected 1")]
    BadDeterminant(String),
    #[error("sampling failed after {0} attempts; increase the height bound")]
    Sampling(usize),
    #[error("unsupported Eisenstein weight k = {0}")]
    UnsupportedWeight(u32),
    #[error("argument lies on a pole of the series")]
    Pole,
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("{0} is not a prime element generating a prime ideal")]
    NotPrime(String),
    #[error("Hecke matching failed: {0}")]
    HeckeMatching(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
