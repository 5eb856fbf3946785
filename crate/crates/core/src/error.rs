//! Error type shared by all stages.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("irregular singular point at {0}")]
    IrregularSingularPoint(String),
    #[error("unsupported singularity: {0}")]
    UnsupportedSingularity(String),
    #[error("no factor found for irreducible operator of order {0}")]
    IrreducibleHighOrder(usize),
    #[error("integrand has non-rational residues")]
    NonRationalResidues,
    #[error("radicand too complex: {0}")]
    RadicandTooComplex(String),
    #[error("integrand not supported in closed form")]
    IntegrandNotSupported,
    #[error("Wronskian vanishes")]
    WronskianVanishes,
    #[error("pole hit: {0}")]
    PoleHit(String),
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("divergent integral: {0}")]
    DivergentIntegral(String),
    #[error("non-removable interior singularity at {0}")]
    InteriorSingularity(String),
    #[error("singular fitting system")]
    SingularSystem,
    #[error("missing initial value for n = {0}")]
    MissingInitialValue(i64),
    #[error("pole field not supported: {0}")]
    UnsupportedPoleField(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
