use thiserror::Error;

/// Errors raised by operator construction, generator assembly and the
/// thermodynamic functionals.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeError { expected: String, found: String },

    #[error("operator is not Hermitian (max |X - X^dag| = {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("not a density matrix: {0}")]
    NotAState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operator is not a lowering eigenoperator of H0 (residual {residual:.3e})")]
    NotAnEigenoperator { residual: f64 },

    #[error("stationary state is not unique (kernel dimension {nullity})")]
    NonUniqueStationary { nullity: usize },

    #[error("numerical drift at step {step}: {reason}")]
    NumericalDrift { step: usize, reason: String },

    #[error("time step {step:.3e} exceeds the quasi-static limit {limit:.3e}")]
    StepTooLarge { step: f64, limit: f64 },

    #[error("weight state is singular (minimum eigenvalue {min_eigenvalue:.3e})")]
    SingularWeight { min_eigenvalue: f64 },

    #[error("reference state is not stationary (residual {residual:.3e})")]
    NotStationary { residual: f64 },

    #[error("bath assignment does not cover term {term} exactly once")]
    IncompleteAssignment { term: usize },

    #[error("logarithm of a singular state (minimum eigenvalue {min_eigenvalue:.3e})")]
    SingularLogarithm { min_eigenvalue: f64 },

    #[error("entropy production is negative ({sigma:.3e})")]
    SpohnViolation { sigma: f64 },

    #[error("support of the first state is not contained in the support of the second (leak {leak:.3e})")]
    SupportError { leak: f64 },

    #[error("time grid too coarse: discretisation error estimate {estimate:.3e} exceeds {limit:.3e}")]
    GridTooCoarse { estimate: f64, limit: f64 },

    #[error("stationary-derivative identity violated (residual {residual:.3e})")]
    IdentityViolation { residual: f64 },

    #[error("resolvent system is singular (condition number {condition:.3e})")]
    ResolventSingular { condition: f64 },

    #[error("generator does not satisfy detailed balance: {0}")]
    NotEquilibrium(String),

    #[error("rate ratio {ratio:.12e} violates chemical detailed balance (expected {expected:.12e})")]
    DetailedBalanceViolation { ratio: f64, expected: f64 },

    #[error("storage efficiency requires gamma_up > gamma_down (got {gamma_up} <= {gamma_down})")]
    NotAmplifying { gamma_up: f64, gamma_down: f64 },

    #[error("photon occupation must be positive (got {0})")]
    ZeroOccupation(f64),

    #[error("truncation overflow at t = {time}: top-level population {population:.3e}")]
    TruncationOverflow { time: f64, population: f64 },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("linear algebra failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
