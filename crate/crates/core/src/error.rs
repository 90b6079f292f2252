use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("division by zero in F_q")]
    DivisionByZero,
    #[error("mixed moduli: {0} and {1}")]
    MixedModuli(u32, u32),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("amplitude budget exceeded: {required} amplitudes required, {allowed} allowed")]
    BudgetExceeded { required: u128, allowed: u128 },
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("sets must have equal size")]
    RaggedSets,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("threshold {ttilde} exceeds tau {tau}")]
    ThresholdAboveTau { ttilde: f64, tau: f64 },
    #[error("condition infeasible")]
    Infeasible,
    #[error("not a coset solution")]
    NotCosetSolution,
    #[error("polynomial degree {degree} not below {bound}")]
    DegreeViolation { degree: usize, bound: usize },
    #[error("incomplete syndrome coverage: {covered} of {expected}")]
    IncompleteCoverage { covered: usize, expected: usize },
    #[error("solver failed: {0}")]
    SolverFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
