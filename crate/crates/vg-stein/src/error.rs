use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("I_nu(0) diverges for nu = {0} < 0")]
    DivergesAtZero(f64),

    #[error("root finder did not converge: {0}")]
    Convergence(String),

    #[error("density is singular at mu for r = {0} <= 1")]
    SingularAtMu(f64),

    #[error("density is unbounded for r = {0} <= 1")]
    Unbounded(f64),

    #[error("adaptive quadrature exhausted its budget (estimate {value}, error {abserr})")]
    Quadrature { value: f64, abserr: f64 },

    #[error("tail truncation could not reach tolerance: {0}")]
    DivergentTail(String),

    #[error("|x - mu| = {dist} is inside the singularity band {band}")]
    TooCloseToSingularity { dist: f64, band: f64 },

    #[error("bound {0} needs a norm that was not supplied: {1}")]
    MissingNorm(String, &'static str),

    #[error("condition violated: {0}")]
    ConditionViolated(String),

    #[error("cumulant polynomial is negative: G = {0}")]
    NegativeVariance(f64),

    #[error("invalid cumulants: {0}")]
    InvalidCumulants(String),

    #[error("sample is empty")]
    EmptySample,

    #[error("unknown bound id: {0}")]
    Registry(String),

    #[error("test function has no derivative: {0}")]
    NotDifferentiable(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
