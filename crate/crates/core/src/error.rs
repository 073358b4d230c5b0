use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("branch cut: argument {0} lies on (-inf, 0]")]
    BranchCut(String),
    #[error("exponents ({0}, {1}) are not coprime")]
    NotCoprime(u32, u32),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("not tangent-to-identity-with-nontrivial-jet")]
    NotTangentToIdentity,
    #[error("linear part is not unipotent")]
    NotUnipotent,
    #[error("resonant germ: aM + bN = 0")]
    Resonant,
    #[error("germ does not match the required template: {0}")]
    TemplateMismatch(String),
    #[error("point not in domain: {0}")]
    NotInDomain(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("slow convergence: error estimate {0:e} above tolerance")]
    SlowConvergence(f64),
    #[error("search exhausted after j = {0}")]
    ExhaustedSearch(u64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("escape hypotheses not satisfied")]
    HypothesisNotSatisfied,
    #[error("no contraction: {0}")]
    NoContraction(String),
    #[error("grid resolution too coarse: residual {0:e}")]
    GridResolution(f64),
    #[error("point outside the curve sector")]
    OutOfSector,
    #[error("zero vector field")]
    ZeroField,
    #[error("resolution depth {0} exceeded")]
    DepthExceeded(usize),
    #[error("singular points with non Gaussian-rational coordinates are not supported")]
    IrrationalPoints,
    #[error("classification changed between truncation orders {0} and {1}")]
    TruncationUnstable(usize, usize),
    #[error("not singular: formal logarithm vanishes")]
    NotSingular,
    #[error("insufficient data: {0} steps")]
    InsufficientData(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
