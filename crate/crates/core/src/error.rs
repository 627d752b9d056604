use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),

    #[error("not properly elliptic in xi_n: leading coefficient {0:e} vanishes")]
    DegenerateLeading(f64),

    #[error("marginal root {re:e}{im:+e}i on the real axis (parameter-ellipticity violated)")]
    MarginalRoot { re: f64, im: f64 },

    #[error("stable root count {found} differs from m = {expected}")]
    RootCount { found: usize, expected: usize },

    #[error("empty sampling")]
    EmptySampling,

    #[error("sample {index} violates the quasi-sphere normalization (residual {residual:e})")]
    Normalization { index: usize, residual: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("Shapiro-Lopatinskii violation at boundary mode {mode:?}: |det| = {det:e}")]
    LopatinskiiViolation { mode: Vec<f64>, det: f64 },

    #[error("ellipticity violation: lambda - A(k) vanishes at wavenumber {0:?}")]
    EllipticityViolation(Vec<f64>),

    #[error("argument outside sector: {0}")]
    Domain(String),

    #[error("symbol singularity: {0}")]
    Singular(String),

    #[error("quadrature error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
