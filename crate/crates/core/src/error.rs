use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {field}: {message}")]
    InvalidParameter { field: &'static str, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("config parse error: {0}")]
    ConfigParse(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("residual undefined within 1e-13 of a cotangent pole (u = {u})")]
    PoleProximity { u: f64 },

    #[error(
        "root refinement did not converge in {iterations} iterations on bracket \
         [{bracket_lo}, {bracket_hi}] (best residual {residual:e})"
    )]
    ConvergenceFailure {
        bracket_lo: f64,
        bracket_hi: f64,
        iterations: usize,
        residual: f64,
    },

    #[error("branch miscount: sign-change scan found {scanned} roots, refinement kept {refined}")]
    BranchMiscount { scanned: usize, refined: usize },

    #[error("sweep point {index} (I_c = {i_c:e} A) failed: {source}")]
    SweepPoint {
        index: usize,
        i_c: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(
        "mode truncation not converged: estimated tail changes the vacuum product factor \
         by {bound:e} (> {tol:e}); increase n_modes"
    )]
    TruncationNotConverged { bound: f64, tol: f64 },

    #[error("photon number {n} out of range: {message}")]
    PhotonNumber { n: usize, message: String },

    #[error("position {x} m outside the resonator [-L/2, L/2]")]
    OutOfDomain { x: f64 },

    #[error("Fock space dimension {dimension} exceeds the guard {limit}")]
    DimensionGuard { dimension: usize, limit: usize },

    #[error("eigensolver failed to converge on a {dim}x{dim} matrix")]
    Eigensolver { dim: usize },

    #[error(
        "ladder state |{target}> not identifiable: best overlap {overlap:.4} <= 0.9; \
         the RWA labelling has broken down for these parameters"
    )]
    LadderIdentification { target: usize, overlap: f64 },

    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Process exit code for the CLI: 2 validation, 3 convergence, 4 oracle mismatch.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter { .. }
        | Error::Config(_)
        | Error::ConfigParse(_)
        | Error::Io(_)
        | Error::PoleProximity { .. }
        | Error::PhotonNumber { .. }
        | Error::OutOfDomain { .. }
        | Error::DimensionGuard { .. } => 2,
        Error::ConvergenceFailure { .. }
        | Error::BranchMiscount { .. }
        | Error::TruncationNotConverged { .. }
        | Error::Eigensolver { .. }
        | Error::LadderIdentification { .. } => 3,
        Error::SweepPoint { source, .. } => exit_code(source),
        Error::OracleMismatch(_) => 4,
    }
}
