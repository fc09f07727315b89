use thiserror::Error;

/// Errors surfaced by the library.
///
/// `Defect` is reserved for internal validation failures: a constructed
/// path or expansion that violates its own postcondition. Everything else
/// is a caller-side problem.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible geometry: {0}")]
    InfeasibleGeometry(String),

    #[error("message of {len} bits exceeds codec capacity {capacity}")]
    MessageTooLong { len: usize, capacity: usize },

    #[error("configurations live on different lattices")]
    LatticeMismatch,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal validation failed: {0}")]
    Defect(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status for command-line use: 2 for invalid input,
    /// 3 for infeasible geometry, 4 for internal defects, 5 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InfeasibleGeometry(_) => 3,
            Error::Defect(_) => 4,
            Error::Io(_) => 5,
            _ => 2,
        }
    }
}
