use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("exact ring needs {required} bits, budget allows {allowed}")]
    BudgetExceeded { required: u64, allowed: u64 },
    #[error("elements belong to different rings: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("pullback needs dst.k >= src.k (got {dst} < {src})")]
    PullbackDirection { src: u64, dst: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown family {0:?} (expected f1, f2, f3 or cor)")]
    UnknownFamily(String),
    #[error("family file line {line}: {msg}")]
    FamilyParse { line: usize, msg: String },
    #[error("value too large: {0}")]
    TooLarge(String),
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
