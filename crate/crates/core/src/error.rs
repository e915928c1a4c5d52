use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree {d} is too small: the construction needs d >= 5")]
    DegreeTooSmall { d: u32 },
    #[error("degree {d} is too large: base edges are indexed with 16 bits (d <= {max})")]
    DegreeTooLarge { d: u32, max: u32 },
    #[error("malformed graph: {0}")]
    MalformedGraph(String),
    #[error("edge ({u}, {v}) projects onto a central edge and must stay parallel")]
    CentralEdgeCrossed { u: usize, v: usize },
    #[error("torus size {n} is too small: need n >= 2")]
    TorusTooSmall { n: u32 },
    #[error("graph has {vertices} vertices; brute-force enumeration is limited to {limit}")]
    TooLarge { vertices: usize, limit: usize },
    #[error("{uncovered} constraint cycles remain uncovered after {max_s} lifts")]
    BudgetExhausted { max_s: u32, uncovered: u64 },
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("grid resolution {0} leaves too few interior points to place distinct vertices")]
    GridTooCoarse(String),
    #[error("grid resolution {0} is finer than exact predicates support (denominator <= 2^32)")]
    GridTooFine(String),
    #[error("no good try within {attempts} attempts")]
    AttemptsExhausted { attempts: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
