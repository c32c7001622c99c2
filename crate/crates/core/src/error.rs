use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid MDP: {}", .0.join("; "))]
    InvalidMdp(Vec<String>),

    #[error("enumeration of {count} policies exceeds the cap of {cap}")]
    CapExceeded { count: u128, cap: u128 },

    #[error("policy count {actions}^{states} overflows")]
    CountOverflow { states: usize, actions: usize },

    #[error("degenerate point set: {0}")]
    Degenerate(String),

    #[error("point {0} is not a vertex of the hull")]
    NotAVertex(usize),

    #[error("search aborted: {0}")]
    SearchAborted(String),

    #[error("unknown face id {0}")]
    UnknownFace(usize),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
