use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AtlasError {
    #[error("invalid world parameters: {0}")]
    InvalidParams(String),

    #[error("unknown world kind `{0}`")]
    UnknownKind(String),

    #[error("unknown parameter `{name}` for world kind `{kind}`")]
    UnknownParam { kind: String, name: String },

    #[error("trait out of range: {0}")]
    TraitOutOfRange(String),

    #[error("action {action} is not available in state {state}")]
    UnavailableAction { state: usize, action: usize },

    #[error("invalid solver setting: {0}")]
    InvalidSolver(String),

    #[error("non-finite value at state {state} after {iteration} sweeps")]
    NonFinite { state: usize, iteration: usize },

    #[error("policy enumeration needs {needed} evaluations, cap is {cap}")]
    CapExceeded { needed: u128, cap: u128 },

    #[error("invalid grid spec: {0}")]
    InvalidGrid(String),

    #[error("map computation failed at {} cell(s); first: {}", .0.len(), .0.first().map(String::as_str).unwrap_or("-"))]
    CellFailures(Vec<String>),

    #[error("label `wander` found on the {edge} edge of the map for `{world}`")]
    WanderOnEdge { world: String, edge: &'static str },

    #[error("invalid intervention path: {0}")]
    InvalidPath(String),

    #[error("maps are not equivalent: {src} vs {dst}")]
    NotEquivalent { src: String, dst: String },

    #[error("no transferred path with {0} crossing(s) could be found")]
    TransferFailed(usize),

    #[error("sweep has {cells} cells, cap is {cap}")]
    SweepTooLarge { cells: usize, cap: usize },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for AtlasError {
    fn from(e: std::io::Error) -> Self {
        AtlasError::Io(e.to_string())
    }
}

pub type Result<T, E = AtlasError> = std::result::Result<T, E>;
