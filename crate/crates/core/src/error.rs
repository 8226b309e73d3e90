use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),
    #[error("budget exceeded: {what} needs an estimated {estimate} units (cap {cap})")]
    Budget { what: String, estimate: u128, cap: u128 },
    #[error("incomplete model: no op-table entry for {0}")]
    IncompleteModel(String),
    #[error("degenerate model: {0}")]
    DegenerateModel(String),
    #[error("fusion precondition failed: {0}")]
    FusionDegenerate(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("no antichecker set: {0}")]
    NoAntichecker(String),
    #[error("not a cover: {0}")]
    NotACover(String),
    #[error("derandomization failed: {0}")]
    Derandomization(String),
    #[error("projectivity not established: {0}")]
    NotProjective(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("structural error: {0}")]
    Structure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, col, msg: msg.into() }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}
