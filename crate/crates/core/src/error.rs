use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid local dimension {0}: must be at least 2")]
    InvalidDimension(usize),

    #[error("Weyl index ({i},{j}) out of range for dimension {d}")]
    WeylIndexOutOfRange { i: usize, j: usize, d: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("ket has no nonzero amplitude")]
    DegenerateKet,

    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("party set must be nonempty")]
    EmptyPartySet,

    #[error("party {party} out of range for a {n}-party system")]
    PartyOutOfRange { party: usize, n: usize },

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("unsupported party count {n}: {reason}")]
    PartyCount { n: usize, reason: &'static str },

    #[error("state is not pure (purity {0})")]
    NotPure(f64),

    #[error("unsupported state parameters: {0}")]
    UnsupportedState(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid scan: {0}")]
    InvalidScan(String),

    #[error("malformed state descriptor: {0}")]
    Descriptor(String),
}

pub type Result<T> = std::result::Result<T, Error>;
