use num_rational::Ratio;
use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid `{field}`: {reason}")]
    InvalidField { field: &'static str, reason: String },

    #[error("t = Λγ = {t} is not an integer; only rate-envelope queries accept it")]
    NonIntegralT { t: Ratio<u64> },

    #[error("user {user} demands file {file}, but only {num_files} files exist")]
    DemandOutOfRange {
        user: usize,
        file: usize,
        num_files: usize,
    },

    #[error("{what} has {size} candidates, above the exhaustive limit of {limit}")]
    OracleLimit {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("no code available for k = {k}, d = {d}{hint}")]
    NoCode { k: usize, d: usize, hint: String },

    #[error("receiver {receiver} (user {user}) cannot decode message {message} ({subfile})")]
    Undecodable {
        receiver: usize,
        user: usize,
        message: usize,
        subfile: String,
    },

    #[error("packet {index} has {actual} bits, expected {expected}")]
    PacketLength {
        index: usize,
        expected: usize,
        actual: usize,
    },

    #[error("expected {expected} packets, got {actual}")]
    PacketCount { expected: usize, actual: usize },

    #[error("syndrome {syndrome:#b} at bit {column} is outside the correctable table")]
    Uncorrectable { column: usize, syndrome: u64 },

    #[error("demand sweep over {count} demands exceeds the limit of {limit}")]
    SweepLimit { count: u128, limit: u128 },

    #[error("convex envelope needs at least one point")]
    EmptyEnvelope,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn field(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidField {
            field,
            reason: reason.into(),
        }
    }
}
