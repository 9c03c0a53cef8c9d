use thiserror::Error;

/// Errors produced by the interaction toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("player count {n} exceeds the lattice cap of {cap}")]
    TooManyPlayers { n: usize, cap: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("subset mask {mask} out of range for n = {n}")]
    MaskOutOfRange { mask: u64, n: usize },

    #[error("dimension mismatch: expected n = {expected}, got n = {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("expected {expected} interactions, got {actual}")]
    KindMismatch {
        expected: crate::interactions::InteractionKind,
        actual: crate::interactions::InteractionKind,
    },

    #[error("malformed value table: {0}")]
    MalformedTable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("epsilon[{index}] = {value} violates bound tau = {tau}")]
    EpsilonOutOfBounds { index: usize, value: f64, tau: f64 },

    #[error("oracle failed at mask {mask}: {reason}")]
    Oracle { mask: u64, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
