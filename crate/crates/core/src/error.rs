use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("LFSR seed must be a nonzero register state")]
    ZeroSeed,

    #[error("seed 0x{seed:x} does not fit a register of order {order}")]
    InvalidSeed { seed: u32, order: usize },

    #[error("invalid feedback taps {taps:?} for order {order}")]
    InvalidTaps { taps: Vec<usize>, order: usize },

    #[error("feedback taps {taps:?} are not primitive: register period {period} < {expected}")]
    NonMaximalPeriod {
        taps: Vec<usize>,
        period: usize,
        expected: usize,
    },

    #[error("lag {lag} out of range for sequence length {length}")]
    LagOutOfRange { lag: usize, length: usize },

    #[error("characters {first} and {second} share circular lag {lag_bits}")]
    LagCollision {
        first: usize,
        second: usize,
        lag_bits: usize,
    },

    #[error("invalid band {low_cut}..{high_cut} Hz (order {order}, fs {sampling_rate} Hz)")]
    InvalidBand {
        low_cut: f64,
        high_cut: f64,
        order: usize,
        sampling_rate: f64,
    },

    #[error("sampling rate mismatch: filter designed for {filter} Hz, signal at {signal} Hz")]
    RateMismatch { filter: f64, signal: f64 },

    #[error("signal of {samples} samples is shorter than the filter warm-up of {required}")]
    SignalTooShort { samples: usize, required: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("zero-variance input to correlation")]
    ZeroVariance,

    #[error("non-finite sample value")]
    NonFinite,

    #[error("character position {position} out of range for {count} characters")]
    PositionOutOfRange { position: usize, count: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("character {0:?} is not on the keyboard")]
    UnknownCharacter(char),

    #[error("word {0:?} is not in the dictionary")]
    WordNotInDictionary(String),

    #[error("dictionary is empty after normalization")]
    DictionaryEmpty,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("{path}: file not found")]
    FileNotFound { path: PathBuf },

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
