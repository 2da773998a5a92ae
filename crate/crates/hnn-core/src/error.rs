//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by tensor construction, transforms, solvers, and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("Haar matrix order must be a positive even integer, got {0}")]
    InvalidHaarOrder(usize),

    #[error("spatial dimensions must be even for the Haar transform, got {m}x{n}")]
    OddSpatialDims { m: usize, n: usize },

    #[error("dimension mismatch: {context}")]
    DimMismatch { context: String },

    #[error("Tucker rank {rank} invalid for mode of size {dim} (need 1 <= rank <= dim)")]
    InvalidTuckerRank { rank: usize, dim: usize },

    #[error("input contains non-finite values: {context}")]
    NonFinite { context: String },

    #[error("observation mask has no observed entries")]
    EmptyMask,

    #[error("singular value sequence is all zero")]
    AllZeroSingularValues,

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("sampling rate must lie in (0, 1], got {0}")]
    InvalidSamplingRate(f64),

    #[error("noise case id must lie in 1..=6, got {0}")]
    InvalidNoiseCase(u8),

    #[error("invalid noise parameters: {0}")]
    InvalidNoiseParams(String),

    #[error("band of size {m}x{n} is smaller than the {window}x{window} SSIM window")]
    BandTooSmall { m: usize, n: usize, window: usize },

    #[error("reference band {band} has zero mean; ERGAS is undefined")]
    ZeroMeanBand { band: usize },

    #[error("every pixel spectrum is degenerate; SAM is undefined")]
    AllPixelsDegenerate,

    #[error("malformed tensor file: {0}")]
    MalformedFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
