//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Geometry parameters violate the model assumptions.
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// Aperture parameters out of range.
    #[error("invalid aperture: {0}")]
    InvalidAperture(String),

    /// A scene must contain at least one scatterer.
    #[error("scene contains no scatterers")]
    EmptyScene,

    /// Scatterer amplitude must have positive magnitude.
    #[error("scatterer amplitude magnitude must be > 0 (got {0})")]
    InvalidAmplitude(f64),

    /// Noise fraction must be finite and non-negative.
    #[error("invalid noise fraction: {0}")]
    InvalidNoise(f64),

    /// Arrays built on different grids were combined.
    #[error("grid length mismatch: {left} vs {right}")]
    GridMismatch { left: usize, right: usize },

    /// Configuration file is malformed or violates an invariant.
    #[error("config error: {0}")]
    Config(String),

    /// I/O failure reading or writing data files.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
