//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied argument violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two rasters that must share dimensions do not.
    #[error("dimension mismatch: {expected_width}x{expected_height} vs {actual_width}x{actual_height}")]
    DimensionMismatch {
        expected_width: u32,
        expected_height: u32,
        actual_width: u32,
        actual_height: u32,
    },

    /// Filesystem error, annotated with the offending path.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Unreadable or unsupported raster file (bad encoding, 16-bit, CMYK, ...).
    #[error("{}: unsupported image: {reason}", path.display())]
    Format { path: PathBuf, reason: String },

    /// The chromaticity image carries no usable spread at any projection angle.
    #[error("degenerate chromaticity image")]
    DegenerateChromaticity,

    /// Stack file does not start with the LSTACK magic.
    #[error("bad magic: not an LSTACK file")]
    BadMagic,

    /// Stack file uses a format version this build does not understand.
    #[error("unsupported LSTACK version {0}")]
    UnsupportedVersion(u16),

    /// Stack file ends before the declared payload does, or carries extra bytes.
    #[error("truncated LSTACK payload: expected {expected} bytes, found {actual}")]
    Truncated { expected: u64, actual: u64 },

    /// Declared stack dimensions overflow addressable memory.
    #[error("LSTACK dimensions overflow: {width}x{height}x{channels}")]
    DimOverflow {
        width: u32,
        height: u32,
        channels: u16,
    },

    /// Stack file names a configuration this build does not know.
    #[error("unknown stack config {0:?}")]
    UnknownConfig(String),
}
