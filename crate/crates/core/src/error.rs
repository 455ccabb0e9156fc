use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    NotFound(PathBuf),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("unsupported image format{}", describe_magic(.0))]
    UnsupportedFormat(Vec<u8>),

    #[error("corrupt {format} data at byte {offset}: {reason}")]
    Corrupt {
        format: &'static str,
        offset: u64,
        reason: String,
    },

    #[error("cannot encode: {0}")]
    Encode(String),

    #[error("dimension mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
    DimensionMismatch {
        left_w: usize,
        left_h: usize,
        right_w: usize,
        right_h: usize,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("distance is infinite everywhere: the mask has no background pixel")]
    NoBackground,

    #[error("degenerate mask: {0}")]
    DegenerateMask(&'static str),

    #[error("affine map is singular (|det| = {0:e})")]
    SingularMap(f64),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures that come from the filesystem or a codec rather
    /// than from the image operators themselves.
    pub fn is_io_or_codec(&self) -> bool {
        matches!(
            self,
            Error::NotFound(_)
                | Error::Io(_)
                | Error::UnsupportedFormat(_)
                | Error::Corrupt { .. }
                | Error::Encode(_)
        )
    }
}

fn describe_magic(bytes: &[u8]) -> String {
    if bytes.is_empty() {
        " (empty file)".to_string()
    } else {
        let hex: Vec<String> = bytes.iter().take(8).map(|b| format!("{b:02x}")).collect();
        format!(" (leading bytes {})", hex.join(" "))
    }
}
