use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Contract violations and validation failures raised by the core crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two vectors that must share a dimension do not.
    DimensionMismatch { expected: usize, found: usize },
    /// A feature or scalar input carried NaN or an infinity.
    NonFinite { index: usize },
    /// A scalar parameter is outside its admissible range.
    InvalidParameter { name: &'static str, value: f64 },
    /// The same track ID appears twice in one frame.
    DuplicateTrackId { track_id: u64 },
    /// Detections of a single frame disagree on their frame index.
    MixedFrames { expected: u64, found: u64 },
    /// Configuration validation; every violation found is listed.
    Validation(Vec<String>),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NonFinite { index } => write!(f, "non-finite value at index {index}"),
            Error::InvalidParameter { name, value } => {
                write!(f, "invalid value for `{name}`: {value}")
            }
            Error::DuplicateTrackId { track_id } => {
                write!(f, "track id {track_id} appears more than once in a frame")
            }
            Error::MixedFrames { expected, found } => {
                write!(f, "detection from frame {found} mixed into frame {expected}")
            }
            Error::Validation(problems) => {
                write!(f, "invalid configuration: ")?;
                for (i, p) in problems.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

impl core::error::Error for Error {}
