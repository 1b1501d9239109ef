//! IEEE 802.15.7 PHY I/II baseband chains and the PHY I-VI mode catalog.
//!
//! Bits and chips are carried as `u8` values of 0 or 1, most significant bit
//! of each byte first. A PHY I/II transmit chain is
//!
//! ```text
//! payload bytes -> RS outer code -> convolutional inner code -> line code -> OOK / VPPM
//! ```
//!
//! with the stages a given mode does not use skipped.

use std::fmt;

pub mod bits;
pub mod catalog;
pub mod conv;
pub mod eightb10b;
pub mod fourb6b;
pub mod frame;
pub mod gf;
pub mod manchester;
pub mod modulation;
pub mod rs;

pub use catalog::{data_rate, phy_mode_catalog, Clock, Fec, LineCode, Modulation, PhyClass, PhyMode};
pub use frame::{Frame, LinkCodec, OpticalLink, PhyCodec, RfCodec};

#[derive(Debug, Clone, PartialEq)]
pub enum PhyError {
    /// Input length is not a multiple of the codec's block size.
    InvalidLength { multiple_of: usize, got: usize },
    /// A value other than 0 or 1 where a bit or chip was expected.
    NotBinary { position: usize },
    /// Manchester chip pair `00` or `11`.
    InvalidChipPair { position: usize },
    /// Symbol outside the code table.
    InvalidCodeword { position: usize, word: u16 },
    /// 8b/10b symbol valid only under the opposite running disparity.
    DisparityViolation { position: usize },
    /// More symbol errors than the Reed-Solomon code can correct.
    Uncorrectable { block: usize },
    /// VPPM symbol whose two halves carry equal energy.
    AmbiguousSymbol { position: usize },
    InvalidParameter(String),
    /// Computed and catalogued data rates disagree.
    RateMismatch { mode: String, computed: f64, nominal: f64 },
    /// The mode has no codec binding or no computable rate.
    Unsupported(String),
    Catalog { line: usize, message: String },
    /// Frame check sequence mismatch after decoding.
    ChecksumMismatch { expected: u16, got: u16 },
}

impl fmt::Display for PhyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use PhyError::*;
        match self {
            InvalidLength { multiple_of, got } => {
                write!(f, "length {got} is not a multiple of {multiple_of}")
            }
            NotBinary { position } => write!(f, "non-binary value at position {position}"),
            InvalidChipPair { position } => {
                write!(f, "invalid Manchester chip pair at chip {position}")
            }
            InvalidCodeword { position, word } => {
                write!(f, "invalid codeword {word:#b} at symbol {position}")
            }
            DisparityViolation { position } => {
                write!(f, "running disparity violation at symbol {position}")
            }
            Uncorrectable { block } => write!(f, "uncorrectable Reed-Solomon block {block}"),
            AmbiguousSymbol { position } => write!(f, "ambiguous VPPM symbol at {position}"),
            InvalidParameter(msg) => f.write_str(msg),
            RateMismatch {
                mode,
                computed,
                nominal,
            } => write!(
                f,
                "mode {mode}: computed rate {computed} bit/s differs from nominal {nominal} bit/s"
            ),
            Unsupported(msg) => f.write_str(msg),
            Catalog { line, message } => write!(f, "catalog line {line}: {message}"),
            ChecksumMismatch { expected, got } => {
                write!(f, "frame check sequence {got:#06x}, expected {expected:#06x}")
            }
        }
    }
}

impl std::error::Error for PhyError {}
