use std::path::PathBuf;

use thiserror::Error;

/// Failure while decoding wire-format bytes. Offsets are relative to the
/// start of the buffer handed to the decoder.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("truncated input at offset {offset}: needed {needed} more byte(s)")]
    Truncated { offset: usize, needed: usize },
    #[error("script at offset {offset} declares {len} bytes but only {remaining} remain")]
    ScriptTooLong {
        offset: usize,
        len: u64,
        remaining: usize,
    },
    #[error("segwit-serialized transaction at offset {offset} is not supported")]
    SegwitUnsupported { offset: usize },
    #[error("negative output value {value} at offset {offset}")]
    NegativeValue { offset: usize, value: i64 },
    #[error("{what} count {count} at offset {offset} exceeds remaining input")]
    CountTooLarge {
        what: &'static str,
        offset: usize,
        count: u64,
    },
    #[error("block at offset {offset} has no transactions")]
    EmptyBlock { offset: usize },
    #[error("block header at offset {offset} has a zero timestamp")]
    ZeroTimestamp { offset: usize },
    #[error("first transaction of block at offset {offset} is not a coinbase")]
    MissingCoinbase { offset: usize },
    #[error("block record declares {declared} bytes but the block occupies {consumed}")]
    LengthMismatch { declared: usize, consumed: usize },
}

impl DecodeError {
    /// Shift every offset by `base`, used when a sub-slice was decoded.
    pub(crate) fn rebase(self, base: usize) -> Self {
        use DecodeError::*;
        match self {
            Truncated { offset, needed } => Truncated {
                offset: offset + base,
                needed,
            },
            ScriptTooLong {
                offset,
                len,
                remaining,
            } => ScriptTooLong {
                offset: offset + base,
                len,
                remaining,
            },
            SegwitUnsupported { offset } => SegwitUnsupported {
                offset: offset + base,
            },
            NegativeValue { offset, value } => NegativeValue {
                offset: offset + base,
                value,
            },
            CountTooLarge {
                what,
                offset,
                count,
            } => CountTooLarge {
                what,
                offset: offset + base,
                count,
            },
            EmptyBlock { offset } => EmptyBlock {
                offset: offset + base,
            },
            ZeroTimestamp { offset } => ZeroTimestamp {
                offset: offset + base,
            },
            MissingCoinbase { offset } => MissingCoinbase {
                offset: offset + base,
            },
            e @ LengthMismatch { .. } => e,
        }
    }
}

/// Failure while scanning a directory of raw block files.
#[derive(Debug, Error)]
pub enum ScanError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad magic bytes {found:02x?} in {path} at offset {offset}")]
    BadMagic {
        path: PathBuf,
        offset: u64,
        found: [u8; 4],
    },
    #[error("record in {path} at offset {offset} is truncated: declared {declared} bytes")]
    TruncatedRecord {
        path: PathBuf,
        offset: u64,
        declared: u32,
    },
    #[error("malformed block in {path} at record offset {offset}: {source}")]
    Block {
        path: PathBuf,
        offset: u64,
        #[source]
        source: DecodeError,
    },
}

/// Failure decoding a Base58Check string.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AddressError {
    #[error("invalid base58 character {0:?}")]
    InvalidCharacter(char),
    #[error("decoded payload has {0} bytes, expected 25")]
    BadLength(usize),
    #[error("checksum mismatch")]
    BadChecksum,
    #[error("unsupported version byte {0:#04x}")]
    BadVersion(u8),
}
