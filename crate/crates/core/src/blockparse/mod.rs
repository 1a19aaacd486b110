//! Decoding of raw block files into blocks, transactions and P2PKH addresses.
//!
//! Everything here is legacy (pre-segwit) wire format. Integers are
//! little-endian; hashes are stored in wire order.

mod address;
mod block;
mod error;
mod hash;
mod reader;
mod scan;
mod tx;

pub use address::{extract_p2pkh_address, p2pkh_script, Address, P2PKH_VERSION};
pub use block::{parse_block, Block, BlockHeader, HEADER_LEN, MAGIC};
pub use error::{AddressError, DecodeError, ScanError};
pub use hash::{double_sha256, Hash256};
pub use reader::{encode_varint, parse_varint};
pub use scan::{block_files, scan_block_files, BlockScanner, ScanStats};
pub use tx::{parse_transaction, OutPoint, RawTransaction, TxIn, TxOut, COINBASE_VOUT};

/// The mainnet genesis block payload (header + transactions, no record framing).
pub const GENESIS_BLOCK_HEX: &str = concat!(
    "0100000000000000000000000000000000000000000000000000000000000000",
    "000000003ba3edfd7a7b12b27ac72c3e67768f617fc81bc3888a51323a9fb8aa",
    "4b1e5e4a29ab5f49ffff001d1dac2b7c01010000000100000000000000000000",
    "00000000000000000000000000000000000000000000ffffffff4d04ffff001d",
    "0104455468652054696d65732030332f4a616e2f32303039204368616e63656c",
    "6c6f72206f6e206272696e6b206f66207365636f6e64206261696c6f75742066",
    "6f722062616e6b73ffffffff0100f2052a01000000434104678afdb0fe554827",
    "1967f1a67130b7105cd6a828e03909a67962e0ea1f61deb649f6bc3f4cef38c4",
    "f35504e51ec112de5c384df7ba0b8d578a4c702b6bf11d5fac00000000",
);

/// Decodes a hex string; used for fixtures.
pub fn decode_hex(s: &str) -> Option<Vec<u8>> {
    if s.len() % 2 != 0 {
        return None;
    }
    (0..s.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(s.get(i..i + 2)?, 16).ok())
        .collect()
}

pub fn genesis_block() -> Block {
    let bytes = decode_hex(GENESIS_BLOCK_HEX).expect("valid hex");
    parse_block(&bytes).expect("genesis block parses").0
}
