use super::error::DecodeError;
use super::hash::{double_sha256, Hash256};
use super::reader::{encode_varint, Reader};
use super::tx::{read_transaction, RawTransaction};

/// Mainnet network magic, as it appears on disk.
pub const MAGIC: [u8; 4] = [0xF9, 0xBE, 0xB4, 0xD9];
pub const HEADER_LEN: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockHeader {
    pub version: i32,
    pub prev_hash: Hash256,
    pub merkle_root: Hash256,
    /// Unix seconds.
    pub time: u32,
    pub bits: u32,
    pub nonce: u32,
}

impl BlockHeader {
    pub fn serialize_into(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.version.to_le_bytes());
        out.extend_from_slice(&self.prev_hash.0);
        out.extend_from_slice(&self.merkle_root.0);
        out.extend_from_slice(&self.time.to_le_bytes());
        out.extend_from_slice(&self.bits.to_le_bytes());
        out.extend_from_slice(&self.nonce.to_le_bytes());
    }

    pub fn hash(&self) -> Hash256 {
        let mut buf = Vec::with_capacity(HEADER_LEN);
        self.serialize_into(&mut buf);
        Hash256(double_sha256(&buf))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    /// Chain height is never derived from the header chain; callers that
    /// know it may fill this in.
    pub height_hint: Option<u64>,
    pub header: BlockHeader,
    pub transactions: Vec<RawTransaction>,
}

impl Block {
    pub fn timestamp(&self) -> i64 {
        self.header.time as i64
    }

    pub fn hash(&self) -> Hash256 {
        self.header.hash()
    }

    pub fn serialize(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.header.serialize_into(&mut out);
        encode_varint(self.transactions.len() as u64, &mut out);
        for tx in &self.transactions {
            tx.serialize_into(&mut out);
        }
        out
    }

    /// Serializes the block framed as an on-disk record (magic, length, payload).
    pub fn write_record(&self, out: &mut Vec<u8>) {
        let payload = self.serialize();
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
        out.extend_from_slice(&payload);
    }
}

/// Decodes a block (header, tx count, transactions) from the front of `bytes`.
pub fn parse_block(bytes: &[u8]) -> Result<(Block, usize), DecodeError> {
    let mut r = Reader::new(bytes);
    let header = BlockHeader {
        version: r.i32_le()?,
        prev_hash: Hash256(r.array()?),
        merkle_root: Hash256(r.array()?),
        time: r.u32_le()?,
        bits: r.u32_le()?,
        nonce: r.u32_le()?,
    };
    if header.time == 0 {
        return Err(DecodeError::ZeroTimestamp { offset: 68 });
    }
    let count_offset = r.position();
    let n = r.varint()?;
    if n == 0 {
        return Err(DecodeError::EmptyBlock { offset: 0 });
    }
    // Each transaction needs at least 60 bytes.
    if n.saturating_mul(60) > r.remaining() as u64 {
        return Err(DecodeError::CountTooLarge {
            what: "transaction",
            offset: count_offset,
            count: n,
        });
    }
    let mut transactions = Vec::with_capacity(n as usize);
    for _ in 0..n {
        transactions.push(read_transaction(&mut r)?);
    }
    if !transactions[0].is_coinbase() {
        return Err(DecodeError::MissingCoinbase { offset: 0 });
    }
    Ok((
        Block {
            height_hint: None,
            header,
            transactions,
        },
        r.position(),
    ))
}
