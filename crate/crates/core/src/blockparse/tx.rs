use serde::{Deserialize, Serialize};

use super::address::{extract_p2pkh_address, Address};
use super::error::DecodeError;
use super::hash::{double_sha256, Hash256};
use super::reader::{encode_varint, Reader};

/// Smallest possible serialized input: outpoint(36) + empty script(1) + sequence(4).
const MIN_INPUT_LEN: u64 = 41;
/// Smallest possible serialized output: value(8) + empty script(1).
const MIN_OUTPUT_LEN: u64 = 9;

pub const COINBASE_VOUT: u32 = 0xFFFF_FFFF;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OutPoint {
    pub txid: Hash256,
    pub vout: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TxIn {
    pub prev_txid: Hash256,
    pub prev_vout: u32,
    pub script_sig: Vec<u8>,
    pub sequence: u32,
}

impl TxIn {
    pub fn outpoint(&self) -> OutPoint {
        OutPoint {
            txid: self.prev_txid,
            vout: self.prev_vout,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TxOut {
    /// Satoshi.
    pub value: u64,
    pub script_pubkey: Vec<u8>,
    /// Present only for P2PKH scripts.
    pub address: Option<Address>,
}

impl TxOut {
    pub fn new(value: u64, script_pubkey: Vec<u8>) -> Self {
        let address = extract_p2pkh_address(&script_pubkey);
        TxOut {
            value,
            script_pubkey,
            address,
        }
    }
}

/// A decoded legacy-format transaction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTransaction {
    pub txid: Hash256,
    pub version: i32,
    pub inputs: Vec<TxIn>,
    pub outputs: Vec<TxOut>,
    pub lock_time: u32,
}

impl RawTransaction {
    /// Builds a transaction and computes its txid from the serialization.
    pub fn new(version: i32, inputs: Vec<TxIn>, outputs: Vec<TxOut>, lock_time: u32) -> Self {
        let mut tx = RawTransaction {
            txid: Hash256::ZERO,
            version,
            inputs,
            outputs,
            lock_time,
        };
        tx.txid = Hash256(double_sha256(&tx.serialize()));
        tx
    }

    pub fn is_coinbase(&self) -> bool {
        self.inputs.len() == 1
            && self.inputs[0].prev_txid.is_zero()
            && self.inputs[0].prev_vout == COINBASE_VOUT
    }

    pub fn total_output_value(&self) -> u64 {
        self.outputs.iter().map(|o| o.value).sum()
    }

    pub fn serialize(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.serialize_into(&mut out);
        out
    }

    pub fn serialize_into(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.version.to_le_bytes());
        encode_varint(self.inputs.len() as u64, out);
        for input in &self.inputs {
            out.extend_from_slice(&input.prev_txid.0);
            out.extend_from_slice(&input.prev_vout.to_le_bytes());
            encode_varint(input.script_sig.len() as u64, out);
            out.extend_from_slice(&input.script_sig);
            out.extend_from_slice(&input.sequence.to_le_bytes());
        }
        encode_varint(self.outputs.len() as u64, out);
        for output in &self.outputs {
            out.extend_from_slice(&output.value.to_le_bytes());
            encode_varint(output.script_pubkey.len() as u64, out);
            out.extend_from_slice(&output.script_pubkey);
        }
        out.extend_from_slice(&self.lock_time.to_le_bytes());
    }
}

/// Decodes one transaction from the front of `bytes`, returning it with the
/// number of bytes consumed. Nothing is returned on error.
pub fn parse_transaction(bytes: &[u8]) -> Result<(RawTransaction, usize), DecodeError> {
    let mut r = Reader::new(bytes);
    let tx = read_transaction(&mut r)?;
    Ok((tx, r.position()))
}

pub(crate) fn read_transaction(r: &mut Reader<'_>) -> Result<RawTransaction, DecodeError> {
    let start = r.position();
    let version = r.i32_le()?;

    let count_offset = r.position();
    let n_inputs = r.varint()?;
    if n_inputs == 0 {
        // A zero input count is the segwit marker byte.
        return Err(DecodeError::SegwitUnsupported {
            offset: count_offset,
        });
    }
    check_count("input", n_inputs, MIN_INPUT_LEN, count_offset, r)?;
    let mut inputs = Vec::with_capacity(n_inputs as usize);
    for _ in 0..n_inputs {
        let prev_txid = Hash256(r.array()?);
        let prev_vout = r.u32_le()?;
        let script_sig = r.var_bytes()?.to_vec();
        let sequence = r.u32_le()?;
        inputs.push(TxIn {
            prev_txid,
            prev_vout,
            script_sig,
            sequence,
        });
    }

    let count_offset = r.position();
    let n_outputs = r.varint()?;
    check_count("output", n_outputs, MIN_OUTPUT_LEN, count_offset, r)?;
    let mut outputs = Vec::with_capacity(n_outputs as usize);
    for _ in 0..n_outputs {
        let value_offset = r.position();
        let value = r.i64_le()?;
        if value < 0 {
            return Err(DecodeError::NegativeValue {
                offset: value_offset,
                value,
            });
        }
        let script = r.var_bytes()?.to_vec();
        outputs.push(TxOut::new(value as u64, script));
    }
    let lock_time = r.u32_le()?;

    Ok(RawTransaction {
        txid: Hash256(double_sha256(r.consumed_since(start))),
        version,
        inputs,
        outputs,
        lock_time,
    })
}

fn check_count(
    what: &'static str,
    count: u64,
    min_len: u64,
    offset: usize,
    r: &Reader<'_>,
) -> Result<(), DecodeError> {
    if count.saturating_mul(min_len) > r.remaining() as u64 {
        // Either a corrupt count or a truncated buffer; report it as
        // truncation when the count itself is plausible.
        if count <= u32::MAX as u64 {
            return Err(DecodeError::Truncated {
                offset: r.position(),
                needed: (count * min_len) as usize - r.remaining(),
            });
        }
        return Err(DecodeError::CountTooLarge {
            what,
            offset,
            count,
        });
    }
    Ok(())
}
