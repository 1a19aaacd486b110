use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::blockparse::{Address, Block, Hash256, OutPoint};

/// Dense index of an address in an [`AddressBook`].
pub type AddressId = u32;

/// Interns addresses to dense ids in order of first appearance.
#[derive(Debug, Clone, Default)]
pub struct AddressBook {
    ids: HashMap<Address, AddressId>,
    addresses: Vec<Address>,
}

impl AddressBook {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, address: Address) -> AddressId {
        if let Some(&id) = self.ids.get(&address) {
            return id;
        }
        let id = self.addresses.len() as AddressId;
        self.ids.insert(address, id);
        self.addresses.push(address);
        id
    }

    pub fn get(&self, address: &Address) -> Option<AddressId> {
        self.ids.get(address).copied()
    }

    pub fn address(&self, id: AddressId) -> &Address {
        &self.addresses[id as usize]
    }

    pub fn len(&self) -> usize {
        self.addresses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.addresses.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AddressId, &Address)> {
        self.addresses
            .iter()
            .enumerate()
            .map(|(i, a)| (i as AddressId, a))
    }
}

/// Maps funded outpoints to the P2PKH address that owns them. Built
/// single-threaded, read-only afterwards.
#[derive(Debug, Default)]
pub struct OutpointIndex {
    owners: HashMap<OutPoint, AddressId>,
}

impl OutpointIndex {
    pub fn insert(&mut self, outpoint: OutPoint, owner: AddressId) {
        self.owners.insert(outpoint, owner);
    }

    pub fn resolve(&self, outpoint: &OutPoint) -> Option<AddressId> {
        self.owners.get(outpoint).copied()
    }

    pub fn len(&self) -> usize {
        self.owners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owners.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolvedOutput {
    pub value: u64,
    pub address: Option<AddressId>,
}

/// A transaction with addresses replaced by book ids and inputs resolved
/// through the outpoint index. Coinbase transactions have no inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedTransaction {
    pub txid: Hash256,
    pub timestamp: i64,
    pub is_coinbase: bool,
    pub inputs: Vec<Option<AddressId>>,
    pub outputs: Vec<ResolvedOutput>,
}

impl ResolvedTransaction {
    pub fn input_addresses(&self) -> impl Iterator<Item = AddressId> + '_ {
        self.inputs.iter().flatten().copied()
    }

    /// Distinct addresses appearing on either side, ascending.
    pub fn participants(&self) -> Vec<AddressId> {
        let mut ids: Vec<AddressId> = self
            .input_addresses()
            .chain(self.outputs.iter().filter_map(|o| o.address))
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

pub trait Timestamped {
    fn timestamp(&self) -> i64;
}

impl<T: Timestamped> Timestamped for &T {
    fn timestamp(&self) -> i64 {
        (**self).timestamp()
    }
}

impl Timestamped for ResolvedTransaction {
    fn timestamp(&self) -> i64 {
        self.timestamp
    }
}

/// All transactions of a block stream with inputs resolved to owners.
#[derive(Debug, Clone, Default)]
pub struct Ledger {
    pub book: AddressBook,
    pub transactions: Vec<ResolvedTransaction>,
    /// Non-coinbase inputs whose outpoint had no P2PKH owner.
    pub unresolved_inputs: u64,
}

struct CompactTx {
    txid: Hash256,
    timestamp: i64,
    is_coinbase: bool,
    spends: Vec<OutPoint>,
    outputs: Vec<ResolvedOutput>,
}

impl Ledger {
    /// Builds the ledger in two passes: the first interns output addresses
    /// and fills the outpoint index, the second resolves every input.
    pub fn from_blocks<I>(blocks: I) -> Self
    where
        I: IntoIterator<Item = Block>,
    {
        let mut book = AddressBook::new();
        let mut index = OutpointIndex::default();
        let mut compact = Vec::new();
        for block in blocks {
            let timestamp = block.timestamp();
            for tx in block.transactions {
                let is_coinbase = tx.is_coinbase();
                let outputs: Vec<ResolvedOutput> = tx
                    .outputs
                    .iter()
                    .enumerate()
                    .map(|(vout, out)| {
                        let address = out.address.map(|a| book.intern(a));
                        if let Some(owner) = address {
                            index.insert(
                                OutPoint {
                                    txid: tx.txid,
                                    vout: vout as u32,
                                },
                                owner,
                            );
                        }
                        ResolvedOutput {
                            value: out.value,
                            address,
                        }
                    })
                    .collect();
                let spends = if is_coinbase {
                    Vec::new()
                } else {
                    tx.inputs.iter().map(|i| i.outpoint()).collect()
                };
                compact.push(CompactTx {
                    txid: tx.txid,
                    timestamp,
                    is_coinbase,
                    spends,
                    outputs,
                });
            }
        }

        let mut unresolved_inputs = 0;
        let transactions = compact
            .into_iter()
            .map(|c| {
                let inputs: Vec<Option<AddressId>> =
                    c.spends.iter().map(|op| index.resolve(op)).collect();
                unresolved_inputs += inputs.iter().filter(|i| i.is_none()).count() as u64;
                ResolvedTransaction {
                    txid: c.txid,
                    timestamp: c.timestamp,
                    is_coinbase: c.is_coinbase,
                    inputs,
                    outputs: c.outputs,
                }
            })
            .collect();
        Ledger {
            book,
            transactions,
            unresolved_inputs,
        }
    }

    /// Writes one JSON object per line. Addresses are Base58Check strings.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let name = |id: &Option<AddressId>| id.map(|i| self.book.address(i).encoded());
        for tx in &self.transactions {
            let line = TxLine {
                txid: tx.txid.to_display_hex(),
                timestamp: tx.timestamp,
                coinbase: tx.is_coinbase,
                inputs: tx.inputs.iter().map(name).collect(),
                outputs: tx
                    .outputs
                    .iter()
                    .map(|o| (o.value, name(&o.address)))
                    .collect(),
            };
            serde_json::to_writer(&mut w, &line)?;
            w.write_all(b"\n")?;
        }
        w.flush()
    }

    /// Reads the format written by [`Ledger::write_jsonl`]. Address ids are
    /// reassigned in the same order `from_blocks` would assign them.
    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self, LedgerReadError> {
        let mut lines = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| LedgerReadError::Io(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: TxLine = serde_json::from_str(&line).map_err(|e| LedgerReadError::Row {
                line: i + 1,
                message: e.to_string(),
            })?;
            lines.push((i + 1, parsed));
        }
        let parse_addr = |line: usize, s: &str| {
            s.parse::<Address>().map_err(|e| LedgerReadError::Row {
                line,
                message: format!("address {s:?}: {e}"),
            })
        };

        let mut book = AddressBook::new();
        let mut outputs_by_tx = Vec::with_capacity(lines.len());
        for (line, tx) in &lines {
            let mut outs = Vec::with_capacity(tx.outputs.len());
            for (value, addr) in &tx.outputs {
                let address = match addr {
                    Some(s) => Some(book.intern(parse_addr(*line, s)?)),
                    None => None,
                };
                outs.push(ResolvedOutput {
                    value: *value,
                    address,
                });
            }
            outputs_by_tx.push(outs);
        }
        let mut transactions = Vec::with_capacity(lines.len());
        let mut unresolved_inputs = 0;
        for ((line, tx), outputs) in lines.into_iter().zip(outputs_by_tx) {
            let mut inputs = Vec::with_capacity(tx.inputs.len());
            for addr in &tx.inputs {
                inputs.push(match addr {
                    Some(s) => Some(book.intern(parse_addr(line, s)?)),
                    None => {
                        unresolved_inputs += 1;
                        None
                    }
                });
            }
            let txid = Hash256::from_display_hex(&tx.txid).ok_or(LedgerReadError::Row {
                line,
                message: format!("bad txid {:?}", tx.txid),
            })?;
            transactions.push(ResolvedTransaction {
                txid,
                timestamp: tx.timestamp,
                is_coinbase: tx.coinbase,
                inputs,
                outputs,
            });
        }
        Ok(Ledger {
            book,
            transactions,
            unresolved_inputs,
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LedgerReadError {
    #[error("i/o error: {0}")]
    Io(String),
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },
}

#[derive(Serialize, Deserialize)]
struct TxLine {
    txid: String,
    timestamp: i64,
    coinbase: bool,
    inputs: Vec<Option<String>>,
    outputs: Vec<(u64, Option<String>)>,
}
