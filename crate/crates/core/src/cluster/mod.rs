//! Common-input-ownership clustering and address-reuse statistics.

mod ledger;
mod reuse;
mod union_find;

pub use ledger::{
    AddressBook, AddressId, Ledger, LedgerReadError, OutpointIndex, ResolvedOutput,
    ResolvedTransaction, Timestamped,
};
pub use reuse::{reuse_histogram, time_partition, ReuseHistogram};
pub use union_find::{cluster_transactions, AddressClustering, UserMap};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClusterError {
    #[error("cannot split into zero parts")]
    ZeroParts,
    #[error("cannot split {len} transactions into {parts} parts")]
    TooManyParts { parts: usize, len: usize },
}
