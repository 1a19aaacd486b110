//! User-level transaction graph and per-node flow metrics.

mod build;
mod graph;
mod ingest;
mod metrics;

use std::path::PathBuf;

pub use build::build_user_graph;
pub use graph::{Edge, NodeId, TxGraph, COINBASE_USER, UNKNOWN_USER};
pub use ingest::{
    ingest_edge_list, read_edge_list, IngestMode, Ingested, RejectedRow, EDGE_LIST_HEADER,
};
pub use metrics::{node_metrics, NodeMetrics};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("edge list is empty; expected a header line")]
    MissingHeader,
    #[error("line {line}: expected header src_user,dst_user,timestamp_unix,value_satoshi, found {found:?}")]
    BadHeader { line: u64, found: String },
    #[error("line {line} (data row {row}): {reason}")]
    MalformedRow { line: u64, row: u64, reason: String },
    #[error("external ids must be strictly increasing (at {0})")]
    UnsortedIds(u64),
    #[error("edge {edge} references a node outside the graph")]
    NodeOutOfRange { edge: usize },
    #[error("edge {edge} is a self-edge")]
    SelfEdge { edge: usize },
}
