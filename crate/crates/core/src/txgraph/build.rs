use crate::cluster::{Ledger, UserMap};

use super::graph::{Edge, NodeId, TxGraph, COINBASE_USER, UNKNOWN_USER};

/// Builds the user graph: one edge per output, from the user owning the
/// transaction's inputs to the user owning the output. Coinbase outputs
/// originate at the reserved coinbase node; outputs (or inputs) without a
/// resolvable address map to the reserved unknown node. Edges that would
/// loop back to the paying user are dropped.
///
/// User `u` becomes node `u`; reserved nodes, when used, follow the users.
pub fn build_user_graph(ledger: &Ledger, users: &UserMap) -> TxGraph {
    let user_count = users.user_count() as NodeId;
    let unknown = user_count;
    let coinbase = user_count + 1;
    let mut used_unknown = false;
    let mut used_coinbase = false;

    let mut edges = Vec::new();
    for tx in &ledger.transactions {
        let src = if tx.is_coinbase {
            coinbase
        } else {
            tx.input_addresses()
                .next()
                .map(|a| users.user(a))
                .unwrap_or(unknown)
        };
        for out in &tx.outputs {
            let dst = out.address.map(|a| users.user(a)).unwrap_or(unknown);
            if dst == src {
                continue;
            }
            used_unknown |= src == unknown || dst == unknown;
            used_coinbase |= src == coinbase;
            edges.push(Edge {
                src,
                dst,
                value: out.value,
                timestamp: tx.timestamp,
            });
        }
    }

    let mut ids: Vec<u64> = (0..user_count as u64).collect();
    if used_unknown {
        ids.push(UNKNOWN_USER);
    }
    if used_coinbase {
        ids.push(COINBASE_USER);
        if !used_unknown {
            // Coinbase takes the slot reserved for unknown.
            for e in &mut edges {
                if e.src == coinbase {
                    e.src = unknown;
                }
            }
        }
    }
    TxGraph::new(ids, edges).expect("edges reference known nodes")
}
