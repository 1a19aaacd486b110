use std::io::Write;

use super::GraphError;
use crate::cluster::Timestamped;

/// Dense node index, `0..node_count`.
pub type NodeId = u32;

/// External id of the reserved node that issues coinbase outputs.
pub const COINBASE_USER: u64 = u64::MAX;
/// External id of the reserved sink for outputs without a P2PKH address.
pub const UNKNOWN_USER: u64 = u64::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    /// Satoshi.
    pub value: u64,
    /// Unix seconds.
    pub timestamp: i64,
}

impl Timestamped for Edge {
    fn timestamp(&self) -> i64 {
        self.timestamp
    }
}

/// Immutable directed multigraph of users with CSR indexes in both
/// directions. Self-edges are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TxGraph {
    external_ids: Vec<u64>,
    edges: Vec<Edge>,
    out_offsets: Vec<usize>,
    out_index: Vec<u32>,
    in_offsets: Vec<usize>,
    in_index: Vec<u32>,
}

impl TxGraph {
    /// `external_ids` must be strictly increasing; node `i` carries
    /// `external_ids[i]`.
    pub fn new(external_ids: Vec<u64>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        if let Some(w) = external_ids.windows(2).find(|w| w[0] >= w[1]) {
            return Err(GraphError::UnsortedIds(w[1]));
        }
        let n = external_ids.len();
        for (i, e) in edges.iter().enumerate() {
            if e.src as usize >= n || e.dst as usize >= n {
                return Err(GraphError::NodeOutOfRange { edge: i });
            }
            if e.src == e.dst {
                return Err(GraphError::SelfEdge { edge: i });
            }
        }
        let (out_offsets, out_index) = csr(n, &edges, |e| e.src);
        let (in_offsets, in_index) = csr(n, &edges, |e| e.dst);
        Ok(TxGraph {
            external_ids,
            edges,
            out_offsets,
            out_index,
            in_offsets,
            in_index,
        })
    }

    /// Graph over nodes `0..n` whose external ids equal their dense ids.
    pub fn with_plain_ids(n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        Self::new((0..n as u64).collect(), edges)
    }

    pub fn node_count(&self) -> usize {
        self.external_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn external_id(&self, node: NodeId) -> u64 {
        self.external_ids[node as usize]
    }

    pub fn external_ids(&self) -> &[u64] {
        &self.external_ids
    }

    pub fn node_of(&self, external: u64) -> Option<NodeId> {
        self.external_ids
            .binary_search(&external)
            .ok()
            .map(|i| i as NodeId)
    }

    pub fn is_reserved(&self, node: NodeId) -> bool {
        matches!(self.external_id(node), COINBASE_USER | UNKNOWN_USER)
    }

    pub fn out_edges(&self, node: NodeId) -> impl Iterator<Item = &Edge> + '_ {
        let n = node as usize;
        self.out_index[self.out_offsets[n]..self.out_offsets[n + 1]]
            .iter()
            .map(move |&i| &self.edges[i as usize])
    }

    pub fn in_edges(&self, node: NodeId) -> impl Iterator<Item = &Edge> + '_ {
        let n = node as usize;
        self.in_index[self.in_offsets[n]..self.in_offsets[n + 1]]
            .iter()
            .map(move |&i| &self.edges[i as usize])
    }

    pub fn out_degree(&self, node: NodeId) -> usize {
        let n = node as usize;
        self.out_offsets[n + 1] - self.out_offsets[n]
    }

    pub fn in_degree(&self, node: NodeId) -> usize {
        let n = node as usize;
        self.in_offsets[n + 1] - self.in_offsets[n]
    }

    /// Same structure with edge `i` carrying `values[i]`.
    pub fn with_values(&self, values: &[u64]) -> TxGraph {
        assert_eq!(values.len(), self.edges.len());
        let mut g = self.clone();
        for (e, &v) in g.edges.iter_mut().zip(values) {
            e.value = v;
        }
        g
    }

    /// Drops the reserved coinbase/unknown nodes and their edges. The
    /// remaining nodes keep their external ids and relative order.
    pub fn user_subgraph(&self) -> TxGraph {
        let mut remap = vec![NodeId::MAX; self.node_count()];
        let mut ids = Vec::with_capacity(self.node_count());
        for node in 0..self.node_count() as NodeId {
            if !self.is_reserved(node) {
                remap[node as usize] = ids.len() as NodeId;
                ids.push(self.external_id(node));
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| remap[e.src as usize] != NodeId::MAX && remap[e.dst as usize] != NodeId::MAX)
            .map(|e| Edge {
                src: remap[e.src as usize],
                dst: remap[e.dst as usize],
                ..*e
            })
            .collect();
        TxGraph::new(ids, edges).expect("subgraph of a valid graph")
    }

    /// Edge-list CSV `src_user,dst_user,timestamp_unix,value_satoshi` using
    /// external ids.
    pub fn write_edge_list<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(super::ingest::EDGE_LIST_HEADER)?;
        for e in &self.edges {
            wtr.write_record([
                self.external_id(e.src).to_string(),
                self.external_id(e.dst).to_string(),
                e.timestamp.to_string(),
                e.value.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn csr(n: usize, edges: &[Edge], key: impl Fn(&Edge) -> NodeId) -> (Vec<usize>, Vec<u32>) {
    let mut offsets = vec![0usize; n + 1];
    for e in edges {
        offsets[key(e) as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut index = vec![0u32; edges.len()];
    for (i, e) in edges.iter().enumerate() {
        let k = key(e) as usize;
        index[fill[k]] = i as u32;
        fill[k] += 1;
    }
    (offsets, index)
}
