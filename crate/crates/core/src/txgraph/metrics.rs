use super::graph::TxGraph;

/// Per-node flow totals and lifetime. Nodes without edges have zero
/// lifetime bounds and no [`NodeMetrics::lifetime`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NodeMetrics {
    pub in_degree: u64,
    pub out_degree: u64,
    pub in_value: u64,
    pub out_value: u64,
    pub first_ts: i64,
    pub last_ts: i64,
}

impl NodeMetrics {
    pub fn degree(&self) -> u64 {
        self.in_degree + self.out_degree
    }

    /// `[first_ts, last_ts]` over all incident edges, if any.
    pub fn lifetime(&self) -> Option<(i64, i64)> {
        (self.degree() > 0).then_some((self.first_ts, self.last_ts))
    }

    pub fn in_minus_out_degree(&self) -> u64 {
        self.in_degree.saturating_sub(self.out_degree)
    }

    pub fn out_minus_in_degree(&self) -> u64 {
        self.out_degree.saturating_sub(self.in_degree)
    }

    pub fn in_minus_out_value(&self) -> u64 {
        self.in_value.saturating_sub(self.out_value)
    }

    pub fn out_minus_in_value(&self) -> u64 {
        self.out_value.saturating_sub(self.in_value)
    }

    fn touch(&mut self, ts: i64) {
        if self.degree() == 0 {
            self.first_ts = ts;
            self.last_ts = ts;
        } else {
            self.first_ts = self.first_ts.min(ts);
            self.last_ts = self.last_ts.max(ts);
        }
    }
}

/// Metrics for every node, indexed by node id.
pub fn node_metrics(graph: &TxGraph) -> Vec<NodeMetrics> {
    let mut m = vec![NodeMetrics::default(); graph.node_count()];
    for e in graph.edges() {
        let s = &mut m[e.src as usize];
        s.touch(e.timestamp);
        s.out_degree += 1;
        s.out_value += e.value;
        let d = &mut m[e.dst as usize];
        d.touch(e.timestamp);
        d.in_degree += 1;
        d.in_value += e.value;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::txgraph::Edge;

    #[test]
    fn empty_graph() {
        let g = TxGraph::with_plain_ids(0, vec![]).unwrap();
        assert!(node_metrics(&g).is_empty());
    }

    #[test]
    fn single_edge() {
        let g = TxGraph::with_plain_ids(
            2,
            vec![Edge {
                src: 0,
                dst: 1,
                value: 5,
                timestamp: 100,
            }],
        )
        .unwrap();
        let m = node_metrics(&g);
        assert_eq!(
            m[0],
            NodeMetrics {
                out_degree: 1,
                out_value: 5,
                first_ts: 100,
                last_ts: 100,
                ..Default::default()
            }
        );
        assert_eq!(
            m[1],
            NodeMetrics {
                in_degree: 1,
                in_value: 5,
                first_ts: 100,
                last_ts: 100,
                ..Default::default()
            }
        );
    }

    #[test]
    fn isolated_node_has_no_lifetime() {
        let g = TxGraph::with_plain_ids(1, vec![]).unwrap();
        assert_eq!(node_metrics(&g)[0].lifetime(), None);
    }

    #[test]
    fn differences_clamp_at_zero() {
        let m = NodeMetrics {
            in_degree: 2,
            out_degree: 5,
            in_value: 10,
            out_value: 3,
            ..Default::default()
        };
        assert_eq!(m.out_minus_in_degree(), 3);
        assert_eq!(m.in_minus_out_degree(), 0);
        assert_eq!(m.in_minus_out_value(), 7);
        assert_eq!(m.out_minus_in_value(), 0);
    }
}
