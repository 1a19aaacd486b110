use crate::txgraph::TxGraph;

use super::AnalyticsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitsConfig {
    /// Stop once the summed L1 change of hubs and authorities drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for HitsConfig {
    fn default() -> Self {
        HitsConfig {
            tolerance: 1e-10,
            max_iterations: 1000,
        }
    }
}

/// Hub and authority scores by mutual reinforcement
/// (`a = Aᵀh`, `h = Aa`, each L2-normalized every step). Parallel edges
/// count with multiplicity.
pub fn hits(graph: &TxGraph, config: &HitsConfig) -> Result<(Vec<f64>, Vec<f64>), AnalyticsError> {
    if graph.edge_count() == 0 {
        return Err(AnalyticsError::NoEdges);
    }
    if !(config.tolerance > 0.0) {
        return Err(AnalyticsError::BadParameter(format!(
            "tolerance {} must be positive",
            config.tolerance
        )));
    }
    let n = graph.node_count();
    let mut hub = vec![1.0 / (n as f64).sqrt(); n];
    let mut auth = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..config.max_iterations {
        let mut new_auth = vec![0.0; n];
        for e in graph.edges() {
            new_auth[e.dst as usize] += hub[e.src as usize];
        }
        normalize_l2(&mut new_auth);
        let mut new_hub = vec![0.0; n];
        for e in graph.edges() {
            new_hub[e.src as usize] += new_auth[e.dst as usize];
        }
        normalize_l2(&mut new_hub);
        residual = l1_diff(&hub, &new_hub) + l1_diff(&auth, &new_auth);
        hub = new_hub;
        auth = new_auth;
        if residual < config.tolerance {
            return Ok((hub, auth));
        }
    }
    Err(AnalyticsError::NonConvergence {
        algorithm: "hits",
        iterations: config.max_iterations,
        residual,
        last: hub,
    })
}

fn normalize_l2(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

fn l1_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::txgraph::Edge;

    fn graph(n: usize, pairs: &[(u32, u32)]) -> TxGraph {
        TxGraph::with_plain_ids(
            n,
            pairs
                .iter()
                .map(|&(src, dst)| Edge {
                    src,
                    dst,
                    value: 1,
                    timestamp: 0,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_edge() {
        let (h, a) = hits(&graph(3, &[(0, 1)]), &Default::default()).unwrap();
        assert_eq!(h, vec![1.0, 0.0, 0.0]);
        assert_eq!(a, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn complete_bipartite() {
        let mut pairs = Vec::new();
        for l in 0..2 {
            for r in 2..5 {
                pairs.push((l, r));
            }
        }
        let (h, a) = hits(&graph(5, &pairs), &Default::default()).unwrap();
        let hv = 1.0 / 2f64.sqrt();
        let av = 1.0 / 3f64.sqrt();
        for i in 0..2 {
            assert!((h[i] - hv).abs() < 1e-12 && a[i] == 0.0);
        }
        for i in 2..5 {
            assert!((a[i] - av).abs() < 1e-12 && h[i] == 0.0);
        }
    }

    #[test]
    fn empty_graph_is_error() {
        assert_eq!(
            hits(&graph(3, &[]), &Default::default()),
            Err(AnalyticsError::NoEdges)
        );
    }
}
