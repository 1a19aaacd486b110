use crate::txgraph::TxGraph;

use super::AnalyticsError;

/// Transition weight of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeWeighting {
    /// Every edge counts once, so parallel edges add up.
    #[default]
    Multiplicity,
    /// Edges weighted by their satoshi value.
    Value,
}

impl EdgeWeighting {
    pub fn name(self) -> &'static str {
        match self {
            EdgeWeighting::Multiplicity => "multiplicity",
            EdgeWeighting::Value => "value",
        }
    }
}

impl std::str::FromStr for EdgeWeighting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "multiplicity" => Ok(EdgeWeighting::Multiplicity),
            "value" => Ok(EdgeWeighting::Value),
            other => Err(format!("unknown weighting {other:?} (expected multiplicity or value)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankConfig {
    pub damping: f64,
    /// Stop once the L1 change between iterates drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub weighting: EdgeWeighting,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig {
            damping: 0.85,
            tolerance: 1e-10,
            max_iterations: 200,
            weighting: EdgeWeighting::Multiplicity,
        }
    }
}

/// Power-iteration PageRank with uniform teleportation. Nodes with no
/// outgoing weight spread their mass uniformly.
pub fn pagerank(graph: &TxGraph, config: &PageRankConfig) -> Result<Vec<f64>, AnalyticsError> {
    if !(config.damping > 0.0 && config.damping < 1.0) {
        return Err(AnalyticsError::BadParameter(format!(
            "damping {} outside (0, 1)",
            config.damping
        )));
    }
    if !(config.tolerance > 0.0) {
        return Err(AnalyticsError::BadParameter(format!(
            "tolerance {} must be positive",
            config.tolerance
        )));
    }
    let n = graph.node_count();
    if n == 0 {
        return Ok(Vec::new());
    }
    let weight = |value: u64| match config.weighting {
        EdgeWeighting::Multiplicity => 1.0,
        EdgeWeighting::Value => value as f64,
    };
    let mut out_weight = vec![0.0f64; n];
    for e in graph.edges() {
        out_weight[e.src as usize] += weight(e.value);
    }
    // Per-edge transition probability.
    let transition: Vec<f64> = graph
        .edges()
        .iter()
        .map(|e| {
            let w = out_weight[e.src as usize];
            if w > 0.0 {
                weight(e.value) / w
            } else {
                0.0
            }
        })
        .collect();

    let d = config.damping;
    let nf = n as f64;
    let mut x = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..config.max_iterations {
        let dangling: f64 = x
            .iter()
            .zip(&out_weight)
            .filter(|(_, &w)| w == 0.0)
            .map(|(v, _)| v)
            .sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        next.iter_mut().for_each(|v| *v = base);
        for (e, p) in graph.edges().iter().zip(&transition) {
            next[e.dst as usize] += d * x[e.src as usize] * p;
        }
        residual = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if residual < config.tolerance {
            normalize_l1(&mut x);
            return Ok(x);
        }
    }
    normalize_l1(&mut x);
    Err(AnalyticsError::NonConvergence {
        algorithm: "pagerank",
        iterations: config.max_iterations,
        residual,
        last: x,
    })
}

fn normalize_l1(x: &mut [f64]) {
    let s: f64 = x.iter().sum();
    if s > 0.0 {
        x.iter_mut().for_each(|v| *v /= s);
    }
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
    fn three_cycle_uniform() {
        let pr = pagerank(&graph(3, &[(0, 1), (1, 2), (2, 0)]), &Default::default()).unwrap();
        for v in pr {
            assert!((v - 1.0 / 3.0).abs() <= f64::EPSILON, "{v}");
        }
    }

    #[test]
    fn two_node_swap() {
        let pr = pagerank(&graph(2, &[(0, 1), (1, 0)]), &Default::default()).unwrap();
        assert!((pr[0] - 0.5).abs() < 1e-15 && (pr[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dangling_star() {
        // Everyone points at node 0, which has no out-edges.
        let pr = pagerank(&graph(4, &[(1, 0), (2, 0), (3, 0)]), &Default::default()).unwrap();
        assert!((pr.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(pr[0] > pr[1]);
        assert!((pr[1] - pr[3]).abs() < 1e-15);
    }

    #[test]
    fn parameter_checks() {
        let g = graph(2, &[(0, 1)]);
        let bad = PageRankConfig {
            damping: 1.0,
            ..Default::default()
        };
        assert!(matches!(pagerank(&g, &bad), Err(AnalyticsError::BadParameter(_))));
    }

    #[test]
    fn non_convergence_carries_iterate() {
        let g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let cfg = PageRankConfig {
            max_iterations: 2,
            tolerance: 1e-300,
            ..Default::default()
        };
        match pagerank(&g, &cfg) {
            Err(AnalyticsError::NonConvergence { last, residual, .. }) => {
                assert_eq!(last.len(), 3);
                assert!(residual > 0.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn value_weighting() {
        let mk = |v1, v2| {
            TxGraph::with_plain_ids(
                3,
                vec![
                    Edge { src: 0, dst: 1, value: v1, timestamp: 0 },
                    Edge { src: 0, dst: 2, value: v2, timestamp: 0 },
                ],
            )
            .unwrap()
        };
        let cfg = PageRankConfig {
            weighting: EdgeWeighting::Value,
            ..Default::default()
        };
        let pr = pagerank(&mk(9, 1), &cfg).unwrap();
        assert!(pr[1] > pr[2]);
        let flat = pagerank(&mk(9, 1), &Default::default()).unwrap();
        assert!((flat[1] - flat[2]).abs() < 1e-15);
    }
}
