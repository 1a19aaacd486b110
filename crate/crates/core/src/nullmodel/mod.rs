//! Erdős–Rényi null model for significance thresholds.
//!
//! A directed G(n, m) graph matched to the observed node and edge counts
//! gets edge values bootstrapped from the observed values. For each of
//! eight node metrics, the cutoff is the nearest-rank `(1 - p)` quantile over
//! all nodes of the random graph; a node is significant when its metric is
//! strictly greater than the cutoff.

mod thresholds;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::txgraph::{Edge, NodeId, TxGraph};

pub use thresholds::{
    compute_thresholds, nearest_rank, nearest_rank_threshold, thresholds_from_metrics, Metric,
    SignificanceThresholds, REFERENCE_THRESHOLDS_BTC, REFERENCE_DEGREE_THRESHOLDS,
};

/// Generator used for every random draw in the crate.
pub type ModelRng = ChaCha8Rng;
pub const RNG_NAME: &str = "chacha8";

pub const SATOSHI_PER_BTC: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NullModelError {
    #[error("null model needs at least 2 nodes, got {0}")]
    TooFewNodesForGraph(usize),
    #[error("{m} edges exceed the {max} possible in a simple digraph on {n} nodes")]
    TooManyEdges { n: usize, m: usize, max: u128 },
    #[error("p-value {0} is outside (0, 1)")]
    BadPValue(f64),
    #[error("cannot sample edge values from an empty list")]
    EmptyValues,
    #[error("{n} nodes are too few for p = {p}: need at least {need}")]
    TooFewNodes { n: usize, p: f64, need: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullModelConfig {
    pub nodes: usize,
    pub edges: usize,
    pub p_value: f64,
    pub seed: u64,
}

impl NullModelConfig {
    pub fn validate(&self) -> Result<(), NullModelError> {
        if self.nodes < 2 {
            return Err(NullModelError::TooFewNodesForGraph(self.nodes));
        }
        check_p_value(self.p_value)?;
        let max = max_edges(self.nodes);
        if self.edges as u128 > max {
            return Err(NullModelError::TooManyEdges {
                n: self.nodes,
                m: self.edges,
                max,
            });
        }
        Ok(())
    }
}

pub(crate) fn check_p_value(p: f64) -> Result<(), NullModelError> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(NullModelError::BadPValue(p))
    }
}

fn max_edges(n: usize) -> u128 {
    n as u128 * (n as u128).saturating_sub(1)
}

/// Derives an independent stream seed for a named stage: the first eight
/// bytes (little-endian) of SHA-256(`seed` LE bytes || `stage`).
pub fn derive_seed(seed: u64, stage: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(stage.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

pub fn rng_from_seed(seed: u64) -> ModelRng {
    ModelRng::seed_from_u64(seed)
}

/// Uniform directed G(n, m): exactly `m` distinct ordered pairs without
/// self-loops, edges sorted by (src, dst), all values and timestamps zero.
pub fn generate_er(config: &NullModelConfig) -> Result<TxGraph, NullModelError> {
    config.validate()?;
    let n = config.nodes as u64;
    let m = config.edges as u64;
    let universe = n * (n - 1);
    let mut rng = rng_from_seed(config.seed);

    let codes = if m <= universe / 2 {
        sample_distinct(&mut rng, universe, m)
    } else {
        let excluded = sample_distinct(&mut rng, universe, universe - m);
        let mut kept = Vec::with_capacity(m as usize);
        let mut ex = excluded.iter().peekable();
        for code in 0..universe {
            if ex.peek() == Some(&&code) {
                ex.next();
            } else {
                kept.push(code);
            }
        }
        kept
    };

    let edges = codes
        .into_iter()
        .map(|code| {
            let src = code / (n - 1);
            let r = code % (n - 1);
            let dst = if r >= src { r + 1 } else { r };
            Edge {
                src: src as NodeId,
                dst: dst as NodeId,
                value: 0,
                timestamp: 0,
            }
        })
        .collect();
    Ok(TxGraph::with_plain_ids(config.nodes, edges).expect("valid simple digraph"))
}

/// `k` distinct integers from `0..universe`, ascending. Draws with
/// replacement, deduplicates and tops up until `k` remain; the procedure is
/// symmetric in the labels so every k-subset is equally likely.
fn sample_distinct(rng: &mut ModelRng, universe: u64, k: u64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(k as usize);
    while (out.len() as u64) < k {
        let missing = k - out.len() as u64;
        out.extend((0..missing).map(|_| rng.random_range(0..universe)));
        out.sort_unstable();
        out.dedup();
    }
    out
}

/// Replaces every edge value with an i.i.d. draw (with replacement) from
/// `empirical_values`.
pub fn assign_sampled_values(
    graph: &TxGraph,
    empirical_values: &[u64],
    seed: u64,
) -> Result<TxGraph, NullModelError> {
    if empirical_values.is_empty() {
        return Err(NullModelError::EmptyValues);
    }
    let mut rng = rng_from_seed(seed);
    let values: Vec<u64> = (0..graph.edge_count())
        .map(|_| empirical_values[rng.random_range(0..empirical_values.len())])
        .collect();
    Ok(graph.with_values(&values))
}

/// Seeds used by [`null_model_thresholds`], derived from one master seed.
pub fn stage_seeds(seed: u64) -> (u64, u64) {
    (
        derive_seed(seed, "nullmodel.edges"),
        derive_seed(seed, "nullmodel.values"),
    )
}

/// Builds a null model matched to `observed` (node count, edge count and
/// edge values) and returns its thresholds.
pub fn null_model_thresholds(
    observed: &TxGraph,
    p_value: f64,
    seed: u64,
) -> Result<SignificanceThresholds, NullModelError> {
    let (edge_seed, value_seed) = stage_seeds(seed);
    let config = NullModelConfig {
        nodes: observed.node_count(),
        edges: observed.edge_count(),
        p_value,
        seed: edge_seed,
    };
    let skeleton = generate_er(&config)?;
    let values: Vec<u64> = observed.edges().iter().map(|e| e.value).collect();
    let random = if values.is_empty() {
        skeleton
    } else {
        assign_sampled_values(&skeleton, &values, value_seed)?
    };
    compute_thresholds(&random, p_value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn cfg(n: usize, m: usize, seed: u64) -> NullModelConfig {
        NullModelConfig {
            nodes: n,
            edges: m,
            p_value: 0.01,
            seed,
        }
    }

    #[test]
    fn no_edges() {
        let g = generate_er(&cfg(5, 0, 1)).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn complete_digraph() {
        let g = generate_er(&cfg(5, 20, 1)).unwrap();
        let pairs: HashSet<_> = g.edges().iter().map(|e| (e.src, e.dst)).collect();
        assert_eq!(pairs.len(), 20);
        for s in 0..5 {
            for d in 0..5 {
                assert_eq!(pairs.contains(&(s, d)), s != d);
            }
        }
    }

    #[test]
    fn dense_branch_is_simple() {
        let g = generate_er(&cfg(7, 33, 9)).unwrap();
        let pairs: HashSet<_> = g.edges().iter().map(|e| (e.src, e.dst)).collect();
        assert_eq!(pairs.len(), 33);
        assert!(g.edges().iter().all(|e| e.src != e.dst));
    }

    #[test]
    fn too_many_edges() {
        assert!(matches!(
            generate_er(&cfg(5, 21, 1)),
            Err(NullModelError::TooManyEdges { max: 20, .. })
        ));
        assert!(generate_er(&cfg(1, 0, 1)).is_err());
        assert!(generate_er(&NullModelConfig {
            p_value: 1.0,
            ..cfg(5, 1, 1)
        })
        .is_err());
    }

    #[test]
    fn seed_determinism() {
        let a = generate_er(&cfg(1000, 3000, 42)).unwrap();
        let b = generate_er(&cfg(1000, 3000, 42)).unwrap();
        let c = generate_er(&cfg(1000, 3000, 43)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn single_value_everywhere() {
        let g = generate_er(&cfg(50, 200, 3)).unwrap();
        let v = assign_sampled_values(&g, &[5], 7).unwrap();
        assert!(v.edges().iter().all(|e| e.value == 5));
        assert_eq!(
            assign_sampled_values(&g, &[], 7),
            Err(NullModelError::EmptyValues)
        );
    }

    #[test]
    fn value_assignment_is_deterministic() {
        let g = generate_er(&cfg(50, 200, 3)).unwrap();
        let a = assign_sampled_values(&g, &[1, 2, 3, 4], 11).unwrap();
        let b = assign_sampled_values(&g, &[1, 2, 3, 4], 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn derived_seeds_differ_by_stage() {
        assert_ne!(derive_seed(1, "a"), derive_seed(1, "b"));
        assert_eq!(derive_seed(1, "a"), derive_seed(1, "a"));
    }
}
