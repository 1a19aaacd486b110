mod common;

use std::collections::HashSet;

use chainflow::nullmodel::{
    assign_sampled_values, compute_thresholds, generate_er, null_model_thresholds, Metric,
    NullModelConfig,
};
use chainflow::txgraph::{node_metrics, TxGraph};
use common::sorted_percentile;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

fn er(nodes: usize, edges: usize, seed: u64) -> TxGraph {
    generate_er(&NullModelConfig {
        nodes,
        edges,
        p_value: 0.01,
        seed,
    })
    .unwrap()
}

/// Chi-square statistic of observed degree counts against Poisson(λ)·n,
/// pooling the upper tail so every expected count is at least 5.
fn chi_square(degrees: &[u64], lambda: f64) -> (f64, usize) {
    let n = degrees.len() as f64;
    let pois = Poisson::new(lambda).unwrap();
    let max = *degrees.iter().max().unwrap() as usize;
    let mut observed = vec![0f64; max + 1];
    for &d in degrees {
        observed[d as usize] += 1.0;
    }
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut k = 0usize;
    loop {
        let e = n * pois.pmf(k as u64);
        let tail_e = n * (1.0 - (0..=k as u64).map(|j| pois.pmf(j)).sum::<f64>());
        if tail_e < 5.0 {
            let o: f64 = observed.iter().skip(k).sum();
            cells.push((o, e + tail_e));
            break;
        }
        cells.push((observed.get(k).copied().unwrap_or(0.0), e));
        k += 1;
    }
    let stat = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    (stat, cells.len() - 1)
}

#[test]
fn degrees_are_poisson() {
    let (n, m) = (100_000, 266_667);
    let g = er(n, m, 17);
    let ms = node_metrics(&g);
    let critical = |df: usize| ChiSquared::new(df as f64).unwrap().inverse_cdf(0.999);
    for degrees in [
        ms.iter().map(|x| x.in_degree).collect::<Vec<_>>(),
        ms.iter().map(|x| x.out_degree).collect::<Vec<_>>(),
    ] {
        let (stat, df) = chi_square(&degrees, m as f64 / n as f64);
        assert!(stat < critical(df), "chi2 {stat} on {df} df");
    }
}

#[test]
fn er_is_a_simple_digraph_with_m_edges() {
    for (n, m) in [(10, 90), (10, 60), (1_000, 5_000), (50, 0)] {
        let g = er(n, m, 3);
        assert_eq!(g.node_count(), n);
        assert_eq!(g.edge_count(), m);
        let pairs: HashSet<(u32, u32)> = g.edges().iter().map(|e| (e.src, e.dst)).collect();
        assert_eq!(pairs.len(), m);
        assert!(g.edges().iter().all(|e| e.src != e.dst));
    }
    assert!(generate_er(&NullModelConfig {
        nodes: 3,
        edges: 7,
        p_value: 0.01,
        seed: 0
    })
    .is_err());
}

#[test]
fn same_seed_same_graph() {
    assert_eq!(er(5_000, 12_000, 9), er(5_000, 12_000, 9));
    assert_ne!(er(5_000, 12_000, 9), er(5_000, 12_000, 10));
}

#[test]
fn thresholds_equal_sorted_percentile() {
    for seed in 0..8 {
        let skeleton = er(3_000 + 500 * seed as usize, 8_000, seed);
        let values: Vec<u64> = (1..=997).map(|v| v * 7919 % 100_003).collect();
        let g = assign_sampled_values(&skeleton, &values, seed + 100).unwrap();
        let ms = node_metrics(&g);
        for p_percent in [1u64, 5, 10] {
            let t = compute_thresholds(&g, p_percent as f64 / 100.0).unwrap();
            for metric in Metric::ALL {
                let column: Vec<u64> = ms.iter().map(|m| metric.of(m)).collect();
                assert_eq!(
                    t.get(metric),
                    sorted_percentile(&column, p_percent),
                    "{} p={p_percent}% seed={seed}",
                    metric.name()
                );
            }
        }
    }
}

#[test]
fn thresholds_fall_as_p_grows() {
    let skeleton = er(20_000, 53_000, 4);
    let values: Vec<u64> = (1..500).collect();
    let g = assign_sampled_values(&skeleton, &values, 5).unwrap();
    let ps = [0.001, 0.01, 0.05, 0.2];
    let ts: Vec<_> = ps.iter().map(|&p| compute_thresholds(&g, p).unwrap()).collect();
    for w in ts.windows(2) {
        for metric in Metric::ALL {
            assert!(w[0].get(metric) >= w[1].get(metric), "{}", metric.name());
        }
    }
}

#[test]
fn degree_thresholds_depend_on_density_only() {
    let degree_metrics = [
        Metric::InDegree,
        Metric::OutDegree,
        Metric::InMinusOutDegree,
        Metric::OutMinusInDegree,
    ];
    for seed in 0..5 {
        let small = compute_thresholds(&er(30_000, 80_000, seed), 0.01).unwrap();
        let big = compute_thresholds(&er(60_000, 160_000, seed + 50), 0.01).unwrap();
        for metric in degree_metrics {
            let (a, b) = (small.get(metric), big.get(metric));
            assert!(a.abs_diff(b) <= 1, "{}: {a} vs {b}", metric.name());
        }
    }
}

#[test]
fn sampled_values_follow_the_empirical_law() {
    let skeleton = er(100_000, 100_000, 8);
    let g = assign_sampled_values(&skeleton, &[1, 2], 99).unwrap();
    let ones = g.edges().iter().filter(|e| e.value == 1).count() as f64;
    let frac = ones / g.edge_count() as f64;
    assert!((0.48..=0.52).contains(&frac), "{frac}");
    assert!(g.edges().iter().all(|e| e.value == 1 || e.value == 2));
}

#[test]
fn matched_null_model_keeps_size() {
    let observed = assign_sampled_values(&er(2_000, 6_000, 1), &[5, 10, 20], 2).unwrap();
    let a = null_model_thresholds(&observed, 0.01, 42).unwrap();
    let b = null_model_thresholds(&observed, 0.01, 42).unwrap();
    assert_eq!(a, b);
}
