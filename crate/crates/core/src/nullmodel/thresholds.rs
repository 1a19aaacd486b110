use std::io::Write;

use crate::txgraph::{node_metrics, NodeMetrics, TxGraph};

use super::{check_p_value, NullModelConfig, NullModelError, RNG_NAME};

/// The eight node metrics that receive a cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    InDegree,
    OutDegree,
    InMinusOutDegree,
    OutMinusInDegree,
    InValue,
    OutValue,
    InMinusOutValue,
    OutMinusInValue,
}

impl Metric {
    pub const ALL: [Metric; 8] = [
        Metric::InDegree,
        Metric::OutDegree,
        Metric::InMinusOutDegree,
        Metric::OutMinusInDegree,
        Metric::InValue,
        Metric::OutValue,
        Metric::InMinusOutValue,
        Metric::OutMinusInValue,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::InDegree => "in_degree",
            Metric::OutDegree => "out_degree",
            Metric::InMinusOutDegree => "in_minus_out_degree",
            Metric::OutMinusInDegree => "out_minus_in_degree",
            Metric::InValue => "in_value",
            Metric::OutValue => "out_value",
            Metric::InMinusOutValue => "in_minus_out_value",
            Metric::OutMinusInValue => "out_minus_in_value",
        }
    }

    pub fn from_name(name: &str) -> Option<Metric> {
        Metric::ALL.into_iter().find(|m| m.name() == name)
    }

    /// Difference metrics are clamped at zero.
    pub fn of(self, m: &NodeMetrics) -> u64 {
        match self {
            Metric::InDegree => m.in_degree,
            Metric::OutDegree => m.out_degree,
            Metric::InMinusOutDegree => m.in_minus_out_degree(),
            Metric::OutMinusInDegree => m.out_minus_in_degree(),
            Metric::InValue => m.in_value,
            Metric::OutValue => m.out_value,
            Metric::InMinusOutValue => m.in_minus_out_value(),
            Metric::OutMinusInValue => m.out_minus_in_value(),
        }
    }
}

/// Cutoffs per metric; degrees in edges, values in satoshi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SignificanceThresholds {
    pub in_degree: u64,
    pub out_degree: u64,
    pub in_minus_out_degree: u64,
    pub out_minus_in_degree: u64,
    pub in_value: u64,
    pub out_value: u64,
    pub in_minus_out_value: u64,
    pub out_minus_in_value: u64,
}

/// Degree cutoffs reported for the 6M-node / 16M-edge user graph at p = 0.01,
/// ordered as [`Metric::ALL`]'s first four entries.
pub const REFERENCE_DEGREE_THRESHOLDS: [u64; 4] = [7, 7, 5, 5];

/// Value cutoffs (BTC) reported for the same graph; they depend on that
/// dataset's value distribution and serve as reference only.
pub const REFERENCE_THRESHOLDS_BTC: [f64; 4] = [444.3681, 445.1454, 431.5362, 432.0260];

impl SignificanceThresholds {
    pub fn get(&self, metric: Metric) -> u64 {
        match metric {
            Metric::InDegree => self.in_degree,
            Metric::OutDegree => self.out_degree,
            Metric::InMinusOutDegree => self.in_minus_out_degree,
            Metric::OutMinusInDegree => self.out_minus_in_degree,
            Metric::InValue => self.in_value,
            Metric::OutValue => self.out_value,
            Metric::InMinusOutValue => self.in_minus_out_value,
            Metric::OutMinusInValue => self.out_minus_in_value,
        }
    }

    pub fn set(&mut self, metric: Metric, value: u64) {
        let slot = match metric {
            Metric::InDegree => &mut self.in_degree,
            Metric::OutDegree => &mut self.out_degree,
            Metric::InMinusOutDegree => &mut self.in_minus_out_degree,
            Metric::OutMinusInDegree => &mut self.out_minus_in_degree,
            Metric::InValue => &mut self.in_value,
            Metric::OutValue => &mut self.out_value,
            Metric::InMinusOutValue => &mut self.in_minus_out_value,
            Metric::OutMinusInValue => &mut self.out_minus_in_value,
        };
        *slot = value;
    }

    /// CSV `metric,threshold` for the eight metrics followed by the model
    /// configuration as `n`, `m`, `p_value`, `seed` and `rng` rows.
    pub fn write_csv<W: Write>(&self, config: &NullModelConfig, w: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["metric", "threshold"])?;
        for m in Metric::ALL {
            wtr.write_record([m.name(), &self.get(m).to_string()])?;
        }
        wtr.write_record(["n", &config.nodes.to_string()])?;
        wtr.write_record(["m", &config.edges.to_string()])?;
        wtr.write_record(["p_value", &config.p_value.to_string()])?;
        wtr.write_record(["seed", &config.seed.to_string()])?;
        wtr.write_record(["rng", RNG_NAME])?;
        wtr.flush()?;
        Ok(())
    }

    /// Reads the metric rows of a threshold report; config rows are ignored.
    pub fn read_csv<R: std::io::Read>(r: R) -> Result<Self, String> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
        let mut out = SignificanceThresholds::default();
        let mut seen = [false; 8];
        for rec in rdr.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() != 2 {
                return Err(format!("line {line}: expected 2 fields"));
            }
            if let Some(metric) = Metric::from_name(&rec[0]) {
                let v = rec[1]
                    .parse()
                    .map_err(|_| format!("line {line}: bad threshold {:?}", &rec[1]))?;
                out.set(metric, v);
                seen[Metric::ALL.iter().position(|&m| m == metric).unwrap()] = true;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(format!("missing threshold for {}", Metric::ALL[i].name()));
        }
        Ok(out)
    }
}

/// 1-based nearest rank `ceil((1 - p) * n)`, computed as `n - floor(p * n)`
/// with a small guard against binary rounding of `p * n`.
pub fn nearest_rank(n: usize, p_value: f64) -> usize {
    let below = (p_value * n as f64 + 1e-9).floor() as usize;
    n.saturating_sub(below).max(1)
}

/// The value at the nearest rank of `values` sorted ascending. Reorders
/// `values`.
pub fn nearest_rank_threshold(values: &mut [u64], p_value: f64) -> u64 {
    let k = nearest_rank(values.len(), p_value);
    *values.select_nth_unstable(k - 1).1
}

pub fn thresholds_from_metrics(
    metrics: &[NodeMetrics],
    p_value: f64,
) -> Result<SignificanceThresholds, NullModelError> {
    check_p_value(p_value)?;
    let n = metrics.len();
    if (n as f64) * p_value < 1.0 - 1e-9 {
        return Err(NullModelError::TooFewNodes {
            n,
            p: p_value,
            need: (1.0 / p_value - 1e-9).ceil() as usize,
        });
    }
    let mut out = SignificanceThresholds::default();
    let mut buf = Vec::with_capacity(n);
    for metric in Metric::ALL {
        buf.clear();
        buf.extend(metrics.iter().map(|m| metric.of(m)));
        out.set(metric, nearest_rank_threshold(&mut buf, p_value));
    }
    Ok(out)
}

/// Cutoffs over all nodes of `graph`, isolated nodes included.
pub fn compute_thresholds(
    graph: &TxGraph,
    p_value: f64,
) -> Result<SignificanceThresholds, NullModelError> {
    thresholds_from_metrics(&node_metrics(graph), p_value)
}
