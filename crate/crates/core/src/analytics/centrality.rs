use std::collections::BTreeSet;
use std::io::{Read, Write};

use crate::txgraph::{node_metrics, NodeId, TxGraph};

use super::correlation::pearson;
use super::hits::{hits, HitsConfig};
use super::pagerank::{pagerank, PageRankConfig};
use super::AnalyticsError;

/// Scores indexed by node id.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityScores {
    pub pagerank: Vec<f64>,
    pub hubs: Vec<f64>,
    pub authorities: Vec<f64>,
}

impl CentralityScores {
    pub fn compute(
        graph: &TxGraph,
        pagerank_config: &PageRankConfig,
        hits_config: &HitsConfig,
    ) -> Result<Self, AnalyticsError> {
        let pr = pagerank(graph, pagerank_config)?;
        let (hubs, authorities) = hits(graph, hits_config)?;
        Ok(CentralityScores {
            pagerank: pr,
            hubs,
            authorities,
        })
    }

    pub fn measure(&self, m: Measure) -> &[f64] {
        match m {
            Measure::PageRank => &self.pagerank,
            Measure::Hubs => &self.hubs,
            Measure::Authorities => &self.authorities,
        }
    }

    /// CSV `node,pagerank,hub,authority,in_value_satoshi` keyed by external id.
    pub fn write_csv<W: Write>(&self, graph: &TxGraph, w: W) -> csv::Result<()> {
        let metrics = node_metrics(graph);
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(CENTRALITY_HEADER)?;
        for node in 0..graph.node_count() {
            wtr.write_record([
                graph.external_id(node as NodeId).to_string(),
                self.pagerank[node].to_string(),
                self.hubs[node].to_string(),
                self.authorities[node].to_string(),
                metrics[node].in_value.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub const CENTRALITY_HEADER: [&str; 5] = ["node", "pagerank", "hub", "authority", "in_value_satoshi"];

/// One row of the centrality report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralityRow {
    pub node: u64,
    pub pagerank: f64,
    pub hub: f64,
    pub authority: f64,
    pub in_value: u64,
}

pub fn read_centrality_csv<R: Read>(r: R) -> Result<Vec<CentralityRow>, String> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 5 {
            return Err(format!("line {line}: expected 5 fields"));
        }
        let f = |i: usize| {
            rec[i]
                .parse::<f64>()
                .map_err(|_| format!("line {line}: bad number {:?}", &rec[i]))
        };
        let u = |i: usize| {
            rec[i]
                .parse::<u64>()
                .map_err(|_| format!("line {line}: bad integer {:?}", &rec[i]))
        };
        rows.push(CentralityRow {
            node: u(0)?,
            pagerank: f(1)?,
            hub: f(2)?,
            authority: f(3)?,
            in_value: u(4)?,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Measure {
    PageRank,
    Hubs,
    Authorities,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::PageRank, Measure::Hubs, Measure::Authorities];

    pub fn name(self) -> &'static str {
        match self {
            Measure::PageRank => "pagerank",
            Measure::Hubs => "hubs",
            Measure::Authorities => "authorities",
        }
    }
}

/// Correlation of one centrality measure with money earned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureCorrelation {
    pub measure: Measure,
    /// Pearson of `ln score` against `ln in_value`; `None` when fewer than
    /// three sellers qualify or either side is constant.
    pub log_log: Option<f64>,
    /// Pearson in linear space over the same sellers.
    pub linear: Option<f64>,
    pub used: usize,
    /// Sellers dropped for zero score or zero earnings.
    pub excluded: usize,
}

/// Per-seller `(score, in_value)` inputs for the earnings correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SellerSample {
    pub pagerank: f64,
    pub hub: f64,
    pub authority: f64,
    pub in_value: u64,
}

impl SellerSample {
    fn score(&self, m: Measure) -> f64 {
        match m {
            Measure::PageRank => self.pagerank,
            Measure::Hubs => self.hub,
            Measure::Authorities => self.authority,
        }
    }
}

/// Correlates each centrality measure with money earned (lifetime in_value)
/// over the seller set.
pub fn centrality_earnings_correlation(
    graph: &TxGraph,
    scores: &CentralityScores,
    sellers: &BTreeSet<NodeId>,
) -> Result<Vec<MeasureCorrelation>, AnalyticsError> {
    let metrics = node_metrics(graph);
    let samples: Vec<SellerSample> = sellers
        .iter()
        .map(|&s| SellerSample {
            pagerank: scores.pagerank[s as usize],
            hub: scores.hubs[s as usize],
            authority: scores.authorities[s as usize],
            in_value: metrics[s as usize].in_value,
        })
        .collect();
    earnings_correlation(&samples)
}

/// [`centrality_earnings_correlation`] over precomputed samples.
pub fn earnings_correlation(
    samples: &[SellerSample],
) -> Result<Vec<MeasureCorrelation>, AnalyticsError> {
    let earning = samples.iter().filter(|s| s.in_value > 0).count();
    if earning < 3 {
        return Err(AnalyticsError::TooFewSellers(earning));
    }
    Ok(Measure::ALL
        .into_iter()
        .map(|measure| {
            let usable: Vec<(f64, f64)> = samples
                .iter()
                .filter(|s| s.in_value > 0 && s.score(measure) > 0.0)
                .map(|s| (s.score(measure), s.in_value as f64))
                .collect();
            let (log_log, linear) = if usable.len() >= 3 {
                let (xs, ys): (Vec<f64>, Vec<f64>) = usable.iter().copied().unzip();
                let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
                let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
                (pearson(&lx, &ly).ok(), pearson(&xs, &ys).ok())
            } else {
                (None, None)
            };
            MeasureCorrelation {
                measure,
                log_log,
                linear,
                used: usable.len(),
                excluded: samples.len() - usable.len(),
            }
        })
        .collect())
}
