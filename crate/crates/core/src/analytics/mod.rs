//! Power-law fitting, PageRank, HITS and correlation statistics.

mod centrality;
mod correlation;
mod hits;
mod pagerank;
mod powerlaw;

pub use centrality::{
    centrality_earnings_correlation, earnings_correlation, read_centrality_csv, CentralityRow,
    CentralityScores, Measure, MeasureCorrelation, SellerSample, CENTRALITY_HEADER,
};
pub use correlation::{align_series, pearson, pearson_present, series_correlation};
pub use hits::{hits, HitsConfig};
pub use pagerank::{pagerank, EdgeWeighting, PageRankConfig};
pub use powerlaw::{
    fit_power_law, fit_power_law_mle, hurwitz_zeta, write_fit_report, FitMethod, PowerLawFit,
    FIT_REPORT_HEADER,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalyticsError {
    #[error("power-law fit needs at least 3 contiguous non-empty bins, found {usable_bins}")]
    DegenerateFit { usable_bins: usize },
    #[error("histogram does not decay (log-log slope {slope})")]
    NonDecreasingFit { slope: f64 },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("{algorithm} did not converge in {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        algorithm: &'static str,
        iterations: usize,
        residual: f64,
        last: Vec<f64>,
    },
    #[error("graph has no edges")]
    NoEdges,
    #[error("inputs differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 paired values, found {0}")]
    TooFewPoints(usize),
    #[error("correlation undefined: zero variance")]
    ZeroVariance,
    #[error("series do not overlap in time")]
    NoOverlap,
    #[error("need at least 3 sellers with positive earnings, found {0}")]
    TooFewSellers(usize),
}
