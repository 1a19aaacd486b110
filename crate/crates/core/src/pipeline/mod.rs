//! End-to-end orchestration: input loading, every analysis stage, and the
//! CSV report bundle.
//!
//! Inputs (transactions and external series) are loaded and validated
//! before the output directory is touched, so input errors leave no
//! reports behind. Once writing has started, a failing stage leaves the
//! finished reports in place, writes `error.csv`, and marks the bundle
//! `partial` in `manifest.csv`.

mod config;
mod series;

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

pub use config::{ConfigOverrides, InputSource, PipelineConfig};
pub use series::{
    format_iso8601, ingest_external_series, parse_iso8601, read_external_series, ExternalSeries,
    IngestedSeries, SeriesError, SeriesKind, SERIES_HEADER,
};

use crate::analytics::{
    align_series, earnings_correlation, fit_power_law, fit_power_law_mle, pearson_present,
    write_fit_report, AnalyticsError, CentralityRow, CentralityScores, HitsConfig, Measure,
    PageRankConfig, PowerLawFit, SellerSample,
};
use crate::blockparse::{scan_block_files, ScanStats};
use crate::cluster::{
    cluster_transactions, reuse_histogram, time_partition, Ledger, ReuseHistogram, UserMap,
};
use crate::nullmodel::{null_model_thresholds, NullModelConfig, SignificanceThresholds, RNG_NAME};
use crate::roles::{
    active_population, classify, customer_seller_ratio, default_grid, role_summary,
    write_role_table, PopulationSeries, Role, RoleRow, TimeSeries,
};
use crate::txgraph::{
    build_user_graph, ingest_edge_list, node_metrics, NodeId, NodeMetrics, RejectedRow, TxGraph,
};

/// Reports every successful run produces, in write order.
pub const REPORT_FILES: [&str; 10] = [
    "clustering.csv",
    "reuse_histogram.csv",
    "power_law_fit.csv",
    "thresholds.csv",
    "roles.csv",
    "role_summary.csv",
    "populations.csv",
    "centrality.csv",
    "correlation_summary.csv",
    "manifest.csv",
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read input {path}: {message}")]
    MissingInput { path: PathBuf, message: String },
    #[error("{stage}: {message}")]
    Data { stage: &'static str, message: String },
    #[error("{stage}: {message}")]
    NonConvergence { stage: &'static str, message: String },
    #[error("cannot write {path}: {message}")]
    Output { path: PathBuf, message: String },
}

impl PipelineError {
    /// 1 usage, 2 data, 3 non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Usage(_) | PipelineError::MissingInput { .. } => 1,
            PipelineError::Data { .. } | PipelineError::Output { .. } => 2,
            PipelineError::NonConvergence { .. } => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PipelineError::Usage(_) => "usage",
            PipelineError::MissingInput { .. } => "missing_input",
            PipelineError::Data { .. } => "data",
            PipelineError::NonConvergence { .. } => "non_convergence",
            PipelineError::Output { .. } => "output",
        }
    }

    pub fn stage(&self) -> &'static str {
        match self {
            PipelineError::Data { stage, .. } | PipelineError::NonConvergence { stage, .. } => stage,
            PipelineError::Output { .. } => "output",
            _ => "input",
        }
    }

    pub fn data(stage: &'static str, e: impl std::fmt::Display) -> Self {
        PipelineError::Data {
            stage,
            message: e.to_string(),
        }
    }

    fn analytics(stage: &'static str, e: AnalyticsError) -> Self {
        match e {
            AnalyticsError::NonConvergence { .. } => PipelineError::NonConvergence {
                stage,
                message: e.to_string(),
            },
            other => PipelineError::data(stage, other),
        }
    }
}

/// `# key=value` comment lines embedded at the top of every report.
pub fn report_header(tool_version: &str, pairs: &[(&str, String)]) -> String {
    let mut h = format!("# chainflow {tool_version}\n# rng={RNG_NAME}\n");
    for (k, v) in pairs {
        h.push_str(&format!("# {k}={v}\n"));
    }
    h
}

/// Writes reports into one directory, each prefixed by a fixed header.
#[derive(Debug)]
pub struct ReportWriter {
    dir: PathBuf,
    header: String,
    written: Vec<String>,
}

impl ReportWriter {
    pub fn create(dir: &Path, header: String) -> Result<Self, PipelineError> {
        std::fs::create_dir_all(dir).map_err(|e| PipelineError::Output {
            path: dir.to_path_buf(),
            message: e.to_string(),
        })?;
        Ok(ReportWriter {
            dir: dir.to_path_buf(),
            header,
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    /// Writes `name` as header, optional extra comment lines, then `body`.
    pub fn emit<F, E>(&mut self, name: &str, notes: &[String], body: F) -> Result<PathBuf, PipelineError>
    where
        F: FnOnce(&mut Vec<u8>) -> Result<(), E>,
        E: std::fmt::Display,
    {
        let path = self.dir.join(name);
        let mut buf = self.header.clone().into_bytes();
        for note in notes {
            buf.extend_from_slice(format!("# {note}\n").as_bytes());
        }
        body(&mut buf).map_err(|e| PipelineError::Output {
            path: path.clone(),
            message: e.to_string(),
        })?;
        std::fs::write(&path, buf).map_err(|e| PipelineError::Output {
            path: path.clone(),
            message: e.to_string(),
        })?;
        self.written.push(name.to_string());
        Ok(path)
    }
}

/// A block directory decoded into a resolved ledger and its clustering.
#[derive(Debug, Clone)]
pub struct BlockInput {
    pub ledger: Ledger,
    pub users: UserMap,
    pub stats: ScanStats,
    /// Record-level errors, each followed by a resynchronization.
    pub scan_errors: Vec<String>,
}

pub fn load_blocks(dir: &Path) -> Result<BlockInput, PipelineError> {
    if !dir.is_dir() {
        return Err(PipelineError::MissingInput {
            path: dir.to_path_buf(),
            message: "not a directory".into(),
        });
    }
    let mut scanner = scan_block_files(dir).map_err(|e| PipelineError::MissingInput {
        path: dir.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut scan_errors = Vec::new();
    let ledger = Ledger::from_blocks(scanner.by_ref().filter_map(|item| match item {
        Ok(block) => Some(block),
        Err(e) => {
            log::warn!("{e}");
            scan_errors.push(e.to_string());
            None
        }
    }));
    let stats = scanner.stats();
    let users = cluster_transactions(&ledger).finalize();
    Ok(BlockInput {
        ledger,
        users,
        stats,
        scan_errors,
    })
}

/// Whole-span and per-time-part reuse histograms of a ledger.
pub fn ledger_reuse(
    ledger: &Ledger,
    parts: usize,
) -> Result<(ReuseHistogram, Vec<ReuseHistogram>), PipelineError> {
    let all = reuse_histogram(&ledger.transactions);
    let chunks = time_partition(ledger.transactions.iter().collect::<Vec<_>>(), parts)
        .map_err(|e| PipelineError::data("cluster", e))?;
    let per_part = chunks
        .into_iter()
        .map(|chunk| reuse_histogram(chunk.into_iter()))
        .collect();
    Ok((all, per_part))
}

/// Reuse histograms for pre-clustered input: every edge is one
/// transaction and each user counts as one address.
pub fn edge_reuse(
    graph: &TxGraph,
    parts: usize,
) -> Result<(ReuseHistogram, Vec<ReuseHistogram>), PipelineError> {
    let count = |edges: &[crate::txgraph::Edge]| {
        let mut usage = vec![0u64; graph.node_count()];
        for e in edges {
            usage[e.src as usize] += 1;
            usage[e.dst as usize] += 1;
        }
        ReuseHistogram::from_usage_counts(usage.into_iter().filter(|&c| c > 0))
    };
    let chunks = time_partition(graph.edges().to_vec(), parts)
        .map_err(|e| PipelineError::data("cluster", e))?;
    Ok((count(graph.edges()), chunks.iter().map(|c| count(c)).collect()))
}

/// Least-squares and maximum-likelihood fits; a failing method is reported
/// as a note instead of a row.
pub fn fit_reuse(hist: &ReuseHistogram, r_min: u64) -> (Vec<PowerLawFit>, Vec<String>) {
    let mut fits = Vec::new();
    let mut notes = Vec::new();
    for (name, result) in [
        ("loglog_wls", fit_power_law(hist, r_min)),
        ("discrete_mle", fit_power_law_mle(hist, r_min)),
    ] {
        match result {
            Ok(f) => fits.push(f),
            Err(e) => notes.push(format!("fit_error[{name}]={e}")),
        }
    }
    (fits, notes)
}

/// The graph analysed for roles and centrality: users only, with lifetimes
/// taken from the full graph (including coinbase and unknown-sink edges).
#[derive(Debug, Clone)]
pub struct UserView {
    pub graph: TxGraph,
    pub metrics: Vec<NodeMetrics>,
}

pub fn user_view(full: &TxGraph) -> UserView {
    let graph = full.user_subgraph();
    let full_metrics = node_metrics(full);
    let mut metrics = node_metrics(&graph);
    for (node, m) in metrics.iter_mut().enumerate() {
        let f = &full_metrics[full.node_of(graph.external_id(node as NodeId)).expect("subgraph node") as usize];
        if let (Some(_), Some((first, last))) = (m.lifetime(), f.lifetime()) {
            m.first_ts = first;
            m.last_ts = last;
        }
    }
    UserView { graph, metrics }
}

pub fn null_model_stage(
    view: &UserView,
    p_value: f64,
    seed: u64,
) -> Result<(SignificanceThresholds, NullModelConfig), PipelineError> {
    let t = null_model_thresholds(&view.graph, p_value, seed)
        .map_err(|e| PipelineError::data("nullmodel", e))?;
    let echo = NullModelConfig {
        nodes: view.graph.node_count(),
        edges: view.graph.edge_count(),
        p_value,
        seed,
    };
    Ok((t, echo))
}

pub fn role_rows(view: &UserView, thresholds: &SignificanceThresholds) -> Vec<RoleRow> {
    view.metrics
        .iter()
        .enumerate()
        .map(|(node, m)| RoleRow {
            user_id: view.graph.external_id(node as NodeId),
            label: classify(m, thresholds),
            metrics: *m,
        })
        .collect()
}

/// Active populations per role on a grid spanning all lifetimes.
pub fn population_stage(rows: &[RoleRow], step_secs: i64) -> Result<PopulationSeries, PipelineError> {
    let metrics: Vec<NodeMetrics> = rows.iter().map(|r| r.metrics).collect();
    let lifetimes = metrics.iter().filter_map(|m| m.lifetime());
    let (start, end) = lifetimes.fold((i64::MAX, i64::MIN), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)));
    if start > end {
        return Err(PipelineError::data("timeseries", "no node has any transaction"));
    }
    let grid = default_grid(start, end, step_secs);
    let series = |role: Role| {
        active_population(&metrics, |i| rows[i].label.has(role), &grid)
            .map_err(|e| PipelineError::data("timeseries", e))
    };
    let customers = series(Role::Customer)?;
    let sellers = series(Role::Seller)?;
    let ratio =
        customer_seller_ratio(&customers, &sellers).map_err(|e| PipelineError::data("timeseries", e))?;
    Ok(PopulationSeries {
        miners: series(Role::Miner)?,
        collectors: series(Role::Collector)?,
        customers,
        sellers,
        ratio,
    })
}

pub fn centrality_stage(
    view: &UserView,
    pagerank: &PageRankConfig,
    hits: &HitsConfig,
) -> Result<(CentralityScores, Vec<CentralityRow>), PipelineError> {
    let scores = CentralityScores::compute(&view.graph, pagerank, hits)
        .map_err(|e| PipelineError::analytics("centrality", e))?;
    let rows = (0..view.graph.node_count())
        .map(|node| CentralityRow {
            node: view.graph.external_id(node as NodeId),
            pagerank: scores.pagerank[node],
            hub: scores.hubs[node],
            authority: scores.authorities[node],
            in_value: view.metrics[node].in_value,
        })
        .collect();
    Ok((scores, rows))
}

/// Joins seller labels with their centrality rows by user id.
pub fn seller_samples(roles: &[RoleRow], centrality: &[CentralityRow]) -> Result<Vec<SellerSample>, PipelineError> {
    let sellers: BTreeSet<u64> = roles
        .iter()
        .filter(|r| r.label.has(Role::Seller))
        .map(|r| r.user_id)
        .collect();
    let samples: Vec<SellerSample> = centrality
        .iter()
        .filter(|c| sellers.contains(&c.node))
        .map(|c| SellerSample {
            pagerank: c.pagerank,
            hub: c.hub,
            authority: c.authority,
            in_value: c.in_value,
        })
        .collect();
    if samples.len() != sellers.len() {
        return Err(PipelineError::data(
            "report",
            format!(
                "{} sellers have no centrality row",
                sellers.len() - samples.len()
            ),
        ));
    }
    Ok(samples)
}

/// One line of `correlation_summary.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRow {
    pub analysis: String,
    pub measure: String,
    pub space: &'static str,
    pub coefficient: Option<f64>,
    pub used: usize,
    pub excluded: usize,
    pub note: String,
}

pub const CORRELATION_HEADER: [&str; 7] =
    ["analysis", "measure", "space", "coefficient", "used", "excluded", "note"];

/// Centrality-earnings correlations over sellers, then the population
/// series against each external series (customer/seller ratio against
/// price, miner population against difficulty).
pub fn correlation_rows(
    samples: &[SellerSample],
    populations: &PopulationSeries,
    external: &[ExternalSeries],
) -> Vec<CorrelationRow> {
    let mut rows = Vec::new();
    match earnings_correlation(samples) {
        Ok(per_measure) => {
            for c in per_measure {
                for (space, value) in [("log_log", c.log_log), ("linear", c.linear)] {
                    rows.push(CorrelationRow {
                        analysis: "centrality_earnings".into(),
                        measure: c.measure.name().into(),
                        space,
                        coefficient: value,
                        used: c.used,
                        excluded: c.excluded,
                        note: if value.is_none() {
                            "undefined: fewer than 3 usable sellers or zero variance".into()
                        } else {
                            String::new()
                        },
                    });
                }
            }
        }
        Err(e) => {
            for m in Measure::ALL {
                for space in ["log_log", "linear"] {
                    rows.push(CorrelationRow {
                        analysis: "centrality_earnings".into(),
                        measure: m.name().into(),
                        space,
                        coefficient: None,
                        used: 0,
                        excluded: samples.len(),
                        note: e.to_string(),
                    });
                }
            }
        }
    }
    for ext in external {
        let (analysis, ours) = match ext.kind {
            SeriesKind::PriceUsd => ("ratio_vs_price", &populations.ratio),
            SeriesKind::Difficulty => ("miners_vs_difficulty", &populations.miners),
        };
        rows.push(series_row(analysis, ours, &ext.to_time_series()));
    }
    rows
}

fn series_row(analysis: &str, ours: &TimeSeries, theirs: &TimeSeries) -> CorrelationRow {
    let mut row = CorrelationRow {
        analysis: analysis.into(),
        measure: "series".into(),
        space: "linear",
        coefficient: None,
        used: 0,
        excluded: 0,
        note: String::new(),
    };
    match align_series(ours, theirs) {
        Ok((a, b)) => {
            let present = a.iter().zip(&b).filter(|(x, y)| x.is_some() && y.is_some()).count();
            row.used = present;
            row.excluded = a.len() - present;
            match pearson_present(&a, &b) {
                Ok(r) => row.coefficient = Some(r),
                Err(e) => row.note = e.to_string(),
            }
        }
        Err(e) => row.note = e.to_string(),
    }
    row
}

pub fn write_correlation_rows<W: Write>(rows: &[CorrelationRow], w: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(CORRELATION_HEADER)?;
    for r in rows {
        wtr.write_record([
            r.analysis.clone(),
            r.measure.clone(),
            r.space.to_string(),
            r.coefficient.map(|c| c.to_string()).unwrap_or_default(),
            r.used.to_string(),
            r.excluded.to_string(),
            r.note.clone(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_key_values<W: Write>(header: [&str; 2], rows: &[(String, String)], w: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(header)?;
    for (k, v) in rows {
        wtr.write_record([k, v])?;
    }
    wtr.flush()?;
    Ok(())
}

fn write_rejected<W: Write>(rows: &[RejectedRow], w: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["line", "row", "reason"])?;
    for r in rows {
        wtr.write_record([r.line.to_string(), r.row.to_string(), r.reason.clone()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// What a completed run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    pub warnings: Vec<String>,
}

enum Loaded {
    Blocks(BlockInput),
    Edges {
        graph: TxGraph,
        rejected: Vec<RejectedRow>,
    },
}

fn require_file(path: &Path) -> Result<(), PipelineError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(PipelineError::MissingInput {
            path: path.to_path_buf(),
            message: "no such file".into(),
        })
    }
}

fn load_series(path: &Path, kind: SeriesKind) -> Result<IngestedSeries, PipelineError> {
    require_file(path)?;
    ingest_external_series(path, kind).map_err(|e| PipelineError::Data {
        stage: "input",
        message: format!("{} ({kind}): {e}", path.display()),
    })
}

/// Runs every stage and writes the report bundle into `config.out_dir`.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunSummary, PipelineError> {
    // Inputs first: nothing is written unless all of them load.
    match &config.input {
        InputSource::Blocks(d) if !d.is_dir() => {
            return Err(PipelineError::MissingInput {
                path: d.clone(),
                message: "not a directory".into(),
            })
        }
        InputSource::EdgeList(f) => require_file(f)?,
        _ => {}
    }
    let mut warnings = Vec::new();
    let mut external = Vec::new();
    for (path, kind) in [
        (&config.price_file, SeriesKind::PriceUsd),
        (&config.difficulty_file, SeriesKind::Difficulty),
    ] {
        if let Some(path) = path {
            let s = load_series(path, kind)?;
            warnings.extend(s.warnings);
            external.push(s.series);
        }
    }
    let loaded = match &config.input {
        InputSource::Blocks(dir) => Loaded::Blocks(load_blocks(dir)?),
        InputSource::EdgeList(file) => {
            let ingested = ingest_edge_list(file, config.ingest_mode)
                .map_err(|e| PipelineError::data("input", format!("{}: {e}", file.display())))?;
            for r in &ingested.rejected {
                warnings.push(format!("skipped line {} (data row {}): {}", r.line, r.row, r.reason));
            }
            Loaded::Edges {
                graph: ingested.graph,
                rejected: ingested.rejected,
            }
        }
    };

    let echo: Vec<(&str, String)> = config.echo().into_iter().filter(|(k, _)| *k != "out_dir").collect();
    let mut out = ReportWriter::create(&config.out_dir, report_header(env!("CARGO_PKG_VERSION"), &echo))?;
    match run_stages(config, loaded, &external, &mut out) {
        Ok(()) => {
            write_manifest(&mut out, None)?;
            Ok(RunSummary {
                out_dir: config.out_dir.clone(),
                files: out.written().to_vec(),
                warnings,
            })
        }
        Err(e) => {
            let row = [
                e.stage().to_string(),
                e.kind().to_string(),
                e.exit_code().to_string(),
                e.to_string(),
            ];
            // Best effort: the original error matters more than these.
            let _ = out.emit("error.csv", &[], |w| {
                let mut wtr = csv::Writer::from_writer(w);
                wtr.write_record(["stage", "kind", "exit_code", "message"])?;
                wtr.write_record(row)?;
                wtr.flush()?;
                Ok::<(), csv::Error>(())
            });
            let _ = write_manifest(&mut out, Some(&e));
            Err(e)
        }
    }
}

fn write_manifest(out: &mut ReportWriter, error: Option<&PipelineError>) -> Result<(), PipelineError> {
    let written: BTreeSet<String> = out.written().iter().cloned().collect();
    let mut rows: Vec<(String, String)> = Vec::new();
    let status = if error.is_some() { "partial" } else { "complete" };
    rows.push(("bundle".into(), status.into()));
    for name in REPORT_FILES.iter().filter(|&&n| n != "manifest.csv") {
        let s = if written.contains(*name) { "written" } else { "missing" };
        rows.push((name.to_string(), s.into()));
    }
    for name in out.written().iter().filter(|n| !REPORT_FILES.contains(&n.as_str())) {
        rows.push((name.clone(), "written".into()));
    }
    out.emit("manifest.csv", &[], |w| write_key_values(["file", "status"], &rows, w))?;
    Ok(())
}

fn run_stages(
    config: &PipelineConfig,
    loaded: Loaded,
    external: &[ExternalSeries],
    out: &mut ReportWriter,
) -> Result<(), PipelineError> {
    let (full, reuse) = match loaded {
        Loaded::Blocks(input) => {
            let s = input.stats;
            let stats = vec![
                ("files".to_string(), s.files.to_string()),
                ("blocks".into(), s.blocks.to_string()),
                ("record_bytes".into(), s.record_bytes.to_string()),
                ("padding_bytes".into(), s.padding_bytes.to_string()),
                ("skipped_bytes".into(), s.skipped_bytes.to_string()),
                ("scan_errors".into(), s.errors.to_string()),
                ("transactions".into(), input.ledger.transactions.len().to_string()),
                ("addresses".into(), input.ledger.book.len().to_string()),
                ("unresolved_inputs".into(), input.ledger.unresolved_inputs.to_string()),
                ("users".into(), input.users.user_count().to_string()),
            ];
            out.emit("parse_stats.csv", &input.scan_errors, |w| {
                write_key_values(["key", "value"], &stats, w)
            })?;
            out.emit("clustering.csv", &[], |w| input.users.write_csv(&input.ledger.book, w))?;
            let reuse = ledger_reuse(&input.ledger, config.reuse_parts)?;
            (build_user_graph(&input.ledger, &input.users), reuse)
        }
        Loaded::Edges { graph, rejected } => {
            let note = ["pre-clustered input: every user id is its own cluster".to_string()];
            out.emit("clustering.csv", &note, |w| {
                let mut wtr = csv::Writer::from_writer(w);
                wtr.write_record(["address", "user_id"])?;
                for &id in graph.external_ids() {
                    wtr.write_record([id.to_string(), id.to_string()])?;
                }
                wtr.flush()?;
                Ok::<(), csv::Error>(())
            })?;
            out.emit("rejected_rows.csv", &[], |w| write_rejected(&rejected, w))?;
            let reuse = edge_reuse(&graph, config.reuse_parts)?;
            (graph, reuse)
        }
    };

    let (hist, parts) = reuse;
    out.emit("reuse_histogram.csv", &[], |w| hist.write_csv(w))?;
    for (i, part) in parts.iter().enumerate() {
        let name = format!("reuse_histogram_part{}.csv", i + 1);
        let note = [format!("part={} of {}", i + 1, parts.len())];
        out.emit(&name, &note, |w| part.write_csv(w))?;
    }
    let (fits, fit_notes) = fit_reuse(&hist, config.r_min);
    out.emit("power_law_fit.csv", &fit_notes, |w| write_fit_report(&fits, w))?;

    let view = user_view(&full);
    let (thresholds, null_config) = null_model_stage(&view, config.p_value, config.seed)?;
    out.emit("thresholds.csv", &[], |w| thresholds.write_csv(&null_config, w))?;

    let rows = role_rows(&view, &thresholds);
    out.emit("roles.csv", &[], |w| write_role_table(&rows, w))?;
    let metrics: Vec<NodeMetrics> = rows.iter().map(|r| r.metrics).collect();
    let labels: Vec<_> = rows.iter().map(|r| r.label).collect();
    let summary: Vec<(String, String)> = role_summary(&metrics, &labels)
        .into_iter()
        .map(|(k, v)| (k, v.to_string()))
        .collect();
    out.emit("role_summary.csv", &[], |w| write_key_values(["key", "count"], &summary, w))?;

    let populations = population_stage(&rows, config.grid_step_secs())?;
    out.emit("populations.csv", &[], |w| populations.write_csv(w))?;

    let (scores, centrality) = centrality_stage(&view, &config.pagerank, &config.hits)?;
    out.emit("centrality.csv", &[], |w| scores.write_csv(&view.graph, w))?;

    let samples = seller_samples(&rows, &centrality)?;
    let correlations = correlation_rows(&samples, &populations, external);
    out.emit("correlation_summary.csv", &[], |w| write_correlation_rows(&correlations, w))?;
    Ok(())
}
