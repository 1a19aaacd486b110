use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use chainflow::analytics::{read_centrality_csv, write_fit_report, HitsConfig, PageRankConfig};
use chainflow::cluster::{cluster_transactions, Ledger, UserMap};
use chainflow::nullmodel::SignificanceThresholds;
use chainflow::pipeline::{
    correlation_rows, centrality_stage, fit_reuse, ingest_external_series, ledger_reuse,
    load_blocks, null_model_stage, population_stage, report_header, role_rows, run_pipeline,
    seller_samples, user_view, write_correlation_rows, write_key_values, ConfigOverrides,
    ExternalSeries, PipelineError, ReportWriter, SeriesKind, UserView,
};
use chainflow::roles::{read_role_table, role_summary, write_role_table, PopulationSeries};
use chainflow::synth::{planted_network, synthetic_series, PlantedConfig};
use chainflow::txgraph::{build_user_graph, ingest_edge_list, NodeMetrics};

use crate::{Command, EdgeInput, SolverArgs};

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn open(path: &Path) -> Result<File, PipelineError> {
    File::open(path).map_err(|e| PipelineError::MissingInput {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn show(p: &Path) -> String {
    p.display().to_string()
}

/// A writer for a single output file plus that file's name.
fn single_output(out: &Path, echo: &[(&str, String)]) -> Result<(ReportWriter, String), PipelineError> {
    let name = out
        .file_name()
        .ok_or_else(|| PipelineError::Usage(format!("{} is not a file path", out.display())))?
        .to_string_lossy()
        .into_owned();
    let dir = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    Ok((ReportWriter::create(dir, report_header(VERSION, echo))?, name))
}

fn load_view(input: &EdgeInput) -> Result<UserView, PipelineError> {
    open(&input.edges)?;
    let ingested = ingest_edge_list(&input.edges, input.ingest_mode)
        .map_err(|e| PipelineError::data("graph", format!("{}: {e}", input.edges.display())))?;
    for r in &ingested.rejected {
        log::warn!("skipped line {} (data row {}): {}", r.line, r.row, r.reason);
    }
    Ok(user_view(&ingested.graph))
}

fn read_ledger(path: &Path) -> Result<Ledger, PipelineError> {
    Ledger::read_jsonl(BufReader::new(open(path)?))
        .map_err(|e| PipelineError::data("cluster", format!("{}: {e}", path.display())))
}

fn solver(args: &SolverArgs) -> (PageRankConfig, HitsConfig) {
    (
        PageRankConfig {
            damping: args.damping,
            tolerance: args.tolerance,
            max_iterations: args.max_iterations,
            weighting: args.pagerank_weighting,
        },
        HitsConfig {
            tolerance: args.hits_tolerance,
            max_iterations: args.hits_max_iterations,
        },
    )
}

pub fn run(command: Command) -> Result<(), PipelineError> {
    match command {
        Command::Parse { blocks_dir, out } => {
            let input = load_blocks(&blocks_dir)?;
            let file = File::create(&out).map_err(|e| PipelineError::Output {
                path: out.clone(),
                message: e.to_string(),
            })?;
            input
                .ledger
                .write_jsonl(std::io::BufWriter::new(file))
                .map_err(|e| PipelineError::Output {
                    path: out.clone(),
                    message: e.to_string(),
                })?;
            let s = input.stats;
            println!(
                "files={} blocks={} transactions={} addresses={} unresolved_inputs={} scan_errors={}",
                s.files,
                s.blocks,
                input.ledger.transactions.len(),
                input.ledger.book.len(),
                input.ledger.unresolved_inputs,
                s.errors
            );
            Ok(())
        }
        Command::Cluster {
            ledger,
            out_dir,
            reuse_parts,
            r_min,
        } => {
            let l = read_ledger(&ledger)?;
            let users = cluster_transactions(&l).finalize();
            let (hist, parts) = ledger_reuse(&l, reuse_parts)?;
            let (fits, notes) = fit_reuse(&hist, r_min);
            let echo = [
                ("ledger", show(&ledger)),
                ("reuse_parts", reuse_parts.to_string()),
                ("r_min", r_min.to_string()),
            ];
            let mut out = ReportWriter::create(&out_dir, report_header(VERSION, &echo))?;
            out.emit("clustering.csv", &[], |w| users.write_csv(&l.book, w))?;
            out.emit("reuse_histogram.csv", &[], |w| hist.write_csv(w))?;
            for (i, part) in parts.iter().enumerate() {
                let note = [format!("part={} of {}", i + 1, parts.len())];
                out.emit(&format!("reuse_histogram_part{}.csv", i + 1), &note, |w| part.write_csv(w))?;
            }
            out.emit("power_law_fit.csv", &notes, |w| write_fit_report(&fits, w))?;
            println!("users={} addresses={}", users.user_count(), users.address_count());
            Ok(())
        }
        Command::Graph {
            ledger,
            clustering,
            out,
        } => {
            let l = read_ledger(&ledger)?;
            let users = UserMap::read_csv(&l.book, open(&clustering)?)
                .map_err(|e| PipelineError::data("graph", format!("{}: {e}", clustering.display())))?;
            let graph = build_user_graph(&l, &users);
            let echo = [("ledger", show(&ledger)), ("clustering", show(&clustering))];
            let (mut w, name) = single_output(&out, &echo)?;
            w.emit(&name, &[], |buf| graph.write_edge_list(buf))?;
            println!("nodes={} edges={}", graph.node_count(), graph.edge_count());
            Ok(())
        }
        Command::Nullmodel {
            edges,
            p_value,
            seed,
            out,
        } => {
            if !(p_value > 0.0 && p_value < 1.0) {
                return Err(PipelineError::Usage("p_value must lie in (0, 1)".into()));
            }
            let view = load_view(&edges)?;
            let (t, config) = null_model_stage(&view, p_value, seed)?;
            let echo = [
                ("edges_file", show(&edges.edges)),
                ("p_value", p_value.to_string()),
                ("seed", seed.to_string()),
            ];
            let (mut w, name) = single_output(&out, &echo)?;
            w.emit(&name, &[], |buf| t.write_csv(&config, buf))?;
            Ok(())
        }
        Command::Classify {
            edges,
            thresholds,
            out_dir,
        } => {
            let view = load_view(&edges)?;
            let t = SignificanceThresholds::read_csv(open(&thresholds)?)
                .map_err(|e| PipelineError::data("classify", format!("{}: {e}", thresholds.display())))?;
            let rows = role_rows(&view, &t);
            let metrics: Vec<NodeMetrics> = rows.iter().map(|r| r.metrics).collect();
            let labels: Vec<_> = rows.iter().map(|r| r.label).collect();
            let summary: Vec<(String, String)> = role_summary(&metrics, &labels)
                .into_iter()
                .map(|(k, v)| (k, v.to_string()))
                .collect();
            let echo = [("edges_file", show(&edges.edges)), ("thresholds", show(&thresholds))];
            let mut out = ReportWriter::create(&out_dir, report_header(VERSION, &echo))?;
            out.emit("roles.csv", &[], |w| write_role_table(&rows, w))?;
            out.emit("role_summary.csv", &[], |w| write_key_values(["key", "count"], &summary, w))?;
            Ok(())
        }
        Command::Timeseries {
            roles,
            grid_step_days,
            out,
        } => {
            if grid_step_days == 0 {
                return Err(PipelineError::Usage("grid_step_days must be positive".into()));
            }
            let rows = read_role_table(open(&roles)?)
                .map_err(|e| PipelineError::data("timeseries", format!("{}: {e}", roles.display())))?;
            let series = population_stage(&rows, i64::from(grid_step_days) * 86_400)?;
            let echo = [("roles", show(&roles)), ("grid_step_days", grid_step_days.to_string())];
            let (mut w, name) = single_output(&out, &echo)?;
            w.emit(&name, &[], |buf| series.write_csv(buf))?;
            Ok(())
        }
        Command::Centrality { edges, solver: s, out } => {
            let view = load_view(&edges)?;
            let (pr, hits) = solver(&s);
            let (scores, _) = centrality_stage(&view, &pr, &hits)?;
            let echo = [
                ("edges_file", show(&edges.edges)),
                ("damping", pr.damping.to_string()),
                ("tolerance", pr.tolerance.to_string()),
                ("max_iterations", pr.max_iterations.to_string()),
                ("pagerank_weighting", pr.weighting.name().to_string()),
                ("hits_tolerance", hits.tolerance.to_string()),
                ("hits_max_iterations", hits.max_iterations.to_string()),
            ];
            let (mut w, name) = single_output(&out, &echo)?;
            w.emit(&name, &[], |buf| scores.write_csv(&view.graph, buf))?;
            Ok(())
        }
        Command::Report {
            roles,
            centrality,
            populations,
            price,
            difficulty,
            out,
        } => {
            let mut external = Vec::new();
            for (path, kind) in [(&price, SeriesKind::PriceUsd), (&difficulty, SeriesKind::Difficulty)] {
                if let Some(path) = path {
                    open(path)?;
                    let s = ingest_external_series(path, kind)
                        .map_err(|e| PipelineError::data("input", format!("{}: {e}", path.display())))?;
                    external.push(s.series);
                }
            }
            let role_rows = read_role_table(open(&roles)?)
                .map_err(|e| PipelineError::data("report", format!("{}: {e}", roles.display())))?;
            let scores = read_centrality_csv(open(&centrality)?)
                .map_err(|e| PipelineError::data("report", format!("{}: {e}", centrality.display())))?;
            let pops = PopulationSeries::read_csv(open(&populations)?)
                .map_err(|e| PipelineError::data("report", format!("{}: {e}", populations.display())))?;
            let samples = seller_samples(&role_rows, &scores)?;
            let rows = correlation_rows(&samples, &pops, &external);
            let opt = |p: &Option<PathBuf>| p.as_deref().map(show).unwrap_or_default();
            let echo = [
                ("roles", show(&roles)),
                ("centrality", show(&centrality)),
                ("populations", show(&populations)),
                ("price_file", opt(&price)),
                ("difficulty_file", opt(&difficulty)),
            ];
            let (mut w, name) = single_output(&out, &echo)?;
            w.emit(&name, &[], |buf| write_correlation_rows(&rows, buf))?;
            Ok(())
        }
        Command::Pipeline(args) => {
            let mut layered = match &args.config {
                Some(path) => ConfigOverrides::load(path)?,
                None => ConfigOverrides::default(),
            };
            layered = layered.merge(args.overrides());
            let config = layered.build()?;
            let summary = run_pipeline(&config)?;
            for w in &summary.warnings {
                log::warn!("{w}");
            }
            println!("wrote {} reports to {}", summary.files.len(), summary.out_dir.display());
            Ok(())
        }
        Command::Synth {
            out_dir,
            nodes,
            per_role,
            seed,
        } => {
            let cfg = PlantedConfig {
                nodes,
                per_role,
                seed,
                ..PlantedConfig::default()
            };
            let net = planted_network(&cfg).map_err(|e| PipelineError::Usage(e.to_string()))?;
            let echo = [
                ("nodes", nodes.to_string()),
                ("per_role", per_role.to_string()),
                ("seed", seed.to_string()),
            ];
            let mut out = ReportWriter::create(&out_dir, report_header(VERSION, &echo))?;
            out.emit("edges.csv", &[], |w| net.graph.write_edge_list(w))?;
            out.emit("truth.csv", &[], |w| net.write_truth_csv(w))?;
            let price = ExternalSeries {
                kind: SeriesKind::PriceUsd,
                points: synthetic_series(cfg.start_ts, cfg.end_ts, 86_400, seed),
            };
            out.emit("price.csv", &[], |w| price.write_csv(w))?;
            println!("nodes={} edges={}", net.graph.node_count(), net.graph.edge_count());
            Ok(())
        }
    }
}
