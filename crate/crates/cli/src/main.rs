//! `chainflow` command-line interface.
//!
//! Every stage reads the previous stage's exported files, so a run can be
//! resumed anywhere; `pipeline` runs them all in one go. Exit codes: 0
//! success, 1 usage error, 2 data error, 3 non-convergence.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use chainflow::analytics::EdgeWeighting;
use chainflow::pipeline::ConfigOverrides;
use chainflow::txgraph::IngestMode;
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "chainflow", version, about = "Bitcoin transaction-graph analytics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decode raw block files into a resolved ledger (JSON lines).
    Parse {
        #[arg(long)]
        blocks_dir: PathBuf,
        /// Ledger output file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Cluster addresses into users and compute address-reuse statistics.
    Cluster {
        #[arg(long)]
        ledger: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 3)]
        reuse_parts: usize,
        #[arg(long, default_value_t = 1)]
        r_min: u64,
    },
    /// Build the user-level edge list from a ledger and its clustering.
    Graph {
        #[arg(long)]
        ledger: PathBuf,
        #[arg(long)]
        clustering: PathBuf,
        /// Edge-list output file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Significance thresholds from a matched Erdős–Rényi null model.
    Nullmodel {
        #[command(flatten)]
        edges: EdgeInput,
        #[arg(long, default_value_t = 0.01)]
        p_value: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Label users as miners, collectors, customers and sellers.
    Classify {
        #[command(flatten)]
        edges: EdgeInput,
        #[arg(long)]
        thresholds: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Active role populations and the customer/seller ratio over time.
    Timeseries {
        #[arg(long)]
        roles: PathBuf,
        #[arg(long, default_value_t = 14)]
        grid_step_days: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// PageRank, hub and authority scores.
    Centrality {
        #[command(flatten)]
        edges: EdgeInput,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Correlation summary from exported roles, centrality and populations.
    Report {
        #[arg(long)]
        roles: PathBuf,
        #[arg(long)]
        centrality: PathBuf,
        #[arg(long)]
        populations: PathBuf,
        /// CSV `date_iso8601,value` of the USD price.
        #[arg(long)]
        price: Option<PathBuf>,
        /// CSV `date_iso8601,value` of the mining difficulty.
        #[arg(long)]
        difficulty: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every stage and write the full report bundle.
    Pipeline(PipelineArgs),
    /// Write a planted-role network fixture (edges, truth, price series).
    Synth {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        nodes: usize,
        #[arg(long, default_value_t = 250)]
        per_role: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct EdgeInput {
    /// Edge-list CSV `src_user,dst_user,timestamp_unix,value_satoshi`.
    #[arg(long)]
    edges: PathBuf,
    #[arg(long, default_value = "strict")]
    ingest_mode: IngestMode,
}

#[derive(Args, Debug)]
struct SolverArgs {
    #[arg(long, default_value_t = 0.85)]
    damping: f64,
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    #[arg(long, default_value_t = 200)]
    max_iterations: usize,
    #[arg(long, default_value = "multiplicity")]
    pagerank_weighting: EdgeWeighting,
    #[arg(long, default_value_t = 1e-10)]
    hits_tolerance: f64,
    #[arg(long, default_value_t = 1000)]
    hits_max_iterations: usize,
}

/// Flags override the config file key by key.
#[derive(Args, Debug, Default)]
struct PipelineArgs {
    /// `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory of raw block files; excludes --edges.
    #[arg(long)]
    blocks_dir: Option<PathBuf>,
    /// Edge-list CSV; excludes --blocks-dir.
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Report bundle directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// CSV `date_iso8601,value` of the USD price.
    #[arg(long)]
    price: Option<PathBuf>,
    /// CSV `date_iso8601,value` of the mining difficulty.
    #[arg(long)]
    difficulty: Option<PathBuf>,
    /// Null-model tail probability [default: 0.01].
    #[arg(long)]
    p_value: Option<f64>,
    /// Master seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Population grid step in days [default: 14].
    #[arg(long)]
    grid_step_days: Option<u32>,
    /// PageRank damping [default: 0.85].
    #[arg(long)]
    damping: Option<f64>,
    /// PageRank L1 tolerance [default: 1e-10].
    #[arg(long)]
    tolerance: Option<f64>,
    /// PageRank iteration cap [default: 200].
    #[arg(long)]
    max_iterations: Option<usize>,
    /// multiplicity or value [default: multiplicity].
    #[arg(long)]
    pagerank_weighting: Option<EdgeWeighting>,
    /// HITS L1 tolerance [default: 1e-10].
    #[arg(long)]
    hits_tolerance: Option<f64>,
    /// HITS iteration cap [default: 1000].
    #[arg(long)]
    hits_max_iterations: Option<usize>,
    /// strict or skip [default: strict].
    #[arg(long)]
    ingest_mode: Option<IngestMode>,
    /// Smallest reuse count in the power-law fit [default: 1].
    #[arg(long)]
    r_min: Option<u64>,
    /// Time slices of the reuse histogram [default: 3].
    #[arg(long)]
    reuse_parts: Option<usize>,
}

impl PipelineArgs {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            blocks_dir: self.blocks_dir.clone(),
            edges_file: self.edges.clone(),
            out_dir: self.out_dir.clone(),
            price_file: self.price.clone(),
            difficulty_file: self.difficulty.clone(),
            p_value: self.p_value,
            seed: self.seed,
            grid_step_days: self.grid_step_days,
            damping: self.damping,
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            pagerank_weighting: self.pagerank_weighting,
            hits_tolerance: self.hits_tolerance,
            hits_max_iterations: self.hits_max_iterations,
            ingest_mode: self.ingest_mode,
            r_min: self.r_min,
            reuse_parts: self.reuse_parts,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
