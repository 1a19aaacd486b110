//! Transaction-graph analytics over the Bitcoin block chain.
//!
//! The pipeline runs raw block files through [`blockparse`], groups addresses
//! into users with [`cluster`], builds a user-level [`txgraph`], derives
//! significance cutoffs from an Erdős–Rényi [`nullmodel`], labels users with
//! economic [`roles`], and computes reuse, centrality and correlation
//! statistics in [`analytics`]. [`pipeline`] wires the stages together and
//! writes CSV reports.

pub mod blockparse;
pub mod cluster;
pub mod txgraph;
pub mod nullmodel;
pub mod roles;
pub mod analytics;
pub mod synth;
pub mod pipeline;
