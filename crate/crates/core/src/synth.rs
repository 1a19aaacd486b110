//! Synthetic networks with planted roles, used as end-to-end fixtures.
//!
//! The background is two random Hamiltonian cycles, so every node starts
//! with in-degree = out-degree = 2 and small values. Four disjoint groups
//! are then planted on top:
//!
//! - miners send `miner_fanout` large payments to collectors and receive
//!   the same number of small payments back, so only their value balance
//!   is skewed;
//! - customers pay `seller_in_degree` distinct sellers each through a
//!   random regular bipartite graph, skewing the degree balance of both
//!   sides;
//! - each seller's total income is set to `C * pagerank^k` after the
//!   structure is fixed, so earnings are exactly log-linear in PageRank.

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::analytics::{pagerank, AnalyticsError, PageRankConfig};
use crate::blockparse::{
    double_sha256, p2pkh_script, Address, Block, BlockHeader, Hash256, OutPoint, RawTransaction,
    TxIn, TxOut, COINBASE_VOUT,
};
use crate::nullmodel::{derive_seed, rng_from_seed, ModelRng, SATOSHI_PER_BTC};
use crate::roles::{Role, RoleLabel};
use crate::txgraph::{Edge, NodeId, TxGraph};

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedConfig {
    pub nodes: usize,
    /// Size of each planted role group.
    pub per_role: usize,
    pub miner_fanout: usize,
    pub seller_in_degree: usize,
    /// Value of each miner → collector payment, satoshi.
    pub big_value: u64,
    /// Background values are uniform in this inclusive range, satoshi.
    pub background_values: (u64, u64),
    pub earnings_exponent: f64,
    /// Income of the highest-ranked seller, satoshi.
    pub max_earnings: u64,
    pub start_ts: i64,
    pub end_ts: i64,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            nodes: 10_000,
            per_role: 250,
            miner_fanout: 4,
            seller_in_degree: 10,
            big_value: 1_000_000,
            background_values: (100, 1_000),
            earnings_exponent: 1.5,
            max_earnings: 200_000,
            // 2010-01-01 .. 2014-12-31 UTC
            start_ts: 1_262_304_000,
            end_ts: 1_419_984_000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("{nodes} nodes cannot hold 4 groups of {per_role}")]
    TooFewNodes { nodes: usize, per_role: usize },
    #[error("invalid planted configuration: {0}")]
    BadConfig(String),
    #[error("seller {node} would earn {target} satoshi but already receives {floor}; raise max_earnings")]
    EarningsTooSmall { node: NodeId, target: u64, floor: u64 },
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
}

/// A generated network and its ground truth, indexed by node id.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedNetwork {
    pub graph: TxGraph,
    pub truth: Vec<RoleLabel>,
    /// PageRank (default configuration) the seller earnings were built from.
    pub pagerank: Vec<f64>,
}

impl PlantedNetwork {
    pub fn members(&self, role: Role) -> Vec<NodeId> {
        (0..self.truth.len() as NodeId)
            .filter(|&n| self.truth[n as usize].has(role))
            .collect()
    }

    /// CSV `user_id,miner,collector,customer,seller` with 0/1 flags.
    pub fn write_truth_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["user_id", "miner", "collector", "customer", "seller"])?;
        for (node, label) in self.truth.iter().enumerate() {
            let mut rec = vec![self.graph.external_id(node as NodeId).to_string()];
            rec.extend(Role::ALL.iter().map(|&r| u8::from(label.has(r)).to_string()));
            wtr.write_record(rec)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub fn planted_network(cfg: &PlantedConfig) -> Result<PlantedNetwork, SynthError> {
    let n = cfg.nodes;
    if cfg.per_role == 0 || n < 4 * cfg.per_role || n < 2 {
        return Err(SynthError::TooFewNodes {
            nodes: n,
            per_role: cfg.per_role,
        });
    }
    if 2 * cfg.seller_in_degree > cfg.per_role || cfg.miner_fanout > cfg.per_role {
        return Err(SynthError::BadConfig(
            "seller in-degree must be at most half the group size".into(),
        ));
    }
    if cfg.start_ts > cfg.end_ts || cfg.background_values.0 > cfg.background_values.1 {
        return Err(SynthError::BadConfig("empty timestamp or value range".into()));
    }
    if !(cfg.earnings_exponent > 0.0) {
        return Err(SynthError::BadConfig("earnings exponent must be positive".into()));
    }

    let mut rng = rng_from_seed(derive_seed(cfg.seed, "synth.structure"));
    let mut order: Vec<NodeId> = (0..n as NodeId).collect();
    order.shuffle(&mut rng);
    let group = |k: usize| &order[k * cfg.per_role..(k + 1) * cfg.per_role];
    let (miners, collectors, customers, sellers) = (group(0), group(1), group(2), group(3));

    let mut truth = vec![RoleLabel::default(); n];
    for (role, members) in [
        (Role::Miner, miners),
        (Role::Collector, collectors),
        (Role::Customer, customers),
        (Role::Seller, sellers),
    ] {
        for &v in members {
            truth[v as usize].set(role, true);
        }
    }

    let (lo, hi) = cfg.background_values;
    let mut edges = Vec::new();
    let edge = |rng: &mut ModelRng, src: NodeId, dst: NodeId, value: u64| Edge {
        src,
        dst,
        value,
        timestamp: rng.random_range(cfg.start_ts..=cfg.end_ts),
    };

    for _ in 0..2 {
        let mut cycle: Vec<NodeId> = (0..n as NodeId).collect();
        cycle.shuffle(&mut rng);
        for i in 0..n {
            let v = rng.random_range(lo..=hi);
            edges.push(edge(&mut rng, cycle[i], cycle[(i + 1) % n], v));
        }
    }
    let k = cfg.per_role;
    for i in 0..k {
        for j in 0..cfg.miner_fanout {
            let big = edge(&mut rng, miners[i], collectors[(i + j) % k], cfg.big_value);
            edges.push(big);
            let v = rng.random_range(lo..=hi);
            edges.push(edge(&mut rng, collectors[i], miners[(i + j) % k], v));
        }
    }
    // Customer payments get their values once PageRank is known.
    let mut purchase = vec![false; edges.len()];
    for slot in regular_assignment(&mut rng, k, cfg.seller_in_degree) {
        for (i, &j) in slot.iter().enumerate() {
            edges.push(edge(&mut rng, customers[i], sellers[j], 0));
            purchase.push(true);
        }
    }
    let mut tagged: Vec<(Edge, bool)> = edges.into_iter().zip(purchase).collect();
    tagged.sort_by_key(|(e, _)| (e.timestamp, e.src, e.dst));
    let (edges, purchase): (Vec<Edge>, Vec<bool>) = tagged.into_iter().unzip();

    let graph = TxGraph::with_plain_ids(n, edges).expect("generated edges are valid");
    let pr = pagerank(&graph, &PageRankConfig::default())?;

    let peak = sellers
        .iter()
        .map(|&s| pr[s as usize].powf(cfg.earnings_exponent))
        .fold(0.0f64, f64::max);
    let scale = cfg.max_earnings as f64 / peak;
    let mut values: Vec<u64> = graph.edges().iter().map(|e| e.value).collect();
    for &s in sellers {
        let target = (scale * pr[s as usize].powf(cfg.earnings_exponent)).round() as u64;
        let mut floor = 0u64;
        let mut slots = Vec::new();
        for (idx, e) in graph.edges().iter().enumerate() {
            if e.dst != s {
                continue;
            }
            if purchase[idx] {
                slots.push(idx);
            } else {
                floor += e.value;
            }
        }
        let need = floor + slots.len() as u64;
        if target < need {
            return Err(SynthError::EarningsTooSmall {
                node: s,
                target,
                floor: need,
            });
        }
        let spread = target - floor;
        let each = spread / slots.len() as u64;
        for &idx in &slots {
            values[idx] = each;
        }
        values[slots[0]] += spread - each * slots.len() as u64;
    }

    Ok(PlantedNetwork {
        graph: graph.with_values(&values),
        truth,
        pagerank: pr,
    })
}

/// `d` permutations of `0..k` such that no index meets the same image
/// twice: a random `d`-regular bipartite graph between two sides of size
/// `k`. Conflicts in a fresh permutation are repaired by random swaps that
/// keep both positions conflict-free.
fn regular_assignment(rng: &mut ModelRng, k: usize, d: usize) -> Vec<Vec<usize>> {
    let mut used = vec![Vec::with_capacity(d); k];
    let mut out = Vec::with_capacity(d);
    for _ in 0..d {
        let mut perm: Vec<usize> = (0..k).collect();
        perm.shuffle(rng);
        let clash = |used: &[Vec<usize>], i: usize, v: usize| used[i].contains(&v);
        for i in 0..k {
            while clash(&used, i, perm[i]) {
                let r = rng.random_range(0..k);
                if !clash(&used, r, perm[i]) && !clash(&used, i, perm[r]) {
                    perm.swap(i, r);
                }
            }
        }
        for (i, &v) in perm.iter().enumerate() {
            used[i].push(v);
        }
        out.push(perm);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub wallets: usize,
    pub blocks: usize,
    /// Non-coinbase transactions per block (fewer if wallets run dry).
    pub txs_per_block: usize,
    /// Probability that change goes back to an address the payer already
    /// used instead of a fresh one.
    pub change_reuse: f64,
    /// Probability that a transaction carries an extra non-P2PKH output.
    pub data_output: f64,
    pub start_ts: u32,
    pub seed: u64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            wallets: 20,
            blocks: 30,
            txs_per_block: 6,
            change_reuse: 0.3,
            data_output: 0.1,
            // 2011-01-01 UTC
            start_ts: 1_293_840_000,
            seed: 1,
        }
    }
}

/// Blocks of a simulated economy plus the wallet that owns every address.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticChain {
    pub blocks: Vec<Block>,
    pub owner: BTreeMap<Address, usize>,
}

impl SyntheticChain {
    /// All blocks as one raw block file.
    pub fn block_file(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for b in &self.blocks {
            b.write_record(&mut out);
        }
        out
    }
}

/// Simulates wallets that mine, pay each other and take change. Every
/// block pays 50 BTC to a fresh address of one wallet; each transfer spends
/// one to three outputs of a single wallet, so the common-input heuristic
/// can only ever merge addresses of the same wallet.
pub fn synthetic_chain(cfg: &ChainConfig) -> SyntheticChain {
    assert!(cfg.wallets >= 2, "need at least two wallets");
    let mut rng = rng_from_seed(derive_seed(cfg.seed, "synth.chain"));
    let mut owner = BTreeMap::new();
    let mut used: Vec<Vec<Address>> = vec![Vec::new(); cfg.wallets];
    let mut utxos: Vec<Vec<(OutPoint, u64)>> = vec![Vec::new(); cfg.wallets];
    let fresh = |rng: &mut ModelRng, wallet: usize, owner: &mut BTreeMap<Address, usize>| {
        let addr = Address { hash160: rng.random() };
        owner.insert(addr, wallet);
        addr
    };
    let mut blocks: Vec<Block> = Vec::with_capacity(cfg.blocks);
    let mut prev_hash = Hash256::ZERO;
    for height in 0..cfg.blocks {
        let miner = height % cfg.wallets;
        let reward_to = fresh(&mut rng, miner, &mut owner);
        used[miner].push(reward_to);
        let coinbase = RawTransaction::new(
            1,
            vec![TxIn {
                prev_txid: Hash256::ZERO,
                prev_vout: COINBASE_VOUT,
                script_sig: (height as u64).to_le_bytes().to_vec(),
                sequence: u32::MAX,
            }],
            vec![TxOut::new(50 * SATOSHI_PER_BTC, p2pkh_script(&reward_to))],
            0,
        );
        utxos[miner].push((OutPoint { txid: coinbase.txid, vout: 0 }, 50 * SATOSHI_PER_BTC));
        let mut txs = vec![coinbase];
        for _ in 0..cfg.txs_per_block {
            let funded: Vec<usize> = (0..cfg.wallets).filter(|&w| !utxos[w].is_empty()).collect();
            if funded.is_empty() {
                break;
            }
            let payer = funded[rng.random_range(0..funded.len())];
            let payee = (payer + rng.random_range(1..cfg.wallets)) % cfg.wallets;
            utxos[payer].shuffle(&mut rng);
            let take = rng.random_range(1..=3).min(utxos[payer].len());
            let spent: Vec<(OutPoint, u64)> = utxos[payer].drain(..take).collect();
            let total: u64 = spent.iter().map(|s| s.1).sum();
            let pay = rng.random_range(1..=total);
            let to = fresh(&mut rng, payee, &mut owner);
            used[payee].push(to);
            let mut outputs = vec![TxOut::new(pay, p2pkh_script(&to))];
            if total > pay {
                let change = if !used[payer].is_empty() && rng.random_bool(cfg.change_reuse) {
                    used[payer][rng.random_range(0..used[payer].len())]
                } else {
                    let a = fresh(&mut rng, payer, &mut owner);
                    used[payer].push(a);
                    a
                };
                outputs.push(TxOut::new(total - pay, p2pkh_script(&change)));
            }
            if rng.random_bool(cfg.data_output) {
                outputs.push(TxOut::new(0, vec![0x6A, 0x04, 0xDE, 0xAD, 0xBE, 0xEF]));
            }
            let inputs = spent
                .iter()
                .map(|(op, _)| TxIn {
                    prev_txid: op.txid,
                    prev_vout: op.vout,
                    script_sig: vec![0x51],
                    sequence: u32::MAX,
                })
                .collect();
            let tx = RawTransaction::new(1, inputs, outputs, 0);
            for (vout, out) in tx.outputs.iter().enumerate() {
                if let Some(a) = out.address {
                    let w = owner[&a];
                    utxos[w].push((OutPoint { txid: tx.txid, vout: vout as u32 }, out.value));
                }
            }
            txs.push(tx);
        }
        let header = BlockHeader {
            version: 1,
            prev_hash,
            merkle_root: merkle_root(&txs),
            time: cfg.start_ts + 600 * height as u32,
            bits: 0x1d00_ffff,
            nonce: rng.random(),
        };
        prev_hash = header.hash();
        blocks.push(Block {
            height_hint: Some(height as u64),
            header,
            transactions: txs,
        });
    }
    SyntheticChain { blocks, owner }
}

/// Bitcoin merkle root: pairwise double SHA-256, duplicating the last hash
/// of an odd level.
fn merkle_root(txs: &[RawTransaction]) -> Hash256 {
    let mut level: Vec<Hash256> = txs.iter().map(|t| t.txid).collect();
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|pair| {
                let mut buf = pair[0].0.to_vec();
                buf.extend_from_slice(&pair[pair.len() - 1].0);
                Hash256(double_sha256(&buf))
            })
            .collect();
    }
    level.first().copied().unwrap_or(Hash256::ZERO)
}

/// A positive random-walk series sampled every `step` seconds over
/// `[start, end]`, e.g. a stand-in price history.
pub fn synthetic_series(start: i64, end: i64, step: i64, seed: u64) -> Vec<(i64, f64)> {
    assert!(step > 0, "step must be positive");
    let mut rng = rng_from_seed(derive_seed(seed, "synth.series"));
    let mut level = 100.0f64;
    let mut out = Vec::new();
    let mut t = start;
    while t <= end {
        out.push((t, level));
        level *= 1.0 + rng.random_range(-0.05..0.06);
        t += step;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::txgraph::node_metrics;

    fn small() -> PlantedConfig {
        PlantedConfig {
            nodes: 1_000,
            per_role: 40,
            ..PlantedConfig::default()
        }
    }

    #[test]
    fn groups_are_disjoint_and_sized() {
        let net = planted_network(&small()).unwrap();
        for role in Role::ALL {
            assert_eq!(net.members(role).len(), 40);
        }
        assert!(net.truth.iter().all(|l| l.roles().count() <= 1));
    }

    #[test]
    fn planted_balances() {
        let cfg = small();
        let net = planted_network(&cfg).unwrap();
        let m = node_metrics(&net.graph);
        for v in 0..cfg.nodes {
            let l = net.truth[v];
            let (din, dout) = (m[v].in_degree, m[v].out_degree);
            if l.has(Role::Customer) {
                assert_eq!((din, dout), (2, 12));
            } else if l.has(Role::Seller) {
                assert_eq!((din, dout), (12, 2));
            } else if l.has(Role::Miner) || l.has(Role::Collector) {
                assert_eq!((din, dout), (6, 6));
            } else {
                assert_eq!((din, dout), (2, 2));
            }
        }
    }

    #[test]
    fn seller_income_follows_pagerank() {
        let cfg = small();
        let net = planted_network(&cfg).unwrap();
        let m = node_metrics(&net.graph);
        let sellers = net.members(Role::Seller);
        let peak = sellers
            .iter()
            .map(|&s| net.pagerank[s as usize].powf(cfg.earnings_exponent))
            .fold(0.0, f64::max);
        for s in sellers {
            let want = cfg.max_earnings as f64 * net.pagerank[s as usize].powf(cfg.earnings_exponent) / peak;
            assert_eq!(m[s as usize].in_value, want.round() as u64);
        }
        // Values do not change the multiplicity-weighted PageRank.
        assert_eq!(pagerank(&net.graph, &PageRankConfig::default()).unwrap(), net.pagerank);
    }

    #[test]
    fn deterministic() {
        assert_eq!(planted_network(&small()).unwrap(), planted_network(&small()).unwrap());
        let other = PlantedConfig { seed: 2, ..small() };
        assert_ne!(planted_network(&small()).unwrap().graph, planted_network(&other).unwrap().graph);
    }

    #[test]
    fn genesis_merkle_root() {
        let g = crate::blockparse::genesis_block();
        assert_eq!(merkle_root(&g.transactions), g.header.merkle_root);
    }

    #[test]
    fn chain_is_consistent() {
        let chain = synthetic_chain(&ChainConfig::default());
        assert_eq!(chain.blocks.len(), 30);
        for b in &chain.blocks {
            assert!(b.transactions[0].is_coinbase());
            assert_eq!(merkle_root(&b.transactions), b.header.merkle_root);
            let (parsed, used) = crate::blockparse::parse_block(&b.serialize()).unwrap();
            assert_eq!(used, b.serialize().len());
            assert_eq!(parsed.transactions, b.transactions);
        }
        for w in chain.blocks.windows(2) {
            assert_eq!(w[1].header.prev_hash, w[0].hash());
        }
    }

    #[test]
    fn rejects_tiny_networks() {
        let cfg = PlantedConfig { nodes: 100, per_role: 30, ..PlantedConfig::default() };
        assert!(matches!(planted_network(&cfg), Err(SynthError::TooFewNodes { .. })));
    }
}
