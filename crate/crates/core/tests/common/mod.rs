//! Independent oracles and fixture builders shared by the integration tests.
//! Nothing here calls into the code under test.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sha256d(data: &[u8]) -> [u8; 32] {
    Sha256::digest(Sha256::digest(data)).into()
}

/// Plain-data transaction used by the reference serializer.
#[derive(Debug, Clone)]
pub struct WireTx {
    pub version: i32,
    /// `(prev_txid, prev_vout, script_sig, sequence)`.
    pub inputs: Vec<([u8; 32], u32, Vec<u8>, u32)>,
    /// `(value, script_pubkey)`.
    pub outputs: Vec<(u64, Vec<u8>)>,
    pub lock_time: u32,
}

pub fn compact_size(n: u64, out: &mut Vec<u8>) {
    match n {
        0..=0xFC => out.push(n as u8),
        0xFD..=0xFFFF => {
            out.push(0xFD);
            out.extend((n as u16).to_le_bytes());
        }
        0x1_0000..=0xFFFF_FFFF => {
            out.push(0xFE);
            out.extend((n as u32).to_le_bytes());
        }
        _ => {
            out.push(0xFF);
            out.extend(n.to_le_bytes());
        }
    }
}

impl WireTx {
    pub fn bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend(self.version.to_le_bytes());
        compact_size(self.inputs.len() as u64, &mut out);
        for (txid, vout, script, seq) in &self.inputs {
            out.extend(txid);
            out.extend(vout.to_le_bytes());
            compact_size(script.len() as u64, &mut out);
            out.extend(script);
            out.extend(seq.to_le_bytes());
        }
        compact_size(self.outputs.len() as u64, &mut out);
        for (value, script) in &self.outputs {
            out.extend(value.to_le_bytes());
            compact_size(script.len() as u64, &mut out);
            out.extend(script);
        }
        out.extend(self.lock_time.to_le_bytes());
        out
    }

    pub fn txid(&self) -> [u8; 32] {
        sha256d(&self.bytes())
    }

    pub fn coinbase(tag: u32, outputs: Vec<(u64, Vec<u8>)>) -> WireTx {
        WireTx {
            version: 1,
            inputs: vec![([0; 32], u32::MAX, tag.to_le_bytes().to_vec(), u32::MAX)],
            outputs,
            lock_time: 0,
        }
    }
}

pub fn p2pkh(hash160: [u8; 20]) -> Vec<u8> {
    let mut s = vec![0x76, 0xA9, 0x14];
    s.extend(hash160);
    s.extend([0x88, 0xAC]);
    s
}

/// Hash160 stand-in that makes address `i` recognizable.
pub fn addr_hash(i: u32) -> [u8; 20] {
    let mut h = [0u8; 20];
    h[..4].copy_from_slice(&i.to_be_bytes());
    h[19] = 0xA5;
    h
}

/// Header (80 bytes) followed by the transactions.
pub fn block_bytes(prev: [u8; 32], time: u32, txs: &[WireTx]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend(1i32.to_le_bytes());
    out.extend(prev);
    out.extend([0x11; 32]);
    out.extend(time.to_le_bytes());
    out.extend(0x1d00ffffu32.to_le_bytes());
    out.extend(7u32.to_le_bytes());
    compact_size(txs.len() as u64, &mut out);
    for tx in txs {
        out.extend(tx.bytes());
    }
    out
}

pub fn record(payload: &[u8]) -> Vec<u8> {
    let mut out = vec![0xF9, 0xBE, 0xB4, 0xD9];
    out.extend((payload.len() as u32).to_le_bytes());
    out.extend(payload);
    out
}

/// Canonical form of a partition: the set of its sorted blocks.
pub type Partition<T> = BTreeSet<Vec<T>>;

/// Connected components of `0..n` where every set in `cliques` is fully
/// connected, found by breadth-first search over an explicit adjacency list.
pub fn bfs_components(n: usize, cliques: &[Vec<u32>]) -> Partition<u32> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for set in cliques {
        for &a in set {
            for &b in set {
                if a != b {
                    adj[a as usize].push(b as usize);
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut out = BTreeSet::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start as u32];
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w as u32);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.insert(comp);
    }
    out
}

/// Random directed multigraph without self loops: `(src, dst)` pairs.
pub fn random_pairs(rng: &mut impl Rng, n: usize, m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        let s = rng.random_range(0..n);
        let d = rng.random_range(0..n);
        if s != d {
            out.push((s, d));
        }
    }
    out
}

/// PageRank by dense matrix power iteration. Column-stochastic `M` with
/// dangling columns uniform; iterates to a fixed point at machine precision.
pub fn dense_pagerank(n: usize, pairs: &[(usize, usize)], weights: &[f64], d: f64) -> Vec<f64> {
    let mut w = vec![vec![0.0; n]; n];
    for (&(s, t), &x) in pairs.iter().zip(weights) {
        w[t][s] += x;
    }
    let mut m = vec![vec![0.0; n]; n];
    for s in 0..n {
        let col: f64 = (0..n).map(|t| w[t][s]).sum();
        for t in 0..n {
            m[t][s] = if col > 0.0 { w[t][s] / col } else { 1.0 / n as f64 };
        }
    }
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..100_000 {
        let next: Vec<f64> = (0..n)
            .map(|t| (1.0 - d) / n as f64 + d * (0..n).map(|s| m[t][s] * x[s]).sum::<f64>())
            .collect();
        let delta: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if delta < 1e-15 {
            break;
        }
    }
    x
}

fn normalized(v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Principal eigenvectors of `AᵀA` (authorities) and `AAᵀ` (hubs) by
/// power iteration on the explicit products, started from `Aᵀ1` and `A1`.
pub fn dense_hits(n: usize, pairs: &[(usize, usize)]) -> (Vec<f64>, Vec<f64>) {
    let mut a = vec![vec![0.0; n]; n];
    for &(s, t) in pairs {
        a[s][t] += 1.0;
    }
    let at: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| a[i][j]).collect()).collect();
    let product = |x: &[Vec<f64>], y: &[Vec<f64>]| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| x[i][k] * y[k][j]).sum()).collect())
            .collect()
    };
    let ata = product(&at, &a);
    let aat = product(&a, &at);
    let power = |m: &[Vec<f64>], start: Vec<f64>| {
        let mut v = normalized(start);
        for _ in 0..200_000 {
            let next = normalized(mat_vec(m, &v));
            let delta: f64 = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
            v = next;
            if delta < 1e-15 {
                break;
            }
        }
        v
    };
    let ones = vec![1.0; n];
    let auth = power(&ata, mat_vec(&at, &ones));
    let hub = power(&aat, mat_vec(&a, &ones));
    (hub, auth)
}

/// Pearson by its definition: covariance over the product of standard
/// deviations, all with the `n - 1` normalization.
pub fn pearson_oracle(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (n - 1.0);
    let sx = (x.iter().map(|a| (a - mx).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let sy = (y.iter().map(|b| (b - my).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    cov / (sx * sy)
}

/// Nearest-rank percentile by full sort: the `ceil((100 - q) * n / 100)`-th
/// smallest value for `p = q / 100`, in integer arithmetic.
pub fn sorted_percentile(values: &[u64], p_percent: u64) -> u64 {
    let mut v = values.to_vec();
    v.sort_unstable();
    let n = v.len() as u64;
    let rank = ((100 - p_percent) * n).div_ceil(100).max(1);
    v[(rank - 1) as usize]
}

/// A random common-input clustering instance as raw block payloads.
pub struct ClusteringInstance {
    pub addresses: usize,
    /// Input address indices of every non-coinbase transaction.
    pub input_sets: Vec<Vec<u32>>,
    pub payloads: Vec<Vec<u8>>,
}

/// Block 0 funds every address (`addr_hash(i)`); later blocks hold up to
/// 50 transfers whose inputs spend those outputs, so every input resolves.
/// At most 500 addresses and 1,000 transfers.
pub fn clustering_instance(seed: u64) -> ClusteringInstance {
    let mut r = rng(seed);
    let n = r.random_range(2..=500usize);
    let t = r.random_range(1..=1000usize);
    let funding = WireTx::coinbase(0, (0..n as u32).map(|i| (1000, p2pkh(addr_hash(i)))).collect());
    let funding_id = funding.txid();
    let mut payloads = vec![block_bytes([0; 32], 1_300_000_000, &[funding])];
    let mut input_sets = Vec::new();
    let mut pending = Vec::new();
    for k in 0..t {
        let width = r.random_range(1..=4usize);
        let ins: Vec<u32> = (0..width).map(|_| r.random_range(0..n as u32)).collect();
        let outs: Vec<(u64, Vec<u8>)> = (0..r.random_range(1..=3))
            .map(|_| (r.random_range(1..500), p2pkh(addr_hash(r.random_range(0..n as u32)))))
            .collect();
        pending.push(WireTx {
            version: 1,
            inputs: ins.iter().map(|&a| (funding_id, a, vec![], u32::MAX)).collect(),
            outputs: outs,
            lock_time: k as u32,
        });
        input_sets.push(ins);
        if pending.len() == 50 || k + 1 == t {
            let h = payloads.len() as u32;
            let mut txs = vec![WireTx::coinbase(h, vec![(50, p2pkh(addr_hash(0)))])];
            txs.append(&mut pending);
            payloads.push(block_bytes([h as u8; 32], 1_300_000_000 + 600 * h, &txs));
        }
    }
    ClusteringInstance {
        addresses: n,
        input_sets,
        payloads,
    }
}

/// Inverse of [`addr_hash`].
pub fn addr_index(hash160: &[u8; 20]) -> u32 {
    u32::from_be_bytes(hash160[..4].try_into().unwrap())
}

/// A random legacy transaction with 1-4 inputs and 0-5 outputs; scripts
/// mix P2PKH, short data and long (3-byte length prefix) scripts.
pub fn random_wire_tx(r: &mut impl Rng) -> WireTx {
    fn script(r: &mut impl Rng) -> Vec<u8> {
        match r.random_range(0..6) {
            0..=2 => p2pkh(r.random()),
            3 | 4 => (0..r.random_range(0..80)).map(|_| r.random()).collect(),
            _ => (0..r.random_range(253..300)).map(|_| r.random()).collect(),
        }
    }
    WireTx {
        version: r.random(),
        inputs: (0..r.random_range(1..5))
            .map(|_| (r.random(), r.random(), script(r), r.random()))
            .collect(),
        outputs: (0..r.random_range(0..6))
            .map(|_| (r.random_range(0..=i64::MAX as u64), script(r)))
            .collect(),
        lock_time: r.random(),
    }
}
