//! Seeded instance generators, advice corruption and graph ingestion.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::apps::SetSystem;
use crate::error::{Error, Result};
use crate::instance::{CoveringLpInstance, SparseRow};

/// SplitMix64 finaliser; derives independent stream seeds from one base seed.
pub fn derive_seed(base: u64, a: u64, b: u64) -> u64 {
    let mut z = base ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Cost uniform in `(0, 1]` times `scale`.
fn cost(r: &mut ChaCha8Rng, scale: f64) -> f64 {
    (1.0 - r.gen::<f64>()) * scale
}

/// Dense `n x n` instance with uniform {0,1} entries (zero rows resampled) and
/// costs uniform in `(0, 1]` times `cost_scale`.
pub fn gen_synthetic(n: usize, seed: u64, cost_scale: f64) -> CoveringLpInstance {
    gen_synthetic_with(n, 0.5, seed, cost_scale)
}

/// As [`gen_synthetic`] with each entry equal to 1 with probability `density`.
pub fn gen_synthetic_with(n: usize, density: f64, seed: u64, cost_scale: f64) -> CoveringLpInstance {
    let mut r = rng(seed);
    let c = (0..n).map(|_| cost(&mut r, cost_scale)).collect();
    let rows = (0..n)
        .map(|_| loop {
            let cols: Vec<usize> = (0..n).filter(|_| r.gen::<f64>() < density).collect();
            if !cols.is_empty() {
                break SparseRow::indicator(cols);
            }
        })
        .collect();
    CoveringLpInstance { n, c, rows, boxed: false, upper: None }
}

/// Zeroes each coordinate independently with probability `p`.
pub fn corrupt_advice(x: &[f64], p: f64, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    x.iter().map(|&v| if r.gen::<f64>() < p { 0.0 } else { v }).collect()
}

/// Toggles `flips` distinct uniformly chosen cells of a 0/1 instance, then
/// gives each emptied row one random set bit.
pub fn drift_instance(inst: &CoveringLpInstance, flips: usize, seed: u64) -> CoveringLpInstance {
    let n = inst.n;
    let m = inst.rows.len();
    let mut dense: Vec<Vec<bool>> =
        inst.rows.iter().map(|row| row.to_dense(n).into_iter().map(|v| v > 0.0).collect()).collect();
    let mut r = rng(seed);
    let cells = n * m;
    if cells > 0 {
        for cell in sample(&mut r, cells, flips.min(cells)).into_iter() {
            let (i, j) = (cell / n, cell % n);
            dense[i][j] = !dense[i][j];
        }
    }
    for row in dense.iter_mut() {
        if !row.iter().any(|&b| b) {
            let j = r.gen_range(0..n);
            row[j] = true;
        }
    }
    let rows = dense
        .into_iter()
        .map(|row| SparseRow::indicator(row.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j)))
        .collect();
    CoveringLpInstance { n, c: inst.c.clone(), rows, boxed: inst.boxed, upper: inst.upper.clone() }
}

/// Vertex cover as set cover: one set per vertex, one element per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeListSystem {
    pub system: SetSystem,
    /// Vertex label of each set.
    pub labels: Vec<u64>,
    pub self_loops_skipped: usize,
}

/// Reads whitespace-separated `u v` lines; `#` starts a comment. Duplicate
/// edges are dropped. Vertex costs are uniform in `(0, 1]` times `cost_scale`,
/// seeded per vertex label so that snapshots agree on shared vertices.
pub fn ingest_edge_list(path: &Path, cost_scale: f64, seed: u64) -> Result<EdgeListSystem> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text, cost_scale, seed)
}

pub fn parse_edge_list(text: &str, cost_scale: f64, seed: u64) -> Result<EdgeListSystem> {
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut seen = BTreeSet::new();
    let mut memberships = Vec::new();
    let mut self_loops_skipped = 0;
    for (k, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let bad = || Error::MalformedLine { line: k + 1, text: line.to_string() };
        let mut parts = body.split_whitespace();
        let u: u64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let v: u64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if parts.next().is_some() {
            return Err(bad());
        }
        if u == v {
            self_loops_skipped += 1;
            continue;
        }
        if !seen.insert((u.min(v), u.max(v))) {
            continue;
        }
        let mut id = |l: u64| {
            *index.entry(l).or_insert_with(|| {
                labels.push(l);
                labels.len() - 1
            })
        };
        let (a, b) = (id(u), id(v));
        memberships.push(vec![a, b]);
    }
    let costs = labels.iter().map(|&l| cost(&mut rng(derive_seed(seed, l, 0x5e7)), cost_scale)).collect();
    Ok(EdgeListSystem { system: SetSystem { costs, memberships }, labels, self_loops_skipped })
}
