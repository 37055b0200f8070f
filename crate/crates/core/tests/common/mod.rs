#![allow(dead_code)]

use pdla::apps::FlowNetwork;
use pdla::instance::{ConstraintSource, CoveringLpInstance, CoveringSdpInstance, SparseRow};
use pdla::SymMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random sparse covering LP. Entries are log-uniform in `[0.05, 5]` so
/// column condition numbers vary; boxed rows are rescaled to sum at least 1.2.
pub fn random_lp(r: &mut ChaCha8Rng, n: usize, m: usize, boxed: bool) -> CoveringLpInstance {
    let c: Vec<f64> = (0..n).map(|_| r.gen_range(0.1..10.0)).collect();
    let rows = (0..m)
        .map(|_| {
            let support = r.gen_range(1..=n.min(8));
            let mut cols: Vec<usize> = (0..n).collect();
            for k in 0..support {
                let pick = r.gen_range(k..n);
                cols.swap(k, pick);
            }
            let mut entries: Vec<(usize, f64)> =
                cols[..support].iter().map(|&j| (j, 10f64.powf(r.gen_range(-1.3..0.7)))).collect();
            if boxed {
                let sum: f64 = entries.iter().map(|e| e.1).sum();
                if sum < 1.2 {
                    entries.iter_mut().for_each(|e| e.1 *= 1.2 / sum);
                }
            }
            SparseRow::new(entries)
        })
        .collect();
    CoveringLpInstance::new(c, rows, boxed).unwrap()
}

/// Feasible advice: a random positive vector rescaled to cover every row.
pub fn feasible_advice(r: &mut ChaCha8Rng, inst: &CoveringLpInstance) -> Vec<f64> {
    if inst.boxed {
        return vec![1.0; inst.n];
    }
    let v: Vec<f64> = (0..inst.n).map(|_| r.gen_range(0.05..1.0)).collect();
    let min_row = inst.min_row_value(&v);
    v.iter().map(|x| x / min_row * 1.0000001).collect()
}

/// Advice that leaves some rows uncovered (typically).
pub fn random_advice(r: &mut ChaCha8Rng, n: usize, boxed: bool) -> Vec<f64> {
    (0..n).map(|_| if r.gen_bool(0.5) { 0.0 } else { r.gen_range(0.0..if boxed { 1.0 } else { 2.0 }) }).collect()
}

/// The diagonal SDP whose `k`-th diagonal entry is LP row `k`; `B^(i)`
/// switches on the first `i` coordinates.
pub fn diagonal_sdp(inst: &CoveringLpInstance) -> CoveringSdpInstance {
    let d = inst.rows.len();
    let dense: Vec<Vec<f64>> = inst.rows.iter().map(|r| r.to_dense(inst.n)).collect();
    let a = (0..inst.n).map(|j| SymMatrix::from_diag(&dense.iter().map(|row| row[j]).collect::<Vec<_>>())).collect();
    let b = (1..=d).map(|i| SymMatrix::from_diag(&(0..d).map(|k| if k < i { 1.0 } else { 0.0 }).collect::<Vec<_>>())).collect();
    CoveringSdpInstance::new(inst.c.clone(), a, b, inst.boxed).unwrap()
}

/// Oracle returning the most violated of the first `revealed` rows (lowest
/// index on ties), or `None` once every row is within `slack` of 1.
pub fn most_violated<'a>(rows: &'a [SparseRow], revealed: usize, slack: f64) -> ConstraintSource<'a> {
    ConstraintSource::oracle(move |x: &[f64]| {
        let mut best: Option<(f64, usize)> = None;
        for (k, row) in rows[..revealed].iter().enumerate() {
            let gap = row.dot(x) - 1.0;
            if gap < -slack && best.is_none_or(|(g, _)| gap < g) {
                best = Some((gap, k));
            }
        }
        Ok(best.map(|(_, k)| rows[k].clone()))
    })
}

/// Random PSD matrix `G Gᵀ + shift·I`.
pub fn random_psd(r: &mut ChaCha8Rng, d: usize, rank: usize, shift: f64) -> SymMatrix {
    let mut m = SymMatrix::identity(d).scaled(shift);
    for _ in 0..rank {
        let v: Vec<f64> = (0..d).map(|_| r.gen_range(-1.0..1.0)).collect();
        m.add_scaled(&SymMatrix::outer(&v), 1.0).unwrap();
    }
    m
}

/// Dense SDP with full-rank `A_j` and a nondecreasing `B` stream.
pub fn random_sdp(r: &mut ChaCha8Rng, n: usize, d: usize, rounds: usize, boxed: bool) -> CoveringSdpInstance {
    let c: Vec<f64> = (0..n).map(|_| r.gen_range(0.5..5.0)).collect();
    let shift = if boxed { 1.0 } else { 0.1 };
    let a: Vec<SymMatrix> = (0..n).map(|_| random_psd(r, d, 2, shift)).collect();
    let mut b = Vec::new();
    let mut acc = SymMatrix::zeros(d);
    for _ in 0..rounds {
        let v: Vec<f64> = (0..d).map(|_| r.gen_range(-1.0..1.0)).collect();
        let scale = if boxed { 0.3 / d as f64 } else { 1.0 };
        acc.add_scaled(&SymMatrix::outer(&v), scale).unwrap();
        b.push(acc.clone());
    }
    CoveringSdpInstance::new(c, a, b, boxed).unwrap()
}

/// Minimum `s`-`t` cut by enumerating every vertex bipartition.
pub fn brute_force_min_cut(net: &FlowNetwork, s: usize, t: usize) -> f64 {
    let others: Vec<usize> = (0..net.nodes).filter(|&v| v != s && v != t).collect();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << others.len()) {
        let mut source_side = vec![false; net.nodes];
        source_side[s] = true;
        for (k, &v) in others.iter().enumerate() {
            source_side[v] = mask >> k & 1 == 1;
        }
        let cut: f64 = net.arcs.iter().filter(|a| source_side[a.from] && !source_side[a.to]).map(|a| a.cap).sum();
        best = best.min(cut);
    }
    best
}

/// Covering LP optimum by enumerating vertices of the feasible polyhedron.
/// Only for tiny instances.
pub fn brute_force_opt(inst: &CoveringLpInstance) -> Option<f64> {
    let n = inst.n;
    // every constraint as (coefficients, rhs) with the sense `a·x >= rhs`
    let mut cons: Vec<(Vec<f64>, f64)> = inst.rows.iter().map(|r| (r.to_dense(n), 1.0)).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cons.push((e.clone(), 0.0));
        if inst.boxed {
            cons.push((e.iter().map(|v| -v).collect(), -inst.upper_bound(j)));
        }
    }
    let mut best: Option<f64> = None;
    let mut pick = Vec::with_capacity(n);
    enumerate(&cons, n, 0, &mut pick, &mut |idx| {
        let a: Vec<Vec<f64>> = idx.iter().map(|&k| cons[k].0.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&k| cons[k].1).collect();
        if let Some(x) = solve_linear(a, b) {
            let ok = cons.iter().all(|(row, rhs)| row.iter().zip(&x).map(|(a, x)| a * x).sum::<f64>() >= rhs - 1e-9);
            if ok {
                let v = inst.cost(&x);
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
    });
    best
}

fn enumerate(cons: &[(Vec<f64>, f64)], n: usize, start: usize, pick: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if pick.len() == n {
        f(pick);
        return;
    }
    for k in start..cons.len() {
        pick.push(k);
        enumerate(cons, n, k + 1, pick, f);
        pick.pop();
    }
}

/// Gaussian elimination with partial pivoting; `None` if singular.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for i in col + 1..n {
            let f = a[i][col] / a[col][col];
            for k in col..n {
                a[i][k] -= f * a[col][k];
            }
            b[i] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Spearman rank correlation (average ranks on ties).
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut r = vec![0.0; v.len()];
        let mut k = 0;
        while k < idx.len() {
            let mut e = k;
            while e + 1 < idx.len() && v[idx[e + 1]] == v[idx[k]] {
                e += 1;
            }
            for &i in &idx[k..=e] {
                r[i] = (k + e) as f64 / 2.0 + 1.0;
            }
            k = e + 1;
        }
        r
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let mean = (a.len() as f64 + 1.0) / 2.0;
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - mean) * (y - mean)).sum();
    let va: f64 = ra.iter().map(|x| (x - mean).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mean).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        return 0.0;
    }
    cov / (va * vb).sqrt()
}
