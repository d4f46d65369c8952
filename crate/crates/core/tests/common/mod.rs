//! Slow, obviously-correct reference implementations used as test oracles.
//! Shared with the acceptance runner of the `pine` crate.
#![allow(dead_code, clippy::needless_range_loop)]

use pine_core::{AttributedGraph, FeatureMatrix, NodeId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Edge = (NodeId, NodeId);

/// Random simple digraph with features in [-1, 1).
pub fn random_graph(n: usize, p: f64, dim: usize, seed: u64) -> AttributedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * dim).map(|_| rng.random_range(-1.0f32..1.0)).collect();
    let mut edges = Vec::new();
    for s in 0..n {
        for d in 0..n {
            if s != d && rng.random_bool(p) {
                edges.push((s as NodeId, d as NodeId));
            }
        }
    }
    AttributedGraph::from_edges(FeatureMatrix::new(n, dim, data).unwrap(), &edges).unwrap()
}

pub fn edge_list(g: &AttributedGraph) -> Vec<Edge> {
    g.edges().collect()
}

/// Dense PageRank: repeated multiplication by the full Google matrix.
pub fn dense_pagerank(g: &AttributedGraph, damping: f64) -> Vec<f64> {
    let n = g.num_nodes();
    let mut m = vec![vec![0.0; n]; n];
    for j in 0..n {
        let out = g.out_neighbors(j as NodeId);
        for i in 0..n {
            let link = if out.is_empty() {
                1.0 / n as f64
            } else if out.contains(&(i as NodeId)) {
                1.0 / out.len() as f64
            } else {
                0.0
            };
            m[i][j] = damping * link + (1.0 - damping) / n as f64;
        }
    }
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..100_000 {
        let next: Vec<f64> = (0..n).map(|i| (0..n).map(|j| m[i][j] * x[j]).sum()).collect();
        let delta: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if delta < 1e-15 {
            break;
        }
    }
    x
}

/// Solves `a` x = `b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&r, &s| a[r][c].abs().total_cmp(&a[s][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Katz by a dense solve of `(I - aAᵀ) x = aAᵀ 1`, L2-normalized.
pub fn dense_katz(g: &AttributedGraph, a: f64) -> Vec<f64> {
    let n = g.num_nodes();
    let mut lhs = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        lhs[i][i] = 1.0;
    }
    for (j, i) in g.edges() {
        lhs[i as usize][j as usize] -= a;
        rhs[i as usize] += a;
    }
    let x = solve(lhs, rhs);
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return vec![1.0 / (n as f64).sqrt(); n];
    }
    x.iter().map(|v| v / norm).collect()
}

/// All simple paths from `s` to `t`, by depth-first enumeration.
fn simple_paths(g: &AttributedGraph, s: NodeId, t: NodeId) -> Vec<Vec<NodeId>> {
    fn go(g: &AttributedGraph, v: NodeId, t: NodeId, path: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        if v == t {
            out.push(path.clone());
            return;
        }
        for &w in g.out_neighbors(v) {
            if !path.contains(&w) {
                path.push(w);
                go(g, w, t, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(g, s, t, &mut vec![s], &mut out);
    out
}

/// Betweenness from explicit enumeration of all shortest paths.
pub fn brute_betweenness(g: &AttributedGraph) -> Vec<f64> {
    let n = g.num_nodes();
    let mut b = vec![0.0; n];
    for s in 0..n as NodeId {
        for t in 0..n as NodeId {
            if s == t {
                continue;
            }
            let paths = simple_paths(g, s, t);
            let Some(shortest) = paths.iter().map(|p| p.len()).min() else { continue };
            let best: Vec<_> = paths.iter().filter(|p| p.len() == shortest).collect();
            for p in &best {
                for &v in &p[1..p.len() - 1] {
                    b[v as usize] += 1.0 / best.len() as f64;
                }
            }
        }
    }
    if n > 2 {
        b.iter_mut().for_each(|v| *v /= ((n - 1) * (n - 2)) as f64);
    } else {
        b.fill(0.0);
    }
    b
}

/// All-pairs hop distances by Floyd–Warshall.
pub fn floyd(g: &AttributedGraph) -> Vec<Vec<Option<usize>>> {
    let n = g.num_nodes();
    let mut d = vec![vec![None; n]; n];
    for v in 0..n {
        d[v][v] = Some(0);
    }
    for (a, b) in g.edges() {
        d[a as usize][b as usize] = Some(1);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| x + y < c) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

pub fn floyd_closeness(g: &AttributedGraph) -> Vec<f64> {
    let n = g.num_nodes();
    floyd(g)
        .iter()
        .map(|row| {
            let reach: Vec<usize> = row.iter().flatten().copied().filter(|&x| x > 0).collect();
            if reach.is_empty() {
                0.0
            } else {
                let r = reach.len() as f64;
                (r / (n - 1) as f64) * (r / reach.iter().sum::<usize>() as f64)
            }
        })
        .collect()
}

/// Influence weights computed straight from the definition, keyed by edge.
pub fn influence_oracle(g: &AttributedGraph, a1: f64, a2: f64) -> Vec<(Edge, f64)> {
    let cos = |u: &[f32], v: &[f32]| {
        let dot: f64 = u.iter().zip(v).map(|(a, b)| *a as f64 * *b as f64).sum();
        let nu = u.iter().map(|a| (*a as f64).powi(2)).sum::<f64>().sqrt();
        let nv = v.iter().map(|a| (*a as f64).powi(2)).sum::<f64>().sqrt();
        if nu == 0.0 || nv == 0.0 {
            0.0
        } else {
            dot / (nu * nv)
        }
    };
    let mut out = Vec::new();
    for i in 0..g.num_nodes() as NodeId {
        let preds = g.in_neighbors(i);
        let z: f64 = preds.iter().map(|&j| cos(g.feature(j), g.feature(i)).exp()).sum();
        for &j in preds {
            let sem = cos(g.feature(j), g.feature(i)).exp() / z;
            out.push(((j, i), a1 / preds.len() as f64 + a2 * sem));
        }
    }
    out.sort_by_key(|a| a.0);
    out
}

fn reach(n: usize, live: &[Edge], seeds: &[NodeId]) -> usize {
    let mut on = vec![false; n];
    let mut stack: Vec<NodeId> = seeds.to_vec();
    for &s in seeds {
        on[s as usize] = true;
    }
    while let Some(v) = stack.pop() {
        for &(a, b) in live {
            if a == v && !on[b as usize] {
                on[b as usize] = true;
                stack.push(b);
            }
        }
    }
    on.iter().filter(|&&x| x).count()
}

/// Expected IC spread fraction: every edge is independently live with its
/// weight; sum reachability over all 2^M outcomes.
pub fn ic_exact(n: usize, weighted: &[(Edge, f64)], seeds: &[NodeId]) -> f64 {
    let m = weighted.len();
    assert!(m <= 20);
    let mut total = 0.0;
    for mask in 0u32..(1 << m) {
        let mut p = 1.0;
        let mut live = Vec::new();
        for (k, &(e, w)) in weighted.iter().enumerate() {
            if mask >> k & 1 == 1 {
                p *= w;
                live.push(e);
            } else {
                p *= 1.0 - w;
            }
        }
        total += p * reach(n, &live, seeds) as f64;
    }
    total / n as f64
}

/// Expected LT spread fraction via the live-edge equivalence: each node keeps
/// at most one in-edge, edge `e` with probability `w_e`, none with the rest.
pub fn lt_exact(n: usize, weighted: &[(Edge, f64)], seeds: &[NodeId]) -> f64 {
    let mut choices: Vec<Vec<(Option<Edge>, f64)>> = Vec::new();
    for i in 0..n as NodeId {
        let ins: Vec<(Edge, f64)> = weighted.iter().filter(|(e, _)| e.1 == i).copied().collect();
        let rest = 1.0 - ins.iter().map(|x| x.1).sum::<f64>();
        let mut c: Vec<(Option<Edge>, f64)> = ins.into_iter().map(|(e, w)| (Some(e), w)).collect();
        if rest > 1e-12 {
            c.push((None, rest));
        }
        choices.push(c);
    }
    let mut total = 0.0;
    let mut idx = vec![0usize; n];
    loop {
        let mut p = 1.0;
        let mut live = Vec::new();
        for (v, c) in choices.iter().enumerate() {
            if c.is_empty() {
                continue;
            }
            let (e, w) = c[idx[v]];
            p *= w;
            live.extend(e);
        }
        total += p * reach(n, &live, seeds) as f64;
        let mut v = 0;
        loop {
            if v == n {
                return total / n as f64;
            }
            if choices[v].is_empty() {
                v += 1;
                continue;
            }
            idx[v] += 1;
            if idx[v] < choices[v].len() {
                break;
            }
            idx[v] = 0;
            v += 1;
        }
    }
}

/// AUC by comparing every positive with every negative.
pub fn pairwise_auc(pos: &[f64], neg: &[f64]) -> f64 {
    let mut wins = 0.0;
    for p in pos {
        for q in neg {
            wins += if p > q {
                1.0
            } else if p == q {
                0.5
            } else {
                0.0
            };
        }
    }
    wins / (pos.len() * neg.len()) as f64
}

/// Single-layer GAT forward written with plain loops: returns (embeddings,
/// attention keyed by edge).
pub fn dense_gat_layer(
    g: &AttributedGraph,
    x: &[f64],
    in_dim: usize,
    weight: &[f64],
    s: &[f64],
    t: &[f64],
    slope: f64,
) -> (Vec<Vec<f64>>, Vec<(Edge, f64)>) {
    let n = g.num_nodes();
    let out = s.len();
    let p: Vec<Vec<f64>> = (0..n)
        .map(|v| (0..out).map(|r| (0..in_dim).map(|c| weight[r * in_dim + c] * x[v * in_dim + c]).sum()).collect())
        .collect();
    let leaky = |z: f64| if z > 0.0 { z } else { slope * z };
    let mut h = vec![vec![0.0; out]; n];
    let mut att = Vec::new();
    for i in 0..n {
        let preds = g.in_neighbors(i as NodeId);
        let w: Vec<f64> = preds
            .iter()
            .map(|&j| {
                let z: f64 = (0..out).map(|k| p[j as usize][k] * s[k] + p[i][k] * t[k]).sum();
                leaky(z).exp()
            })
            .collect();
        let total: f64 = w.iter().sum();
        for (&j, wj) in preds.iter().zip(&w) {
            let a = wj / total;
            att.push(((j, i as NodeId), a));
            for k in 0..out {
                h[i][k] += a * p[j as usize][k];
            }
        }
    }
    att.sort_by_key(|a| a.0);
    (h, att)
}

/// Top-k node set under descending score, ties to the smaller id.
pub fn top_k_set(scores: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
    let mut top = idx[..k].to_vec();
    top.sort();
    top
}

/// NDCG@k from the textbook definition.
pub fn ndcg_oracle(pred: &[f64], truth: &[f64], k: usize) -> f64 {
    let order = |s: &[f64]| {
        let mut idx: Vec<usize> = (0..s.len()).collect();
        idx.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap().then(a.cmp(&b)));
        idx
    };
    let dcg = |idx: &[usize]| -> f64 {
        idx.iter().take(k).enumerate().map(|(r, &v)| truth[v] / ((r + 2) as f64).log2()).sum()
    };
    dcg(&order(pred)) / dcg(&order(truth))
}
