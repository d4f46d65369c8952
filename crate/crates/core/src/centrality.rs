//! Classical, non-trainable importance measures.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, NodeId, ScoreVector};
use crate::par;

/// Total degree: in-neighbors plus out-neighbors.
pub fn degree(g: &AttributedGraph) -> ScoreVector {
    let values = (0..g.num_nodes() as NodeId).map(|v| (g.in_degree(v) + g.out_degree(v)) as f64).collect();
    ScoreVector { method: "degree".into(), values }
}

pub fn out_degree(g: &AttributedGraph) -> ScoreVector {
    let values = (0..g.num_nodes() as NodeId).map(|v| g.out_degree(v) as f64).collect();
    ScoreVector { method: "out_degree".into(), values }
}

/// Sum over out-edges of the cosine similarity between the endpoint features.
pub fn weighted_out_degree(g: &AttributedGraph) -> ScoreVector {
    let values = (0..g.num_nodes() as NodeId)
        .map(|j| g.out_neighbors(j).iter().map(|&i| g.cosine_similarity(j, i)).sum())
        .collect();
    ScoreVector { method: "weighted_out_degree".into(), values }
}

/// Opsahl-style blend `k^(1-tuning) * s^tuning` of out-degree `k` and
/// weighted out-degree `s`. Nodes without out-edges score 0.
pub fn relative_out_degree(g: &AttributedGraph, tuning: f64) -> Result<ScoreVector> {
    if !(0.0..=1.0).contains(&tuning) {
        return Err(Error::param("tuning", "must lie in [0, 1]"));
    }
    let k = out_degree(g).values;
    let s = weighted_out_degree(g).values;
    let values = k
        .iter()
        .zip(&s)
        .map(|(&k, &s)| {
            if k == 0.0 {
                0.0
            } else {
                // powf(0, 0) == 1, which is the convention we want.
                // Negative similarity sums have no real fractional power.
                k.powf(1.0 - tuning) * s.max(0.0).powf(tuning)
            }
        })
        .collect();
    ScoreVector::new("relative_out_degree", values)
}

/// Result of a fixed-point iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterativeScores {
    pub scores: ScoreVector,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankParams {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        Self { damping: 0.85, tol: 1e-9, max_iter: 200 }
    }
}

/// Power iteration with uniform teleport; dangling mass is spread uniformly.
/// Stops when the L1 change drops below `tol`. If `max_iter` is hit first the
/// last iterate is returned with `converged == false`.
pub fn pagerank(g: &AttributedGraph, params: PageRankParams) -> Result<IterativeScores> {
    let PageRankParams { damping, tol, max_iter } = params;
    if !(damping > 0.0 && damping < 1.0) {
        return Err(Error::param("damping", "must lie in (0, 1)"));
    }
    let n = g.num_nodes();
    if n == 0 {
        return Ok(IterativeScores { scores: ScoreVector::new("pagerank", vec![])?, iterations: 0, converged: true });
    }
    let nf = n as f64;
    let mut x = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let dangling: f64 = (0..n as NodeId).filter(|&v| g.out_degree(v) == 0).map(|v| x[v as usize]).sum();
        let base = (1.0 - damping) / nf + damping * dangling / nf;
        for i in 0..n as NodeId {
            let inflow: f64 = g.in_neighbors(i).iter().map(|&j| x[j as usize] / g.out_degree(j) as f64).sum();
            next[i as usize] = base + damping * inflow;
        }
        let delta: f64 = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        core::mem::swap(&mut x, &mut next);
        if delta < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("pagerank did not converge within {max_iter} iterations");
    }
    Ok(IterativeScores { scores: ScoreVector::new("pagerank", x)?, iterations, converged })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KatzParams {
    pub attenuation: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for KatzParams {
    fn default() -> Self {
        Self { attenuation: 0.005, tol: 1e-12, max_iter: 1000 }
    }
}

/// Katz centrality `x = Σ_{k≥1} a^k (Aᵀ)^k 1`, computed by iterating
/// `x ← a·Aᵀ(x + 1)` and L2-normalized. A graph without edges yields uniform
/// scores.
pub fn katz(g: &AttributedGraph, params: KatzParams) -> Result<IterativeScores> {
    let KatzParams { attenuation, tol, max_iter } = params;
    if attenuation.is_nan() || attenuation <= 0.0 {
        return Err(Error::param("attenuation", "must be positive"));
    }
    let n = g.num_nodes();
    let mut x = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut last_delta = f64::INFINITY;
    let mut growth_streak = 0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        for i in 0..n as NodeId {
            let s: f64 = g.in_neighbors(i).iter().map(|&j| x[j as usize] + 1.0).sum();
            next[i as usize] = attenuation * s;
        }
        let delta: f64 = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        core::mem::swap(&mut x, &mut next);
        if !delta.is_finite() {
            return Err(Error::Divergence { iterations });
        }
        if delta < tol {
            converged = true;
            break;
        }
        if delta > last_delta {
            growth_streak += 1;
            if growth_streak >= 10 {
                return Err(Error::Divergence { iterations });
            }
        } else {
            growth_streak = 0;
        }
        last_delta = delta;
    }
    let norm = Float::sqrt(x.iter().map(|v| v * v).sum::<f64>());
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    } else if n > 0 {
        let u = 1.0 / Float::sqrt(n as f64);
        x.iter_mut().for_each(|v| *v = u);
    }
    Ok(IterativeScores { scores: ScoreVector::new("katz", x)?, iterations, converged })
}

/// Hop distances from `source` along out-edges; `usize::MAX` if unreachable.
fn bfs_out(g: &AttributedGraph, source: NodeId, dist: &mut [usize], queue: &mut VecDeque<NodeId>) {
    dist.fill(usize::MAX);
    dist[source as usize] = 0;
    queue.clear();
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        for &w in g.out_neighbors(v) {
            if dist[w as usize] == usize::MAX {
                dist[w as usize] = dist[v as usize] + 1;
                queue.push_back(w);
            }
        }
    }
}

/// Closeness over out-distances with the Wasserman–Faust correction:
/// `((r-1)/(N-1)) * ((r-1)/Σd)` where `r` counts the nodes reachable from
/// `i` (itself included). Nodes that reach nobody score 0.
pub fn closeness(g: &AttributedGraph) -> ScoreVector {
    let n = g.num_nodes();
    let values = par::map_range(n, |s| {
        let mut dist = vec![0; n];
        let mut queue = VecDeque::new();
        bfs_out(g, s as NodeId, &mut dist, &mut queue);
        let (mut reached, mut total) = (0usize, 0usize);
        for &d in &dist {
            if d != usize::MAX && d > 0 {
                reached += 1;
                total += d;
            }
        }
        if reached == 0 {
            0.0
        } else {
            let r = reached as f64;
            (r / (n - 1) as f64) * (r / total as f64)
        }
    });
    ScoreVector { method: "closeness".into(), values }
}

const BRANDES_BLOCK: usize = 64;

/// Exact directed betweenness (Brandes), normalized by `(N-1)(N-2)`.
pub fn betweenness(g: &AttributedGraph) -> ScoreVector {
    let n = g.num_nodes();
    let blocks = n.div_ceil(BRANDES_BLOCK);
    let partial = par::map_range(blocks, |b| {
        let mut acc = vec![0.0f64; n];
        let mut state = BrandesState::new(n);
        for s in b * BRANDES_BLOCK..((b + 1) * BRANDES_BLOCK).min(n) {
            state.accumulate(g, s as NodeId, &mut acc);
        }
        acc
    });
    let mut values = vec![0.0; n];
    for acc in partial {
        values.iter_mut().zip(acc).for_each(|(v, a)| *v += a);
    }
    if n > 2 {
        let scale = 1.0 / ((n - 1) * (n - 2)) as f64;
        values.iter_mut().for_each(|v| *v *= scale);
    } else {
        values.fill(0.0);
    }
    ScoreVector { method: "betweenness".into(), values }
}

struct BrandesState {
    sigma: Vec<f64>,
    dist: Vec<usize>,
    delta: Vec<f64>,
    order: Vec<NodeId>,
    queue: VecDeque<NodeId>,
}

impl BrandesState {
    fn new(n: usize) -> Self {
        Self {
            sigma: vec![0.0; n],
            dist: vec![usize::MAX; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
            queue: VecDeque::new(),
        }
    }

    fn accumulate(&mut self, g: &AttributedGraph, s: NodeId, acc: &mut [f64]) {
        self.sigma.fill(0.0);
        self.dist.fill(usize::MAX);
        self.delta.fill(0.0);
        self.order.clear();
        self.sigma[s as usize] = 1.0;
        self.dist[s as usize] = 0;
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.order.push(v);
            let dv = self.dist[v as usize];
            for &w in g.out_neighbors(v) {
                let w = w as usize;
                if self.dist[w] == usize::MAX {
                    self.dist[w] = dv + 1;
                    self.queue.push_back(w as NodeId);
                }
                if self.dist[w] == dv + 1 {
                    self.sigma[w] += self.sigma[v as usize];
                }
            }
        }
        // Predecessors are recovered from the in-lists instead of being stored.
        for &w in self.order.iter().rev() {
            let dw = self.dist[w as usize];
            for &v in g.in_neighbors(w) {
                if dw > 0 && self.dist[v as usize] == dw - 1 {
                    self.delta[v as usize] +=
                        self.sigma[v as usize] / self.sigma[w as usize] * (1.0 + self.delta[w as usize]);
                }
            }
            if w != s {
                acc[w as usize] += self.delta[w as usize];
            }
        }
    }
}

/// Directed VoteRank. Every node votes for its suppliers (in-neighbors) with
/// its voting ability, so a node's vote score is the summed ability of its
/// out-neighbors. Each round elects the top non-elected node (ties to the
/// smaller id), zeroes its ability, and lowers the ability of its voters by
/// `1/⟨k_out⟩`, floored at 0.
///
/// Returns all nodes: the `k` elected ones in election order, then the rest by
/// final vote score.
pub fn voterank(g: &AttributedGraph, k: usize) -> Result<Vec<NodeId>> {
    let n = g.num_nodes();
    if k > n {
        return Err(Error::param("k", alloc::format!("{k} exceeds the node count {n}")));
    }
    let mean_out = g.num_edges() as f64 / n.max(1) as f64;
    let suppression = if mean_out > 0.0 { 1.0 / mean_out } else { 0.0 };
    let mut ability = vec![1.0f64; n];
    let mut elected = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let score = |ability: &[f64], u: NodeId| -> f64 { g.out_neighbors(u).iter().map(|&v| ability[v as usize]).sum() };

    for _ in 0..k {
        let mut best: Option<(NodeId, f64)> = None;
        for u in 0..n as NodeId {
            if elected[u as usize] {
                continue;
            }
            let s = score(&ability, u);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((u, s));
            }
        }
        let (winner, _) = best.expect("k <= n leaves a candidate");
        elected[winner as usize] = true;
        order.push(winner);
        ability[winner as usize] = 0.0;
        for &v in g.out_neighbors(winner) {
            ability[v as usize] = (ability[v as usize] - suppression).max(0.0);
        }
    }

    let mut rest: Vec<(NodeId, f64)> =
        (0..n as NodeId).filter(|&u| !elected[u as usize]).map(|u| (u, score(&ability, u))).collect();
    rest.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    order.extend(rest.into_iter().map(|(u, _)| u));
    Ok(order)
}

/// Turns a full ranking into scores `N - position`, so that the first node
/// scores highest.
pub fn ranking_to_scores(method: &str, ranking: &[NodeId]) -> ScoreVector {
    let n = ranking.len();
    let mut values = vec![0.0; n];
    for (pos, &v) in ranking.iter().enumerate() {
        values[v as usize] = (n - pos) as f64;
    }
    ScoreVector { method: method.into(), values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::FeatureMatrix;

    fn graph(n: usize, edges: &[(NodeId, NodeId)]) -> AttributedGraph {
        AttributedGraph::from_edges(FeatureMatrix::constant(n, 1, 1.0), edges).unwrap()
    }

    fn with_features(rows: &[[f32; 2]], edges: &[(NodeId, NodeId)]) -> AttributedGraph {
        let data = rows.iter().flatten().copied().collect();
        AttributedGraph::from_edges(FeatureMatrix::new(rows.len(), 2, data).unwrap(), edges).unwrap()
    }

    #[test]
    fn degree_family_on_path() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(degree(&g).values, vec![1.0, 2.0, 1.0]);
        assert_eq!(out_degree(&g).values, vec![1.0, 1.0, 0.0]);
        assert_eq!(degree(&graph(4, &[])).values, vec![0.0; 4]);
    }

    #[test]
    fn star_out_degree() {
        let g = graph(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
        assert_eq!(out_degree(&g).values, vec![5.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn weighted_out_degree_single_edge() {
        let same = with_features(&[[1.0, 2.0], [1.0, 2.0]], &[(0, 1)]);
        let w = weighted_out_degree(&same).values;
        assert!((w[0] - 1.0).abs() < 1e-12 && w[1] == 0.0);
        let orth = with_features(&[[1.0, 0.0], [0.0, 1.0]], &[(0, 1)]);
        assert_eq!(weighted_out_degree(&orth).values, vec![0.0, 0.0]);
    }

    #[test]
    fn relative_out_degree_boundaries() {
        let g = with_features(&[[1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.5]], &[(0, 1), (0, 3), (1, 2), (3, 0)]);
        assert_eq!(relative_out_degree(&g, 0.0).unwrap().values, out_degree(&g).values);
        let w = weighted_out_degree(&g).values;
        for (a, b) in relative_out_degree(&g, 1.0).unwrap().values.iter().zip(&w) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(relative_out_degree(&g, 1.5).is_err());
        assert!(relative_out_degree(&g, -0.1).is_err());
    }

    #[test]
    fn pagerank_two_cycle_and_singleton() {
        let r = pagerank(&graph(2, &[(0, 1), (1, 0)]), PageRankParams::default()).unwrap();
        assert!(r.converged);
        assert!((r.scores.values[0] - 0.5).abs() < 1e-12);
        let single = pagerank(&graph(1, &[]), PageRankParams::default()).unwrap();
        assert!((single.scores.values[0] - 1.0).abs() < 1e-12);
        assert!(pagerank(&graph(1, &[]), PageRankParams { damping: 1.0, ..Default::default() }).is_err());
    }

    #[test]
    fn pagerank_flags_non_convergence() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let r = pagerank(&g, PageRankParams { max_iter: 2, ..Default::default() }).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 2);
    }

    #[test]
    fn katz_cases() {
        let empty = katz(&graph(4, &[]), KatzParams::default()).unwrap();
        assert_eq!(empty.scores.values, vec![0.5; 4]);

        // Path 0→1: x1 = 0.1 before normalization, x0 = 0; after it, [0, 1].
        let p = katz(&graph(2, &[(0, 1)]), KatzParams { attenuation: 0.1, ..Default::default() }).unwrap();
        assert_eq!(p.scores.values, vec![0.0, 1.0]);

        let clique: Vec<_> = (0..5).flat_map(|a| (0..5).filter(move |&b| b != a).map(move |b| (a, b))).collect();
        let err = katz(&graph(5, &clique), KatzParams { attenuation: 0.5, ..Default::default() }).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }

    #[test]
    fn closeness_path_and_isolated() {
        let g = graph(4, &[(0, 1), (1, 2)]);
        let c = closeness(&g).values;
        // Node 0 reaches 2 nodes at total distance 3: (2/3)·(2/3).
        assert!((c[0] - 4.0 / 9.0).abs() < 1e-12);
        assert!((c[1] - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(c[2], 0.0);
        assert_eq!(c[3], 0.0);
    }

    #[test]
    fn betweenness_small_cases() {
        assert_eq!(betweenness(&graph(3, &[(0, 1), (1, 2)])).values, vec![0.0, 0.5, 0.0]);
        let tri = graph(3, &[(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)]);
        assert_eq!(betweenness(&tri).values, vec![0.0; 3]);
    }

    #[test]
    fn voterank_stars() {
        let star: Vec<_> = (1..=10).map(|l| (0, l)).collect();
        assert_eq!(voterank(&graph(11, &star), 1).unwrap()[0], 0);

        let mut two: Vec<_> = (1..=10).map(|l| (0, l)).collect();
        two.extend((12..=14).map(|l| (11, l)));
        let r = voterank(&graph(15, &two), 2).unwrap();
        assert_eq!(&r[..2], &[0, 11]);
        assert_eq!(r.len(), 15);
        assert!(voterank(&graph(3, &[]), 4).is_err());
    }

    #[test]
    fn ranking_scores_are_descending() {
        let s = ranking_to_scores("voterank", &[2, 0, 1]);
        assert_eq!(s.values, vec![2.0, 1.0, 3.0]);
    }
}
