//! Seeded random graph generators for tests, benchmarks and demos.

use alloc::vec::Vec;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, EdgeType, FeatureMatrix, GraphBuilder, NodeId};

/// `rows × dim` features drawn uniformly from `[-1, 1)`.
pub fn uniform_features<R: Rng + ?Sized>(rows: usize, dim: usize, rng: &mut R) -> Result<FeatureMatrix> {
    let data = (0..rows * dim).map(|_| rng.random_range(-1.0f32..1.0)).collect();
    FeatureMatrix::new(rows, dim, data)
}

/// Directed graph with `num_edges` distinct uniformly random edges (no
/// self-loops) and uniform features.
pub fn random_graph(num_nodes: usize, num_edges: usize, dim: usize, seed: u64) -> Result<AttributedGraph> {
    if num_nodes < 2 && num_edges > 0 {
        return Err(Error::param("num_nodes", "edges need at least two nodes"));
    }
    let max = num_nodes * num_nodes.saturating_sub(1);
    if num_edges > max {
        return Err(Error::param("num_edges", alloc::format!("at most {max} edges fit on {num_nodes} nodes")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let features = uniform_features(num_nodes, dim, &mut rng)?;
    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(num_edges);
    let mut seen = alloc::collections::BTreeSet::new();
    while edges.len() < num_edges {
        let s = rng.random_range(0..num_nodes) as NodeId;
        let d = rng.random_range(0..num_nodes) as NodeId;
        if s != d && seen.insert((s, d)) {
            edges.push((s, d));
        }
    }
    AttributedGraph::from_edges(features, &edges)
}

/// Two equal communities with dense links inside and sparse links across.
/// Features are the community sign in the first coordinate plus uniform noise.
pub fn two_communities(per_side: usize, p_in: f64, p_out: f64, dim: usize, seed: u64) -> Result<AttributedGraph> {
    let n = 2 * per_side;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = uniform_features(n, dim, &mut rng)?.as_slice().to_vec();
    for v in 0..n {
        let side = if v < per_side { 1.0 } else { -1.0 };
        features[v * dim] = side + 0.25 * features[v * dim];
    }
    let mut edges = Vec::new();
    for s in 0..n {
        for d in 0..n {
            let p = if (s < per_side) == (d < per_side) { p_in } else { p_out };
            if s != d && rng.random_bool(p.clamp(0.0, 1.0)) {
                edges.push((s as NodeId, d as NodeId));
            }
        }
    }
    AttributedGraph::from_edges(FeatureMatrix::new(n, dim, features)?, &edges)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedConfig {
    pub num_nodes: usize,
    pub feature_dim: usize,
    /// Mean out-degree of each edge type. The type at `aligned_type` draws
    /// out-degrees proportional to node importance; the others draw sources
    /// uniformly.
    pub mean_degrees: Vec<f64>,
    pub aligned_type: EdgeType,
    /// Pareto tail index of the importance distribution.
    pub importance_shape: f64,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        Self {
            num_nodes: 2000,
            feature_dim: 16,
            mean_degrees: alloc::vec![8.0, 8.0, 8.0],
            aligned_type: 0,
            importance_shape: 2.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedGraph {
    pub graph: AttributedGraph,
    pub importance: Vec<f64>,
}

/// Typed graph with a hidden importance per node. Only the aligned type
/// carries information about it: a node's out-degree in that type is a
/// Poisson-like draw with mean proportional to its importance. Targets are
/// uniform in every type.
pub fn planted_heterogeneous(config: &PlantedConfig) -> Result<PlantedGraph> {
    let n = config.num_nodes;
    let types = config.mean_degrees.len() as EdgeType;
    if n < 2 || types == 0 || config.aligned_type >= types {
        return Err(Error::param("planted", "need two nodes and the aligned type among the declared types"));
    }
    if config.mean_degrees.iter().any(|&k| !(0.0..(n - 1) as f64).contains(&k)) || config.importance_shape <= 0.0 {
        return Err(Error::param("planted", "mean degrees must lie in [0, n-1) and the shape must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let features = uniform_features(n, config.feature_dim, &mut rng)?;
    let importance: Vec<f64> =
        (0..n).map(|_| Float::powf(1.0 - rng.random::<f64>(), -1.0 / config.importance_shape)).collect();
    let mean_imp = importance.iter().sum::<f64>() / n as f64;

    let mut b = GraphBuilder::new(features).edge_type_count(types);
    for (ty, &k) in config.mean_degrees.iter().enumerate() {
        let ty = ty as EdgeType;
        if ty == config.aligned_type {
            for (s, imp) in importance.iter().enumerate() {
                let lambda = (k * imp / mean_imp).min((n - 1) as f64);
                for _ in 0..poisson(lambda, &mut rng) {
                    let d = random_other(n, s, &mut rng);
                    b.typed_edge(s as NodeId, d, ty);
                }
            }
        } else {
            let total = (k * n as f64).round() as usize;
            for _ in 0..total {
                let s = rng.random_range(0..n);
                let d = random_other(n, s, &mut rng);
                b.typed_edge(s as NodeId, d, ty);
            }
        }
    }
    let (graph, _) = b.build()?;
    Ok(PlantedGraph { graph, importance })
}

fn random_other<R: Rng + ?Sized>(n: usize, s: usize, rng: &mut R) -> NodeId {
    let d = rng.random_range(0..n - 1);
    (if d >= s { d + 1 } else { d }) as NodeId
}

// Knuth's multiplication method, split into unit-mean chunks so large means
// don't underflow exp(-λ).
fn poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> usize {
    let mut left = lambda;
    let mut count = 0;
    while left > 0.0 {
        let step = left.min(1.0);
        left -= step;
        let limit = Float::exp(-step);
        let mut p = rng.random::<f64>();
        while p > limit {
            count += 1;
            p *= rng.random::<f64>();
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_graph_is_exact_and_seeded() {
        let g = random_graph(30, 100, 4, 3).unwrap();
        assert_eq!(g.num_edges(), 100);
        let h = random_graph(30, 100, 4, 3).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), h.edges().collect::<Vec<_>>());
        assert!(random_graph(3, 7, 1, 0).is_err());
    }

    #[test]
    fn poisson_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let total: usize = (0..20_000).map(|_| poisson(3.5, &mut rng)).sum();
        assert!((total as f64 / 20_000.0 - 3.5).abs() < 0.05);
    }

    #[test]
    fn planted_types_have_expected_sizes() {
        let p = planted_heterogeneous(&PlantedConfig { num_nodes: 500, ..Default::default() }).unwrap();
        let counts = p.graph.edge_type_counts();
        assert_eq!(counts.len(), 3);
        for c in &counts {
            assert!((*c as f64 / 500.0 - 8.0).abs() < 0.8, "{counts:?}");
        }
    }
}
