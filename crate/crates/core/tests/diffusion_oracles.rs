#![allow(clippy::type_complexity)]

mod common;

use common::*;
use pine_core::diffusion::*;
use pine_core::{AttributedGraph, FeatureMatrix, NodeId};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RUNS: usize = 100_000;

fn small_graph(n: usize, edges: &[(NodeId, NodeId)], seed: u64) -> AttributedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * 3).map(|_| rng.random_range(-1.0f32..1.0)).collect();
    AttributedGraph::from_edges(FeatureMatrix::new(n, 3, data).unwrap(), edges).unwrap()
}

/// Fixed family of graphs with at most five nodes.
fn family() -> Vec<(AttributedGraph, Vec<NodeId>)> {
    let cases: Vec<(usize, Vec<(NodeId, NodeId)>, Vec<NodeId>)> = vec![
        (2, vec![(0, 1)], vec![0]),
        (2, vec![(0, 1), (1, 0)], vec![0]),
        (3, vec![(0, 1), (1, 2)], vec![0]),
        (3, vec![(0, 1), (0, 2), (1, 2)], vec![0]),
        (3, vec![(0, 1), (1, 2), (2, 0)], vec![1]),
        (4, vec![(0, 1), (0, 2), (1, 3), (2, 3)], vec![0]),
        (4, vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], vec![0]),
        (4, vec![(0, 3), (1, 3), (2, 3)], vec![0, 1]),
        (5, vec![(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (2, 4)], vec![0]),
        (5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3)], vec![0]),
        (5, vec![(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (3, 4)], vec![0]),
        (5, vec![(0, 2), (1, 2), (2, 3), (2, 4), (3, 4), (4, 3)], vec![0, 1]),
    ];
    cases.into_iter().enumerate().map(|(k, (n, e, s))| (small_graph(n, &e, k as u64), s)).collect()
}

fn check_against(model: DiffusionModel, exact: fn(usize, &[(Edge, f64)], &[NodeId]) -> f64) {
    for (k, (g, seeds)) in family().into_iter().enumerate() {
        let weighted = influence_oracle(&g, 0.5, 0.5);
        let truth = exact(g.num_nodes(), &weighted, &seeds);
        let cfg = DiffusionConfig { num_runs: RUNS, rng_seed: 11 + k as u64, ..DiffusionConfig::new(model) };
        let r = influence_spread(&g, &cfg, &seeds).unwrap();
        let se = r.std_spread / (RUNS as f64).sqrt();
        let z = (r.mean_spread - truth).abs() / se.max(1e-12);
        assert!(z < 3.0, "{} graph {k}: mc {} exact {truth} z {z:.2}", model.name(), r.mean_spread);
    }
}

#[test]
fn influence_weights_match_definition() {
    for (g, _) in family() {
        let w = compute_influence_weights(&g, 0.3, 0.7).unwrap();
        for ((edge, expected), e) in influence_oracle(&g, 0.3, 0.7).into_iter().zip(0..) {
            assert_eq!(edge, (g.edge_source(e), g.edge_target(e)));
            assert!((w.weight(e) - expected).abs() < 1e-12);
        }
    }
}

#[test]
fn ic_plus_matches_enumeration() {
    check_against(DiffusionModel::IcPlus, ic_exact);
}

#[test]
fn lt_plus_matches_live_edge_enumeration() {
    check_against(DiffusionModel::LtPlus, lt_exact);
}

#[test]
fn sir_single_edge_is_beta() {
    let g = small_graph(2, &[(0, 1)], 0);
    for beta in [0.1, 0.35, 0.8] {
        let cfg = DiffusionConfig {
            sir_beta: Some(beta),
            sir_gamma: 1.0,
            num_runs: RUNS,
            ..DiffusionConfig::new(DiffusionModel::Sir)
        };
        let r = influence_spread(&g, &cfg, &[0]).unwrap();
        let p_hat = r.activated_counts.iter().filter(|&&c| c == 2).count() as f64 / RUNS as f64;
        let se = (beta * (1.0 - beta) / RUNS as f64).sqrt();
        assert!((p_hat - beta).abs() < 3.0 * se, "beta {beta}: {p_hat}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fixed_threshold_lt_is_monotone(n in 3usize..25, p in 0.05f64..0.4, seed in any::<u64>(), extra in 0usize..25) {
        let g = random_graph(n, p, 2, seed);
        let w = compute_influence_weights(&g, 0.5, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let th: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let small = run_lt_plus_with_thresholds(&g, &w, &[0], &th).unwrap();
        let big = run_lt_plus_with_thresholds(&g, &w, &[0, (extra % n) as NodeId], &th).unwrap();
        prop_assert!(small.iter().all(|v| big.contains(v)));
    }

    #[test]
    fn spread_is_deterministic(n in 3usize..25, p in 0.05f64..0.4, seed in any::<u64>(), m in 0usize..3) {
        let g = random_graph(n, p, 2, seed);
        let model = [DiffusionModel::LtPlus, DiffusionModel::IcPlus, DiffusionModel::Sir][m];
        let cfg = DiffusionConfig { num_runs: 50, rng_seed: seed, ..DiffusionConfig::new(model) };
        let a = influence_spread(&g, &cfg, &[0, 1]).unwrap();
        let b = influence_spread(&g, &cfg, &[0, 1]).unwrap();
        prop_assert_eq!(a, b);
    }
}
