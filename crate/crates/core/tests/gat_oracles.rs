#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use pine_core::gat::*;
use pine_core::pine::pine_scores;
use pine_core::synthetic::two_communities;
use pine_core::{AttributedGraph, FeatureMatrix, NodeId};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_model(in_dim: usize, hidden: usize, layers: usize, seed: u64) -> GatModel<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = GatModel::<f64>::glorot(in_dim, hidden, layers, 0.2, Activation::Elu, &mut rng).unwrap();
    for l in m.layers_mut() {
        for v in l.src_attention.iter_mut().chain(l.dst_attention.iter_mut()) {
            *v = rng.random_range(-1.0..1.0);
        }
    }
    m
}

fn random_pairs(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<(NodeId, NodeId)> {
    (0..count)
        .map(|_| {
            let a = rng.random_range(0..n);
            let b = (a + rng.random_range(1..n)) % n;
            (a as NodeId, b as NodeId)
        })
        .collect()
}

#[test]
fn analytic_gradients_match_central_differences() {
    // 1e-5 rarely straddles a LeakyReLU kink; 1e-3 rescues tiny gradients
    // whose small-step quotient is mostly rounding noise.
    let mut checked = 0;
    for case in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(case);
        let n = rng.random_range(4..=15);
        let d = rng.random_range(1..=8);
        let layers = 1 + (case % 2) as usize;
        let g = random_graph(n, 0.25, d, 1000 + case);
        let model = random_model(d, rng.random_range(2..=6), layers, case);
        let pos = random_pairs(n, 6, &mut rng);
        let neg = random_pairs(n, 6, &mut rng);
        let (_, grads) = model.loss_and_gradients(&g, &pos, &neg).unwrap();
        let analytic = grads.flat();
        assert_eq!(analytic.len(), model.param_count());
        for (k, &a) in analytic.iter().enumerate() {
            let rel_at = |h: f64| {
                let mut plus = model.clone();
                plus.set_param(k, model.param(k) + h);
                let mut minus = model.clone();
                minus.set_param(k, model.param(k) - h);
                let lp = plus.loss_and_gradients(&g, &pos, &neg).unwrap().0;
                let lm = minus.loss_and_gradients(&g, &pos, &neg).unwrap().0;
                let numeric = (lp - lm) / (2.0 * h);
                (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-12)
            };
            let rel = rel_at(1e-5).min(rel_at(1e-3));
            assert!(rel < 1e-4, "case {case} param {k}: analytic {a}, relative error {rel:e}");
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn forward_matches_loop_reference() {
    for case in 0..10u64 {
        let g = random_graph(12, 0.3, 5, 50 + case);
        let mut model = random_model(5, 4, 1, case);
        let h = model.forward(&g).unwrap();
        let l = &model.layers()[0];
        let x: Vec<f64> = g.features().as_slice().iter().map(|&v| v as f64).collect();
        let (h_ref, att_ref) = dense_gat_layer(&g, &x, 5, &l.weight, &l.src_attention, &l.dst_attention, 0.2);
        for v in 0..12 {
            for k in 0..4 {
                assert!((h.row(v as NodeId)[k] - h_ref[v][k]).abs() < 1e-6);
            }
        }
        let att = model.attention(0).unwrap();
        for (e, (edge, a)) in att_ref.into_iter().enumerate() {
            assert_eq!(edge, (g.edge_source(e), g.edge_target(e)));
            assert!((att[e] - a).abs() < 1e-6);
        }
    }
}

#[test]
fn auc_matches_pairwise_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        // coarse values force ties
        let pos: Vec<f64> = (0..30).map(|_| (rng.random_range(0..10) as f64) / 3.0).collect();
        let neg: Vec<f64> = (0..25).map(|_| (rng.random_range(0..10) as f64) / 4.0).collect();
        let scores: Vec<f64> = pos.iter().chain(&neg).copied().collect();
        let labels: Vec<bool> = (0..55).map(|k| k < 30).collect();
        assert!((roc_auc(&scores, &labels).unwrap() - pairwise_auc(&pos, &neg)).abs() < 1e-12);
    }
}

#[test]
fn f32_and_f64_agree() {
    let g = random_graph(20, 0.2, 6, 8);
    let mut m64 = random_model(6, 5, 2, 3);
    let mut m32: GatModel<f32> = m64.cast();
    let a = m64.forward(&g).unwrap();
    let b = m32.forward(&g).unwrap();
    for (x, y) in a.data.iter().zip(&b.data) {
        assert!((x - *y as f64).abs() < 1e-4);
    }
}

#[test]
fn training_loss_decreases_early() {
    let g = two_communities(15, 0.8, 0.02, 4, 3).unwrap();
    let split = split_edges(&g, &SplitConfig::default()).unwrap();
    let cfg = TrainConfig { learning_rate: 1e-3, hidden_size: 16, max_epochs: 5, patience: 100, ..Default::default() };
    let (_, report) = train::<f64>(&g, &split, &cfg).unwrap();
    let losses: Vec<f64> = report.epochs.iter().map(|e| e.train_loss).collect();
    assert_eq!(losses.len(), 5);
    assert!(losses.windows(2).all(|w| w[1] < w[0]), "{losses:?}");
}

#[test]
fn training_learns_community_links() {
    let g = two_communities(40, 0.2, 0.01, 4, 5).unwrap();
    let split = split_edges(&g, &SplitConfig::default()).unwrap();
    let cfg = TrainConfig { learning_rate: 1e-2, hidden_size: 16, ..Default::default() };
    let (_, report) = train::<f32>(&g, &split, &cfg).unwrap();
    // Half the uniform negatives fall inside a community, which caps the
    // achievable AUC near 0.75 on this graph.
    assert!(report.test_auc > 0.7, "{}", report.test_auc);
    assert!(report.best_epoch <= report.epochs.len());
}

#[test]
fn diverging_learning_rate_is_reported() {
    let g = two_communities(20, 0.4, 0.05, 4, 1).unwrap();
    let split = split_edges(&g, &SplitConfig::default()).unwrap();
    let cfg = TrainConfig { learning_rate: 1e30, hidden_size: 8, ..Default::default() };
    match train::<f32>(&g, &split, &cfg) {
        Err(pine_core::Error::NonFiniteLoss { .. }) | Ok(_) => {}
        Err(e) => panic!("unexpected error {e}"),
    }
}

fn permuted(g: &AttributedGraph, perm: &[usize]) -> AttributedGraph {
    let n = g.num_nodes();
    let d = g.features().dim();
    let mut data = vec![0.0f32; n * d];
    for v in 0..n {
        data[perm[v] * d..(perm[v] + 1) * d].copy_from_slice(g.feature(v as NodeId));
    }
    let edges: Vec<_> = g.edges().map(|(a, b)| (perm[a as usize] as NodeId, perm[b as usize] as NodeId)).collect();
    AttributedGraph::from_edges(FeatureMatrix::new(n, d, data).unwrap(), &edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn attention_is_normalized_and_conserved(n in 2usize..40, p in 0.0f64..0.5, seed in any::<u64>(), layers in 1usize..3) {
        let g = random_graph(n, p, 3, seed);
        let mut model = random_model(3, 4, layers, seed);
        model.forward(&g).unwrap();
        for layer in 0..layers {
            let att = model.attention(layer).unwrap();
            for i in 0..n as NodeId {
                if g.in_degree(i) > 0 {
                    let s: f64 = g.in_edge_ids(i).iter().map(|&e| att[e]).sum();
                    prop_assert!((s - 1.0).abs() < 1e-6);
                }
            }
            let scores = pine_scores(&model, &g, layer).unwrap();
            let receivers = (0..n as NodeId).filter(|&i| g.in_degree(i) > 0).count();
            prop_assert!((scores.values.iter().sum::<f64>() - receivers as f64).abs() < 1e-6);
            for j in 0..n as NodeId {
                prop_assert!(scores.values[j as usize] <= g.out_degree(j) as f64 + 1e-9);
            }
        }
    }

    #[test]
    fn scores_are_permutation_equivariant(n in 2usize..30, p in 0.05f64..0.5, seed in any::<u64>()) {
        let g = random_graph(n, p, 3, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(&mut perm[..], &mut rng);
        let gp = permuted(&g, &perm);
        let mut model = random_model(3, 4, 1, seed);
        model.forward(&g).unwrap();
        let a = pine_scores(&model, &g, 0).unwrap();
        model.forward(&gp).unwrap();
        let b = pine_scores(&model, &gp, 0).unwrap();
        let (ha, hb) = (model.embed(&g, &GatModel::input_features(&g)).unwrap(), model.embed(&gp, &GatModel::input_features(&gp)).unwrap());
        for v in 0..n {
            prop_assert!((a.values[v] - b.values[perm[v]]).abs() < 1e-9);
            for k in 0..4 {
                prop_assert!((ha.row(v as NodeId)[k] - hb.row(perm[v] as NodeId)[k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn forward_ignores_supervision_edges(n in 10usize..40, seed in any::<u64>()) {
        let g = random_graph(n, 0.3, 3, seed);
        let Ok(split) = split_edges(&g, &SplitConfig { rng_seed: seed, ..Default::default() }) else {
            return Ok(());
        };
        prop_assert!(split.supervision_pos.iter().all(|e| split.message_edges.binary_search(e).is_err()));
        let msg = g.with_edges(&split.message_edges).unwrap();
        let remaining: Vec<_> =
            split.train_edges().into_iter().filter(|e| split.supervision_pos.binary_search(e).is_err()).collect();
        let pruned = g.with_edges(&remaining).unwrap();
        let model = random_model(3, 4, 1, seed);
        let x = GatModel::<f64>::input_features(&g);
        let a = model.embed(&msg, &x).unwrap();
        let b = model.embed(&pruned, &x).unwrap();
        prop_assert_eq!(a, b);
    }
}
