use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, NodeId};
use crate::seeds::fraction_count;

pub type Edge = (NodeId, NodeId);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConfig {
    pub train: f64,
    pub val: f64,
    pub test: f64,
    /// Share of the training edges held out as supervision targets.
    pub supervision: f64,
    pub rng_seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self { train: 0.7, val: 0.15, test: 0.15, supervision: 0.3, rng_seed: 42 }
    }
}

/// Edge partition for link prediction.
///
/// Training edges are divided into message edges (the structure the model
/// aggregates over) and supervision positives (targets only). Validation and
/// test negatives are drawn once, here; training negatives are redrawn every
/// epoch by the trainer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSplit {
    pub message_edges: Vec<Edge>,
    pub supervision_pos: Vec<Edge>,
    pub val_pos: Vec<Edge>,
    pub val_neg: Vec<Edge>,
    pub test_pos: Vec<Edge>,
    pub test_neg: Vec<Edge>,
}

impl EdgeSplit {
    /// All training edges: message plus supervision.
    pub fn train_edges(&self) -> Vec<Edge> {
        let mut e = self.message_edges.clone();
        e.extend_from_slice(&self.supervision_pos);
        e.sort_unstable();
        e
    }
}

/// Draws `count` ordered pairs `(j, i)`, `j != i`, that are not edges of `g`.
pub fn sample_negatives<R: Rng + ?Sized>(g: &AttributedGraph, count: usize, rng: &mut R) -> Result<Vec<Edge>> {
    let n = g.num_nodes();
    if count == 0 {
        return Ok(Vec::new());
    }
    if n < 2 {
        return Err(Error::Split("need at least two nodes to sample non-edges".into()));
    }
    let budget = 100 * count + 1000;
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > budget {
            return Err(Error::Split(format!("graph too dense to draw {count} non-edges")));
        }
        let j = rng.random_range(0..n) as NodeId;
        let i = rng.random_range(0..n) as NodeId;
        if j != i && !g.has_edge(j, i) {
            out.push((j, i));
        }
    }
    Ok(out)
}

/// Uniform random train/validation/test partition of the edges.
pub fn split_edges(g: &AttributedGraph, config: &SplitConfig) -> Result<EdgeSplit> {
    let SplitConfig { train, val, test, supervision, rng_seed } = *config;
    for (name, f) in [("train", train), ("val", val), ("test", test), ("supervision", supervision)] {
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::Split(format!("{name} fraction must lie in (0, 1)")));
        }
    }
    if (train + val + test - 1.0).abs() > 1e-9 {
        return Err(Error::Split("train + val + test fractions must sum to 1".into()));
    }
    let m = g.num_edges();
    let n_val = fraction_count(val, m);
    let n_test = fraction_count(test, m);
    let n_train = m - n_val - n_test;
    let n_sup = fraction_count(supervision, n_train);
    let n_msg = n_train - n_sup;
    if [n_val, n_test, n_sup, n_msg].contains(&0) {
        return Err(Error::Split(format!(
            "{m} edges leave an empty part (val {n_val}, test {n_test}, supervision {n_sup}, message {n_msg})"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut edges: Vec<Edge> = g.edges().collect();
    edges.shuffle(&mut rng);
    let take = |range: core::ops::Range<usize>| {
        let mut part = edges[range].to_vec();
        part.sort_unstable();
        part
    };
    let val_pos = take(0..n_val);
    let test_pos = take(n_val..n_val + n_test);
    let supervision_pos = take(n_val + n_test..n_val + n_test + n_sup);
    let message_edges = take(n_val + n_test + n_sup..m);

    let val_neg = sample_negatives(g, val_pos.len(), &mut rng)?;
    let test_neg = sample_negatives(g, test_pos.len(), &mut rng)?;
    Ok(EdgeSplit { message_edges, supervision_pos, val_pos, val_neg, test_pos, test_neg })
}
