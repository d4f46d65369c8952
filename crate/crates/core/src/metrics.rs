//! Supervised ranking metrics comparing predicted scores with ground-truth
//! importance. Both slices are indexed by node.
//!
//! Top-k selections break ties by ascending node id, identically for the
//! predicted and the true ordering. Spearman uses average ranks for ties.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::graph::ranking;

fn check_lengths(predicted: &[f64], truth: &[f64]) -> Result<()> {
    if predicted.len() != truth.len() {
        return Err(Error::Dimension(format!(
            "{} predicted scores vs {} ground-truth values",
            predicted.len(),
            truth.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::Undefined("no nodes to evaluate".into()));
    }
    Ok(())
}

fn dcg(gains: impl Iterator<Item = f64>) -> f64 {
    gains.enumerate().map(|(pos, g)| g / Float::log2((pos + 2) as f64)).sum()
}

/// NDCG@k. `k` larger than the node count is clipped.
pub fn ndcg_at_k(predicted: &[f64], truth: &[f64], k: usize) -> Result<f64> {
    check_lengths(predicted, truth)?;
    if k == 0 {
        return Err(Error::param("k", "must be at least 1"));
    }
    if !truth.iter().any(|&t| t > 0.0) {
        return Err(Error::Undefined("NDCG needs at least one positive ground-truth value".into()));
    }
    let k = k.min(truth.len());
    let actual = dcg(ranking(predicted).iter().take(k).map(|&v| truth[v as usize]));
    let ideal = dcg(ranking(truth).iter().take(k).map(|&v| truth[v as usize]));
    Ok(actual / ideal)
}

/// 1-based ranks, ties sharing the mean of the positions they occupy.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    (va > 0.0 && vb > 0.0).then(|| (cov / (Float::sqrt(va) * Float::sqrt(vb))).clamp(-1.0, 1.0))
}

/// Spearman rank correlation. Undefined when either side is constant.
pub fn spearman(predicted: &[f64], truth: &[f64]) -> Result<f64> {
    check_lengths(predicted, truth)?;
    pearson(&average_ranks(predicted), &average_ranks(truth))
        .ok_or_else(|| Error::Undefined("Spearman correlation of a constant ranking".into()))
}

/// Overlap of the predicted and true top-k sets, divided by `k`.
pub fn precision_at_k(predicted: &[f64], truth: &[f64], k: usize) -> Result<f64> {
    check_lengths(predicted, truth)?;
    if k == 0 || k > predicted.len() {
        return Err(Error::param("k", format!("must lie in [1, {}]", predicted.len())));
    }
    let mut in_truth = vec![false; truth.len()];
    for &v in ranking(truth).iter().take(k) {
        in_truth[v as usize] = true;
    }
    let hits = ranking(predicted).iter().take(k).filter(|&&v| in_truth[v as usize]).count();
    Ok(hits as f64 / k as f64)
}
