//! Seed-set selection from score vectors.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::graph::{NodeId, ScoreVector};

/// `⌊fraction · n⌋`, tolerant of products like `0.29 * 100` landing a hair
/// below the integer.
pub fn fraction_count(fraction: f64, n: usize) -> usize {
    (Float::floor(fraction * n as f64 + 1e-9) as usize).min(n)
}

/// The `⌊fraction·N⌋` highest-scoring nodes; ties at the boundary go to the
/// smaller node id. Returned in rank order.
pub fn select_top_fraction(scores: &ScoreVector, fraction: f64) -> Result<Vec<NodeId>> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::param("fraction", "must lie in [0, 1]"));
    }
    let k = fraction_count(fraction, scores.len());
    Ok(scores.ranking().into_iter().take(k).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn full_and_tenth() {
        let s = ScoreVector::new("s", (0..100).map(|i| ((i * 37) % 100) as f64).collect()).unwrap();
        let all = select_top_fraction(&s, 1.0).unwrap();
        assert_eq!(all.len(), 100);
        let top = select_top_fraction(&s, 0.1).unwrap();
        assert_eq!(top.len(), 10);
        for v in &top {
            assert!(s.values[*v as usize] >= 90.0);
        }
    }

    #[test]
    fn boundary_ties_prefer_small_ids() {
        let s = ScoreVector::new("s", vec![1.0, 5.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(select_top_fraction(&s, 0.4).unwrap(), vec![1, 0]);
        assert!(select_top_fraction(&s, 1.2).is_err());
    }

    #[test]
    fn count_floors() {
        assert_eq!(fraction_count(0.1, 2708), 270);
        assert_eq!(fraction_count(0.29, 100), 29);
        assert_eq!(fraction_count(0.1, 9), 0);
    }
}
