//! Exhaustive ground-truth oracle for small instances.
//!
//! Maximizes ⟨W, σσᵀ⟩ over all balanced ±1 assignments — equivalently,
//! finds the minimum-similarity bisection. The search fixes σ_0 = +1 to
//! quotient out the global sign flip and enumerates the C(n-1, n/2-1)
//! remaining choices, which is why it is capped at n ≤ 20 (92 378 candidate
//! splits at the cap). Recovery algorithms are validated against this
//! oracle where it is feasible.

use crate::combin::for_each_subset;
use crate::error::{Error, Result};
use crate::model::CommunityAssignment;
use crate::similarity::SimilarityMatrix;

/// Largest n the exhaustive search accepts.
pub const ORACLE_MAX_N: usize = 20;

/// Outcome of the exhaustive search.
#[derive(Debug, Clone)]
pub struct BisectionResult {
    /// A maximizing balanced assignment with σ_0 = +1. Ties are broken by
    /// enumeration order (lexicographic in the +1 community), so the result
    /// is deterministic.
    pub assignment: CommunityAssignment,
    /// The maximal objective ⟨W, σσᵀ⟩, exactly in integers.
    pub value: i64,
    /// Whether exactly one balanced split (up to global flip) attains it.
    pub unique: bool,
    /// Number of candidate splits examined: C(n-1, n/2-1).
    pub evaluated: u64,
}

/// Exhaustively maximizes ⟨W, σσᵀ⟩ over balanced assignments.
pub fn exhaustive_bisection(w: &SimilarityMatrix) -> Result<BisectionResult> {
    let n = w.n();
    if n > ORACLE_MAX_N {
        return Err(Error::TooLargeForExhaustive {
            n,
            cap: ORACLE_MAX_N,
        });
    }
    if n < 2 || n % 2 != 0 {
        return Err(Error::invalid(format!(
            "exhaustive bisection needs even n >= 2, got {n}"
        )));
    }

    let mut best_value = i64::MIN;
    let mut best_labels: Vec<i8> = Vec::new();
    let mut ties = 0u64;
    let mut evaluated = 0u64;
    let mut labels = vec![-1i8; n];

    for_each_subset((n - 1) as u32, (n / 2 - 1) as u32, |subset| {
        for l in labels.iter_mut() {
            *l = -1;
        }
        labels[0] = 1;
        for &v in subset {
            labels[(v + 1) as usize] = 1;
        }
        let mut value = 0i64;
        for (i, &si) in labels.iter().enumerate() {
            let row = w.row(i);
            let mut acc = 0i64;
            for (j, &sj) in labels.iter().enumerate() {
                acc += row[j] * sj as i64;
            }
            value += si as i64 * acc;
        }
        evaluated += 1;
        if value > best_value {
            best_value = value;
            best_labels = labels.clone();
            ties = 1;
        } else if value == best_value {
            ties += 1;
        }
    });

    Ok(BisectionResult {
        assignment: CommunityAssignment::new(best_labels)?,
        value: best_value,
        unique: ties == 1,
        evaluated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combin::binomial;
    use crate::model::{sample_balanced_assignment, sample_hsbm, Hypergraph, HsbmParams};
    use crate::spectral::spectral_recover;

    #[test]
    fn two_triangles_split_cleanly() {
        let edges = vec![
            vec![0, 1],
            vec![1, 2],
            vec![0, 2],
            vec![3, 4],
            vec![4, 5],
            vec![3, 5],
        ];
        let g = Hypergraph::new(6, 2, edges).unwrap();
        let w = SimilarityMatrix::from_hypergraph(&g);
        let r = exhaustive_bisection(&w).unwrap();
        assert_eq!(r.value, 12); // all 12 ordered adjacent pairs agree
        assert!(r.unique);
        assert_eq!(r.evaluated, binomial(5, 2).unwrap() as u64);
        let want = CommunityAssignment::new(vec![1, 1, 1, -1, -1, -1]).unwrap();
        assert!(r.assignment.agrees_up_to_flip(&want).unwrap());
        assert_eq!(r.assignment.sign(0), 1);
    }

    #[test]
    fn empty_graph_is_maximally_ambiguous() {
        let g = Hypergraph::new(6, 3, vec![]).unwrap();
        let w = SimilarityMatrix::from_hypergraph(&g);
        let r = exhaustive_bisection(&w).unwrap();
        assert_eq!(r.value, 0);
        assert!(!r.unique);
    }

    #[test]
    fn finds_the_planted_assignment_far_above_threshold() {
        // I(3, 14.3, 0.1) ≈ 3: at n = 12 the planted split should win.
        let params = HsbmParams::new(3, 12, 14.3, 0.1, 77).unwrap();
        let sigma = sample_balanced_assignment(12, 8).unwrap();
        let g = sample_hsbm(&params, &sigma).unwrap();
        let w = SimilarityMatrix::from_hypergraph(&g);
        let r = exhaustive_bisection(&w).unwrap();
        assert!(r.assignment.agrees_up_to_flip(&sigma).unwrap(), "{r:?}");
        assert_eq!(r.value, w.quadratic_form(&sigma));
    }

    #[test]
    fn oracle_value_dominates_any_candidate() {
        let params = HsbmParams::new(3, 16, 6.0, 1.0, 51).unwrap();
        let sigma = sample_balanced_assignment(16, 4).unwrap();
        let g = sample_hsbm(&params, &sigma).unwrap();
        let w = SimilarityMatrix::from_hypergraph(&g);
        let r = exhaustive_bisection(&w).unwrap();
        assert!(r.value >= w.quadratic_form(&sigma));
        let spectral = spectral_recover(&w).unwrap();
        if spectral.is_balanced() {
            assert!(r.value >= w.quadratic_form(&spectral));
        }
    }

    #[test]
    fn respects_the_size_cap() {
        let g = Hypergraph::new(22, 2, vec![vec![0, 1]]).unwrap();
        let w = SimilarityMatrix::from_hypergraph(&g);
        assert!(matches!(
            exhaustive_bisection(&w),
            Err(Error::TooLargeForExhaustive { n: 22, cap: 20 })
        ));
        let g = Hypergraph::new(7, 2, vec![vec![0, 1]]).unwrap();
        let w = SimilarityMatrix::from_hypergraph(&g);
        assert!(exhaustive_bisection(&w).is_err()); // odd n
    }
}
