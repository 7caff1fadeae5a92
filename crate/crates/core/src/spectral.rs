//! Spectral recovery and entrywise eigenvector diagnostics.
//!
//! The algorithm is one line: take the eigenvector u₂ for the second largest
//! eigenvalue of W and read off signs. Everything else here quantifies *why*
//! that works — the entrywise proximity of u₂ to its first-order surrogate
//! W·u₂*/λ₂*, and the row-wise concentration of (W - W*) against a fixed
//! test vector, both of which the experiment harness measures empirically.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eig_symmetric, norm2, norm_inf, Mat};
use crate::model::CommunityAssignment;
use crate::similarity::{ExpectedSimilarity, SimilarityMatrix};

/// Rounds a vector to ±1 labels; zeros round up so the map is total.
pub fn sign_rounding(v: &[f64]) -> Result<CommunityAssignment> {
    if v.is_empty() {
        return Err(Error::invalid("cannot round an empty vector"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("cannot round a vector with non-finite entries"));
    }
    CommunityAssignment::new(v.iter().map(|&x| if x >= 0.0 { 1 } else { -1 }).collect())
}

/// Second-eigenvector recovery from a similarity matrix.
pub fn spectral_recover(w: &SimilarityMatrix) -> Result<CommunityAssignment> {
    spectral_recover_mat(&w.to_mat())
}

/// The same, from an arbitrary symmetric matrix.
pub fn spectral_recover_mat(m: &Mat) -> Result<CommunityAssignment> {
    if m.n() < 2 {
        return Err(Error::invalid("need at least two vertices to partition"));
    }
    let eig = eig_symmetric(m)?;
    sign_rounding(eig.vector(1))
}

/// Entrywise comparison of the empirical second eigenvector against the
/// planted vector and its first-order surrogate. All distances carry the
/// √n scaling under which the planted entries are ±1.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EntrywiseReport {
    /// Second eigenvalue of W.
    pub lambda2: f64,
    /// Second eigenvalue of W*.
    pub lambda2_star: f64,
    /// Empirical gap min(λ₁-λ₂, λ₂-λ₃).
    pub gap: f64,
    /// Global sign s aligning u₂ with σ*.
    pub alignment_sign: f64,
    /// √n·‖s·u₂ - u₂*‖_∞ — raw eigenvector error.
    pub err_direct: f64,
    /// √n·‖W·u₂*/λ₂* - u₂*‖_∞ — how far the surrogate strays from truth.
    pub err_first_order_vs_true: f64,
    /// √n·‖s·u₂ - W·u₂*/λ₂*‖_∞ — what the surrogate fails to explain.
    pub err_residual: f64,
    /// √n·min_i σ*_i·(s·u₂)_i; positive iff sign rounding is exact.
    pub sign_margin: f64,
}

/// Computes the entrywise report of W against the planted expectation.
pub fn entrywise_report(
    w: &SimilarityMatrix,
    es: &ExpectedSimilarity,
) -> Result<EntrywiseReport> {
    if w.n() != es.n() {
        return Err(Error::DimensionMismatch {
            expected: es.n(),
            got: w.n(),
        });
    }
    let n = w.n();
    let root_n = (n as f64).sqrt();
    let mat = w.to_mat();
    let eig = eig_symmetric(&mat)?;
    let u2 = eig.vector(1);
    let u2_star = es.u2();
    let lambda2_star = es.lambda2();
    if lambda2_star == 0.0 {
        return Err(Error::invalid(
            "surrogate undefined: the planted second eigenvalue is zero",
        ));
    }

    let dot: f64 = u2.iter().zip(&u2_star).map(|(a, b)| a * b).sum();
    let s = if dot >= 0.0 { 1.0 } else { -1.0 };

    let surrogate: Vec<f64> = mat
        .matvec(&u2_star)
        .into_iter()
        .map(|x| x / lambda2_star)
        .collect();

    let mut err_direct = 0.0f64;
    let mut err_first = 0.0f64;
    let mut err_resid = 0.0f64;
    let mut margin = f64::INFINITY;
    let sigma = es.assignment();
    for i in 0..n {
        let aligned = s * u2[i];
        err_direct = err_direct.max((aligned - u2_star[i]).abs());
        err_first = err_first.max((surrogate[i] - u2_star[i]).abs());
        err_resid = err_resid.max((aligned - surrogate[i]).abs());
        margin = margin.min(sigma.sign(i) as f64 * aligned);
    }

    let values = eig.values();
    let gap = if n >= 3 {
        (values[0] - values[1]).min(values[1] - values[2])
    } else {
        values[0] - values[1]
    };

    Ok(EntrywiseReport {
        lambda2: values[1],
        lambda2_star,
        gap,
        alignment_sign: s,
        err_direct: root_n * err_direct,
        err_first_order_vs_true: root_n * err_first,
        err_residual: root_n * err_resid,
        sign_margin: root_n * margin,
    })
}

/// The concentration modulus φ(x) = (4c₀ + 16)·d / max(1, log(1/x)),
/// defined for x > 0; flat beyond x = 1/e where the log loses to 1.
pub fn phi(d: usize, c0: f64, x: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::invalid(format!("edge order d = {d} must be >= 2")));
    }
    if !(c0.is_finite() && c0 >= 0.0) {
        return Err(Error::invalid(format!("c0 = {c0} must be finite and >= 0")));
    }
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::invalid(format!("phi needs x > 0, got {x}")));
    }
    Ok((4.0 * c0 + 16.0) * d as f64 / (1.0f64).max((1.0 / x).ln()))
}

/// Row-wise concentration of (W - W*) against a fixed test vector.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RowConcentrationReport {
    /// ‖v‖_∞ · φ(‖v‖₂/(√n‖v‖_∞)) · log n.
    pub budget: f64,
    /// max_i |⟨(W - W*)_i, v⟩|.
    pub max_deviation: f64,
    /// Number of rows whose deviation exceeds the budget.
    pub exceed_count: usize,
}

/// Evaluates every row of (W - W*) against `v`, with the modulus constant
/// c₀ supplied by the caller (the planted-model rate α plays that role).
pub fn row_concentration_check(
    w: &SimilarityMatrix,
    es: &ExpectedSimilarity,
    v: &[f64],
    c0: f64,
) -> Result<RowConcentrationReport> {
    let n = w.n();
    if es.n() != n || v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if es.n() != n { es.n() } else { v.len() },
        });
    }
    let vinf = norm_inf(v);
    if vinf == 0.0 {
        return Err(Error::invalid("test vector must be nonzero"));
    }
    let ratio = norm2(v) / ((n as f64).sqrt() * vinf);
    let budget = vinf * phi(es.d(), c0, ratio)? * (n as f64).ln();
    let mut max_deviation = 0.0f64;
    let mut exceed_count = 0usize;
    for i in 0..n {
        let mut dot = 0.0;
        for j in 0..n {
            dot += (w.get(i, j) as f64 - es.entry(i, j)) * v[j];
        }
        let dev = dot.abs();
        max_deviation = max_deviation.max(dev);
        if dev > budget {
            exceed_count += 1;
        }
    }
    Ok(RowConcentrationReport {
        budget,
        max_deviation,
        exceed_count,
    })
}

/// ‖W - W*‖₂, the operator-norm deviation from the planted expectation.
pub fn spectral_norm_deviation(w: &SimilarityMatrix, es: &ExpectedSimilarity) -> Result<f64> {
    if w.n() != es.n() {
        return Err(Error::DimensionMismatch {
            expected: es.n(),
            got: w.n(),
        });
    }
    let n = w.n();
    let diff = Mat::from_fn(n, |i, j| w.get(i, j) as f64 - es.entry(i, j));
    crate::linalg::spectral_norm(&diff)
}
