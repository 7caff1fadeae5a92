//! Pairwise similarity matrices.
//!
//! The observable handed to every recovery algorithm is W = S(G): W_ij
//! counts the hyperedges containing both i and j, with a zero diagonal. Its
//! conditional expectation under the planted model is an exact rank-two
//! matrix plus a diagonal shift,
//!
//!   W* = ((p' + q')/2)·11ᵀ + ((p' - q')/2)·σ*σ*ᵀ - p'·I,
//!
//! which this module keeps in factored form (p', q', σ*) so its spectrum is
//! available in closed form: λ₁* = (p'+q')n/2 - p', λ₂* = (p'-q')n/2 - p'
//! with unit eigenvector σ*/√n, and all remaining eigenvalues equal to -p'.

use std::fmt::Write as _;

use crate::combin::binomial_f64;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::model::{CommunityAssignment, Hypergraph, HsbmParams};

/// Symmetric integer matrix of pairwise co-occurrence counts, zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityMatrix {
    n: usize,
    entries: Vec<i64>, // row-major
}

impl SimilarityMatrix {
    /// W = S(G): one pass over the edges, O(|E|·d²) increments.
    pub fn from_hypergraph(g: &Hypergraph) -> Self {
        let n = g.n();
        let mut entries = vec![0i64; n * n];
        for e in g.edges() {
            for (k, &a) in e.iter().enumerate() {
                for &b in &e[k + 1..] {
                    entries[a as usize * n + b as usize] += 1;
                    entries[b as usize * n + a as usize] += 1;
                }
            }
        }
        Self { n, entries }
    }

    /// S(G^(m)): the similarity matrix of G with every edge containing
    /// vertex `m` removed.
    pub fn leave_one_out(g: &Hypergraph, m: usize) -> Result<Self> {
        if m >= g.n() {
            return Err(Error::invalid(format!(
                "vertex {m} out of range for n = {}",
                g.n()
            )));
        }
        let n = g.n();
        let mut entries = vec![0i64; n * n];
        let m = m as u32;
        for e in g.edges() {
            if e.contains(&m) {
                continue;
            }
            for (k, &a) in e.iter().enumerate() {
                for &b in &e[k + 1..] {
                    entries[a as usize * n + b as usize] += 1;
                    entries[b as usize * n + a as usize] += 1;
                }
            }
        }
        Ok(Self { n, entries })
    }

    /// Wraps validated raw entries: square, symmetric, zero diagonal,
    /// non-negative (similarities are counts).
    pub fn from_entries(n: usize, entries: Vec<i64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        for i in 0..n {
            if entries[i * n + i] != 0 {
                return Err(Error::invalid(format!("diagonal entry ({i},{i}) must be 0")));
            }
            for j in 0..i {
                let a = entries[i * n + j];
                let b = entries[j * n + i];
                if a != b {
                    return Err(Error::invalid(format!(
                        "entries ({i},{j}) = {a} and ({j},{i}) = {b} break symmetry"
                    )));
                }
                if a < 0 {
                    return Err(Error::invalid(format!(
                        "entry ({i},{j}) = {a} is negative; similarities are counts"
                    )));
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn total_sum(&self) -> i64 {
        self.entries.iter().sum()
    }

    pub fn row_sum(&self, i: usize) -> i64 {
        self.row(i).iter().sum()
    }

    /// Conversion to floating point at the linear-algebra boundary.
    pub fn to_mat(&self) -> Mat {
        let n = self.n;
        Mat::from_fn(n, |i, j| self.entries[i * n + j] as f64)
    }

    /// Σ_j W_ij σ_j, exactly in integers. Panics on a length mismatch.
    pub fn signed_row_sum(&self, i: usize, sigma: &CommunityAssignment) -> i64 {
        assert_eq!(sigma.len(), self.n, "assignment length must match matrix order");
        self.row(i)
            .iter()
            .zip(sigma.labels())
            .map(|(&w, &s)| w * s as i64)
            .sum()
    }

    /// ⟨W, σσᵀ⟩ = Σ_ij W_ij σ_i σ_j, exactly in integers — the objective the
    /// relaxation and the exhaustive oracle both maximize.
    pub fn quadratic_form(&self, sigma: &CommunityAssignment) -> i64 {
        (0..self.n)
            .map(|i| sigma.sign(i) as i64 * self.signed_row_sum(i, sigma))
            .sum()
    }

    /// Plain CSV: one row per line, comma-separated integers, no header.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.n * self.n * 2);
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", self.get(i, j));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: Vec<i64> = line
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<i64>()
                        .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
                })
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        let n = rows.len();
        if n == 0 {
            return Err(Error::Parse("empty matrix".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::Parse(format!(
                    "matrix must be square: {n} rows but a row of width {}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        Self::from_entries(n, entries)
    }
}

/// The conditional expectation E[W | σ*] in factored form.
#[derive(Debug, Clone)]
pub struct ExpectedSimilarity {
    n: usize,
    d: usize,
    p_prime: f64,
    q_prime: f64,
    assignment: CommunityAssignment,
}

impl ExpectedSimilarity {
    /// Intra-pair mean p' and cross-pair mean q' from the model rates:
    ///   p' = [C(n/2-2, d-2)·α + (C(n-2, d-2) - C(n/2-2, d-2))·β] · L
    ///   q' = C(n-2, d-2)·β·L,          L = log n / C(n-1, d-1).
    pub fn new(params: &HsbmParams, sigma: &CommunityAssignment) -> Result<Self> {
        if sigma.len() != params.n() {
            return Err(Error::DimensionMismatch {
                expected: params.n(),
                got: sigma.len(),
            });
        }
        if !sigma.is_balanced() {
            return Err(Error::invalid("conditioning assignment must be balanced"));
        }
        let n = params.n() as u64;
        let d = params.d() as u64;
        let scale = (params.n() as f64).ln() / binomial_f64(n - 1, d - 1);
        let same = binomial_f64(n / 2 - 2, d - 2);
        let all = binomial_f64(n - 2, d - 2);
        let p_prime = (same * params.alpha() + (all - same) * params.beta()) * scale;
        let q_prime = all * params.beta() * scale;
        Ok(Self {
            n: params.n(),
            d: params.d(),
            p_prime,
            q_prime,
            assignment: sigma.clone(),
        })
    }

    /// Degenerate flat mean with every off-diagonal entry equal: the
    /// expectation of the constant-rate general model, where
    /// entry = C(n-2, d-2)·p. Requires even n only so a placeholder
    /// assignment exists; the assignment plays no role when p' = q'.
    pub fn uniform(d: usize, n: usize, entry: f64) -> Result<Self> {
        Ok(Self {
            n,
            d,
            p_prime: entry,
            q_prime: entry,
            assignment: CommunityAssignment::split_halves(n)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p_prime(&self) -> f64 {
        self.p_prime
    }

    pub fn q_prime(&self) -> f64 {
        self.q_prime
    }

    pub fn assignment(&self) -> &CommunityAssignment {
        &self.assignment
    }

    /// W*_ij by pair class; zero diagonal.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else if self.assignment.sign(i) == self.assignment.sign(j) {
            self.p_prime
        } else {
            self.q_prime
        }
    }

    /// Dense realization of W*.
    pub fn materialize(&self) -> Mat {
        Mat::from_fn(self.n, |i, j| self.entry(i, j))
    }

    /// λ₁* = (p'+q')n/2 - p', the all-ones-direction eigenvalue.
    pub fn lambda1(&self) -> f64 {
        (self.p_prime + self.q_prime) * self.n as f64 / 2.0 - self.p_prime
    }

    /// λ₂* = (p'-q')n/2 - p', the community-direction eigenvalue.
    pub fn lambda2(&self) -> f64 {
        (self.p_prime - self.q_prime) * self.n as f64 / 2.0 - self.p_prime
    }

    /// Every eigenvalue orthogonal to 1 and σ* equals -p'.
    pub fn lambda_rest(&self) -> f64 {
        -self.p_prime
    }

    /// Unit eigenvector σ*/√n for λ₂*.
    pub fn u2(&self) -> Vec<f64> {
        let scale = 1.0 / (self.n as f64).sqrt();
        self.assignment
            .labels()
            .iter()
            .map(|&s| s as f64 * scale)
            .collect()
    }

    /// Spectral gap around λ₂*: min(λ₁* - λ₂*, λ₂* - λ₃*) =
    /// min(q'·n, (p'-q')·n/2).
    pub fn lambda2_gap(&self) -> f64 {
        let n = self.n as f64;
        (self.q_prime * n).min((self.p_prime - self.q_prime) * n / 2.0)
    }

    /// Both |λ₂*| and its gap within a factor c₁ of log n — the regime in
    /// which entrywise eigenvector control is meaningful.
    pub fn separation_ok(&self, c1: f64) -> bool {
        let log_n = (self.n as f64).ln();
        let ratio_ok = |x: f64| x / log_n >= 1.0 / c1 && x / log_n <= c1;
        ratio_ok(self.lambda2().abs()) && ratio_ok(self.lambda2_gap().abs())
    }
}

/// Literal E[W] of the general model. Supported for explicit maps (sum over
/// the map) and constant probabilities (closed form); rule-based models
/// would require full enumeration and are rejected.
pub fn general_expected_similarity(
    params: &crate::model::GeneralHypergraphParams,
) -> Result<Mat> {
    use crate::model::EdgeProbabilities;
    let n = params.n();
    match params.probabilities() {
        EdgeProbabilities::Explicit(map) => {
            let mut m = Mat::zeros(n);
            for (edge, &p) in map {
                for (k, &a) in edge.iter().enumerate() {
                    for &b in &edge[k + 1..] {
                        let (a, b) = (a as usize, b as usize);
                        m.set(a, b, m.get(a, b) + p);
                        m.set(b, a, m.get(b, a) + p);
                    }
                }
            }
            Ok(m)
        }
        EdgeProbabilities::Constant(p) => {
            let entry = binomial_f64(n as u64 - 2, params.d() as u64 - 2) * p;
            Ok(Mat::from_fn(n, |i, j| if i == j { 0.0 } else { entry }))
        }
        EdgeProbabilities::Rule { .. } => Err(Error::invalid(
            "expected similarity of a rule-based model requires enumeration; \
             materialize the rule into an explicit map first",
        )),
    }
}
