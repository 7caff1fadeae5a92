//! Hypergraph community models and samplers.
//!
//! The planted model: n vertices split into two equal communities by a
//! hidden assignment σ* ∈ {±1}ⁿ. Every d-subset of vertices appears as a
//! hyperedge independently, with probability `alpha·log n / C(n-1, d-1)` if
//! all its vertices share one label ("homogeneous") and
//! `beta·log n / C(n-1, d-1)` otherwise. A general inhomogeneous model with
//! per-edge probabilities is provided for adversarial and diagnostic use.
//!
//! Sampling never enumerates all C(n, d) subsets in the sparse regime: each
//! edge class (homogeneous within a community, heterogeneous) gets a
//! binomial draw for its edge count followed by uniform distinct-subset
//! draws, which is distributionally identical to independent per-edge coin
//! flips. Everything is seeded explicitly and bit-reproducible.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::distributions::Distribution;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;

use crate::combin::{binomial, binomial_f64, for_each_subset};
use crate::error::{Error, Result};
use crate::rng::{mix_seed, substream};

/// Largest supported edge order. Keeps packed edge keys inside 128 bits and
/// matches the regime where the model is meaningful at desk scale.
pub const MAX_EDGE_ORDER: usize = 8;

/// Largest supported vertex count (vertex ids must fit in 16 bits).
pub const MAX_VERTICES: usize = u16::MAX as usize;

// ---------------------------------------------------------------------------
// Community assignments
// ---------------------------------------------------------------------------

/// A ±1 label per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityAssignment {
    labels: Vec<i8>,
}

impl CommunityAssignment {
    /// Validates that every label is +1 or -1.
    pub fn new(labels: Vec<i8>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::invalid("assignment must be non-empty"));
        }
        if let Some(bad) = labels.iter().find(|&&l| l != 1 && l != -1) {
            return Err(Error::invalid(format!(
                "assignment labels must be +1 or -1, found {bad}"
            )));
        }
        Ok(Self { labels })
    }

    /// The assignment (+1, ..., +1, -1, ..., -1) with equal halves.
    pub fn split_halves(n: usize) -> Result<Self> {
        if n == 0 || n % 2 != 0 {
            return Err(Error::invalid(format!("n must be positive and even, got {n}")));
        }
        let mut labels = vec![1i8; n];
        labels[n / 2..].fill(-1);
        Ok(Self { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    /// Label of vertex `i` as a signed integer.
    pub fn sign(&self, i: usize) -> i8 {
        self.labels[i]
    }

    /// Exactly as many +1 as -1 labels.
    pub fn is_balanced(&self) -> bool {
        self.labels.iter().map(|&l| l as i64).sum::<i64>() == 0
    }

    /// Indices carrying the given label.
    pub fn members(&self, label: i8) -> Vec<u32> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == label)
            .map(|(i, _)| i as u32)
            .collect()
    }

    /// Hamming distance to `other`, minimized over a global sign flip.
    pub fn hamming_up_to_flip(&self, other: &CommunityAssignment) -> Result<usize> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let direct = self
            .labels
            .iter()
            .zip(&other.labels)
            .filter(|(a, b)| a != b)
            .count();
        Ok(direct.min(self.len() - direct))
    }

    /// True when the two assignments agree exactly up to a global flip.
    pub fn agrees_up_to_flip(&self, other: &CommunityAssignment) -> Result<bool> {
        Ok(self.hamming_up_to_flip(other)? == 0)
    }

    /// One line of space-separated ±1 values.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * 3);
        for (i, &l) in self.labels.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{l}");
        }
        out.push('\n');
        out
    }

    /// Parses the `to_text` format. Accepts `+1`, `1`, and `-1` tokens.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut labels = Vec::new();
        for tok in text.split_whitespace() {
            match tok {
                "1" | "+1" => labels.push(1),
                "-1" => labels.push(-1),
                other => {
                    return Err(Error::Parse(format!(
                        "assignment entries must be +1 or -1, found {other:?}"
                    )))
                }
            }
        }
        Self::new(labels)
    }
}

/// Draws a uniformly random balanced ±1 assignment.
pub fn sample_balanced_assignment(n: usize, seed: u64) -> Result<CommunityAssignment> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::invalid(format!("n must be positive and even, got {n}")));
    }
    let mut assignment = CommunityAssignment::split_halves(n)?;
    let mut rng = substream(seed, 0xA551);
    // Fisher-Yates on the label vector: uniform over balanced assignments.
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        assignment.labels.swap(i, j);
    }
    Ok(assignment)
}

// ---------------------------------------------------------------------------
// Hypergraphs
// ---------------------------------------------------------------------------

/// A d-uniform hypergraph on vertices `0..n`.
///
/// Edges are stored flat (stride `d`), each edge strictly increasing, the
/// edge list sorted lexicographically, no duplicates. This canonical form is
/// what the text serialization emits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    d: usize,
    flat: Vec<u32>,
}

impl Hypergraph {
    /// Builds and canonicalizes a hypergraph from an explicit edge list.
    /// Vertices are 0-based. Edges may arrive in any order; duplicate edges
    /// or repeated vertices within an edge are rejected.
    pub fn new(n: usize, d: usize, edges: Vec<Vec<u32>>) -> Result<Self> {
        check_order(d)?;
        check_vertex_count(n, d)?;
        let mut canon: Vec<Vec<u32>> = Vec::with_capacity(edges.len());
        for mut e in edges {
            if e.len() != d {
                return Err(Error::invalid(format!(
                    "edge {e:?} has {} vertices, expected {d}",
                    e.len()
                )));
            }
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("edge {e:?} repeats a vertex")));
            }
            if e[d - 1] as usize >= n {
                return Err(Error::invalid(format!(
                    "edge {e:?} references vertex >= n = {n}"
                )));
            }
            canon.push(e);
        }
        canon.sort_unstable();
        if canon.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("duplicate edge in edge list"));
        }
        let mut flat = Vec::with_capacity(canon.len() * d);
        for e in &canon {
            flat.extend_from_slice(e);
        }
        Ok(Self { n, d, flat })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn edge_count(&self) -> usize {
        self.flat.len() / self.d
    }

    /// Iterates edges as sorted vertex slices.
    pub fn edges(&self) -> impl Iterator<Item = &[u32]> {
        self.flat.chunks_exact(self.d)
    }

    /// Number of edges containing each vertex.
    pub fn degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.n];
        for e in self.edges() {
            for &v in e {
                deg[v as usize] += 1;
            }
        }
        deg
    }

    /// Header `d n m`, then one line per edge: d space-separated 1-based
    /// vertex ids, sorted within each line and lexicographically across lines.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(16 + self.flat.len() * 6);
        let _ = writeln!(out, "{} {} {}", self.d, self.n, self.edge_count());
        for e in self.edges() {
            for (i, &v) in e.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{}", v + 1);
            }
            out.push('\n');
        }
        out
    }

    /// Parses the `to_text` format, canonicalizing edge order.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let head: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("bad header token {t:?}: {e}"))))
            .collect::<Result<_>>()?;
        let [d, n, m] = head[..] else {
            return Err(Error::Parse(format!("header must be `d n m`, got {header:?}")));
        };
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            let mut edge = Vec::with_capacity(d);
            for tok in line.split_whitespace() {
                let v: u64 = tok
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad vertex {tok:?}: {e}")))?;
                if v == 0 || v as usize > n {
                    return Err(Error::Parse(format!(
                        "vertex {v} out of range 1..={n}"
                    )));
                }
                edge.push((v - 1) as u32);
            }
            edges.push(edge);
        }
        if edges.len() != m {
            return Err(Error::Parse(format!(
                "header promises {m} edges, found {}",
                edges.len()
            )));
        }
        Self::new(n, d, edges)
    }

    /// Structural invariants of the canonical form. Cheap; used liberally in
    /// tests and after deserialization.
    pub fn validate(&self) -> Result<()> {
        check_order(self.d)?;
        check_vertex_count(self.n, self.d)?;
        if self.flat.len() % self.d != 0 {
            return Err(Error::invalid("flat edge storage not a multiple of d"));
        }
        let mut prev: Option<&[u32]> = None;
        for e in self.edges() {
            if e.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(format!("edge {e:?} not strictly increasing")));
            }
            if e[self.d - 1] as usize >= self.n {
                return Err(Error::invalid(format!("edge {e:?} out of range")));
            }
            if let Some(p) = prev {
                if p >= e {
                    return Err(Error::invalid("edge list not sorted and distinct"));
                }
            }
            prev = Some(e);
        }
        Ok(())
    }

    fn from_packed(n: usize, d: usize, mut keys: Vec<u128>) -> Self {
        keys.sort_unstable();
        let mut flat = Vec::with_capacity(keys.len() * d);
        for key in keys {
            let base = flat.len();
            flat.resize(base + d, 0);
            let mut k = key;
            for slot in (0..d).rev() {
                flat[base + slot] = (k & 0xFFFF) as u32;
                k >>= 16;
            }
        }
        Self { n, d, flat }
    }
}

fn check_order(d: usize) -> Result<()> {
    if !(2..=MAX_EDGE_ORDER).contains(&d) {
        return Err(Error::invalid(format!(
            "edge order d must be in 2..={MAX_EDGE_ORDER}, got {d}"
        )));
    }
    Ok(())
}

fn check_vertex_count(n: usize, d: usize) -> Result<()> {
    if n < d {
        return Err(Error::invalid(format!("need n >= d, got n = {n}, d = {d}")));
    }
    if n > MAX_VERTICES {
        return Err(Error::invalid(format!(
            "n = {n} exceeds supported maximum {MAX_VERTICES}"
        )));
    }
    Ok(())
}

/// Packs a sorted edge into a 128-bit key (16 bits per vertex).
fn pack(edge: &[u32]) -> u128 {
    edge.iter().fold(0u128, |acc, &v| (acc << 16) | v as u128)
}

// ---------------------------------------------------------------------------
// Planted-partition parameters
// ---------------------------------------------------------------------------

/// Parameters of the planted d-uniform model.
///
/// `alpha` is the homogeneous-edge rate and `beta` the heterogeneous rate,
/// both in units of `log n / C(n-1, d-1)`. Recovery regimes require
/// `alpha > beta`; equality is accepted so degenerate instances can be used
/// in concentration diagnostics.
#[derive(Debug, Clone)]
pub struct HsbmParams {
    d: usize,
    n: usize,
    alpha: f64,
    beta: f64,
    seed: u64,
}

impl HsbmParams {
    pub fn new(d: usize, n: usize, alpha: f64, beta: f64, seed: u64) -> Result<Self> {
        check_order(d)?;
        check_vertex_count(n, d)?;
        if n % 2 != 0 {
            return Err(Error::invalid(format!("n must be even, got {n}")));
        }
        if n < 2 * d {
            return Err(Error::invalid(format!(
                "need n >= 2d so both communities can host edges, got n = {n}, d = {d}"
            )));
        }
        if !alpha.is_finite() || !beta.is_finite() || alpha <= 0.0 || beta < 0.0 {
            return Err(Error::invalid(format!(
                "rates must be finite with alpha > 0, beta >= 0, got alpha = {alpha}, beta = {beta}"
            )));
        }
        if beta > alpha {
            return Err(Error::invalid(format!(
                "need beta <= alpha, got alpha = {alpha}, beta = {beta}"
            )));
        }
        let params = Self { d, n, alpha, beta, seed };
        let q_hom = params.edge_probability(true)?;
        let q_het = params.edge_probability(false)?;
        for (q, what) in [(q_hom, "homogeneous"), (q_het, "heterogeneous")] {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::ProbabilityOutOfRange {
                    value: q,
                    context: if what == "homogeneous" {
                        "homogeneous edge probability"
                    } else {
                        "heterogeneous edge probability"
                    },
                });
            }
        }
        Ok(params)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Raw per-edge probability `rate · log n / C(n-1, d-1)`.
    pub fn edge_probability(&self, homogeneous: bool) -> Result<f64> {
        let rate = if homogeneous { self.alpha } else { self.beta };
        let denom = binomial_f64(self.n as u64 - 1, self.d as u64 - 1);
        Ok(rate * (self.n as f64).ln() / denom)
    }
}

/// Samples one hypergraph from the planted model, conditioned on `sigma`.
///
/// `sigma` must be a balanced assignment of length n. Three edge classes are
/// sampled independently: homogeneous inside each community and
/// heterogeneous across, each via a binomial count plus uniform distinct
/// edges, reproducing independent Bernoulli edges exactly.
pub fn sample_hsbm(params: &HsbmParams, sigma: &CommunityAssignment) -> Result<Hypergraph> {
    if sigma.len() != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            got: sigma.len(),
        });
    }
    if !sigma.is_balanced() {
        return Err(Error::invalid("planted assignment must be balanced"));
    }
    let d = params.d;
    let n = params.n;
    let q_hom = params.edge_probability(true)?;
    let q_het = params.edge_probability(false)?;

    let plus = sigma.members(1);
    let minus = sigma.members(-1);

    let mut keys: Vec<u128> = Vec::new();
    // Sub-stream tags keep the three classes statistically independent and
    // individually reproducible.
    sample_within(&plus, d, q_hom, &mut substream(params.seed, 1), &mut keys)?;
    sample_within(&minus, d, q_hom, &mut substream(params.seed, 2), &mut keys)?;
    sample_heterogeneous(sigma, d, q_het, &mut substream(params.seed, 3), &mut keys)?;

    Ok(Hypergraph::from_packed(n, d, keys))
}

/// Binomial draw for the number of present edges in a class of given size.
fn class_edge_count(class_size: u128, p: f64, rng: &mut ChaCha8Rng) -> Result<u64> {
    if class_size == 0 || p == 0.0 {
        return Ok(0);
    }
    let size = u64::try_from(class_size).map_err(|_| {
        Error::invalid(format!(
            "edge class of size {class_size} exceeds the samplable range"
        ))
    })?;
    let dist = Binomial::new(size, p)
        .map_err(|e| Error::invalid(format!("binomial({size}, {p}): {e}")))?;
    Ok(dist.sample(rng))
}

/// Samples `count` distinct d-subsets uniformly from `members`, appending
/// packed keys. Uses rejection when the class is much larger than the draw
/// and a single enumeration pass otherwise, so coupon-collector stalls are
/// impossible.
fn sample_distinct_within(
    members: &[u32],
    d: usize,
    count: u64,
    class_size: u128,
    rng: &mut ChaCha8Rng,
    keys: &mut Vec<u128>,
) -> Result<()> {
    if count == 0 {
        return Ok(());
    }
    if class_size <= 4 * count as u128 {
        // Dense draw: pick `count` distinct positions in the lexicographic
        // enumeration of the class, then walk the enumeration once.
        let total = class_size as usize;
        let chosen: HashSet<usize> = rand::seq::index::sample(rng, total, count as usize)
            .into_iter()
            .collect();
        let mut pos = 0usize;
        let mut edge = vec![0u32; d];
        for_each_subset(members.len() as u32, d as u32, |subset| {
            if chosen.contains(&pos) {
                for (slot, &idx) in edge.iter_mut().zip(subset) {
                    *slot = members[idx as usize];
                }
                // Members are in increasing order, so `edge` is sorted.
                keys.push(pack(&edge));
            }
            pos += 1;
        });
        return Ok(());
    }
    // Sparse draw: rejection over uniform d-subsets of `members`.
    let mut seen: HashSet<u128> = HashSet::with_capacity(count as usize * 2);
    let mut edge = vec![0u32; d];
    while (seen.len() as u64) < count {
        let picks = rand::seq::index::sample(rng, members.len(), d);
        for (slot, idx) in edge.iter_mut().zip(picks) {
            *slot = members[idx];
        }
        edge.sort_unstable();
        let key = pack(&edge);
        if seen.insert(key) {
            keys.push(key);
        }
    }
    Ok(())
}

/// Homogeneous edges inside one community.
fn sample_within(
    members: &[u32],
    d: usize,
    q: f64,
    rng: &mut ChaCha8Rng,
    keys: &mut Vec<u128>,
) -> Result<()> {
    let class_size = binomial(members.len() as u64, d as u64)?;
    let count = class_edge_count(class_size, q, rng)?;
    sample_distinct_within(members, d, count, class_size, rng, keys)
}

/// Heterogeneous edges: d-subsets of all vertices whose labels are not all
/// equal. Rejection from uniform subsets; the acceptance rate is at least
/// 1 - 2^{1-d} >= 1/2, and a dense fallback covers tiny instances.
fn sample_heterogeneous(
    sigma: &CommunityAssignment,
    d: usize,
    q: f64,
    rng: &mut ChaCha8Rng,
    keys: &mut Vec<u128>,
) -> Result<()> {
    let n = sigma.len();
    let half = n / 2;
    let total = binomial(n as u64, d as u64)?;
    let hom = 2 * binomial(half as u64, d as u64)?;
    let class_size = total - hom;
    let count = class_edge_count(class_size, q, rng)?;
    if count == 0 {
        return Ok(());
    }
    let is_heterogeneous = |edge: &[u32]| {
        let first = sigma.sign(edge[0] as usize);
        edge[1..].iter().any(|&v| sigma.sign(v as usize) != first)
    };
    if class_size <= 4 * count as u128 {
        let chosen: HashSet<usize> = rand::seq::index::sample(rng, class_size as usize, count as usize)
            .into_iter()
            .collect();
        let mut pos = 0usize;
        for_each_subset(n as u32, d as u32, |subset| {
            if is_heterogeneous(subset) {
                if chosen.contains(&pos) {
                    keys.push(pack(subset));
                }
                pos += 1;
            }
        });
        return Ok(());
    }
    let mut seen: HashSet<u128> = HashSet::with_capacity(count as usize * 2);
    let mut edge = vec![0u32; d];
    while (seen.len() as u64) < count {
        let picks = rand::seq::index::sample(rng, n, d);
        for (slot, idx) in edge.iter_mut().zip(picks) {
            *slot = idx as u32;
        }
        edge.sort_unstable();
        if !is_heterogeneous(&edge) {
            continue;
        }
        let key = pack(&edge);
        if seen.insert(key) {
            keys.push(key);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// General (inhomogeneous) model
// ---------------------------------------------------------------------------

/// Per-edge probability assignment for the general model.
#[derive(Clone)]
pub enum EdgeProbabilities {
    /// Explicit probabilities; edges absent from the map have probability 0.
    /// Keys are sorted 0-based vertex lists.
    Explicit(std::collections::BTreeMap<Vec<u32>, f64>),
    /// Every d-subset carries the same probability.
    Constant(f64),
    /// Probability computed on demand. `p_max` must upper-bound every value
    /// the rule returns; sampling thins a rate-`p_max` draw.
    Rule {
        p_max: f64,
        rule: Arc<dyn Fn(&[u32]) -> f64 + Send + Sync>,
    },
}

impl std::fmt::Debug for EdgeProbabilities {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EdgeProbabilities::Explicit(map) => {
                f.debug_tuple("Explicit").field(&map.len()).finish()
            }
            EdgeProbabilities::Constant(p) => f.debug_tuple("Constant").field(p).finish(),
            EdgeProbabilities::Rule { p_max, .. } => {
                f.debug_struct("Rule").field("p_max", p_max).finish()
            }
        }
    }
}

/// Parameters of the general model: every d-subset of `0..n` appears
/// independently with its own probability.
#[derive(Debug, Clone)]
pub struct GeneralHypergraphParams {
    d: usize,
    n: usize,
    probabilities: EdgeProbabilities,
}

impl GeneralHypergraphParams {
    pub fn new(d: usize, n: usize, probabilities: EdgeProbabilities) -> Result<Self> {
        check_order(d)?;
        check_vertex_count(n, d)?;
        match &probabilities {
            EdgeProbabilities::Explicit(map) => {
                for (edge, &p) in map {
                    if edge.len() != d
                        || edge.windows(2).any(|w| w[0] >= w[1])
                        || edge.last().is_some_and(|&v| v as usize >= n)
                    {
                        return Err(Error::invalid(format!(
                            "map key {edge:?} is not a sorted d-subset of 0..{n}"
                        )));
                    }
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Error::ProbabilityOutOfRange {
                            value: p,
                            context: "explicit edge probability",
                        });
                    }
                }
            }
            EdgeProbabilities::Constant(p) => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::ProbabilityOutOfRange {
                        value: *p,
                        context: "constant edge probability",
                    });
                }
            }
            EdgeProbabilities::Rule { p_max, .. } => {
                if !(0.0..=1.0).contains(p_max) {
                    return Err(Error::ProbabilityOutOfRange {
                        value: *p_max,
                        context: "rule probability bound",
                    });
                }
            }
        }
        Ok(Self { d, n, probabilities })
    }

    /// Convenience constructor for the scaled constant model
    /// `p = c0 · log n / C(n-1, d-1)`.
    pub fn constant_rate(d: usize, n: usize, c0: f64) -> Result<Self> {
        check_order(d)?;
        check_vertex_count(n, d)?;
        let p = c0 * (n as f64).ln() / binomial_f64(n as u64 - 1, d as u64 - 1);
        Self::new(d, n, EdgeProbabilities::Constant(p))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probabilities(&self) -> &EdgeProbabilities {
        &self.probabilities
    }

    /// Upper bound on any single edge probability.
    pub fn p_max(&self) -> f64 {
        match &self.probabilities {
            EdgeProbabilities::Explicit(map) => {
                map.values().copied().fold(0.0, f64::max)
            }
            EdgeProbabilities::Constant(p) => *p,
            EdgeProbabilities::Rule { p_max, .. } => *p_max,
        }
    }

    /// The constant c0 with `max_e p_e <= c0 · log n / C(n-1, d-1)`, used by
    /// row-concentration diagnostics.
    pub fn c0(&self) -> f64 {
        self.p_max() * binomial_f64(self.n as u64 - 1, self.d as u64 - 1) / (self.n as f64).ln()
    }
}

/// Samples one hypergraph from the general model.
pub fn sample_general(params: &GeneralHypergraphParams, seed: u64) -> Result<Hypergraph> {
    let d = params.d;
    let n = params.n;
    let mut keys: Vec<u128> = Vec::new();
    match &params.probabilities {
        EdgeProbabilities::Explicit(map) => {
            // BTreeMap order makes the stream deterministic.
            let mut rng = substream(seed, 11);
            for (edge, &p) in map {
                if rng.gen::<f64>() < p {
                    keys.push(pack(edge));
                }
            }
        }
        EdgeProbabilities::Constant(p) => {
            let mut rng = substream(seed, 12);
            let class_size = binomial(n as u64, d as u64)?;
            let count = class_edge_count(class_size, *p, &mut rng)?;
            let members: Vec<u32> = (0..n as u32).collect();
            sample_distinct_within(&members, d, count, class_size, &mut rng, &mut keys)?;
        }
        EdgeProbabilities::Rule { p_max, rule } => {
            // Thinning: draw at the uniform upper rate, keep with p_e / p_max.
            let mut rng = substream(seed, 13);
            let class_size = binomial(n as u64, d as u64)?;
            let count = class_edge_count(class_size, *p_max, &mut rng)?;
            let members: Vec<u32> = (0..n as u32).collect();
            let mut candidates = Vec::new();
            sample_distinct_within(&members, d, count, class_size, &mut rng, &mut candidates)?;
            candidates.sort_unstable();
            let mut edge = vec![0u32; d];
            for key in candidates {
                let mut k = key;
                for slot in (0..d).rev() {
                    edge[slot] = (k & 0xFFFF) as u32;
                    k >>= 16;
                }
                let p = rule(&edge);
                if !(0.0..=*p_max).contains(&p) {
                    return Err(Error::ProbabilityOutOfRange {
                        value: p,
                        context: "rule probability above its declared bound",
                    });
                }
                if rng.gen::<f64>() < p / p_max {
                    keys.push(key);
                }
            }
        }
    }
    Ok(Hypergraph::from_packed(n, d, keys))
}

/// Stable per-trial seed for experiment grids: mixes the base seed with the
/// cell, size, and trial coordinates.
pub fn trial_seed(base: u64, cell: u64, n: u64, trial: u64) -> u64 {
    mix_seed(&[base, cell, n, trial])
}
