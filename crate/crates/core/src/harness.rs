//! Monte Carlo experiment harness.
//!
//! Experiments are grids of cells (parameter points) times repeated trials.
//! Each trial derives its own seed from (base seed, cell, n, trial), so any
//! subset can be recomputed independently and in any order: every
//! measurement column is bitwise reproducible under resumption and across
//! thread counts (the per-method runtime columns are wall clock and are
//! not). Trials within a cell run in parallel on the rayon pool (bounded by
//! RAYON_NUM_THREADS); records land in a flat CSV file, cell by cell, with
//! the resolved configuration in a JSON sidecar so a resumed run can refuse
//! to mix incompatible results.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    sample_balanced_assignment, sample_hsbm, trial_seed, CommunityAssignment, HsbmParams,
};
use crate::rng::{mix_seed, substream};
use crate::sdp::{certify, CERT_TOL};
use crate::similarity::{ExpectedSimilarity, SimilarityMatrix};
use crate::spectral::{
    entrywise_report, row_concentration_check, spectral_norm_deviation, spectral_recover,
};
use crate::thresholds::{phase_boundary, threshold_i, threshold_i_sdp, ThresholdKind};

/// Two-sided 95% normal quantile used for Wilson intervals.
pub const Z_95: f64 = 1.959963984540054;

/// One grid point. `TargetI` names the signal level by the threshold value
/// it should sit at: α is solved from I(d, α, β) = target at load time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CellSpec {
    Explicit { d: usize, n: usize, alpha: f64, beta: f64 },
    TargetI { d: usize, n: usize, target_i: f64, beta: f64 },
}

/// A cell with its α made concrete and both threshold functionals attached.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedCell {
    pub cell: usize,
    pub d: usize,
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    /// The threshold value I(d, α, β) at the resolved parameters.
    pub threshold: f64,
    /// The relaxation's guarantee level I_SDP(d, α, β).
    pub threshold_sdp: f64,
}

impl CellSpec {
    fn resolve(&self, index: usize) -> Result<ResolvedCell> {
        let (d, n, alpha, beta) = match *self {
            CellSpec::Explicit { d, n, alpha, beta } => (d, n, alpha, beta),
            CellSpec::TargetI { d, n, target_i, beta } => {
                let alpha = phase_boundary(ThresholdKind::Information, d, beta, target_i)?;
                (d, n, alpha, beta)
            }
        };
        let threshold = threshold_i(d, alpha, beta)?.value;
        let threshold_sdp = threshold_i_sdp(d, alpha, beta)?;
        // Surface invalid cells (probabilities out of range, odd n, ...)
        // at resolution time rather than inside worker threads.
        HsbmParams::new(d, n, alpha, beta, 0)?;
        Ok(ResolvedCell {
            cell: index,
            d,
            n,
            alpha,
            beta,
            threshold,
            threshold_sdp,
        })
    }
}

/// Which quantities each trial computes. Everything not measured is left
/// empty in the CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Measurements {
    /// Spectral recovery success against the planted assignment.
    pub spectral: bool,
    /// SDP recovery success (certificate-first, ADMM fallback).
    pub sdp: bool,
    /// Exhaustive min-bisection oracle agreement; only feasible for small n,
    /// larger instances record an error row.
    pub oracle: bool,
    /// Dual-certificate check of the planted assignment.
    pub certify: bool,
    /// Entrywise eigenvector error report (implies spectral recovery).
    pub entrywise: bool,
    /// Operator-norm deviation ‖W - W*‖₂.
    pub deviation: bool,
}

impl Default for Measurements {
    fn default() -> Self {
        Self {
            spectral: true,
            sdp: false,
            oracle: false,
            certify: true,
            entrywise: false,
            deviation: false,
        }
    }
}

fn default_cert_tol() -> f64 {
    CERT_TOL
}

/// A reproducible experiment: cells × trials plus what to measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub base_seed: u64,
    pub trials: u64,
    pub cells: Vec<CellSpec>,
    #[serde(default)]
    pub measurements: Measurements,
    #[serde(default = "default_cert_tol")]
    pub certificate_tol: f64,
    /// Default results path; callers may override it.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("an experiment needs at least one trial"));
        }
        if self.cells.is_empty() {
            return Err(Error::invalid("an experiment needs at least one cell"));
        }
        if !(self.certificate_tol.is_finite() && self.certificate_tol > 0.0) {
            return Err(Error::invalid(format!(
                "certificate_tol must be positive, got {}",
                self.certificate_tol
            )));
        }
        Ok(())
    }

    pub fn resolve_cells(&self) -> Result<Vec<ResolvedCell>> {
        self.cells
            .iter()
            .enumerate()
            .map(|(i, c)| c.resolve(i))
            .collect()
    }
}

/// One row of the experiment CSV. Field order is the column order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub cell: usize,
    pub d: usize,
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub trial: u64,
    pub seed: u64,
    pub spectral_exact: Option<bool>,
    pub spectral_us: Option<u64>,
    pub sdp_exact: Option<bool>,
    pub sdp_us: Option<u64>,
    pub oracle_exact: Option<bool>,
    pub oracle_us: Option<u64>,
    pub certified: Option<bool>,
    /// min_i D_ii / log n at the planted assignment.
    pub min_dii_norm: Option<f64>,
    pub sign_margin: Option<f64>,
    pub err_direct: Option<f64>,
    pub err_first_order: Option<f64>,
    pub err_residual: Option<f64>,
    /// ‖W - W*‖₂ / √(log n).
    pub deviation_norm: Option<f64>,
    /// A failed trial keeps its identifying columns and the message here;
    /// all measurement columns stay empty.
    pub error: Option<String>,
}

fn empty_record(cell: &ResolvedCell, trial: u64, seed: u64) -> TrialRecord {
    TrialRecord {
        cell: cell.cell,
        d: cell.d,
        n: cell.n,
        alpha: cell.alpha,
        beta: cell.beta,
        trial,
        seed,
        spectral_exact: None,
        spectral_us: None,
        sdp_exact: None,
        sdp_us: None,
        oracle_exact: None,
        oracle_us: None,
        certified: None,
        min_dii_norm: None,
        sign_margin: None,
        err_direct: None,
        err_first_order: None,
        err_residual: None,
        deviation_norm: None,
        error: None,
    }
}

fn run_trial(
    cell: &ResolvedCell,
    trial: u64,
    base_seed: u64,
    measure: Measurements,
    cert_tol: f64,
) -> TrialRecord {
    let seed = trial_seed(base_seed, cell.cell as u64, cell.n as u64, trial);
    let mut rec = empty_record(cell, trial, seed);
    if let Err(e) = fill_trial(cell, seed, measure, cert_tol, &mut rec) {
        // All-or-nothing: a failed trial never ships half its measurements.
        rec = empty_record(cell, trial, seed);
        rec.error = Some(e.to_string());
    }
    rec
}

fn elapsed_us(start: std::time::Instant) -> u64 {
    start.elapsed().as_micros().min(u128::from(u64::MAX)) as u64
}

fn fill_trial(
    cell: &ResolvedCell,
    seed: u64,
    measure: Measurements,
    cert_tol: f64,
    rec: &mut TrialRecord,
) -> Result<()> {
    let params = HsbmParams::new(cell.d, cell.n, cell.alpha, cell.beta, seed)?;
    let sigma = sample_balanced_assignment(cell.n, mix_seed(&[seed, 0x516]))?;
    let g = sample_hsbm(&params, &sigma)?;
    let w = SimilarityMatrix::from_hypergraph(&g);

    let needs_expectation = measure.entrywise || measure.deviation;
    let es = if needs_expectation {
        Some(ExpectedSimilarity::new(&params, &sigma)?)
    } else {
        None
    };

    if measure.entrywise {
        let t = std::time::Instant::now();
        let report = entrywise_report(&w, es.as_ref().unwrap())?;
        rec.sign_margin = Some(report.sign_margin);
        rec.err_direct = Some(report.err_direct);
        rec.err_first_order = Some(report.err_first_order_vs_true);
        rec.err_residual = Some(report.err_residual);
        // Positive margin is exact sign recovery; reuse the decomposition.
        rec.spectral_exact = Some(report.sign_margin > 0.0);
        rec.spectral_us = Some(elapsed_us(t));
    } else if measure.spectral {
        let t = std::time::Instant::now();
        let got = spectral_recover(&w)?;
        rec.spectral_exact = Some(got.agrees_up_to_flip(&sigma)?);
        rec.spectral_us = Some(elapsed_us(t));
    }

    if measure.sdp {
        let t = std::time::Instant::now();
        let out = crate::sdp::sdp_recover(&w, &crate::sdp::AdmmConfig::default(), cert_tol)?;
        rec.sdp_exact = Some(out.assignment.agrees_up_to_flip(&sigma)?);
        rec.sdp_us = Some(elapsed_us(t));
    }

    if measure.oracle {
        let t = std::time::Instant::now();
        let best = crate::oracle::exhaustive_bisection(&w)?;
        rec.oracle_exact = Some(best.assignment.agrees_up_to_flip(&sigma)?);
        rec.oracle_us = Some(elapsed_us(t));
    }

    if measure.certify {
        rec.certified = Some(certify(&w, &sigma, cert_tol)?.certified);
        let min_dii = (0..cell.n)
            .map(|i| i64::from(sigma.sign(i)) * w.signed_row_sum(i, &sigma))
            .min()
            .expect("cells have n ≥ 2");
        rec.min_dii_norm = Some(min_dii as f64 / (cell.n as f64).ln());
    }

    if measure.deviation {
        let raw = spectral_norm_deviation(&w, es.as_ref().unwrap())?;
        rec.deviation_norm = Some(raw / (cell.n as f64).ln().sqrt());
    }

    Ok(())
}

/// Success counts with a Wilson interval attached.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateSummary {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

/// Per-cell aggregate of an experiment.
#[derive(Debug, Clone, Serialize)]
pub struct CellSummary {
    pub cell: usize,
    pub d: usize,
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub threshold: f64,
    pub threshold_sdp: f64,
    pub trials: u64,
    pub errors: u64,
    pub spectral: Option<RateSummary>,
    pub sdp: Option<RateSummary>,
    pub oracle: Option<RateSummary>,
    pub certified: Option<RateSummary>,
    pub median_min_dii: Option<f64>,
    pub median_sign_margin: Option<f64>,
    pub median_err_direct: Option<f64>,
    pub median_err_first_order: Option<f64>,
    pub median_err_residual: Option<f64>,
    pub mean_deviation_norm: Option<f64>,
}

/// Whole-experiment aggregate, cell by cell.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub name: String,
    pub cells: Vec<CellSummary>,
}

/// What sits next to the results CSV: enough to refuse to resume a file
/// produced by a different configuration or library version, and the
/// resolved cells so every parameter point's I and I_SDP are persisted
/// alongside the results.
#[derive(Debug, Serialize)]
struct SidecarManifest<'a> {
    version: &'a str,
    config: &'a ExperimentConfig,
    cells: &'a [ResolvedCell],
}

/// Runs (or resumes) an experiment, appending to `csv_path`.
///
/// The resolved configuration and library version are stored next to the
/// CSV (same path with a .json extension). Resuming against a sidecar that
/// does not match the offered configuration is an error — mixing records
/// from different experiments would silently corrupt the statistics.
/// Completed (cell, trial) pairs are skipped on rerun. All measurement
/// columns are bit-reproducible from the seeds; the runtime columns are
/// wall clock and vary run to run.
pub fn run_experiment(config: &ExperimentConfig, csv_path: &Path) -> Result<ExperimentSummary> {
    config.validate()?;
    let cells = config.resolve_cells()?;
    let sidecar = sidecar_path(csv_path);
    let manifest_json = serde_json::to_string_pretty(&SidecarManifest {
        version: env!("CARGO_PKG_VERSION"),
        config,
        cells: &cells,
    })?;

    let mut existing: Vec<TrialRecord> = Vec::new();
    if csv_path.exists() {
        let stored = fs::read_to_string(&sidecar).map_err(|_| {
            Error::invalid(format!(
                "results exist at {} but the sidecar {} is missing",
                csv_path.display(),
                sidecar.display()
            ))
        })?;
        if stored.trim() != manifest_json.trim() {
            return Err(Error::invalid(format!(
                "existing results at {} were produced by a different configuration",
                csv_path.display()
            )));
        }
        let mut reader = csv::Reader::from_path(csv_path)?;
        for row in reader.deserialize() {
            existing.push(row?);
        }
    } else {
        fs::write(&sidecar, &manifest_json)?;
        let mut writer = csv::Writer::from_path(csv_path)?;
        // Header comes from the first serialized record; force it now so
        // an interrupted empty run still leaves a parsable file.
        writer.write_record(HEADER)?;
        writer.flush()?;
    }

    let done: HashSet<(usize, u64)> = existing.iter().map(|r| (r.cell, r.trial)).collect();
    let mut all = existing;

    let file = fs::OpenOptions::new().append(true).open(csv_path)?;
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);

    for cell in &cells {
        let missing: Vec<u64> = (0..config.trials)
            .filter(|t| !done.contains(&(cell.cell, *t)))
            .collect();
        if missing.is_empty() {
            continue;
        }
        // A failing trial becomes an error row; only I/O failures abort.
        let mut fresh: Vec<TrialRecord> = missing
            .into_par_iter()
            .map(|t| {
                run_trial(
                    cell,
                    t,
                    config.base_seed,
                    config.measurements,
                    config.certificate_tol,
                )
            })
            .collect();
        fresh.sort_by_key(|r| r.trial);
        for rec in &fresh {
            writer.serialize(rec)?;
        }
        writer.flush()?;
        all.extend(fresh);
    }
    drop(writer);

    summarize(&config.name, &cells, &all)
}

const HEADER: [&str; 21] = [
    "cell",
    "d",
    "n",
    "alpha",
    "beta",
    "trial",
    "seed",
    "spectral_exact",
    "spectral_us",
    "sdp_exact",
    "sdp_us",
    "oracle_exact",
    "oracle_us",
    "certified",
    "min_dii_norm",
    "sign_margin",
    "err_direct",
    "err_first_order",
    "err_residual",
    "deviation_norm",
    "error",
];

fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

fn summarize(
    name: &str,
    cells: &[ResolvedCell],
    records: &[TrialRecord],
) -> Result<ExperimentSummary> {
    let mut out = Vec::with_capacity(cells.len());
    for cell in cells {
        let rows: Vec<&TrialRecord> = records.iter().filter(|r| r.cell == cell.cell).collect();
        let trials = rows.len() as u64;
        let rate = |pick: fn(&TrialRecord) -> Option<bool>| -> Option<RateSummary> {
            let hits: Vec<bool> = rows.iter().filter_map(|r| pick(r)).collect();
            if hits.is_empty() {
                return None;
            }
            let successes = hits.iter().filter(|&&b| b).count() as u64;
            let total = hits.len() as u64;
            let (lo, hi) = wilson_interval(successes, total, Z_95);
            Some(RateSummary {
                successes,
                trials: total,
                rate: successes as f64 / total as f64,
                wilson_low: lo,
                wilson_high: hi,
            })
        };
        let quantile = |pick: fn(&TrialRecord) -> Option<f64>| -> Option<f64> {
            let vals: Vec<f64> = rows.iter().filter_map(|r| pick(r)).collect();
            median(vals)
        };
        let deviations: Vec<f64> = rows.iter().filter_map(|r| r.deviation_norm).collect();
        out.push(CellSummary {
            cell: cell.cell,
            d: cell.d,
            n: cell.n,
            alpha: cell.alpha,
            beta: cell.beta,
            threshold: cell.threshold,
            threshold_sdp: cell.threshold_sdp,
            trials,
            errors: rows.iter().filter(|r| r.error.is_some()).count() as u64,
            spectral: rate(|r| r.spectral_exact),
            sdp: rate(|r| r.sdp_exact),
            oracle: rate(|r| r.oracle_exact),
            certified: rate(|r| r.certified),
            median_min_dii: quantile(|r| r.min_dii_norm),
            median_sign_margin: quantile(|r| r.sign_margin),
            median_err_direct: quantile(|r| r.err_direct),
            median_err_first_order: quantile(|r| r.err_first_order),
            median_err_residual: quantile(|r| r.err_residual),
            mean_deviation_norm: if deviations.is_empty() {
                None
            } else {
                Some(deviations.iter().sum::<f64>() / deviations.len() as f64)
            },
        });
    }
    Ok(ExperimentSummary {
        name: name.to_string(),
        cells: out,
    })
}

fn median(mut vals: Vec<f64>) -> Option<f64> {
    if vals.is_empty() {
        return None;
    }
    vals.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in measurements"));
    let k = vals.len();
    Some(if k % 2 == 1 {
        vals[k / 2]
    } else {
        0.5 * (vals[k / 2 - 1] + vals[k / 2])
    })
}

/// Wilson score interval for a binomial success rate.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Two-sample Kolmogorov–Smirnov distance sup_x |F₁(x) - F₂(x)|.
pub fn ks_distance(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::invalid("KS distance needs nonempty samples"));
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).expect("NaN in KS sample"));
    b.sort_by(|x, y| x.partial_cmp(y).expect("NaN in KS sample"));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut dist = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        dist = dist.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(dist)
}

/// Per-size report of the diagonal certificate statistic min_i D_ii / log n.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiiCellReport {
    pub n: usize,
    pub trials: u64,
    /// Smallest normalized minimum over all trials.
    pub min_normalized: f64,
    /// 5th percentile (nearest rank) of the normalized minima.
    pub pct5_normalized: f64,
    pub median_normalized: f64,
    /// Fraction of trials where min_i D_ii > 0 outright.
    pub positive_fraction: f64,
}

/// Sweeps n and measures concentration of the certificate diagonal
/// D_ii = Σ_j W_ij σ_i σ_j at the planted assignment: exact recovery
/// requires every D_ii to stay positive, and above the threshold the
/// normalized minimum stays bounded away from zero as n grows.
pub fn dii_concentration_sweep(
    d: usize,
    alpha: f64,
    beta: f64,
    ns: &[usize],
    trials: u64,
    base_seed: u64,
) -> Result<Vec<DiiCellReport>> {
    if trials == 0 || ns.is_empty() {
        return Err(Error::invalid("sweep needs at least one size and one trial"));
    }
    let mut out = Vec::with_capacity(ns.len());
    for (idx, &n) in ns.iter().enumerate() {
        let sigma = CommunityAssignment::split_halves(n)?;
        let mins = (0..trials)
            .into_par_iter()
            .map(|t| -> Result<f64> {
                let seed = trial_seed(base_seed, idx as u64, n as u64, t);
                let params = HsbmParams::new(d, n, alpha, beta, seed)?;
                let g = sample_hsbm(&params, &sigma)?;
                let w = SimilarityMatrix::from_hypergraph(&g);
                let min = (0..n)
                    .map(|i| sigma.sign(i) as i64 * w.signed_row_sum(i, &sigma))
                    .min()
                    .expect("n > 0");
                Ok(min as f64 / (n as f64).ln())
            })
            .collect::<Result<Vec<_>>>()?;
        let mut sorted = mins.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
        let positive = mins.iter().filter(|&&m| m > 0.0).count() as f64 / trials as f64;
        let rank5 = ((0.05 * trials as f64).ceil() as usize).max(1) - 1;
        out.push(DiiCellReport {
            n,
            trials,
            min_normalized: sorted[0],
            pct5_normalized: sorted[rank5],
            median_normalized: median(sorted.clone()).expect("nonempty"),
            positive_fraction: positive,
        });
    }
    Ok(out)
}

/// Draws matched samples of the vertex-0 diagonal statistic D_00 at d = 2:
/// once by sampling graphs, once from the closed-form surrogate
/// Bin(n/2 - 1, q_hom) - Bin(n/2, q_het). At d = 2 the two distributions
/// coincide exactly, which pins the sampler's class decomposition.
pub fn dii_d2_pair_samples(
    params: &HsbmParams,
    trials: u64,
    base_seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if params.d() != 2 {
        return Err(Error::invalid(format!(
            "the binomial surrogate is exact only at d = 2, got d = {}",
            params.d()
        )));
    }
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let n = params.n();
    let sigma = CommunityAssignment::split_halves(n)?;
    let empirical = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let seed = trial_seed(base_seed, 0, n as u64, t);
            let p = HsbmParams::new(2, n, params.alpha(), params.beta(), seed)?;
            let g = sample_hsbm(&p, &sigma)?;
            let w = SimilarityMatrix::from_hypergraph(&g);
            Ok((sigma.sign(0) as i64 * w.signed_row_sum(0, &sigma)) as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    let q_hom = params.edge_probability(true)?;
    let q_het = params.edge_probability(false)?;
    let intra = Binomial::new((n / 2 - 1) as u64, q_hom)
        .map_err(|e| Error::invalid(format!("surrogate intra binomial: {e}")))?;
    let cross = Binomial::new((n / 2) as u64, q_het)
        .map_err(|e| Error::invalid(format!("surrogate cross binomial: {e}")))?;
    let mut rng = substream(mix_seed(&[base_seed, 0xD11]), 1);
    let surrogate: Vec<f64> = (0..trials)
        .map(|_| intra.sample(&mut rng) as f64 - cross.sample(&mut rng) as f64)
        .collect();
    Ok((empirical, surrogate))
}

/// Measured operator-norm deviation at one size.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormSweepPoint {
    pub n: usize,
    pub trials: u64,
    pub mean_norm: f64,
    pub max_norm: f64,
}

/// Sweeps n and records ‖W - W*‖₂ statistics. Under logarithmic expected
/// degrees this norm grows like a power of log n, not of n, so the fitted
/// log-log slope against n stays near zero.
pub fn spectral_norm_sweep(
    d: usize,
    alpha: f64,
    beta: f64,
    ns: &[usize],
    trials: u64,
    base_seed: u64,
) -> Result<Vec<NormSweepPoint>> {
    if trials == 0 || ns.is_empty() {
        return Err(Error::invalid("sweep needs at least one size and one trial"));
    }
    let mut out = Vec::with_capacity(ns.len());
    for (idx, &n) in ns.iter().enumerate() {
        let sigma = CommunityAssignment::split_halves(n)?;
        let norms = (0..trials)
            .into_par_iter()
            .map(|t| -> Result<f64> {
                let seed = trial_seed(base_seed, idx as u64, n as u64, t);
                let params = HsbmParams::new(d, n, alpha, beta, seed)?;
                let es = ExpectedSimilarity::new(&params, &sigma)?;
                let g = sample_hsbm(&params, &sigma)?;
                let w = SimilarityMatrix::from_hypergraph(&g);
                spectral_norm_deviation(&w, &es)
            })
            .collect::<Result<Vec<_>>>()?;
        let mean = norms.iter().sum::<f64>() / norms.len() as f64;
        let max = norms.iter().cloned().fold(f64::MIN, f64::max);
        out.push(NormSweepPoint {
            n,
            trials,
            mean_norm: mean,
            max_norm: max,
        });
    }
    Ok(out)
}

/// Least-squares slope of y against x.
pub fn fitted_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::invalid("slope needs at least two points"));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("slope undefined: all x coincide"));
    }
    Ok(sxy / sxx)
}

/// Trial-level outcome of the row-concentration experiment.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RowConcentrationRate {
    pub trials: u64,
    /// Trials in which at least one row exceeded its budget.
    pub trials_with_exceedance: u64,
    /// Largest max_deviation / budget ratio seen across trials.
    pub max_ratio: f64,
}

/// Repeatedly tests every row of (W - W*) against the all-ones vector with
/// the model rate α as the modulus constant.
pub fn row_concentration_rate(
    d: usize,
    n: usize,
    alpha: f64,
    beta: f64,
    trials: u64,
    base_seed: u64,
) -> Result<RowConcentrationRate> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let sigma = CommunityAssignment::split_halves(n)?;
    let v = vec![1.0; n];
    let results = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(bool, f64)> {
            let seed = trial_seed(base_seed, 0, n as u64, t);
            let params = HsbmParams::new(d, n, alpha, beta, seed)?;
            let es = ExpectedSimilarity::new(&params, &sigma)?;
            let g = sample_hsbm(&params, &sigma)?;
            let w = SimilarityMatrix::from_hypergraph(&g);
            let rep = row_concentration_check(&w, &es, &v, alpha)?;
            Ok((rep.exceed_count > 0, rep.max_deviation / rep.budget))
        })
        .collect::<Result<Vec<_>>>()?;
    let exceed = results.iter().filter(|r| r.0).count() as u64;
    let max_ratio = results.iter().map(|r| r.1).fold(f64::MIN, f64::max);
    Ok(RowConcentrationRate {
        trials,
        trials_with_exceedance: exceed,
        max_ratio,
    })
}

/// Convenience draw used by tests and the CLI: one planted instance.
pub fn sample_instance(
    d: usize,
    n: usize,
    alpha: f64,
    beta: f64,
    seed: u64,
) -> Result<(SimilarityMatrix, CommunityAssignment)> {
    let params = HsbmParams::new(d, n, alpha, beta, seed)?;
    let sigma = sample_balanced_assignment(n, mix_seed(&[seed, 0x516]))?;
    let g = sample_hsbm(&params, &sigma)?;
    Ok((SimilarityMatrix::from_hypergraph(&g), sigma))
}

/// Uniformly random unit vector, for concentration probes.
pub fn random_unit_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = substream(seed, 0x0e1);
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| {
                let x: f64 = rng.gen::<f64>() - 0.5;
                x
            })
            .collect();
        let norm = crate::linalg::norm2(&v);
        if norm > 1e-3 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}
