//! Exact community recovery from hypergraph similarity matrices.
//!
//! A planted model generates d-uniform hypergraphs on n vertices split into
//! two hidden communities of equal size: subsets lying entirely inside one
//! community become edges at rate α·log n / C(n-1, d-1), all others at rate
//! β·log n / C(n-1, d-1). The observable is not the hypergraph but its
//! similarity matrix W, whose (i, j) entry counts the edges containing both
//! vertices. This crate provides:
//!
//! - samplers for the planted model and for general inhomogeneous
//!   hypergraphs ([`model`]),
//! - the similarity statistic and its exact conditional expectation
//!   ([`similarity`]),
//! - the threshold functionals I and I_SDP whose unit level sets separate
//!   the recoverable from the unrecoverable regimes ([`thresholds`]),
//! - spectral recovery with entrywise eigenvector diagnostics
//!   ([`spectral`]),
//! - the semidefinite relaxation: dual-certificate verification, an ADMM
//!   solver, and the monotone adversary it withstands ([`sdp`]),
//! - an exhaustive oracle for small instances ([`oracle`]), and
//! - a reproducible Monte Carlo harness for phase diagrams, concentration
//!   experiments, and norm sweeps ([`harness`]).
//!
//! Everything is deterministic given the seeds: samplers draw from
//! counter-derived substreams, so experiments can be resumed, parallelized,
//! or recomputed piecemeal without changing a single byte of output.

pub mod combin;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod sdp;
pub mod similarity;
pub mod spectral;
pub mod thresholds;

pub use error::{Error, Result};
pub use harness::{
    dii_concentration_sweep, dii_d2_pair_samples, fitted_slope, ks_distance, random_unit_vector,
    row_concentration_rate, run_experiment, sample_instance, spectral_norm_sweep, wilson_interval,
    CellSpec, DiiCellReport, ExperimentConfig, ExperimentSummary, Measurements, NormSweepPoint,
    RowConcentrationRate, TrialRecord, Z_95,
};
pub use linalg::{eig_symmetric, eigvals_symmetric, psd_project, spectral_norm, Mat};
pub use model::{
    sample_balanced_assignment, sample_general, sample_hsbm, CommunityAssignment,
    EdgeProbabilities, GeneralHypergraphParams, Hypergraph, HsbmParams,
};
pub use oracle::{exhaustive_bisection, BisectionResult};
pub use sdp::{
    certify, certify_mat, monotone_adversary, sdp_recover, sdp_recover_mat, sdp_solve_admm,
    AdmmConfig, CertificateReport, SdpRecovery, SdpSolution, CERT_TOL,
};
pub use similarity::{ExpectedSimilarity, SimilarityMatrix};
pub use spectral::{
    entrywise_report, phi, row_concentration_check, spectral_recover, EntrywiseReport,
};
pub use thresholds::{
    phase_boundary, psi, threshold_i, threshold_i_sdp, ThresholdKind, ThresholdResult,
};
