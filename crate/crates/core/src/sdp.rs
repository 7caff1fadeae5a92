//! Semidefinite relaxation: dual certificates, an ADMM solver, and the
//! monotone adversary.
//!
//! The relaxation of the likelihood objective is
//!
//!   maximize ⟨W, X⟩  subject to  X_ii = 1,  ⟨X, 11ᵀ⟩ = 0,  X ⪰ 0,
//!
//! and a candidate assignment σ is *provably* its unique optimum whenever
//! the dual certificate S = D(σ) + 11ᵀ - W, with D_ii = Σ_j W_ij σ_i σ_j,
//! is positive semidefinite with a one-dimensional kernel spanned by σ.
//! Checking that is one symmetric eigenvalue computation — orders of
//! magnitude cheaper than solving the SDP — so recovery tries the spectral
//! candidate's certificate first and falls back to ADMM only when the
//! certificate does not close.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, eig_symmetric, eigvals_symmetric, norm2, psd_project, Mat};
use crate::model::CommunityAssignment;
use crate::similarity::SimilarityMatrix;
use crate::spectral::{sign_rounding, spectral_recover, spectral_recover_mat};

/// Default relative tolerance for certificate eigenvalue tests.
pub const CERT_TOL: f64 = 1e-8;

const RHO_MIN: f64 = 1e-6;
const RHO_MAX: f64 = 1e6;
const RHO_BALANCE: f64 = 10.0;

/// S = D(σ) + 11ᵀ - W for an integer similarity matrix.
pub fn certificate_matrix(w: &SimilarityMatrix, sigma: &CommunityAssignment) -> Result<Mat> {
    if sigma.len() != w.n() {
        return Err(Error::DimensionMismatch {
            expected: w.n(),
            got: sigma.len(),
        });
    }
    let n = w.n();
    let d: Vec<i64> = (0..n)
        .map(|i| sigma.sign(i) as i64 * w.signed_row_sum(i, sigma))
        .collect();
    Ok(Mat::from_fn(n, |i, j| {
        let diag = if i == j { d[i] as f64 } else { 0.0 };
        diag + 1.0 - w.get(i, j) as f64
    }))
}

/// Outcome of a dual-certificate check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CertificateReport {
    /// All three conditions held: S ⪰ -tol, gap above +tol, kernel on σ.
    pub certified: bool,
    /// Smallest eigenvalue of S.
    pub lambda_min: f64,
    /// Second smallest eigenvalue of S — the certificate's gap.
    pub lambda_second: f64,
    /// ‖Sσ‖₂; exactly √n·|Σ_i σ_i|, so zero iff σ is balanced.
    pub kernel_residual: f64,
    /// Normalization max(1, ‖S‖₂) the tolerance is measured against.
    pub scale: f64,
    /// The relative tolerance used.
    pub tol: f64,
}

/// Checks whether σ carries a dual certificate for the integer matrix W.
///
/// Certified means: λ_min(S) ≥ -tol·scale, the second smallest eigenvalue
/// exceeds +tol·scale, and ‖Sσ‖ ≤ tol·scale, where scale = max(1, ‖S‖₂).
/// The tolerance is relative, so perturbations that inflate ‖S‖₂ by many
/// orders of magnitude also raise the bar for the gap condition.
pub fn certify(
    w: &SimilarityMatrix,
    sigma: &CommunityAssignment,
    tol: f64,
) -> Result<CertificateReport> {
    let s = certificate_matrix(w, sigma)?;
    // (Sσ)_i telescopes to Σ_j σ_j for every i, exactly in integers.
    let imbalance: i64 = sigma.labels().iter().map(|&x| x as i64).sum();
    let kernel_residual = (w.n() as f64).sqrt() * imbalance.abs() as f64;
    finish_certificate(&s, kernel_residual, tol)
}

/// Certificate check for an arbitrary symmetric matrix (floating entries).
pub fn certify_mat(m: &Mat, sigma: &CommunityAssignment, tol: f64) -> Result<CertificateReport> {
    if sigma.len() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            got: sigma.len(),
        });
    }
    let n = m.n();
    let sv: Vec<f64> = sigma.labels().iter().map(|&x| x as f64).collect();
    let ws = m.matvec(&sv);
    let s = Mat::from_fn(n, |i, j| {
        let diag = if i == j { sv[i] * ws[i] } else { 0.0 };
        diag + 1.0 - m.get(i, j)
    });
    let ssigma = s.matvec(&sv);
    finish_certificate(&s, norm2(&ssigma), tol)
}

fn finish_certificate(s: &Mat, kernel_residual: f64, tol: f64) -> Result<CertificateReport> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let values = eigvals_symmetric(s)?; // descending
    let n = values.len();
    let lambda_min = values[n - 1];
    let lambda_second = if n >= 2 { values[n - 2] } else { values[0] };
    let scale = 1.0f64.max(values[0].abs()).max(lambda_min.abs());
    let certified = lambda_min >= -tol * scale
        && lambda_second > tol * scale
        && kernel_residual <= tol * scale;
    Ok(CertificateReport {
        certified,
        lambda_min,
        lambda_second,
        kernel_residual,
        scale,
        tol,
    })
}

/// ADMM controls. Defaults: ρ₀ = 1, at most 5000 iterations, stop when both
/// residuals drop below 1e-6.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AdmmConfig {
    pub rho0: f64,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            rho0: 1.0,
            max_iters: 5000,
            tol: 1e-6,
        }
    }
}

impl AdmmConfig {
    fn validate(&self) -> Result<()> {
        if !(self.rho0.is_finite() && self.rho0 > 0.0) {
            return Err(Error::invalid(format!("rho0 must be positive, got {}", self.rho0)));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        Ok(())
    }
}

/// Converged (or truncated) ADMM output.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// The PSD iterate Z at termination; diagonal and total-sum constraints
    /// hold up to the primal residual.
    pub x: Mat,
    /// ⟨W, X⟩ at termination.
    pub objective: f64,
    /// ‖X - Z‖_F at termination.
    pub primal_residual: f64,
    /// ρ‖Z - Z_prev‖_F at termination.
    pub dual_residual: f64,
    /// Iterations actually performed.
    pub iterations: usize,
    /// Whether both residuals met the tolerance before the iteration cap.
    pub converged: bool,
    /// Sign rounding of the leading eigenvector of X.
    pub rounded: CommunityAssignment,
}

/// Euclidean projection onto {X : diag(X) = 1, ⟨X, 11ᵀ⟩ = 0}: pin the
/// diagonal, then shift all off-diagonal entries by a common constant.
fn project_affine(m: &mut Mat) {
    let n = m.n();
    let mut off_sum = 0.0;
    for j in 0..n {
        let col = m.col(j);
        for (i, &v) in col.iter().enumerate() {
            if i != j {
                off_sum += v;
            }
        }
    }
    let mu = (n as f64 + off_sum) / (n * n - n) as f64;
    for j in 0..n {
        let col = m.col_mut(j);
        for (i, v) in col.iter_mut().enumerate() {
            if i == j {
                *v = 1.0;
            } else {
                *v -= mu;
            }
        }
    }
}

/// Solves the relaxation by two-block ADMM with residual balancing.
///
/// `warm_start` seeds Z with σσᵀ and the scaled dual with -S(σ)/ρ₀, where
/// S(σ) is the candidate's certificate matrix. That pair is a KKT-consistent
/// guess: when σ actually carries a certificate it is the exact fixed point
/// of the iteration, so the solve reduces to verifying stationarity; when it
/// does not, the iteration corrects both blocks from a sensible start.
/// Without a warm start, Z begins at the identity with a zero dual. Scaled
/// form: X-block handles the affine constraints, Z-block the PSD cone, U the
/// scaled dual.
pub fn sdp_solve_admm(
    w: &Mat,
    config: &AdmmConfig,
    warm_start: Option<&CommunityAssignment>,
) -> Result<SdpSolution> {
    config.validate()?;
    w.require_symmetric()?;
    let n = w.n();
    if let Some(sig) = warm_start {
        if sig.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: sig.len(),
            });
        }
    }

    let mut z = Mat::identity(n);
    let mut u = Mat::zeros(n);
    let mut x = Mat::zeros(n);
    let mut rho = config.rho0;
    if let Some(sig) = warm_start {
        let sv: Vec<f64> = sig.labels().iter().map(|&x| x as f64).collect();
        let mut m = Mat::zeros(n);
        crate::linalg::rank_one_update(&mut m, 1.0, &sv);
        z = m;
        // u = -S(σ)/ρ with S = D(σ) + 11ᵀ - W; at a certified σ this makes
        // (Z, U) stationary, so the first iteration already closes.
        let ws = w.matvec(&sv);
        u = Mat::from_fn(n, |i, j| {
            let diag = if i == j { sv[i] * ws[i] } else { 0.0 };
            -(diag + 1.0 - w.get(i, j)) / rho
        });
    }

    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let mut rho_changes = 0usize;

    for iter in 1..=config.max_iters {
        iterations = iter;

        // X-update: argmin over the affine set of -⟨W,X⟩ + (ρ/2)‖X - Z + U‖².
        for (xv, ((zv, uv), wv)) in x
            .data_mut()
            .iter_mut()
            .zip(z.data().iter().zip(u.data()).zip(w.data()))
        {
            *xv = zv - uv + wv / rho;
        }
        project_affine(&mut x);

        // Z-update: PSD projection of X + U.
        let z_prev = z.clone();
        let mut target = x.clone();
        target.add_scaled(&u, 1.0);
        z = psd_project(&target)?;

        // Scaled dual update.
        for (uv, (xv, zv)) in u.data_mut().iter_mut().zip(x.data().iter().zip(z.data())) {
            *uv += xv - zv;
        }

        // Raw residuals: ‖X − Z‖_F and ρ‖Z − Z_prev‖_F. Stopping on the raw
        // norms is what makes the feasibility guarantees on the returned
        // iterate meaningful (diagonal within tol of 1, λ_min ≥ −tol).
        let mut r2 = 0.0;
        for (xv, zv) in x.data().iter().zip(z.data()) {
            r2 += (xv - zv) * (xv - zv);
        }
        primal = r2.sqrt();
        let mut s2 = 0.0;
        for (zv, pv) in z.data().iter().zip(z_prev.data()) {
            s2 += (zv - pv) * (zv - pv);
        }
        dual = rho * s2.sqrt();

        if primal.max(dual) < config.tol {
            converged = true;
            break;
        }

        // Residual balancing keeps the two rates comparable. Adapting on
        // every iteration can lock the pair (ρ, U) into a limit cycle where
        // the residuals recur exactly and never drop together, so ρ moves
        // at most every tenth iteration and only a bounded number of times —
        // once it stops, the fixed-ρ convergence guarantee applies to the
        // tail of the iteration.
        if iter % 10 == 0 && rho_changes < 60 {
            if primal > RHO_BALANCE * dual && rho * 2.0 <= RHO_MAX {
                rho *= 2.0;
                u.scale(0.5);
                rho_changes += 1;
            } else if dual > RHO_BALANCE * primal && rho * 0.5 >= RHO_MIN {
                rho *= 0.5;
                u.scale(2.0);
                rho_changes += 1;
            }
        }
    }

    let objective = dot(w.data(), z.data());
    let eig = eig_symmetric(&z)?;
    let rounded = sign_rounding(eig.vector(0))?;
    Ok(SdpSolution {
        x: z,
        objective,
        primal_residual: primal,
        dual_residual: dual,
        iterations,
        converged,
        rounded,
    })
}

/// How an SDP recovery concluded.
#[derive(Debug, Clone)]
pub struct SdpRecovery {
    /// The recovered assignment.
    pub assignment: CommunityAssignment,
    /// True when the spectral candidate's certificate closed immediately
    /// and no iterative solve was needed.
    pub via_certificate: bool,
    /// Certificate report for the *returned* assignment.
    pub certificate: CertificateReport,
    /// Present only on the fallback path.
    pub admm: Option<SdpSolution>,
}

/// Certificate-first SDP recovery.
///
/// Rounds the spectral candidate, checks its dual certificate, and only if
/// that fails solves the relaxation by ADMM (warm-started from the
/// candidate) and rounds the solution. The final report always states
/// whether the returned assignment is provably optimal.
pub fn sdp_recover(
    w: &SimilarityMatrix,
    config: &AdmmConfig,
    tol: f64,
) -> Result<SdpRecovery> {
    let candidate = spectral_recover(w)?;
    let certificate = certify(w, &candidate, tol)?;
    if certificate.certified {
        return Ok(SdpRecovery {
            assignment: candidate,
            via_certificate: true,
            certificate,
            admm: None,
        });
    }
    let solution = sdp_solve_admm(&w.to_mat(), config, Some(&candidate))?;
    let assignment = solution.rounded.clone();
    let certificate = certify(w, &assignment, tol)?;
    Ok(SdpRecovery {
        assignment,
        via_certificate: false,
        certificate,
        admm: Some(solution),
    })
}

/// [`sdp_recover`] for a dense real matrix, e.g. an expected similarity
/// matrix or any symmetric score matrix. The kernel residual in the
/// certificate is computed in floating point rather than exactly.
pub fn sdp_recover_mat(w: &Mat, config: &AdmmConfig, tol: f64) -> Result<SdpRecovery> {
    let candidate = spectral_recover_mat(w)?;
    let certificate = certify_mat(w, &candidate, tol)?;
    if certificate.certified {
        return Ok(SdpRecovery {
            assignment: candidate,
            via_certificate: true,
            certificate,
            admm: None,
        });
    }
    let solution = sdp_solve_admm(w, config, Some(&candidate))?;
    let assignment = solution.rounded.clone();
    let certificate = certify_mat(w, &assignment, tol)?;
    Ok(SdpRecovery {
        assignment,
        via_certificate: false,
        certificate,
        admm: Some(solution),
    })
}

/// Applies a monotone adversary: raises within-community similarities and
/// lowers cross-community ones, by per-pair integer amounts.
///
/// Each change (i, j, delta) must help the planted structure — delta ≥ 0
/// for pairs with σ_i = σ_j, delta ≤ 0 otherwise — and may not push an
/// entry negative. Such changes provably never destroy a dual certificate:
/// the certificate difference (D̃ - D) - Δ is a sum of PSD rank-one terms
/// δ·(e_i ∓ e_j)(e_i ∓ e_j)ᵀ.
pub fn monotone_adversary(
    w: &SimilarityMatrix,
    sigma: &CommunityAssignment,
    changes: &[(usize, usize, i64)],
) -> Result<SimilarityMatrix> {
    let n = w.n();
    if sigma.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: sigma.len(),
        });
    }
    let mut entries = w.entries().to_vec();
    for &(i, j, delta) in changes {
        if i >= n || j >= n || i == j {
            return Err(Error::invalid(format!(
                "change targets invalid pair ({i}, {j}) for n = {n}"
            )));
        }
        let intra = sigma.sign(i) == sigma.sign(j);
        if intra && delta < 0 {
            return Err(Error::invalid(format!(
                "within-community pair ({i}, {j}) may only gain similarity, got {delta}"
            )));
        }
        if !intra && delta > 0 {
            return Err(Error::invalid(format!(
                "cross-community pair ({i}, {j}) may only lose similarity, got {delta}"
            )));
        }
        let new = entries[i * n + j] + delta;
        if new < 0 {
            return Err(Error::invalid(format!(
                "change on pair ({i}, {j}) drives the count to {new} < 0"
            )));
        }
        entries[i * n + j] = new;
        entries[j * n + i] = new;
    }
    SimilarityMatrix::from_entries(n, entries)
}
