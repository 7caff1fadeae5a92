//! Release acceptance suite. Each test covers one numbered criterion,
//! enforces its runtime budget, and prints a single verdict line (run with
//! `--nocapture` to see them).
//!
//! Two criteria contain clauses that are unattainable as stated; their test
//! names say so, the tests assert the verified state of the world instead of
//! the stated one, and their verdict lines read FAIL (as stated):
//!
//! * criterion 01's third clause expects I_SDP > I for d ≥ 3, but the two
//!   functionals as defined satisfy the strict *opposite* ordering
//!   everywhere (consistent with criterion 02, where the I_SDP = 1 boundary
//!   needs more signal than the I = 1 boundary). The test verifies
//!   I_SDP < I on the full grid.
//! * criterion 05's d = 2 leg requires I ≥ 3 at n = 12, but hyperedge
//!   probabilities cap α at (n-1)/ln n, which caps I(2, ·, ·) at
//!   (n-1)/(2 ln n) ≈ 2.213 < 3. The test proves the cap and reports the
//!   best-effort d = 2 agreement rate for context.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use simrec::{
    certify, dii_concentration_sweep, entrywise_report, exhaustive_bisection, fitted_slope,
    monotone_adversary, phase_boundary, row_concentration_rate, run_experiment, sample_hsbm,
    sample_instance, sdp_recover, sdp_solve_admm, spectral_norm_sweep, spectral_recover,
    threshold_i, wilson_interval, AdmmConfig, CellSpec, CommunityAssignment, ExpectedSimilarity,
    ExperimentConfig, HsbmParams, Mat, Measurements, SimilarityMatrix, ThresholdKind, Z_95,
    CERT_TOL,
};

fn budget(name: &str, start: Instant, limit: Duration) {
    let took = start.elapsed();
    assert!(
        took <= limit,
        "{name} exceeded its runtime budget: {took:.1?} > {limit:.1?}"
    );
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    v[v.len() / 2]
}

/// d = 2 closed form on a 20-point grid, exact zero at equal rates, and the
/// ordering of the two functionals on a d ∈ {3..6} grid. The stated
/// direction I_SDP > I never holds; the strict reverse is asserted.
#[test]
fn criterion_01_threshold_identities_and_reversed_sdp_inequality() {
    let start = Instant::now();

    let alphas = [1.5, 3.0, 5.0, 8.0, 12.0];
    let betas = [0.1, 0.5, 1.0, 1.4];
    let mut grid_points = 0;
    for &alpha in &alphas {
        for &beta in &betas {
            let got = threshold_i(2, alpha, beta).unwrap().value;
            let want = (alpha.sqrt() - beta.sqrt()).powi(2) / 2.0;
            assert!(
                (got - want).abs() <= 1e-8,
                "closed form violated at ({alpha}, {beta}): {got} vs {want}"
            );
            grid_points += 1;
        }
    }
    assert_eq!(grid_points, 20);

    for d in 2..=6 {
        for beta in [0.5, 1.0, 3.0] {
            assert_eq!(threshold_i(d, beta, beta).unwrap().value, 0.0);
        }
    }

    let mut reversed = 0u32;
    let mut as_stated = 0u32;
    for d in 3..=6 {
        for &alpha in &[2.0, 5.0, 10.0, 20.0] {
            for &beta in &[0.1, 0.5, 1.0, 1.9] {
                let r = threshold_i(d, alpha, beta).unwrap();
                if r.sdp_value > r.value {
                    as_stated += 1;
                } else {
                    assert!(
                        r.sdp_value < r.value,
                        "expected strict ordering at d={d}, α={alpha}, β={beta}"
                    );
                    reversed += 1;
                }
            }
        }
    }
    assert_eq!(as_stated, 0, "the documented reversal no longer holds");

    budget("criterion 01", start, Duration::from_secs(1));
    println!(
        "criterion 01: FAIL (as stated) — I_SDP > I holds at 0/{reversed} grid points; \
         verified I_SDP < I strictly everywhere; d=2 closed form within 1e-8 on 20 points \
         and I(d,β,β) = 0 exactly: PASS ({:.2?})",
        start.elapsed()
    );
}

/// Both phase-boundary curves at d = 6 over 50 β points in [0, 5]; the
/// relaxation's boundary needs strictly more signal at every point.
#[test]
fn criterion_02_phase_boundary_curves() {
    let start = Instant::now();
    let points = 50;
    let mut min_margin = f64::INFINITY;
    for k in 0..points {
        let beta = 5.0 * k as f64 / (points - 1) as f64;
        let a_info = phase_boundary(ThresholdKind::Information, 6, beta, 1.0).unwrap();
        let a_sdp = phase_boundary(ThresholdKind::Sdp, 6, beta, 1.0).unwrap();
        assert!(
            a_sdp > a_info,
            "relaxation boundary fails to dominate at β = {beta}: {a_sdp} vs {a_info}"
        );
        min_margin = min_margin.min(a_sdp - a_info);
    }
    budget("criterion 02", start, Duration::from_secs(5));
    println!(
        "criterion 02: PASS — I_SDP = 1 boundary above the I = 1 boundary at all 50 points \
         (min α margin {min_margin:.3}) ({:.2?})",
        start.elapsed()
    );
}

/// Counting identities on 50 random hypergraphs: total mass, row sums
/// against degrees, and the ℓ1 row identity for vertex-deleted matrices.
/// All equalities are over integers, checked exactly.
#[test]
fn criterion_03_similarity_identities() {
    let start = Instant::now();
    let sizes = [20, 40, 60, 80, 100, 120, 150, 200];
    for k in 0..50u64 {
        let d = [2usize, 3, 4][(k % 3) as usize];
        let n = sizes[(k % 8) as usize];
        let alpha = 3.0 + (k % 4) as f64;
        let beta = 0.3 + (k % 4) as f64 * 0.5;
        let params = HsbmParams::new(d, n, alpha, beta, 0x300 + k).unwrap();
        let sigma = CommunityAssignment::split_halves(n).unwrap();
        let g = sample_hsbm(&params, &sigma).unwrap();
        let w = SimilarityMatrix::from_hypergraph(&g);

        let dd = (d * (d - 1)) as i64;
        assert_eq!(w.total_sum(), dd * g.edge_count() as i64);

        let degrees = g.degrees();
        for i in 0..n {
            assert_eq!(w.row_sum(i), (d as i64 - 1) * degrees[i] as i64);
        }

        let picks: BTreeSet<usize> = [0, n / 4, n / 2, 3 * n / 4, n - 1].into_iter().collect();
        for &m in &picks {
            let wm = SimilarityMatrix::leave_one_out(&g, m).unwrap();
            assert_eq!(wm.row_sum(m), 0);
            for i in 0..n {
                if i == m {
                    continue;
                }
                let l1: i64 = (0..n).map(|j| (w.get(i, j) - wm.get(i, j)).abs()).sum();
                assert_eq!(l1, (d as i64 - 1) * w.get(i, m));
            }
        }
    }
    budget("criterion 03", start, Duration::from_secs(10));
    println!(
        "criterion 03: PASS — mass, degree, and vertex-deletion identities exact on 50 \
         hypergraphs (d ∈ {{2,3,4}}, n ≤ 200) ({:.2?})",
        start.elapsed()
    );
}

/// The expected similarity matrix equals its rank-two decomposition
/// entrywise, and a dense eigensolve of the materialized matrix reproduces
/// the closed-form top eigenpairs, at n = 1000.
#[test]
fn criterion_04_expected_eigenstructure() {
    let start = Instant::now();
    let n = 1000;
    let params = HsbmParams::new(3, n, 10.0, 2.0, 4).unwrap();
    let sigma = CommunityAssignment::split_halves(n).unwrap();
    let es = ExpectedSimilarity::new(&params, &sigma).unwrap();
    let m = es.materialize();

    let p = es.p_prime();
    let q = es.q_prime();
    let decomposed = Mat::from_fn(n, |i, j| {
        let s = (sigma.sign(i) * sigma.sign(j)) as f64;
        let base = (p + q) / 2.0 + (p - q) / 2.0 * s;
        if i == j {
            base - p
        } else {
            base
        }
    });
    let mut worst = 0.0f64;
    for (a, b) in m.data().iter().zip(decomposed.data()) {
        worst = worst.max((a - b).abs() / 1.0f64.max(b.abs()));
    }
    assert!(worst <= 1e-12, "reconstruction off by {worst:.2e}");

    let eig = simrec::eig_symmetric(&m).unwrap();
    let l1 = eig.values()[0];
    let l2 = eig.values()[1];
    assert!((l1 - es.lambda1()).abs() <= 1e-8 * 1.0f64.max(es.lambda1().abs()));
    assert!((l2 - es.lambda2()).abs() <= 1e-8 * 1.0f64.max(es.lambda2().abs()));

    let u2 = eig.vector(1);
    let u2_star = es.u2();
    let sign = if u2.iter().zip(&u2_star).map(|(a, b)| a * b).sum::<f64>() >= 0.0 {
        1.0
    } else {
        -1.0
    };
    let eig_err = u2
        .iter()
        .zip(&u2_star)
        .map(|(a, b)| (sign * a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(eig_err <= 1e-8, "u₂ deviates by {eig_err:.2e}");

    budget("criterion 04", start, Duration::from_secs(30));
    println!(
        "criterion 04: PASS — rank-two reconstruction ≤ {worst:.1e} relative; eigensolve \
         matches λ₁*, λ₂*, u₂* within 1e-8 at n = 1000 ({:.2?})",
        start.elapsed()
    );
}

/// Three-way agreement of the spectral method, the relaxation, and the
/// exhaustive bisection oracle at n = 12. The d = 3 leg runs at I ≈ 3.01
/// and must agree in ≥ 95/100 trials with Wilson lower bound ≥ 0.88. The
/// d = 2 leg cannot reach I ≥ 3: hyperedge probabilities cap α at
/// (n-1)/ln n, and I(2, α, β) ≤ α/2, so I ≤ (n-1)/(2 ln n) < 3. The test
/// proves that cap and reports the best-effort d = 2 rate.
#[test]
fn criterion_05_oracle_equivalence_with_infeasible_d2_leg() {
    let start = Instant::now();

    let run_cell = |d: usize, alpha: f64, beta: f64| -> u64 {
        let mut agree = 0;
        for t in 0..100u64 {
            let (w, _) = sample_instance(d, 12, alpha, beta, 0x500 + t).unwrap();
            let oracle = exhaustive_bisection(&w).unwrap().assignment;
            let sp = spectral_recover(&w).unwrap();
            let sd = sdp_recover(&w, &AdmmConfig::default(), CERT_TOL)
                .unwrap()
                .assignment;
            if sp.agrees_up_to_flip(&oracle).unwrap() && sd.agrees_up_to_flip(&oracle).unwrap() {
                agree += 1;
            }
        }
        agree
    };

    let i3 = threshold_i(3, 20.0, 1.0).unwrap().value;
    assert!(i3 >= 3.0, "d = 3 cell must sit at I ≥ 3, got {i3}");
    let agree3 = run_cell(3, 20.0, 1.0);
    let (low3, _) = wilson_interval(agree3, 100, Z_95);
    assert!(agree3 >= 95, "d = 3 agreement {agree3}/100 < 95");
    assert!(low3 >= 0.88, "d = 3 Wilson lower bound {low3:.3} < 0.88");

    // The α cap at d = 2, n = 12: one unit above it must be rejected, the
    // cap itself accepted, and the attainable maximum of I stays below 3.
    let cap = 11.0 / 12.0f64.ln();
    assert!(HsbmParams::new(2, 12, cap * 1.001, 0.0, 1).is_err());
    assert!(HsbmParams::new(2, 12, cap * 0.999, 0.0, 1).is_ok());
    let max_i = threshold_i(2, cap, 0.0).unwrap().value;
    assert!(max_i < 3.0, "the d = 2 infeasibility bound no longer holds");
    let agree2 = run_cell(2, 4.4, 0.02);

    budget("criterion 05", start, Duration::from_secs(120));
    println!(
        "criterion 05: FAIL (as stated) — d = 2 leg infeasible at n = 12: α ≤ {cap:.3} caps \
         I at {max_i:.3} < 3 (best-effort agreement at I ≈ 1.91: {agree2}/100); d = 3 leg at \
         I = {i3:.3}: {agree3}/100 agree, Wilson low {low3:.3}: PASS ({:.2?})",
        start.elapsed()
    );
}

/// Sharp phase transition of spectral recovery at d = 3, n = 400, driven
/// through the Monte Carlo harness: 100 trials per cell, success ≥ 90% at
/// I ≈ 1.6, ≤ 20% at I ≈ 0.6, with disjoint Wilson intervals.
#[test]
fn criterion_06_spectral_phase_transition() {
    let start = Instant::now();
    let config = ExperimentConfig {
        name: "acceptance-phase-transition".into(),
        base_seed: 0x0006,
        trials: 100,
        cells: vec![
            CellSpec::TargetI { d: 3, n: 400, target_i: 1.6, beta: 1.0 },
            CellSpec::TargetI { d: 3, n: 400, target_i: 0.6, beta: 1.0 },
        ],
        measurements: Measurements {
            spectral: true,
            sdp: false,
            oracle: false,
            certify: false,
            entrywise: false,
            deviation: false,
        },
        certificate_tol: CERT_TOL,
        output: None,
    };
    let dir = tempfile::tempdir().unwrap();
    let summary = run_experiment(&config, &dir.path().join("phase.csv")).unwrap();

    let above = summary.cells[0].spectral.as_ref().unwrap();
    let below = summary.cells[1].spectral.as_ref().unwrap();
    assert!(above.rate >= 0.90, "above-threshold rate {:.2} < 0.90", above.rate);
    assert!(below.rate <= 0.20, "below-threshold rate {:.2} > 0.20", below.rate);
    assert!(
        above.wilson_low > below.wilson_high,
        "Wilson intervals overlap: [{:.3},·] vs [·,{:.3}]",
        above.wilson_low,
        below.wilson_high
    );

    budget("criterion 06", start, Duration::from_secs(900));
    println!(
        "criterion 06: PASS — success {}/100 at I ≈ 1.6 vs {}/100 at I ≈ 0.6; Wilson \
         intervals disjoint ({:.3} > {:.3}) ({:.2?})",
        above.successes,
        below.successes,
        above.wilson_low,
        below.wilson_high,
        start.elapsed()
    );
}

/// Dual certificates at the criterion-06 above-threshold cell: the planted
/// assignment certifies in ≥ 90/100 trials, and on every certified instance
/// the solver run from the certified warm start reproduces the optimal
/// objective ⟨W, σ*σ*ᵀ⟩ within 1e-4 relative and rounds back to σ*.
#[test]
fn criterion_07_sdp_certificate_and_objective() {
    let start = Instant::now();
    let alpha = phase_boundary(ThresholdKind::Information, 3, 1.0, 1.6).unwrap();
    let mut certified = 0u64;
    let mut max_rel = 0.0f64;
    let mut max_iters = 0usize;
    for t in 0..100u64 {
        let (w, sigma) = sample_instance(3, 400, alpha, 1.0, 0x600 + t).unwrap();
        let report = certify(&w, &sigma, CERT_TOL).unwrap();
        if !report.certified {
            continue;
        }
        certified += 1;
        let sol = sdp_solve_admm(&w.to_mat(), &AdmmConfig::default(), Some(&sigma)).unwrap();
        assert!(sol.converged, "solver failed to converge on certified trial {t}");
        assert!(
            sol.rounded.agrees_up_to_flip(&sigma).unwrap(),
            "rounding diverged from the certified assignment on trial {t}"
        );
        let truth = w.quadratic_form(&sigma) as f64;
        let rel = (sol.objective - truth).abs() / truth.abs();
        assert!(rel <= 1e-4, "objective off by {rel:.2e} on certified trial {t}");
        max_rel = max_rel.max(rel);
        max_iters = max_iters.max(sol.iterations);
    }
    assert!(certified >= 90, "certified only {certified}/100 trials");

    budget("criterion 07", start, Duration::from_secs(1800));
    println!(
        "criterion 07: PASS — certified {certified}/100 at I ≈ 1.6, n = 400; objective \
         agreement ≤ {max_rel:.1e} relative on every certified instance (≤ {max_iters} \
         iterations) ({:.2?})",
        start.elapsed()
    );
}

/// Monotone perturbations (raise within-community counts, lower
/// cross-community counts) must preserve certification of the planted
/// assignment on 50 certified instances, without exception.
#[test]
fn criterion_08_monotone_adversary() {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(0x8AD);
    let mut certified = 0u64;
    let mut preserved = 0u64;
    let mut attempts = 0u64;
    while certified < 50 {
        assert!(attempts < 70, "could not collect 50 certified instances");
        let (w, sigma) = sample_instance(3, 200, 16.0, 1.0, 0x800 + attempts).unwrap();
        attempts += 1;
        if !certify(&w, &sigma, CERT_TOL).unwrap().certified {
            continue;
        }
        certified += 1;

        let n = w.n();
        let mut changes = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen::<f64>() >= 0.05 {
                    continue;
                }
                if sigma.sign(i) == sigma.sign(j) {
                    changes.push((i, j, rng.gen_range(1..=3)));
                } else {
                    let cur = w.get(i, j);
                    if cur > 0 {
                        changes.push((i, j, -rng.gen_range(1..=cur.min(3))));
                    }
                }
            }
        }
        let perturbed = monotone_adversary(&w, &sigma, &changes).unwrap();
        if certify(&perturbed, &sigma, CERT_TOL).unwrap().certified {
            preserved += 1;
        }
    }
    assert_eq!(preserved, 50, "perturbation broke {}/50 certificates", 50 - preserved);

    budget("criterion 08", start, Duration::from_secs(600));
    println!(
        "criterion 08: PASS — 50/50 certificates preserved under random monotone \
         perturbations ({attempts} instances sampled) ({:.2?})",
        start.elapsed()
    );
}

/// Entrywise eigenvector accuracy at d = 4, n = 1000, α = 50, β = 10: the
/// median residual against the first-order surrogate sits strictly below
/// both the median raw eigenvector error and the median surrogate-vs-truth
/// error, over 100 trials.
#[test]
fn criterion_09_entrywise_error_medians() {
    let start = Instant::now();
    let mut direct = Vec::new();
    let mut first_order = Vec::new();
    let mut residual = Vec::new();
    for t in 0..100u64 {
        let (w, sigma) = sample_instance(4, 1000, 50.0, 10.0, 0x900 + t).unwrap();
        let params = HsbmParams::new(4, 1000, 50.0, 10.0, 0x900 + t).unwrap();
        let es = ExpectedSimilarity::new(&params, &sigma).unwrap();
        let rep = entrywise_report(&w, &es).unwrap();
        direct.push(rep.err_direct);
        first_order.push(rep.err_first_order_vs_true);
        residual.push(rep.err_residual);
    }
    let med_direct = median(direct);
    let med_first = median(first_order);
    let med_resid = median(residual);
    assert!(
        med_resid < med_direct && med_resid < med_first,
        "median ordering violated: resid {med_resid:.3} vs direct {med_direct:.3}, \
         first-order {med_first:.3}"
    );

    budget("criterion 09", start, Duration::from_secs(2700));
    println!(
        "criterion 09: PASS — median √n·ℓ∞ errors: residual {med_resid:.3} < direct \
         {med_direct:.3} and < surrogate-vs-truth {med_first:.3} (100 trials) ({:.2?})",
        start.elapsed()
    );
}

/// Concentration diagnostics: the certificate diagonal stays bounded away
/// from zero (5th percentile of min_i D_ii / log n > 0 across sizes at
/// I = 2.25), the operator-norm deviation grows slower than any power of n
/// (log-log slope below 0.1), and no row of W - W* exceeds its
/// concentration budget in 50 trials at n = 500.
#[test]
fn criterion_10_concentration_diagnostics() {
    let start = Instant::now();

    let i_dii = threshold_i(3, 16.0, 1.0).unwrap().value;
    assert!(i_dii >= 1.5);
    let dii = dii_concentration_sweep(3, 16.0, 1.0, &[200, 400, 800], 40, 0xA00).unwrap();
    for rep in &dii {
        assert!(
            rep.pct5_normalized > 0.0,
            "5th percentile of min D_ii / log n at n = {} is {:.3}",
            rep.n,
            rep.pct5_normalized
        );
    }
    let pct5s: Vec<String> = dii.iter().map(|r| format!("{:.2}", r.pct5_normalized)).collect();

    let pts = spectral_norm_sweep(3, 6.0, 1.0, &[200, 400, 800, 1600], 20, 0xB00).unwrap();
    let fitted: Vec<(f64, f64)> = pts
        .iter()
        .map(|p| {
            let x = (p.n as f64).ln();
            (x, p.mean_norm / x.sqrt())
        })
        .collect();
    let slope = fitted_slope(&fitted).unwrap();
    assert!(slope.abs() < 0.1, "norm-deviation slope {slope:.3} not flat");

    let rc = row_concentration_rate(3, 500, 5.0, 1.0, 50, 0xC00).unwrap();
    assert_eq!(
        rc.trials_with_exceedance, 0,
        "rows exceeded the concentration budget in {} trials",
        rc.trials_with_exceedance
    );

    budget("criterion 10", start, Duration::from_secs(1800));
    println!(
        "criterion 10: PASS — D_ii/log n 5th percentiles [{}] all positive; norm slope \
         {slope:.3} (|·| < 0.1); row exceedances 0/{} trials at n = 500 ({:.2?})",
        pct5s.join(", "),
        rc.trials,
        start.elapsed()
    );
}
