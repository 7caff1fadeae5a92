//! Recovery thresholds.
//!
//! Exact recovery is governed by the scalar
//!
//!   I(d, α, β) = sup_{t ≥ 0} ψ(t),
//!   ψ(t) = 2^{-(d-1)} [ α(1 - e^{-(d-1)t})
//!                      + β Σ_{r=1}^{d-1} C(d-1, r)(1 - e^{-(d-1-2r)t}) ],
//!
//! with I > 1 recoverable and I < 1 not. ψ is strictly concave in t
//! (its second derivative is a negative combination of exponentials), so the
//! supremum is located by bracketing plus golden-section search, which is
//! rigorous here — no multi-start heuristics are needed.
//!
//! The semidefinite relaxation has its own, strictly smaller, functional
//!
//!   I_SDP(d, α, β) = (d-1)(α - β)² / ( 2^d · (αd + β(2^d - d)) ),
//!
//! whose I_SDP = 1 curve sits above the I = 1 curve in the (β, α) plane:
//! the relaxation provably certifies a narrower region than exhaustive
//! likelihood comparison reaches.

use serde::Serialize;

use crate::combin::{binomial, binomial_f64};
use crate::error::{Error, Result};
use crate::model::MAX_EDGE_ORDER;

const GOLDEN_TOL: f64 = 1e-10;
const BISECT_TOL: f64 = 1e-8;
const INV_PHI: f64 = 0.618_033_988_749_894_9; // (√5 - 1)/2

/// Location and value of sup ψ, plus the matching SDP functional.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThresholdResult {
    /// I(d, α, β) — exceeds 1 iff exact recovery is possible.
    pub value: f64,
    /// The maximizing t; 0 when α ≤ β, infinite when β = 0 (ψ is then
    /// increasing with horizontal asymptote α/2^{d-1}).
    pub t_star: f64,
    /// I_SDP(d, α, β) at the same parameters.
    pub sdp_value: f64,
}

fn validate(d: usize, alpha: f64, beta: f64) -> Result<()> {
    if !(2..=MAX_EDGE_ORDER).contains(&d) {
        return Err(Error::invalid(format!(
            "edge order d = {d} outside supported range 2..={MAX_EDGE_ORDER}"
        )));
    }
    if !alpha.is_finite() || !beta.is_finite() || alpha < 0.0 || beta < 0.0 {
        return Err(Error::invalid(format!(
            "rates must be finite and non-negative, got alpha = {alpha}, beta = {beta}"
        )));
    }
    Ok(())
}

/// ψ(t) for the given model parameters.
pub fn psi(d: usize, alpha: f64, beta: f64, t: f64) -> Result<f64> {
    validate(d, alpha, beta)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid(format!("t must be finite and >= 0, got {t}")));
    }
    Ok(psi_unchecked(d, alpha, beta, t))
}

fn psi_unchecked(d: usize, alpha: f64, beta: f64, t: f64) -> f64 {
    let m = (d - 1) as i64;
    let mut sum = alpha * (1.0 - (-(m as f64) * t).exp());
    for r in 1..=m {
        let c = binomial_f64((d - 1) as u64, r as u64);
        let h = (m - 2 * r) as f64;
        sum += beta * c * (1.0 - (-h * t).exp());
    }
    sum / (1u64 << (d - 1)) as f64
}

/// Golden-section maximum of a strictly concave function on [a, b].
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

/// I(d, α, β) together with its maximizer.
///
/// Degenerate regimes are resolved analytically: α ≤ β forces ψ ≤ 0
/// everywhere (so I = 0 at t = 0), and β = 0 leaves only the increasing
/// α-term (so I = α/2^{d-1} in the t → ∞ limit).
pub fn threshold_i(d: usize, alpha: f64, beta: f64) -> Result<ThresholdResult> {
    validate(d, alpha, beta)?;
    let sdp_value = threshold_i_sdp(d, alpha, beta)?;
    if alpha <= beta {
        // ψ'(0) = (α-β)(d-1)/2^{d-1} ≤ 0 and ψ is concave with ψ(0) = 0.
        return Ok(ThresholdResult {
            value: 0.0,
            t_star: 0.0,
            sdp_value,
        });
    }
    if beta == 0.0 {
        return Ok(ThresholdResult {
            value: alpha / (1u64 << (d - 1)) as f64,
            t_star: f64::INFINITY,
            sdp_value,
        });
    }
    let f = |t: f64| psi_unchecked(d, alpha, beta, t);
    // ψ eventually decreases (the r = d-1 term is -β e^{(d-1)t}); double the
    // bracket until the midpoint beats the endpoint, trapping the peak.
    let mut hi = 1.0;
    while f(hi) >= f(hi / 2.0) {
        hi *= 2.0;
        debug_assert!(hi < 1e6, "bracket failed to close");
    }
    let (t_star, value) = golden_max(f, 0.0, hi, GOLDEN_TOL * hi.max(1.0));
    Ok(ThresholdResult {
        value: value.max(0.0),
        t_star,
        sdp_value,
    })
}

/// I_SDP(d, α, β) in closed form; zero when α ≤ β.
pub fn threshold_i_sdp(d: usize, alpha: f64, beta: f64) -> Result<f64> {
    validate(d, alpha, beta)?;
    if alpha <= beta {
        return Ok(0.0);
    }
    let two_d = (1u64 << d) as f64;
    let df = d as f64;
    let denom = two_d * (alpha * df + beta * (two_d - df));
    if denom == 0.0 {
        return Ok(0.0); // alpha = beta = 0
    }
    Ok((df - 1.0) * (alpha - beta) * (alpha - beta) / denom)
}

/// Which threshold functional a phase-boundary query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ThresholdKind {
    /// The information-theoretic functional I.
    Information,
    /// The relaxation functional I_SDP.
    Sdp,
}

/// Solves I(d, α, β) = target (or I_SDP = target) for α at fixed β ≥ 0.
///
/// Both functionals are strictly increasing in α on α > β, so bisection on a
/// doubled bracket converges; β = 0 admits closed forms
/// (α = target·2^{d-1}, resp. α = target·d·2^d/(d-1)).
pub fn phase_boundary(kind: ThresholdKind, d: usize, beta: f64, target: f64) -> Result<f64> {
    validate(d, 0.0, beta)?;
    if !(target.is_finite() && target > 0.0) {
        return Err(Error::invalid(format!(
            "boundary target must be positive and finite, got {target}"
        )));
    }
    if beta == 0.0 {
        return Ok(match kind {
            ThresholdKind::Information => target * (1u64 << (d - 1)) as f64,
            ThresholdKind::Sdp => {
                target * d as f64 * (1u64 << d) as f64 / (d as f64 - 1.0)
            }
        });
    }
    let eval = |alpha: f64| -> Result<f64> {
        match kind {
            ThresholdKind::Information => Ok(threshold_i(d, alpha, beta)?.value),
            ThresholdKind::Sdp => threshold_i_sdp(d, alpha, beta),
        }
    };
    let mut lo = beta; // I = I_SDP = 0 here
    let mut hi = beta.max(1.0) * 2.0;
    let mut guard = 0;
    while eval(hi)? < target {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::NoRoot(format!(
                "no alpha with threshold {target} found below {hi:e} (d = {d}, beta = {beta})"
            )));
        }
    }
    while hi - lo > BISECT_TOL * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if eval(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// N_r = C(n/2, r)·C(n/2 - 1, d-1-r): the number of d-subsets through a
/// fixed vertex whose other members include exactly r from the opposite
/// community. Summing over r recovers C(n-1, d-1).
pub fn class_count_n_r(d: usize, n: usize, r: usize) -> Result<u128> {
    if n % 2 != 0 || n < 2 * d {
        return Err(Error::invalid(format!(
            "class counts need even n >= 2d, got n = {n}, d = {d}"
        )));
    }
    if r > d - 1 {
        return Err(Error::invalid(format!(
            "class index r = {r} exceeds d-1 = {}",
            d - 1
        )));
    }
    let half = (n / 2) as u64;
    let a = binomial(half, r as u64)?;
    let b = binomial(half - 1, (d - 1 - r) as u64)?;
    a.checked_mul(b).ok_or(Error::BinomialOverflow {
        n: half,
        k: r as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn exact_d2(alpha: f64, beta: f64) -> f64 {
        (alpha.sqrt() - beta.sqrt()).powi(2) / 2.0
    }

    #[test]
    fn d2_matches_closed_form() {
        for alpha in [2.0, 5.0, 9.0, 30.0] {
            for beta in [0.5, 1.0, 2.0] {
                let r = threshold_i(2, alpha, beta).unwrap();
                let want = exact_d2(alpha, beta);
                assert!(
                    (r.value - want).abs() <= 1e-10 * want,
                    "I(2,{alpha},{beta}) = {} vs {want}",
                    r.value
                );
                let t_want = 0.5 * (alpha / beta).ln();
                assert!(
                    (r.t_star - t_want).abs() <= 1e-7,
                    "t*(2,{alpha},{beta}) = {} vs {t_want}",
                    r.t_star
                );
            }
        }
    }

    #[test]
    fn d3_matches_closed_form() {
        // At d = 3 the r = 1 term vanishes (exponent d-1-2r = 0) and the
        // supremum is (√α - √β)²/4 at t = ln(α/β)/4.
        for (alpha, beta) in [(12.0, 1.0), (6.5, 1.0), (14.3, 0.1)] {
            let r = threshold_i(3, alpha, beta).unwrap();
            let want = (alpha.sqrt() - beta.sqrt()).powi(2) / 4.0;
            assert!(
                (r.value - want).abs() <= 1e-10 * want,
                "I(3,{alpha},{beta}) = {} vs {want}",
                r.value
            );
            assert!((r.t_star - (alpha / beta).ln() / 4.0).abs() <= 1e-7);
        }
    }

    #[test]
    fn degenerate_regimes() {
        // α ≤ β: no signal, I = 0 at t = 0.
        let r = threshold_i(3, 1.0, 2.0).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.t_star, 0.0);
        let r = threshold_i(4, 2.0, 2.0).unwrap();
        assert_eq!(r.value, 0.0);
        // β = 0: I = α/2^{d-1} with the sup at infinity.
        for d in 2..=6 {
            let r = threshold_i(d, 8.0, 0.0).unwrap();
            assert_eq!(r.value, 8.0 / (1u64 << (d - 1)) as f64);
            assert!(r.t_star.is_infinite());
        }
    }

    #[test]
    fn psi_zero_at_origin_and_below_supremum() {
        for (d, alpha, beta) in [(2, 5.0, 1.0), (4, 9.0, 2.0), (6, 20.0, 3.0)] {
            assert_eq!(psi(d, alpha, beta, 0.0).unwrap(), 0.0);
            let r = threshold_i(d, alpha, beta).unwrap();
            for k in 1..=40 {
                let t = k as f64 * 0.05;
                assert!(psi(d, alpha, beta, t).unwrap() <= r.value + 1e-12);
            }
        }
    }

    #[test]
    fn psi_concave_in_t() {
        // Central second differences stay negative.
        let h = 1e-3;
        for (d, alpha, beta) in [(2, 5.0, 1.0), (3, 12.0, 1.0), (5, 18.0, 2.5)] {
            for k in 0..60 {
                let t = 0.01 + k as f64 * 0.03;
                let f = |x: f64| psi(d, alpha, beta, x).unwrap();
                let second = f(t + h) - 2.0 * f(t) + f(t - h);
                assert!(second < 0.0, "d={d}, t={t}: {second}");
            }
        }
    }

    #[test]
    fn sdp_closed_form_hand_values() {
        // d=3, α=8, β=1: 2·49 / (8·(24 + 5)) = 98/232.
        let v = threshold_i_sdp(3, 8.0, 1.0).unwrap();
        assert!((v - 98.0 / 232.0).abs() < 1e-14);
        // d=2, α=4, β=1: 9 / (4·(8 + 2)) = 0.225.
        let v = threshold_i_sdp(2, 4.0, 1.0).unwrap();
        assert!((v - 0.225).abs() < 1e-14);
        assert_eq!(threshold_i_sdp(3, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn sdp_functional_sits_below_information() {
        // The relaxation penalty: I_SDP < I strictly whenever α > β ≥ 0.
        for d in 2..=6 {
            for &alpha in &[1.5, 4.0, 9.0, 25.0, 80.0] {
                for &beta in &[0.0, 0.3, 1.0, 3.0] {
                    if alpha <= beta {
                        continue;
                    }
                    let r = threshold_i(d, alpha, beta).unwrap();
                    assert!(
                        r.sdp_value < r.value,
                        "d={d}, α={alpha}, β={beta}: {} !< {}",
                        r.sdp_value,
                        r.value
                    );
                }
            }
        }
    }

    #[test]
    fn phase_boundary_d2_exact() {
        // (√α - 1)²/2 = 1 at α = 3 + 2√2.
        let a = phase_boundary(ThresholdKind::Information, 2, 1.0, 1.0).unwrap();
        assert!((a - (3.0 + 2.0 * 2.0f64.sqrt())).abs() < 1e-6, "{a}");
    }

    #[test]
    fn phase_boundary_beta_zero_closed_forms() {
        for d in 2..=6 {
            let a = phase_boundary(ThresholdKind::Information, d, 0.0, 1.0).unwrap();
            assert_eq!(a, (1u64 << (d - 1)) as f64);
            let s = phase_boundary(ThresholdKind::Sdp, d, 0.0, 1.0).unwrap();
            assert!((s - d as f64 * (1u64 << d) as f64 / (d as f64 - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_boundary_round_trips() {
        for d in [2usize, 3, 4, 6] {
            for &beta in &[0.5, 1.0, 2.0] {
                for &target in &[0.5, 1.0, 2.0] {
                    let a = phase_boundary(ThresholdKind::Information, d, beta, target).unwrap();
                    let v = threshold_i(d, a, beta).unwrap().value;
                    assert!((v - target).abs() < 1e-6, "d={d}, β={beta}: I({a}) = {v}");
                    let a = phase_boundary(ThresholdKind::Sdp, d, beta, target).unwrap();
                    let v = threshold_i_sdp(d, a, beta).unwrap();
                    assert!((v - target).abs() < 1e-6, "d={d}, β={beta}: I_SDP({a}) = {v}");
                }
            }
        }
    }

    #[test]
    fn sdp_boundary_above_information_boundary() {
        // In the (β, α) plane the certified region is strictly smaller.
        for d in [3usize, 4, 5, 6] {
            for &beta in &[0.0, 0.5, 1.0, 2.0, 4.0] {
                let a_i = phase_boundary(ThresholdKind::Information, d, beta, 1.0).unwrap();
                let a_s = phase_boundary(ThresholdKind::Sdp, d, beta, 1.0).unwrap();
                assert!(a_s > a_i, "d={d}, β={beta}: {a_s} vs {a_i}");
            }
        }
    }

    #[test]
    fn class_counts_sum_to_total() {
        for (d, n) in [(2usize, 12usize), (3, 40), (4, 60), (6, 200)] {
            let total: u128 = (0..d).map(|r| class_count_n_r(d, n, r).unwrap()).sum();
            assert_eq!(
                total,
                crate::combin::binomial(n as u64 - 1, d as u64 - 1).unwrap()
            );
        }
        assert!(class_count_n_r(3, 41, 0).is_err());
        assert!(class_count_n_r(3, 40, 3).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(threshold_i(1, 1.0, 0.5).is_err());
        assert!(threshold_i(9, 1.0, 0.5).is_err());
        assert!(threshold_i(3, -1.0, 0.5).is_err());
        assert!(threshold_i(3, f64::NAN, 0.5).is_err());
        assert!(psi(3, 1.0, 0.5, -0.1).is_err());
        assert!(phase_boundary(ThresholdKind::Information, 3, 1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn psi_never_exceeds_i(
            d in 2usize..=8,
            alpha in 0.01f64..60.0,
            beta in 0.0f64..10.0,
            t in 0.0f64..8.0,
        ) {
            let r = threshold_i(d, alpha, beta).unwrap();
            let p = psi(d, alpha, beta, t).unwrap();
            prop_assert!(p <= r.value + 1e-9 * (1.0 + r.value.abs()));
            prop_assert!(r.value >= 0.0);
            prop_assert!(r.sdp_value >= 0.0);
        }

        #[test]
        fn i_monotone_in_alpha(
            d in 2usize..=6,
            beta in 0.0f64..5.0,
            alpha in 0.5f64..40.0,
            bump in 0.1f64..5.0,
        ) {
            let lo = threshold_i(d, alpha, beta).unwrap().value;
            let hi = threshold_i(d, alpha + bump, beta).unwrap().value;
            prop_assert!(hi >= lo - 1e-12);
            // Strict growth once the signal is clearly positive.
            if alpha > beta + 0.05 {
                prop_assert!(hi > lo);
            }
        }
    }
}
