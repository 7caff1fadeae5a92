//! Exact binomial coefficients and subset enumeration.
//!
//! Edge-class sizes such as C(n, d) are computed exactly in `u128` so that
//! sampling probabilities and class counts carry no rounding error at the
//! instance sizes this crate targets (n up to a few thousand, d up to ~8).
//! For ratios at very large arguments a log-space variant is provided.

use crate::error::{Error, Result};

/// C(n, k) exactly, as `u128`. Returns 0 when `k > n`.
///
/// Multiplications are ordered so every intermediate value is itself a
/// binomial coefficient times a small factor; overflow is detected rather
/// than wrapped.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc = C(n, i) so far; multiply by (n - i), divide by (i + 1).
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or(Error::BinomialOverflow { n, k })?;
        acc /= (i + 1) as u128;
    }
    Ok(acc)
}

/// C(n, k) as `f64`, via the exact integer value when it fits and log-space
/// otherwise. Accurate to f64 precision in both regimes.
pub fn binomial_f64(n: u64, k: u64) -> f64 {
    match binomial(n, k) {
        Ok(v) => v as f64,
        Err(_) => ln_binomial(n, k).exp(),
    }
}

/// ln C(n, k). Exact summation of `ln((n-k+i)/i)`; O(min(k, n-k)) terms.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    let mut acc = 0.0f64;
    for i in 1..=k {
        acc += ((n - k + i) as f64).ln() - (i as f64).ln();
    }
    acc
}

/// Visits every k-subset of `0..n` in lexicographic order, passing each as a
/// sorted slice. Used for small-class edge enumeration and the exhaustive
/// bisection oracle; callers must keep `C(n, k)` modest.
pub fn for_each_subset<F: FnMut(&[u32])>(n: u32, k: u32, mut f: F) {
    if k > n {
        return;
    }
    if k == 0 {
        f(&[]);
        return;
    }
    let k = k as usize;
    let mut idx: Vec<u32> = (0..k as u32).collect();
    loop {
        f(&idx);
        // Advance to the next combination.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != n - (k - i) as u32 {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
