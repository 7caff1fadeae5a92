//! Dense symmetric linear algebra.
//!
//! One flat column-major matrix type plus a classic two-stage symmetric
//! eigensolver: Householder tridiagonalization followed by implicit-shift QL
//! iteration (the EISPACK `tred2`/`tql2` pair). The solver doubles as the
//! projection engine for the SDP: `psd_project` clips negative eigenvalues.
//!
//! Eigenvalues are returned in descending order with deterministically
//! signed eigenvectors (largest-magnitude entry positive), so downstream
//! sign conventions are reproducible bit-for-bit.

use crate::error::{Error, Result};

/// Machine epsilon for f64 (2^-52), the QL convergence granularity.
const EPS: f64 = 2.220_446_049_250_313e-16;

/// Iteration cap per eigenvalue in the QL loop. EISPACK uses 30; we are
/// slightly more generous. Hitting it means the input was pathological.
const MAX_QL_ITERS: usize = 50;

/// Relative symmetry tolerance for eigensolver input.
const SYMMETRY_TOL: f64 = 1e-12;

/// Square matrix, column-major storage: entry (i, j) lives at `i + j·n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i + i * n] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for j in 0..n {
            for i in 0..n {
                m.data[i + j * n] = f(i, j);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i + j * self.n]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i + j * self.n] = v;
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.n..(j + 1) * self.n]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// y = M x. Column-major axpy accumulation.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "matvec dimension mismatch");
        let mut y = vec![0.0; self.n];
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            let col = self.col(j);
            for (yi, &cij) in y.iter_mut().zip(col) {
                *yi += cij * xj;
            }
        }
        y
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// self += s · other. Dimensions must match.
    pub fn add_scaled(&mut self, other: &Mat, s: f64) {
        assert_eq!(self.n, other.n, "add_scaled dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for a in self.data.iter_mut() {
            *a *= s;
        }
    }

    /// Replaces the matrix by (M + Mᵀ)/2.
    pub fn symmetrize(&mut self) {
        let n = self.n;
        for j in 0..n {
            for i in 0..j {
                let a = self.data[i + j * n];
                let b = self.data[j + i * n];
                let avg = 0.5 * (a + b);
                self.data[i + j * n] = avg;
                self.data[j + i * n] = avg;
            }
        }
    }

    /// Largest absolute asymmetry |M_ij - M_ji|, with its location.
    pub fn asymmetry(&self) -> (usize, usize, f64) {
        let n = self.n;
        let mut worst = (0, 0, 0.0f64);
        for j in 0..n {
            for i in 0..j {
                let dev = (self.data[i + j * n] - self.data[j + i * n]).abs();
                if dev > worst.2 {
                    worst = (i, j, dev);
                }
            }
        }
        worst
    }

    /// Errors unless every entry is finite and the matrix is symmetric to
    /// relative working tolerance.
    pub fn require_symmetric(&self) -> Result<()> {
        if self.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("matrix contains non-finite entries"));
        }
        let tol = SYMMETRY_TOL * self.max_abs().max(1.0);
        let (i, j, dev) = self.asymmetry();
        if dev > tol {
            return Err(Error::NotSymmetric { i, j, deviation: dev });
        }
        Ok(())
    }
}

/// Full symmetric eigendecomposition: `values` descending, `vectors.col(k)`
/// the unit eigenvector for `values[k]`, signs canonicalized.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    values: Vec<f64>,
    vectors: Mat,
}

impl EigenDecomposition {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        self.vectors.col(k)
    }

    pub fn vectors(&self) -> &Mat {
        &self.vectors
    }

    /// Σ λ_k v_k v_kᵀ; used by tests to confirm the decomposition.
    pub fn reconstruct(&self) -> Mat {
        let n = self.values.len();
        let mut out = Mat::zeros(n);
        for k in 0..n {
            rank_one_update(&mut out, self.values[k], self.vectors.col(k));
        }
        out.symmetrize();
        out
    }
}

/// out += scale · v vᵀ.
pub fn rank_one_update(out: &mut Mat, scale: f64, v: &[f64]) {
    if scale == 0.0 {
        return;
    }
    let n = out.n;
    for j in 0..n {
        let c = scale * v[j];
        if c == 0.0 {
            continue;
        }
        let col = out.col_mut(j);
        for (o, &vi) in col.iter_mut().zip(v) {
            *o += c * vi;
        }
    }
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
/// On return `d` holds the diagonal, `e[1..]` the subdiagonal, and — when
/// `accumulate` — `v` the orthogonal transformation.
fn tred2(v: &mut Mat, d: &mut [f64], e: &mut [f64], accumulate: bool) {
    let n = v.n;
    d.copy_from_slice(v.col(n - 1));

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v.get(i - 1, j);
                v.set(i, j, 0.0);
                v.set(j, i, 0.0);
            }
        } else {
            for item in d.iter_mut().take(i) {
                *item /= scale;
                h += *item * *item;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].fill(0.0);

            // Apply the Householder similarity transformation to the
            // leading i×i block. Inner loops walk single columns.
            for j in 0..i {
                f = d[j];
                v.set(j, i, f);
                g = e[j] + v.get(j, j) * f;
                let col_j = &v.data[j * n..j * n + i];
                for k in j + 1..i {
                    g += col_j[k] * d[k];
                    e[k] += col_j[k] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                let col_j = &mut v.data[j * n..j * n + i];
                for (k, item) in col_j.iter_mut().enumerate().take(i).skip(j) {
                    *item -= f * e[k] + g * d[k];
                }
                d[j] = v.get(i - 1, j);
                v.set(i, j, 0.0);
            }
        }
        d[i] = h;
    }

    if accumulate {
        // Accumulate the product of Householder reflections into v. The
        // tridiagonal diagonal is stashed in the last row on the way.
        for i in 0..n - 1 {
            v.set(n - 1, i, v.get(i, i));
            v.set(i, i, 1.0);
            let h = d[i + 1];
            if h != 0.0 {
                for k in 0..=i {
                    d[k] = v.get(k, i + 1) / h;
                }
                for j in 0..=i {
                    let mut g = 0.0;
                    {
                        let col_ip1 = &v.data[(i + 1) * n..(i + 1) * n + i + 1];
                        let col_j = &v.data[j * n..j * n + i + 1];
                        for k in 0..=i {
                            g += col_ip1[k] * col_j[k];
                        }
                    }
                    let col_j = &mut v.data[j * n..j * n + i + 1];
                    for (item, &dk) in col_j.iter_mut().zip(d.iter()) {
                        *item -= g * dk;
                    }
                }
            }
            for k in 0..=i {
                v.set(k, i + 1, 0.0);
            }
        }
        for j in 0..n {
            d[j] = v.get(n - 1, j);
            v.set(n - 1, j, 0.0);
        }
        v.set(n - 1, n - 1, 1.0);
    } else {
        // Without accumulation the stash never happens: the reduced
        // diagonal still sits at V[j][j] (each Householder step acts only
        // on coordinates strictly below its pivot).
        for j in 0..n {
            d[j] = v.get(j, j);
        }
    }
    e[0] = 0.0;
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix, optionally
/// accumulating rotations into `v`.
fn tql2(v: &mut Mat, d: &mut [f64], e: &mut [f64], accumulate: bool) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= EPS * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERS {
                    return Err(Error::EigenNoConvergence { index: l });
                }
                // Form the implicit shift.
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                // One QL sweep with Givens rotations, bottom-up.
                p = d[m];
                let mut c = 1.0f64;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0f64;
                let mut s2 = 0.0f64;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    if accumulate {
                        rotate_columns(v, i, c, s);
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= EPS * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Applies a Givens rotation to columns i and i+1 of v. The hot loop of the
/// whole solver; the two columns are contiguous, so this vectorizes.
#[inline]
fn rotate_columns(v: &mut Mat, i: usize, c: f64, s: f64) {
    let n = v.n;
    let (left, right) = v.data.split_at_mut((i + 1) * n);
    let col_i = &mut left[i * n..];
    let col_ip1 = &mut right[..n];
    for (a, b) in col_i.iter_mut().zip(col_ip1.iter_mut()) {
        let h = *b;
        *b = s * *a + c * h;
        *a = c * *a - s * h;
    }
}

fn eig_inner(m: &Mat, accumulate: bool) -> Result<EigenDecomposition> {
    m.require_symmetric()?;
    let n = m.n;
    if n == 0 {
        return Err(Error::invalid("cannot decompose an empty matrix"));
    }
    let mut v = m.clone();
    v.symmetrize();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    if n == 1 {
        d[0] = v.get(0, 0);
        v.set(0, 0, 1.0);
    } else {
        tred2(&mut v, &mut d, &mut e, accumulate);
        tql2(&mut v, &mut d, &mut e, accumulate)?;
    }

    // Sort descending; stable so deterministic under exact ties.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].partial_cmp(&d[a]).expect("non-finite eigenvalue"));
    let values: Vec<f64> = order.iter().map(|&k| d[k]).collect();

    let vectors = if accumulate {
        let mut sorted = Mat::zeros(n);
        for (dst, &src) in order.iter().enumerate() {
            let col = v.col(src);
            sorted.col_mut(dst).copy_from_slice(col);
            canonicalize_sign(sorted.col_mut(dst));
        }
        sorted
    } else {
        Mat::zeros(0)
    };

    Ok(EigenDecomposition { values, vectors })
}

/// Flips an eigenvector so its largest-magnitude entry (lowest index on
/// ties) is positive.
fn canonicalize_sign(v: &mut [f64]) {
    let mut best = 0usize;
    let mut best_abs = v[0].abs();
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x.abs() > best_abs {
            best = i;
            best_abs = x.abs();
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Full eigendecomposition of a symmetric matrix.
pub fn eig_symmetric(m: &Mat) -> Result<EigenDecomposition> {
    eig_inner(m, true)
}

/// Eigenvalues only (descending). Roughly 5x faster than the full
/// decomposition; used for norms and certificate checks.
pub fn eigvals_symmetric(m: &Mat) -> Result<Vec<f64>> {
    Ok(eig_inner(m, false)?.values)
}

/// Spectral norm (largest absolute eigenvalue) of a symmetric matrix.
pub fn spectral_norm(m: &Mat) -> Result<f64> {
    let vals = eigvals_symmetric(m)?;
    Ok(vals
        .first()
        .map(|f| f.abs())
        .unwrap_or(0.0)
        .max(vals.last().map(|l| l.abs()).unwrap_or(0.0)))
}

/// Euclidean projection onto the positive semidefinite cone: eigenvalues
/// clipped at zero. The reconstruction only touches positive eigenpairs, so
/// it gets cheaper as the input concentrates on a low-rank positive part.
pub fn psd_project(m: &Mat) -> Result<Mat> {
    let eig = eig_symmetric(m)?;
    let n = m.n;
    let mut out = Mat::zeros(n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda <= 0.0 {
            break; // descending order: the rest are clipped
        }
        rank_one_update(&mut out, lambda, eig.vector(k));
    }
    out.symmetrize();
    Ok(out)
}

/// Dot product helper used across modules.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// ℓ2 norm helper.
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// ℓ∞ norm helper.
pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_symmetric(n: usize, seed: u64) -> Mat {
        let mut rng = crate::rng::substream(seed, 0x11A9);
        let mut m = Mat::zeros(n);
        for j in 0..n {
            for i in 0..=j {
                let x: f64 = rng.gen_range(-1.0..1.0);
                m.set(i, j, x);
                m.set(j, i, x);
            }
        }
        m
    }

    fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
        assert!((a - b).abs() <= tol, "{what}: {a} vs {b}");
    }

    #[test]
    fn identity_eigensystem() {
        let eig = eig_symmetric(&Mat::identity(5)).unwrap();
        for &v in eig.values() {
            assert_close(v, 1.0, 1e-14, "identity eigenvalue");
        }
    }

    #[test]
    fn diagonal_matrix_sorted_descending_with_basis_vectors() {
        let mut m = Mat::zeros(3);
        m.set(0, 0, 3.0);
        m.set(1, 1, 1.0);
        m.set(2, 2, -2.0);
        let eig = eig_symmetric(&m).unwrap();
        assert_eq!(eig.values(), &[3.0, 1.0, -2.0]);
        assert_eq!(eig.vector(0), &[1.0, 0.0, 0.0]);
        assert_eq!(eig.vector(1), &[0.0, 1.0, 0.0]);
        assert_eq!(eig.vector(2), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn two_by_two_hand_computed() {
        // [[2, 1], [1, 2]] has eigenvalues 3 and 1.
        let mut m = Mat::zeros(2);
        m.set(0, 0, 2.0);
        m.set(1, 1, 2.0);
        m.set(0, 1, 1.0);
        m.set(1, 0, 1.0);
        let eig = eig_symmetric(&m).unwrap();
        assert_close(eig.values()[0], 3.0, 1e-12, "lambda1");
        assert_close(eig.values()[1], 1.0, 1e-12, "lambda2");
        let r = 1.0 / 2.0f64.sqrt();
        assert_close(eig.vector(0)[0], r, 1e-12, "v1[0]");
        assert_close(eig.vector(0)[1], r, 1e-12, "v1[1]");
    }

    #[test]
    fn random_reconstruction_and_orthonormality() {
        let m = random_symmetric(50, 7);
        let eig = eig_symmetric(&m).unwrap();
        // Reconstruction within 1e-9 relative Frobenius.
        let mut diff = eig.reconstruct();
        diff.add_scaled(&m, -1.0);
        let rel = diff.frobenius_norm() / m.frobenius_norm();
        assert!(rel < 1e-9, "reconstruction relative error {rel}");
        // Columns orthonormal within 1e-10.
        for a in 0..50 {
            for b in a..50 {
                let g = dot(eig.vector(a), eig.vector(b));
                let target = if a == b { 1.0 } else { 0.0 };
                assert_close(g, target, 1e-10, "gram entry");
            }
        }
        // Residuals ‖Mv - λv‖ ≤ 1e-8·(1 + |λ|).
        for k in 0..50 {
            let mv = m.matvec(eig.vector(k));
            let lambda = eig.values()[k];
            let res: f64 = mv
                .iter()
                .zip(eig.vector(k))
                .map(|(a, b)| (a - lambda * b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(res <= 1e-8 * (1.0 + lambda.abs()), "residual {res} at {k}");
        }
        // Descending order.
        for w in eig.values().windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn matches_external_eigensolver() {
        // Cross-check eigenvalues against nalgebra on random symmetric input.
        for seed in 0..3u64 {
            let n = 24;
            let m = random_symmetric(n, 100 + seed);
            let eig = eig_symmetric(&m).unwrap();
            let dm = nalgebra::DMatrix::from_fn(n, n, |i, j| m.get(i, j));
            let mut reference = dm.symmetric_eigen().eigenvalues.as_slice().to_vec();
            reference.sort_by(|a, b| b.partial_cmp(a).unwrap());
            for (mine, theirs) in eig.values().iter().zip(&reference) {
                assert_close(*mine, *theirs, 1e-9, "eigenvalue vs nalgebra");
            }
        }
    }

    #[test]
    fn values_only_path_agrees_with_full() {
        let m = random_symmetric(40, 9);
        let full = eig_symmetric(&m).unwrap();
        let vals = eigvals_symmetric(&m).unwrap();
        for (a, b) in full.values().iter().zip(&vals) {
            assert_close(*a, *b, 1e-10, "values-only vs full");
        }
    }

    #[test]
    fn deterministic_output() {
        let m = random_symmetric(20, 3);
        let e1 = eig_symmetric(&m).unwrap();
        let e2 = eig_symmetric(&m).unwrap();
        assert_eq!(e1.values(), e2.values());
        assert_eq!(e1.vectors().data(), e2.vectors().data());
    }

    #[test]
    fn sign_canonicalization() {
        let m = random_symmetric(15, 4);
        let eig = eig_symmetric(&m).unwrap();
        for k in 0..15 {
            let v = eig.vector(k);
            let mut best = 0;
            for (i, &x) in v.iter().enumerate() {
                if x.abs() > v[best].abs() {
                    best = i;
                }
            }
            assert!(v[best] > 0.0, "column {k} not canonically signed");
        }
    }

    #[test]
    fn rejects_asymmetric_and_nonfinite() {
        let mut m = Mat::zeros(3);
        m.set(0, 1, 1.0);
        assert!(matches!(
            eig_symmetric(&m),
            Err(Error::NotSymmetric { .. })
        ));
        let mut bad = Mat::zeros(2);
        bad.set(0, 0, f64::NAN);
        assert!(eig_symmetric(&bad).is_err());
    }

    #[test]
    fn one_by_one() {
        let mut m = Mat::zeros(1);
        m.set(0, 0, -3.5);
        let eig = eig_symmetric(&m).unwrap();
        assert_eq!(eig.values(), &[-3.5]);
        assert_eq!(eig.vector(0), &[1.0]);
    }

    #[test]
    fn psd_projection_splits_spectrum() {
        let m = random_symmetric(20, 5);
        let proj = psd_project(&m).unwrap();
        let vals = eigvals_symmetric(&proj).unwrap();
        assert!(vals.iter().all(|&v| v >= -1e-10), "projection not PSD");
        // Projection is idempotent and reproduces PSD input.
        let mut again = psd_project(&proj).unwrap();
        again.add_scaled(&proj, -1.0);
        assert!(again.frobenius_norm() < 1e-9 * (1.0 + proj.frobenius_norm()));
        // ‖M - proj‖² = Σ min(λ,0)² (Euclidean projection identity).
        let mut diff = m.clone();
        diff.add_scaled(&proj, -1.0);
        let expected: f64 = eigvals_symmetric(&m)
            .unwrap()
            .iter()
            .map(|&l| l.min(0.0).powi(2))
            .sum::<f64>()
            .sqrt();
        assert_close(diff.frobenius_norm(), expected, 1e-9, "projection distance");
    }

    #[test]
    fn spectral_norm_of_known_matrix() {
        let mut m = Mat::zeros(2);
        m.set(0, 0, -4.0);
        m.set(1, 1, 2.0);
        assert_close(spectral_norm(&m).unwrap(), 4.0, 1e-12, "spectral norm");
    }

    #[test]
    fn repeated_eigenvalues_stay_orthonormal() {
        // 2I on a 6x6: eigenspace is everything; output must still be an
        // orthonormal basis with eigenvalue 2.
        let mut m = Mat::identity(6);
        m.scale(2.0);
        let eig = eig_symmetric(&m).unwrap();
        for &v in eig.values() {
            assert_close(v, 2.0, 1e-13, "repeated eigenvalue");
        }
        for a in 0..6 {
            for b in 0..6 {
                let g = dot(eig.vector(a), eig.vector(b));
                let t = if a == b { 1.0 } else { 0.0 };
                assert_close(g, t, 1e-12, "orthonormality under repetition");
            }
        }
    }
}
