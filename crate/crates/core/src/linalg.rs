//! Dense complex linear algebra helpers shared by every module.
//!
//! Matrices are `nalgebra` dynamic complex matrices. Everything here works on
//! small Hermitian or unitary matrices (total dimension at most a few dozen).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Eigenvalues in `[-EIG_CLAMP, 0)` are treated as exact zeros.
pub const EIG_CLAMP: f64 = 1e-9;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermitian_deviation(m: &CMat) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().sum()
}

fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues of a Hermitian matrix, in descending order.
pub fn eigvalsh(m: &CMat) -> Vec<f64> {
    let n = m.nrows();
    let mut vals = match n {
        0 => Vec::new(),
        1 => vec![m[(0, 0)].re],
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
            let mean = 0.5 * (a + d);
            let half = 0.5 * (a - d);
            let r = (half * half + b.norm_sqr()).sqrt();
            vec![mean + r, mean - r]
        }
        _ => hermitian_part(m).symmetric_eigenvalues().iter().copied().collect(),
    };
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues descending.
/// Column `k` of the returned matrix is the eigenvector for value `k`.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Clamp tiny negative eigenvalues to zero and renormalize to unit sum.
pub fn normalize_spectrum(vals: &mut [f64]) {
    for v in vals.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let total: f64 = vals.iter().sum();
    if total > 0.0 {
        for v in vals.iter_mut() {
            *v /= total;
        }
    }
}

/// `f(H)` for Hermitian `H`, applied through its spectrum.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> C64) -> CMat {
    let (vals, vecs) = eigh(m);
    let diag = CVec::from_iterator(vals.len(), vals.iter().map(|&v| f(v)));
    let scaled = CMat::from_fn(vecs.nrows(), vecs.ncols(), |i, j| vecs[(i, j)] * diag[j]);
    scaled * vecs.adjoint()
}

/// Principal square root of a positive semidefinite matrix.
pub fn psd_sqrt(m: &CMat) -> CMat {
    hermitian_fn(m, |v| c(v.max(0.0).sqrt(), 0.0))
}

/// `exp(iH)` for Hermitian `H`.
pub fn expm_i_hermitian(h: &CMat) -> CMat {
    hermitian_fn(h, |v| c(v.cos(), v.sin()))
}

/// Hermitian `H` with `exp(iH) = U`, eigenphases taken in `(-pi, pi]`.
pub fn unitary_log(u: &CMat) -> CMat {
    let n = u.nrows();
    let (q, t) = u.clone().schur().unpack();
    let mut h = CMat::zeros(n, n);
    for k in 0..n {
        let phase = t[(k, k)].arg();
        let col = q.column(k);
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] += col[i] * col[j].conj() * phase;
            }
        }
    }
    hermitian_part(&h)
}

/// Closest isometry to a full-column-rank matrix: `M (M^dag M)^{-1/2}`.
pub fn polar_isometry(m: &CMat) -> CMat {
    let gram = m.adjoint() * m;
    let inv_sqrt = hermitian_fn(&gram, |v| c(1.0 / v.max(1e-300).sqrt(), 0.0));
    m * inv_sqrt
}

/// Max entry deviation of `V^dag V` from the identity.
pub fn isometry_defect(v: &CMat) -> f64 {
    max_abs_diff(&(v.adjoint() * v), &identity(v.ncols()))
}
