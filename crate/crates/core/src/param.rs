//! Real-vector charts for unitaries and isometries, the coordinates the
//! optimizers move in.

use crate::linalg::{self, c, CMat};

/// `k*k` reals as a Hermitian matrix: the diagonal first, then the real and
/// imaginary parts of each upper-triangular entry in row-major order.
pub fn hermitian_from_params(k: usize, params: &[f64]) -> CMat {
    assert_eq!(params.len(), k * k, "Hermitian chart needs k^2 parameters");
    let mut h = CMat::zeros(k, k);
    for i in 0..k {
        h[(i, i)] = c(params[i], 0.0);
    }
    let mut idx = k;
    for i in 0..k {
        for j in i + 1..k {
            let z = c(params[idx], params[idx + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            idx += 2;
        }
    }
    h
}

pub fn params_from_hermitian(h: &CMat) -> Vec<f64> {
    let k = h.nrows();
    let mut out = Vec::with_capacity(k * k);
    out.extend((0..k).map(|i| h[(i, i)].re));
    for i in 0..k {
        for j in i + 1..k {
            out.push(h[(i, j)].re);
            out.push(h[(i, j)].im);
        }
    }
    out
}

/// `exp(iH)` for the Hermitian matrix encoded by `params`.
pub fn unitary_from_params(k: usize, params: &[f64]) -> CMat {
    linalg::expm_i_hermitian(&hermitian_from_params(k, params))
}

pub fn params_from_unitary(u: &CMat) -> Vec<f64> {
    params_from_hermitian(&linalg::unitary_log(u))
}

/// Row-major real and imaginary parts of a `rows x cols` matrix, mapped to
/// the nearest isometry by polar decomposition.
pub fn isometry_from_params(rows: usize, cols: usize, params: &[f64]) -> CMat {
    linalg::polar_isometry(&matrix_from_params(rows, cols, params))
}

pub fn matrix_from_params(rows: usize, cols: usize, params: &[f64]) -> CMat {
    assert_eq!(params.len(), 2 * rows * cols, "matrix chart needs 2*rows*cols parameters");
    CMat::from_fn(rows, cols, |i, j| {
        let k = 2 * (i * cols + j);
        c(params[k], params[k + 1])
    })
}

pub fn params_from_matrix(m: &CMat) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)].re);
            out.push(m[(i, j)].im);
        }
    }
    out
}
