//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type Vector = DVector<C64>;

/// Relative cutoff below which a singular value counts as zero.
pub const DEFAULT_RANK_CUTOFF: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Singular values in descending order. Empty for empty matrices.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above `cutoff * sigma_max`.
pub fn rank_from_singular_values(sv: &[f64], cutoff: f64) -> usize {
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > cutoff * smax).count()
}

pub fn numerical_rank(m: &CMatrix, cutoff: f64) -> usize {
    rank_from_singular_values(&singular_values(m), cutoff)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Moore-Penrose pseudo-inverse through the SVD, dropping singular values
/// below `cutoff * sigma_max`.
pub fn pinv(m: &CMatrix, cutoff: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return CMatrix::zeros(cols, rows);
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().fold(0.0f64, |acc, &s| acc.max(s));
    let mut out = CMatrix::zeros(cols, rows);
    if smax == 0.0 {
        return out;
    }
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff * smax {
            let v_col = v_t.row(k).adjoint();
            let u_row = u.column(k).adjoint();
            out += (v_col * u_row) * C64::new(1.0 / s, 0.0);
        }
    }
    out
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn column_space_basis(m: &CMatrix, cutoff: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return CMatrix::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().fold(0.0f64, |acc, &s| acc.max(s));
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax > 0.0 && s > cutoff * smax)
        .map(|(k, _)| k)
        .collect();
    CMatrix::from_fn(rows, keep.len(), |i, j| u[(i, keep[j])])
}

/// Extreme eigenvalues (min, max) of a Hermitian matrix.
pub fn hermitian_extreme_eigenvalues(h: &CMatrix) -> (f64, f64) {
    if h.nrows() == 0 {
        return (0.0, 0.0);
    }
    let eig = h.clone().symmetric_eigen();
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

/// Eigenpair of a Hermitian matrix at the extreme ends of its spectrum:
/// `((lambda_min, u_min), (lambda_max, u_max))`.
pub fn hermitian_extreme_eigenpairs(h: &CMatrix) -> ((f64, Vector), (f64, Vector)) {
    let eig = h.clone().symmetric_eigen();
    let (mut imin, mut imax) = (0, 0);
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l < eig.eigenvalues[imin] {
            imin = k;
        }
        if l > eig.eigenvalues[imax] {
            imax = k;
        }
    }
    (
        (eig.eigenvalues[imin], eig.eigenvectors.column(imin).into_owned()),
        (eig.eigenvalues[imax], eig.eigenvectors.column(imax).into_owned()),
    )
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Spectral-norm distance to the identity.
pub fn distance_to_identity(m: &CMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    spectral_norm(&(m - identity(m.nrows())))
}
