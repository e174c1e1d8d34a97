//! Dense Hermitian linear algebra shared by every module.
//!
//! Hermitian eigendecomposition is the single primitive behind trace
//! distances, PSD checks and pseudo-inverses.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Absolute tolerance used for Hermiticity, trace and PSD checks.
pub const TOLERANCE: f64 = 1e-9;

pub(crate) fn ensure_square(m: &CMatrix, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::shape(
            format!("square {what}"),
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    Ok(m.nrows())
}

pub(crate) fn ensure_same_shape(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::shape(
            format!("{}x{}", a.nrows(), a.ncols()),
            format!("{}x{}", b.nrows(), b.ncols()),
        ));
    }
    Ok(())
}

fn is_real(m: &CMatrix) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let n = m.nrows();
    for i in 0..n {
        for j in i..n {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Matrices whose entries are exactly real take the real symmetric path,
/// which is several times faster and covers every hybrid density matrix.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut vals: Vec<f64> = if is_real(m) {
        let re = m.map(|z| z.re);
        re.symmetric_eigenvalues().iter().copied().collect()
    } else {
        m.clone().symmetric_eigenvalues().iter().copied().collect()
    };
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}

/// Full eigendecomposition `(values, vectors)` of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    if is_real(m) {
        let eig = SymmetricEigen::new(m.map(|z| z.re));
        let vecs = eig.eigenvectors.map(|x| C64::new(x, 0.0));
        (eig.eigenvalues.iter().copied().collect(), vecs)
    } else {
        let eig = SymmetricEigen::new(m.clone());
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    }
}

/// Moore-Penrose pseudo-inverse of a Hermitian PSD matrix.
///
/// Eigenvalues at or below `rel_cutoff * max_eigenvalue` are treated as zero.
/// Returns the inverse and its numerical rank.
pub fn hermitian_pseudo_inverse(m: &CMatrix, rel_cutoff: f64) -> Result<(CMatrix, usize)> {
    let n = ensure_square(m, "matrix")?;
    let (vals, vecs) = hermitian_eigen(m);
    let max = vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut out = CMatrix::zeros(n, n);
    if max == 0.0 {
        return Ok((out, 0));
    }
    let cutoff = rel_cutoff * max;
    let mut rank = 0;
    for (i, &v) in vals.iter().enumerate() {
        if v > cutoff {
            rank += 1;
            let col = vecs.column(i);
            out += (col * col.adjoint()).unscale(v);
        }
    }
    Ok((out, rank))
}

/// Squared Frobenius norm of a matrix.
pub fn frobenius_norm_sq(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// `Tr(A† B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<C64> {
    ensure_same_shape(a, b)?;
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

/// Squared Frobenius distance `‖A − B‖_F²`, summed entrywise.
pub fn frobenius_sq(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    ensure_same_shape(a, b)?;
    Ok(a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm_sqr()).sum())
}

/// Largest absolute entrywise difference.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    ensure_same_shape(a, b)?;
    Ok(a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

/// Neumaier-compensated sum of reals.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
