//! Dense complex matrices and the handful of factorizations the rest of the
//! crate leans on (SVD with full unitary factors, Hermitian eigenvalues,
//! Cholesky definiteness tests).

use std::ops::Deref;

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;

pub(crate) const EPS: f64 = f64::EPSILON;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: Mat,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Self::new(Mat::from_row_slice(rows, cols, entries))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let cols = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(Mat::from_fn(r, cols, |i, j| c(rows[i][j], 0.0)))
    }

    pub fn new(inner: Mat) -> Result<Self> {
        for j in 0..inner.ncols() {
            for i in 0..inner.nrows() {
                let z = inner[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self { inner })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            inner: Mat::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: Mat::identity(n, n),
        }
    }

    pub fn as_mat(&self) -> &Mat {
        &self.inner
    }

    pub fn into_inner(self) -> Mat {
        self.inner
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    /// True when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.inner.iter().all(|z| z.im == 0.0)
    }

    pub fn norm2(&self) -> f64 {
        spectral_norm(&self.inner)
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }
}

impl Deref for ComplexMatrix {
    type Target = Mat;
    fn deref(&self) -> &Mat {
        &self.inner
    }
}

impl From<ComplexMatrix> for Mat {
    fn from(m: ComplexMatrix) -> Mat {
        m.inner
    }
}

/// Skew-Hermitian and Hermitian parts of a square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSplit {
    pub skew: ComplexMatrix,
    pub herm: ComplexMatrix,
}

/// Splits `m` into `skew + herm` with `skew* = -skew` and `herm* = herm`.
///
/// Only the upper triangle is computed; the lower triangle is mirrored so the
/// symmetry relations hold bit for bit.
pub fn hermitian_split(m: &ComplexMatrix) -> Result<HermitianSplit> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "hermitian_split needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut skew = Mat::zeros(n, n);
    let mut herm = Mat::zeros(n, n);
    for i in 0..n {
        let d = m[(i, i)];
        skew[(i, i)] = c(0.0, d.im);
        herm[(i, i)] = c(d.re, 0.0);
        for j in (i + 1)..n {
            let a = m[(i, j)];
            let b = m[(j, i)].conj();
            let s = (a - b) * 0.5;
            let h = (a + b) * 0.5;
            skew[(i, j)] = s;
            skew[(j, i)] = -s.conj();
            herm[(i, j)] = h;
            herm[(j, i)] = h.conj();
        }
    }
    Ok(HermitianSplit {
        skew: ComplexMatrix { inner: skew },
        herm: ComplexMatrix { inner: herm },
    })
}

/// Exact skew-Hermitian check.
pub fn is_skew_hermitian(m: &Mat) -> bool {
    m.is_square()
        && (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| m[(i, j)] == -m[(j, i)].conj()))
}

/// Exact Hermitian check.
pub fn is_hermitian(m: &Mat) -> bool {
    m.is_square() && (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| m[(i, j)] == m[(j, i)].conj()))
}

/// `(m + m*)/2`.
pub fn hermitian_part(m: &Mat) -> Mat {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Full singular value decomposition.
///
/// Returns `(u, s, v)` with `u` m×m, `v` n×n unitary and `s` sorted
/// nonincreasing with `min(m, n)` entries, so that `m = u * diag(s) * v*`.
pub fn svd_full(m: &Mat) -> (Mat, Vec<f64>, Mat) {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return (Mat::identity(rows, rows), Vec::new(), Mat::identity(cols, cols));
    }
    let (m, scale) = normalized(m.clone());
    let svd = to_faer(&m).svd().expect("svd did not converge");
    let s = svd.S().column_vector().iter().map(|z| z.re * scale).collect();
    (from_faer(svd.U()), s, from_faer(svd.V()))
}

fn to_faer(m: &Mat) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> Mat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Singular values, nonincreasing.
pub fn singular_values(m: &Mat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let (m, scale) = normalized(m.clone());
    to_faer(&m)
        .singular_values()
        .expect("svd did not converge")
        .into_iter()
        .map(|v| v * scale)
        .collect()
}

pub fn spectral_norm(m: &Mat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Smallest singular value (0 for empty matrices).
pub fn sigma_min(m: &Mat) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Eigenvalues of the Hermitian part of `h`, ascending.
pub fn hermitian_eigenvalues(h: &Mat) -> Vec<f64> {
    if h.nrows() == 0 {
        return Vec::new();
    }
    let (m, s) = normalized_hermitian_part(h);
    to_faer(&m)
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .expect("eigensolver did not converge")
        .into_iter()
        .map(|v| v * s)
        .collect()
}

fn normalized_hermitian_part(h: &Mat) -> (Mat, f64) {
    normalized(hermitian_part(h))
}

/// `m` divided by its largest entry modulus, and that modulus. Keeps
/// subnormal inputs away from the decompositions.
fn normalized(m: Mat) -> (Mat, f64) {
    let s = m.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    if s == 0.0 || !s.is_finite() {
        return (m, 1.0);
    }
    (m.map(|z| z.unscale(s)), s)
}

/// Hermitian eigen-decomposition, eigenvalues ascending with matching columns.
pub fn hermitian_eigen(h: &Mat) -> (Vec<f64>, Mat) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), Mat::zeros(0, 0));
    }
    let (m, s) = normalized_hermitian_part(h);
    let e = to_faer(&m)
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("eigensolver did not converge");
    let vals = e.S().column_vector().iter().map(|z| z.re * s).collect();
    (vals, from_faer(e.U()))
}

pub fn lambda_min(h: &Mat) -> f64 {
    hermitian_eigenvalues(h).first().copied().unwrap_or(0.0)
}

pub fn lambda_max(h: &Mat) -> f64 {
    hermitian_eigenvalues(h).last().copied().unwrap_or(0.0)
}

/// Cholesky-based positive definiteness test of the Hermitian part of `h`.
pub fn is_positive_definite(h: &Mat) -> bool {
    if h.nrows() == 0 {
        return true;
    }
    let hs = hermitian_part(h);
    match Cholesky::new(hs) {
        // nalgebra accepts any positive pivot; reject pivots that are pure
        // round-off relative to the diagonal scale.
        Some(ch) => {
            let l = ch.l();
            let scale = (0..h.nrows()).map(|i| h[(i, i)].re.abs()).fold(0.0, f64::max);
            (0..h.nrows()).all(|i| {
                let d = l[(i, i)].re;
                d * d > 4.0 * EPS * scale * h.nrows() as f64
            })
        }
        None => false,
    }
}

/// Orthonormal basis (as columns) of the null space of `m`, using singular
/// values at or below `tol`.
pub fn null_space(m: &Mat, tol: f64) -> Mat {
    let cols = m.ncols();
    if cols == 0 {
        return Mat::zeros(0, 0);
    }
    let (_, s, v) = svd_full(m);
    let rank = s.iter().filter(|&&x| x > tol).count();
    v.columns(rank, cols - rank).into_owned()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    Mat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

pub fn block_diag(blocks: &[Mat]) -> Mat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = Mat::zeros(rows, cols);
    let (mut r, mut cc) = (0, 0);
    for b in blocks {
        out.view_mut((r, cc), b.shape()).copy_from(b);
        r += b.nrows();
        cc += b.ncols();
    }
    out
}

/// `x* m x` for a column vector `x`.
pub fn quad_form(m: &Mat, x: &DVector<C64>) -> C64 {
    x.dotc(&(m * x))
}

/// Serializable complex scalar as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pair(pub f64, pub f64);

impl From<C64> for Pair {
    fn from(z: C64) -> Self {
        Pair(z.re, z.im)
    }
}

impl From<Pair> for C64 {
    fn from(p: Pair) -> Self {
        c(p.0, p.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_example_matrix() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[-1.0, 1.0]]).unwrap();
        let s = hermitian_split(&m).unwrap();
        let skew = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        assert_eq!(s.skew, skew);
        assert_eq!(s.herm, ComplexMatrix::identity(2));
    }

    #[test]
    fn split_of_hermitian_has_zero_skew() {
        let h = Mat::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, -3.0), c(1.0, 3.0), c(5.0, 0.0)]);
        let s = hermitian_split(&ComplexMatrix::new(h.clone()).unwrap()).unwrap();
        assert!(s.skew.iter().all(|z| *z == c(0.0, 0.0)));
        assert_eq!(*s.herm.as_mat(), h);
    }

    #[test]
    fn split_scalar_i() {
        let m = ComplexMatrix::from_row_major(1, 1, &[c(0.0, 1.0)]).unwrap();
        let s = hermitian_split(&m).unwrap();
        assert_eq!(s.skew[(0, 0)], c(0.0, 1.0));
        assert_eq!(s.herm[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn split_rejects_rectangular() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_split(&m), Err(Error::Dimension(_))));
    }

    #[test]
    fn rejects_non_finite() {
        let r = ComplexMatrix::from_row_major(1, 1, &[c(f64::NAN, 0.0)]);
        assert!(matches!(r, Err(Error::NonFinite { row: 0, col: 0 })));
    }

    #[test]
    fn full_svd_reconstructs_rectangular() {
        for (r, cc) in [(2usize, 4usize), (4, 2), (3, 3)] {
            let m = Mat::from_fn(r, cc, |i, j| c((i * 3 + j) as f64 - 2.0, (i as f64) - (j as f64) * 0.5));
            let (u, s, v) = svd_full(&m);
            assert_eq!(u.shape(), (r, r));
            assert_eq!(v.shape(), (cc, cc));
            let mut sig = Mat::zeros(r, cc);
            for (k, &x) in s.iter().enumerate() {
                sig[(k, k)] = c(x, 0.0);
            }
            let back = &u * sig * v.adjoint();
            assert!((back - &m).norm() < 1e-12 * (1.0 + m.norm()));
            assert!((u.adjoint() * &u - Mat::identity(r, r)).norm() < 1e-12);
            assert!((v.adjoint() * &v - Mat::identity(cc, cc)).norm() < 1e-12);
        }
    }

    #[test]
    fn null_space_of_projector() {
        let m = Mat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let ns = null_space(&m, 1e-12);
        assert_eq!(ns.ncols(), 1);
        assert!((ns[(1, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kron_dimensions_and_entries() {
        let a = Mat::from_row_slice(1, 2, &[c(1.0, 0.0), c(2.0, 0.0)]);
        let b = Mat::from_row_slice(2, 1, &[c(0.0, 1.0), c(3.0, 0.0)]);
        let k = kron(&a, &b);
        assert_eq!(k.shape(), (2, 2));
        assert_eq!(k[(1, 1)], c(6.0, 0.0));
        assert_eq!(k[(0, 1)], c(0.0, 2.0));
    }

    #[test]
    fn subnormal_entries_decompose() {
        let h = Mat::from_row_slice(
            3,
            3,
            &[
                c(-1.89e-309, 0.0),
                c(-1.78e-308, 7.35e-309),
                c(9.69e-309, 5.87e-309),
                c(-1.78e-308, -7.35e-309),
                c(5.18e-309, 0.0),
                c(-2.54e-309, -1.11e-308),
                c(9.69e-309, -5.87e-309),
                c(-2.54e-309, 1.11e-308),
                c(5.3e-310, 0.0),
            ],
        );
        let ev = hermitian_eigenvalues(&h);
        assert!(ev.iter().all(|v| v.abs() < 1e-306));
        assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        assert!(spectral_norm(&h) > 0.0 && spectral_norm(&h) < 1e-306);
        assert_eq!(hermitian_eigen(&h).0, ev);
    }
}
