//! Scalars, small dense matrices and the handful of linear-algebra
//! operations the rest of the crate is built on.

mod eigen;
mod expm;
mod lie;
mod matrix;
mod quadratic;
mod realify;
mod scalar;

pub use eigen::{eigen_decomposition, EigenDecomposition, EigenPair, DEFAULT_EIGEN_TOL};
pub use expm::{matrix_exponential, nilpotent_exponential};
pub use lie::{adjoint_action, exterior_square, from_traceless_coords, traceless_basis, traceless_coords, wedge_index_pairs};
pub use matrix::Matrix;
pub use quadratic::{ParseQuadraticError, QuadraticNumber, Q3};
pub use realify::realify_conjugator;
pub use scalar::{Backend, Scalar};
pub(crate) use scalar::require_tol;

use serde::Serialize;

/// Default relative rank tolerance for the float backend.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("determinant must be 1, got {0}")]
    NotUnimodular(String),
    #[error("numeric overflow: {0}")]
    NumericOverflow(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// A subspace of `S^ambient_dim` given by a basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearSubspace<S> {
    ambient_dim: usize,
    #[serde(skip)]
    basis: Vec<Vec<S>>,
}

impl<S: Scalar> LinearSubspace<S> {
    pub fn new(ambient_dim: usize, basis: Vec<Vec<S>>) -> Self {
        debug_assert!(basis.iter().all(|v| v.len() == ambient_dim));
        Self { ambient_dim, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<S>] {
        &self.basis
    }

    /// Basis vectors as the columns of an `ambient_dim x dim` matrix.
    pub fn basis_matrix(&self) -> Matrix<S> {
        Matrix::from_fn(self.ambient_dim, self.dim(), |i, j| self.basis[j][i].clone())
    }
}

/// Reduced row echelon form; returns the matrix and its pivot columns.
/// Pivots are accepted when not negligible at `tol`.
pub fn rref<S: Scalar>(m: &Matrix<S>, tol: Option<f64>) -> Result<(Matrix<S>, Vec<usize>), LinalgError> {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let scale = m.sup_norm();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let mut best: Option<(usize, f64)> = None;
        for i in r..rows {
            let x = a.get(i, c);
            if x.negligible(scale, tol)? {
                continue;
            }
            let mag = x.magnitude();
            if best.is_none_or(|(_, m)| mag > m) {
                best = Some((i, mag));
            }
        }
        let Some((p, _)) = best else { continue };
        if p != r {
            let (rp, rr) = (a.row(p), a.row(r));
            for j in 0..cols {
                a.set(r, j, rp[j].clone());
                a.set(p, j, rr[j].clone());
            }
        }
        let inv = a.get(r, c).recip().ok_or(LinalgError::Singular)?;
        for j in 0..cols {
            let v = a.get(r, j).clone() * inv.clone();
            a.set(r, j, v);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = a.get(i, c).clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..cols {
                let v = a.get(i, j).clone() - factor.clone() * a.get(r, j).clone();
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok((a, pivots))
}

/// Exact null space from the reduced row echelon form.
pub(crate) fn rref_null_space<S: Scalar>(m: &Matrix<S>) -> Result<LinearSubspace<S>, LinalgError> {
    let (reduced, pivots) = rref(m, None)?;
    let n = m.cols();
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![S::zero(); n];
        v[free] = S::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -reduced.get(row, free).clone();
        }
        basis.push(v);
    }
    Ok(LinearSubspace::new(n, basis))
}

/// Float null space: right singular vectors whose singular value is at most
/// `tol` times the largest one.
pub(crate) fn svd_null_space(m: &Matrix<f64>, tol: f64) -> Result<LinearSubspace<f64>, LinalgError> {
    let n = m.cols();
    if n == 0 {
        return Ok(LinearSubspace::new(0, Vec::new()));
    }
    if m.entries().iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NumericOverflow("non-finite entry in kernel input".into()));
    }
    // Pad to at least n rows so the SVD returns a full right basis.
    let rows = m.rows().max(n);
    let dm = nalgebra::DMatrix::from_fn(rows, n, |i, j| if i < m.rows() { *m.get(i, j) } else { 0.0 });
    let svd = dm.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| LinalgError::Configuration("SVD did not return V".into()))?;
    let sigma = svd.singular_values;
    let max = sigma.iter().cloned().fold(0.0, f64::max);
    let threshold = tol * max;
    let basis = (0..sigma.len())
        .filter(|&i| sigma[i] <= threshold)
        .map(|i| v_t.row(i).iter().cloned().collect())
        .collect();
    Ok(LinearSubspace::new(n, basis))
}

/// Euclidean norm of a float vector.
pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
