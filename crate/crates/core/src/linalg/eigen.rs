use serde::Serialize;

use super::scalar::require_tol;
use super::{norm2, LinalgError, Matrix};

/// Default tolerance for eigenvalue reality and clustering.
pub const DEFAULT_EIGEN_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenPair {
    pub value: f64,
    /// Unit-length eigenvector.
    pub vector: Vec<f64>,
}

/// Outcome of a real eigen-decomposition attempt.
///
/// Failure is a value, not an error: callers such as the cusp classifier
/// branch on it.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EigenDecomposition {
    /// Pairs sorted by descending eigenvalue; repeated eigenvalues appear
    /// once per independent eigenvector.
    Diagonalizable { pairs: Vec<EigenPair> },
    NotRealDiagonalizable {
        /// `(re, im)` of every eigenvalue, sorted by descending real part.
        spectrum: Vec<(f64, f64)>,
        reason: String,
    },
}

impl EigenDecomposition {
    pub fn pairs(&self) -> Option<&[EigenPair]> {
        match self {
            EigenDecomposition::Diagonalizable { pairs } => Some(pairs),
            EigenDecomposition::NotRealDiagonalizable { .. } => None,
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        match self {
            EigenDecomposition::Diagonalizable { pairs } => pairs.iter().map(|p| p.value).collect(),
            EigenDecomposition::NotRealDiagonalizable { spectrum, .. } => spectrum.iter().map(|z| z.0).collect(),
        }
    }

    pub fn is_diagonalizable(&self) -> bool {
        matches!(self, EigenDecomposition::Diagonalizable { .. })
    }
}

/// Real eigen-decomposition of a square float matrix.
///
/// Eigenvalues come from nalgebra's real Schur form. Those within `tol`
/// (relative to `max(1, |λ|)`) of each other are clustered, and each cluster
/// must have a null space of `M - λI` of the same dimension, otherwise the
/// matrix is reported as defective.
pub fn eigen_decomposition(m: &Matrix<f64>, tol: f64) -> Result<EigenDecomposition, LinalgError> {
    let tol = require_tol(Some(tol))?;
    if !m.is_square() {
        return Err(LinalgError::Dimension(format!("eigen-decomposition needs a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    if m.entries().iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NumericOverflow("non-finite entry in eigen-decomposition input".into()));
    }
    let n = m.rows();
    let dm = nalgebra::DMatrix::from_fn(n, n, |i, j| *m.get(i, j));
    let mut spectrum: Vec<(f64, f64)> = dm.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
    spectrum.sort_by(|a, b| b.0.total_cmp(&a.0));

    let not_real = |reason: String, spectrum: Vec<(f64, f64)>| Ok(EigenDecomposition::NotRealDiagonalizable { spectrum, reason });

    if let Some(z) = spectrum.iter().find(|z| z.1.abs() > tol * z.0.abs().max(1.0)) {
        return not_real(format!("complex eigenvalue {} {:+}i", z.0, z.1), spectrum);
    }

    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for &(re, _) in &spectrum {
        match clusters.last_mut() {
            Some(c) if (c[c.len() - 1] - re).abs() <= tol * re.abs().max(1.0) => c.push(re),
            _ => clusters.push(vec![re]),
        }
    }

    let scale = m.sup_norm().max(1.0);
    let mut pairs = Vec::with_capacity(n);
    for cluster in &clusters {
        let lambda = cluster.iter().sum::<f64>() / cluster.len() as f64;
        let shifted = m - &Matrix::<f64>::identity(n).scale(&lambda);
        let kernel = shifted.kernel_basis(Some(tol))?;
        if kernel.dim() != cluster.len() {
            return not_real(
                format!(
                    "eigenvalue {lambda} has algebraic multiplicity {} but geometric multiplicity {}",
                    cluster.len(),
                    kernel.dim()
                ),
                spectrum,
            );
        }
        for v in kernel.basis() {
            let len = norm2(v);
            let v: Vec<f64> = v.iter().map(|x| x / len).collect();
            let residual: Vec<f64> = m.apply(&v).iter().zip(&v).map(|(mv, x)| mv - lambda * x).collect();
            if norm2(&residual) > tol.sqrt() * scale {
                return not_real(format!("eigenvector residual {} too large at {lambda}", norm2(&residual)), spectrum);
            }
            pairs.push(EigenPair { value: lambda, vector: v });
        }
    }
    Ok(EigenDecomposition::Diagonalizable { pairs })
}
