//! Induced actions on `Λ²R⁴` and on the traceless 4x4 matrices.

use super::{LinalgError, Matrix, Scalar};

/// Index pairs `(i, j)`, `i < j`, of the basis `e_i ∧ e_j` in lexicographic order.
pub fn wedge_index_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Matrix of the induced action on `Λ²` in the basis of [`wedge_index_pairs`].
pub fn exterior_square<S: Scalar>(m: &Matrix<S>) -> Result<Matrix<S>, LinalgError> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(LinalgError::Dimension(format!("exterior square expects 4x4, got {}x{}", m.rows(), m.cols())));
    }
    let pairs = wedge_index_pairs(4);
    Ok(Matrix::from_fn(6, 6, |row, col| {
        let (i, j) = pairs[row];
        let (k, l) = pairs[col];
        m.get(i, k).clone() * m.get(j, l).clone() - m.get(i, l).clone() * m.get(j, k).clone()
    }))
}

fn unit<S: Scalar>(n: usize, i: usize, j: usize) -> Matrix<S> {
    let mut e = Matrix::zeros(n, n);
    e.set(i, j, S::one());
    e
}

/// The fixed basis of traceless `n x n` matrices: off-diagonal units `E_ij`
/// in row-major order, then `E_11 - E_22, …, E_{n-1,n-1} - E_nn`.
pub fn traceless_basis<S: Scalar>(n: usize) -> Vec<Matrix<S>> {
    let mut basis = Vec::with_capacity(n * n - 1);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                basis.push(unit(n, i, j));
            }
        }
    }
    for i in 0..n - 1 {
        basis.push(&unit(n, i, i) - &unit(n, i + 1, i + 1));
    }
    basis
}

/// Coordinates of a traceless matrix in [`traceless_basis`].
///
/// The diagonal coefficients are partial sums of the diagonal, so the
/// result is only meaningful when the trace vanishes.
pub fn traceless_coords<S: Scalar>(x: &Matrix<S>) -> Result<Vec<S>, LinalgError> {
    if !x.is_square() || x.rows() < 2 {
        return Err(LinalgError::Dimension(format!("traceless coordinates need a square matrix, got {}x{}", x.rows(), x.cols())));
    }
    let n = x.rows();
    let mut coords = Vec::with_capacity(n * n - 1);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                coords.push(x.get(i, j).clone());
            }
        }
    }
    let mut partial = S::zero();
    for i in 0..n - 1 {
        partial = partial + x.get(i, i).clone();
        coords.push(partial.clone());
    }
    Ok(coords)
}

pub fn from_traceless_coords<S: Scalar>(n: usize, coords: &[S]) -> Result<Matrix<S>, LinalgError> {
    if coords.len() != n * n - 1 {
        return Err(LinalgError::Dimension(format!("expected {} coordinates, got {}", n * n - 1, coords.len())));
    }
    let mut x = Matrix::zeros(n, n);
    for (c, b) in coords.iter().zip(traceless_basis::<S>(n)) {
        x = &x + &b.scale(c);
    }
    Ok(x)
}

/// Matrix of `X ↦ g X g⁻¹` on the traceless matrices.
///
/// `det g` must equal one: exactly for the exact backend, within `tol`
/// for floats.
pub fn adjoint_action<S: Scalar>(g: &Matrix<S>, tol: Option<f64>) -> Result<Matrix<S>, LinalgError> {
    if !g.is_square() {
        return Err(LinalgError::Dimension(format!("adjoint action needs a square matrix, got {}x{}", g.rows(), g.cols())));
    }
    let n = g.rows();
    let det = g.determinant()?;
    if !(det.clone() - S::one()).negligible(1.0, tol)? {
        return Err(LinalgError::NotUnimodular(det.to_string()));
    }
    let inv = g.inverse()?;
    let basis = traceless_basis::<S>(n);
    let columns = basis
        .iter()
        .map(|b| traceless_coords(&(&(g * b) * &inv)))
        .collect::<Result<Vec<_>, _>>()?;
    let dim = basis.len();
    Ok(Matrix::from_fn(dim, dim, |i, j| columns[j][i].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Q3;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(n: i64) -> Q3 {
        Q3::from_i64(n)
    }

    fn small_matrix() -> impl Strategy<Value = Matrix<Q3>> {
        proptest::collection::vec((-4i64..=4, -4i64..=4), 16)
            .prop_map(|v| Matrix::from_fn(4, 4, |i, j| {
                let (a, b) = v[4 * i + j];
                Q3::new(BigRational::from_integer(a.into()), BigRational::from_integer(b.into()))
            }))
    }

    /// Unimodular by construction: product of elementary matrices.
    fn unimodular() -> impl Strategy<Value = Matrix<Q3>> {
        proptest::collection::vec((0usize..4, 0usize..4, -3i64..=3), 6).prop_map(|ops| {
            let mut g = Matrix::<Q3>::identity(4);
            for (i, j, c) in ops {
                if i != j {
                    let mut e = Matrix::identity(4);
                    e.set(i, j, q(c));
                    g = &g * &e;
                }
            }
            g
        })
    }

    #[test]
    fn identity_and_diagonal() {
        assert!(exterior_square(&Matrix::<Q3>::identity(4)).unwrap().is_identity());
        let d = Matrix::diagonal(&[q(2), q(3), q(5), q(7)]);
        let expected = Matrix::diagonal(&[q(6), q(10), q(14), q(15), q(21), q(35)]);
        assert_eq!(exterior_square(&d).unwrap(), expected);
        assert!(exterior_square(&Matrix::<Q3>::identity(3)).is_err());
        assert!(adjoint_action(&Matrix::<Q3>::identity(4), None).unwrap().is_identity());
    }

    #[test]
    fn adjoint_rejects_non_unimodular() {
        let d = Matrix::diagonal(&[q(2), q(1), q(1), q(1)]);
        assert!(matches!(adjoint_action(&d, None), Err(LinalgError::NotUnimodular(_))));
        let f = d.to_f64();
        assert!(adjoint_action(&f, Some(1e-12)).is_err());
        assert!(matches!(adjoint_action(&Matrix::<f64>::identity(4), None), Err(LinalgError::Configuration(_))));
    }

    #[test]
    fn coordinates_round_trip() {
        let basis = traceless_basis::<Q3>(4);
        assert_eq!(basis.len(), 15);
        for (k, b) in basis.iter().enumerate() {
            assert_eq!(b.trace().unwrap(), Q3::zero());
            let c = traceless_coords(b).unwrap();
            assert!(c.iter().enumerate().all(|(i, x)| *x == if i == k { q(1) } else { q(0) }));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn determinant_identity(m in small_matrix()) {
            let d = m.determinant().unwrap();
            let d3 = d.clone() * d.clone() * d;
            prop_assert_eq!(exterior_square(&m).unwrap().determinant().unwrap(), d3);
        }

        #[test]
        fn exterior_square_is_multiplicative(a in small_matrix(), b in small_matrix()) {
            let lhs = exterior_square(&(&a * &b)).unwrap();
            let rhs = &exterior_square(&a).unwrap() * &exterior_square(&b).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn adjoint_is_a_homomorphism(g in unimodular(), h in unimodular()) {
            let ag = adjoint_action(&g, None).unwrap();
            let ah = adjoint_action(&h, None).unwrap();
            prop_assert_eq!(adjoint_action(&(&g * &h), None).unwrap(), &ag * &ah);
            let inv = adjoint_action(&g.inverse().unwrap(), None).unwrap();
            prop_assert!((&ag * &inv).is_identity());
        }

        #[test]
        fn traceless_round_trip(v in proptest::collection::vec(-5i64..=5, 15)) {
            let coords: Vec<Q3> = v.into_iter().map(q).collect();
            let x = from_traceless_coords(4, &coords).unwrap();
            prop_assert_eq!(x.trace().unwrap(), Q3::zero());
            prop_assert_eq!(traceless_coords(&x).unwrap(), coords);
        }
    }
}
