use super::scalar::require_tol;
use super::{LinalgError, Matrix, Scalar};

const MAX_TERMS: usize = 200;

/// Matrix exponential by scaling and squaring.
///
/// The matrix is scaled by `2^-s` until its sup-row-sum norm is at most 1/2,
/// the Taylor series is summed until a term is below `tol` times the partial
/// sum, and the result is squared `s` times.
pub fn matrix_exponential(m: &Matrix<f64>, tol: f64) -> Result<Matrix<f64>, LinalgError> {
    let tol = require_tol(Some(tol))?;
    if !m.is_square() {
        return Err(LinalgError::Dimension(format!("exp needs a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    if m.entries().iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NumericOverflow("non-finite entry in exponential input".into()));
    }
    let n = m.rows();
    let norm = row_sum_norm(m);
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    if squarings > 1000 {
        return Err(LinalgError::NumericOverflow(format!("norm {norm} too large for exponential")));
    }
    let scaled = m.scale(&0.5f64.powi(squarings as i32));

    let mut sum = Matrix::<f64>::identity(n);
    let mut term = Matrix::<f64>::identity(n);
    for k in 1..=MAX_TERMS {
        term = (&term * &scaled).scale(&(1.0 / k as f64));
        sum = &sum + &term;
        if row_sum_norm(&term) <= tol * row_sum_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    if sum.entries().iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NumericOverflow("exponential overflowed".into()));
    }
    Ok(sum)
}

/// Exact exponential of a nilpotent matrix: the finite series `Σ N^k/k!`.
pub fn nilpotent_exponential<S: Scalar>(m: &Matrix<S>) -> Result<Matrix<S>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::Dimension(format!("exp needs a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    let n = m.rows();
    let mut sum = Matrix::<S>::identity(n);
    let mut term = Matrix::<S>::identity(n);
    for k in 1..=n {
        term = (&term * m).scale(&S::from_ratio(1, k as i64));
        if term.is_zero() {
            return Ok(sum);
        }
        sum = &sum + &term;
    }
    if (&term * m).is_zero() {
        Ok(sum)
    } else {
        Err(LinalgError::InvalidInput("matrix is not nilpotent".into()))
    }
}

fn row_sum_norm(m: &Matrix<f64>) -> f64 {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Q3;
    use proptest::prelude::*;

    fn e12_plus_e24<S: Scalar>() -> Matrix<S> {
        let mut n = Matrix::zeros(4, 4);
        n.set(0, 1, S::one());
        n.set(1, 3, S::one());
        n
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let e = matrix_exponential(&Matrix::zeros(4, 4), 1e-15).unwrap();
        assert!(e.is_identity());
    }

    #[test]
    fn nilpotent_series_terminates() {
        let e = nilpotent_exponential(&e12_plus_e24::<Q3>()).unwrap();
        let expected = Matrix::<Q3>::from_ratios(&[
            &[(1, 1), (1, 1), (0, 1), (1, 2)],
            &[(0, 1), (1, 1), (0, 1), (1, 1)],
            &[(0, 1), (0, 1), (1, 1), (0, 1)],
            &[(0, 1), (0, 1), (0, 1), (1, 1)],
        ]);
        assert_eq!(e, expected);
        let ef = matrix_exponential(&e12_plus_e24::<f64>(), 1e-16).unwrap();
        assert!(ef.approx_eq(&expected.to_f64(), Some(1e-15)).unwrap());
    }

    #[test]
    fn diagonal_case() {
        let d = Matrix::diagonal(&[1.0, -1.0, 0.0, 0.0]);
        let e = matrix_exponential(&d, 1e-16).unwrap();
        let expected = Matrix::diagonal(&[std::f64::consts::E, 1.0 / std::f64::consts::E, 1.0, 1.0]);
        assert!(e.approx_eq(&expected, Some(1e-14)).unwrap());
    }

    #[test]
    fn large_rotation_generator() {
        let theta = 20.0;
        let g = Matrix::from_rows(vec![vec![0.0, -theta], vec![theta, 0.0]]).unwrap();
        let e = matrix_exponential(&g, 1e-16).unwrap();
        let expected = Matrix::from_rows(vec![vec![theta.cos(), -theta.sin()], vec![theta.sin(), theta.cos()]]).unwrap();
        assert!(e.approx_eq(&expected, Some(1e-12)).unwrap());
    }

    #[test]
    fn rejects_non_finite_and_non_nilpotent() {
        let mut m = Matrix::<f64>::zeros(2, 2);
        m.set(0, 0, f64::NAN);
        assert!(matches!(matrix_exponential(&m, 1e-12), Err(LinalgError::NumericOverflow(_))));
        assert!(nilpotent_exponential(&Matrix::<Q3>::identity(2)).is_err());
    }

    proptest! {
        #[test]
        fn determinant_is_exp_of_trace(entries in proptest::collection::vec(-1.5f64..1.5, 16)) {
            let m = Matrix::from_fn(4, 4, |i, j| entries[4 * i + j]);
            let e = matrix_exponential(&m, 1e-16).unwrap();
            let lhs = e.determinant().unwrap();
            let rhs = m.trace().unwrap().exp();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
        }

        #[test]
        fn strictly_upper_inputs_match_finite_series(entries in proptest::collection::vec(-3i64..=3, 6)) {
            let mut m = Matrix::<Q3>::zeros(4, 4);
            let mut k = 0;
            for i in 0..4 {
                for j in i + 1..4 {
                    m.set(i, j, Q3::from_i64(entries[k]));
                    k += 1;
                }
            }
            let exact = nilpotent_exponential(&m).unwrap();
            let float = matrix_exponential(&m.to_f64(), 1e-16).unwrap();
            prop_assert!(float.approx_eq(&exact.to_f64(), Some(1e-11)).unwrap());
        }
    }
}
