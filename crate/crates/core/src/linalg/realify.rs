use super::{LinalgError, Matrix, Scalar};

/// Turn a complex conjugator `Re + i·Im` into a real one.
///
/// If `Re + i·Im` conjugates one real representation into another, then so
/// do `Re` and `Im` separately, and therefore every real combination
/// `Re + x·Im`. The polynomial `P(x) = det(Re + x·Im)` has degree at most
/// `n` and is not identically zero when `P(i) ≠ 0`, so scanning
/// `x = 0, 1, …, n` finds an invertible combination.
pub fn realify_conjugator<S: Scalar>(re: &Matrix<S>, im: &Matrix<S>, tol: Option<f64>) -> Result<Matrix<S>, LinalgError> {
    if !re.is_square() || re.rows() != im.rows() || re.cols() != im.cols() {
        return Err(LinalgError::Dimension("real and imaginary parts must be square of equal size".into()));
    }
    let n = re.rows();
    let scale = re.sup_norm().max(im.sup_norm()).max(1.0);
    for x0 in 0..=n as i64 {
        let candidate = re + &im.scale(&S::from_i64(x0));
        let det = candidate.determinant()?;
        let reference = scale.powi(n as i32) * ((x0.max(1)) as f64).powi(n as i32);
        if !det.negligible(reference, tol)? {
            return Ok(candidate);
        }
    }
    Err(LinalgError::InvalidInput("det(Re + x·Im) vanishes at x = 0..=n, so Re + i·Im is singular".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Q3;
    use proptest::prelude::*;

    #[test]
    fn trivial_cases() {
        let i4 = Matrix::<Q3>::identity(4);
        let z4 = Matrix::<Q3>::zeros(4, 4);
        assert_eq!(realify_conjugator(&i4, &z4, None).unwrap(), i4);
        assert_eq!(realify_conjugator(&z4, &i4, None).unwrap(), i4);
        assert!(matches!(realify_conjugator(&z4, &z4, None), Err(LinalgError::InvalidInput(_))));
    }

    #[test]
    fn singular_real_part() {
        let re = Matrix::<Q3>::diagonal(&[Q3::one(), Q3::zero()]);
        let im = Matrix::<Q3>::from_ratios(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
        let c = realify_conjugator(&re, &im, None).unwrap();
        assert!(!c.determinant().unwrap().is_zero());
        assert!(c != re);
    }

    #[test]
    fn conjugator_intertwines() {
        // Re + i·Im conjugates the rotation by a quarter turn to itself.
        let rot = Matrix::<Q3>::from_ratios(&[&[(0, 1), (-1, 1)], &[(1, 1), (0, 1)]]);
        let re = Matrix::<Q3>::zeros(2, 2);
        let im = rot.clone();
        let c = realify_conjugator(&re, &im, None).unwrap();
        assert_eq!(&c * &rot, &rot * &c);
    }

    proptest! {
        #[test]
        fn result_is_invertible_combination(
            re in proptest::collection::vec(-2i64..=2, 9),
            im in proptest::collection::vec(-2i64..=2, 9),
        ) {
            let re = Matrix::from_fn(3, 3, |i, j| Q3::from_i64(re[3 * i + j]));
            let im = Matrix::from_fn(3, 3, |i, j| Q3::from_i64(im[3 * i + j]));
            match realify_conjugator(&re, &im, None) {
                Ok(c) => {
                    prop_assert!(!c.determinant().unwrap().is_zero());
                    let diff = &c - &re;
                    let ok = (0..=3).any(|x| diff == im.scale(&Q3::from_i64(x)));
                    prop_assert!(ok);
                }
                Err(_) => {
                    for x in 0..=3 {
                        let cand = &re + &im.scale(&Q3::from_i64(x));
                        prop_assert!(cand.determinant().unwrap().is_zero());
                    }
                }
            }
        }
    }
}
