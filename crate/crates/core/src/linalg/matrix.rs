use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::scalar::Scalar;
use super::{LinalgError, LinearSubspace};

/// Dense row-major matrix over a [`Scalar`] backend.
///
/// Rectangular shapes are allowed because the cohomology code stacks
/// operators; the square-only operations check their shape.
#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Dimension("ragged rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Integer/rational literal helper: entries given as `(num, den)`.
    pub fn from_ratios(rows: &[&[(i64, i64)]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| {
            let (n, d) = rows[i][j];
            S::from_ratio(n, d)
        })
    }

    pub fn diagonal(entries: &[S]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { S::zero() })
    }

    pub fn column_vector(v: &[S]) -> Self {
        Self { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: S) {
        self.data[i * self.cols + j] = value;
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<S> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(S::to_f64)
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (j, vj) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !vj.is_zero() {
                        acc = acc + a.clone() * vj.clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn trace(&self) -> Result<S, LinalgError> {
        self.require_square()?;
        Ok((0..self.rows).fold(S::zero(), |acc, i| acc + self.get(i, i).clone()))
    }

    pub fn pow(&self, exponent: u32) -> Result<Self, LinalgError> {
        self.require_square()?;
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    /// Largest entry magnitude.
    pub fn sup_norm(&self) -> f64 {
        self.data.iter().map(S::magnitude).fold(0.0, f64::max)
    }

    /// Sup-norm distance from the identity (square matrices).
    pub fn deviation_from_identity(&self) -> f64 {
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .map(|(i, j)| {
                let e = self.get(i, j).clone();
                if i == j { e - S::one() } else { e }.magnitude()
            })
            .fold(0.0, f64::max)
    }

    /// Literal identity test (exact backend: equality, float: bitwise).
    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    /// Every entry negligible at `tol` (relative to one).
    pub fn is_negligible(&self, tol: Option<f64>) -> Result<bool, LinalgError> {
        for x in &self.data {
            if !x.negligible(1.0, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn approx_eq(&self, other: &Self, tol: Option<f64>) -> Result<bool, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Ok(false);
        }
        (self - other).is_negligible(tol)
    }

    pub fn vstack(blocks: &[&Self]) -> Result<Self, LinalgError> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(LinalgError::Dimension("vstack: column counts differ".into()));
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let data = blocks.iter().flat_map(|b| b.data.iter().cloned()).collect();
        Ok(Self { rows, cols, data })
    }

    pub fn hstack(blocks: &[&Self]) -> Result<Self, LinalgError> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(LinalgError::Dimension("hstack: row counts differ".into()));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for b in blocks {
                data.extend(b.data[i * b.cols..(i + 1) * b.cols].iter().cloned());
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn block_diag(blocks: &[&Self]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let c0 = cols.start;
        let r0 = rows.start;
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(r0 + i, c0 + j).clone())
    }

    fn require_square(&self) -> Result<(), LinalgError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(LinalgError::Dimension(format!("expected a square matrix, got {}x{}", self.rows, self.cols)))
        }
    }

    /// Index of the row (from `start`) with the largest non-zero entry in
    /// column `col`. Exact backends accept any non-zero pivot; taking the
    /// largest one keeps the float path stable.
    fn pivot_row(&self, col: usize, start: usize) -> Option<usize> {
        (start..self.rows)
            .filter(|&r| !self.get(r, col).is_zero())
            .max_by(|&a, &b| self.get(a, col).magnitude().total_cmp(&self.get(b, col).magnitude()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn determinant(&self) -> Result<S, LinalgError> {
        self.require_square()?;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = S::one();
        for col in 0..n {
            let Some(p) = m.pivot_row(col, col) else {
                return Ok(S::zero());
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pivot = m.get(col, col).clone();
            let inv = pivot.recip().expect("pivot is non-zero");
            det = det * pivot;
            for r in col + 1..n {
                let factor = m.get(r, col).clone() * inv.clone();
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = m.get(r, j).clone() - factor.clone() * m.get(col, j).clone();
                    m.set(r, j, v);
                }
            }
        }
        Ok(det)
    }

    /// Gauss-Jordan inverse. Fails only on an exactly singular pivot
    /// sequence; callers needing a conditioning check use `kernel_basis`.
    pub fn inverse(&self) -> Result<Self, LinalgError> {
        self.require_square()?;
        let n = self.rows;
        let mut aug = Self::hstack(&[self, &Self::identity(n)])?;
        for col in 0..n {
            let p = aug.pivot_row(col, col).ok_or(LinalgError::Singular)?;
            aug.swap_rows(p, col);
            let inv = aug.get(col, col).recip().ok_or(LinalgError::Singular)?;
            for j in 0..2 * n {
                let v = aug.get(col, j).clone() * inv.clone();
                aug.set(col, j, v);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = aug.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..2 * n {
                    let v = aug.get(r, j).clone() - factor.clone() * aug.get(col, j).clone();
                    aug.set(r, j, v);
                }
            }
        }
        Ok(aug.submatrix(0..n, n..2 * n))
    }

    /// Null space basis; `tol` is mandatory for the float backend.
    pub fn kernel_basis(&self, tol: Option<f64>) -> Result<LinearSubspace<S>, LinalgError> {
        S::null_space(self, tol)
    }

    pub fn rank(&self, tol: Option<f64>) -> Result<usize, LinalgError> {
        Ok(self.cols - self.kernel_basis(tol)?.dim())
    }
}

impl<S: Scalar> Mul for &Matrix<S> {
    type Output = Matrix<S>;
    fn mul(self, rhs: Self) -> Matrix<S> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Matrix::<S>::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        out
    }
}

impl<S: Scalar> Mul for Matrix<S> {
    type Output = Matrix<S>;
    fn mul(self, rhs: Self) -> Matrix<S> {
        &self * &rhs
    }
}

impl<S: Scalar> Add for &Matrix<S> {
    type Output = Matrix<S>;
    fn add(self, rhs: Self) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }
}

impl<S: Scalar> Sub for &Matrix<S> {
    type Output = Matrix<S>;
    fn sub(self, rhs: Self) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }
}

impl<S: Scalar> Neg for &Matrix<S> {
    type Output = Matrix<S>;
    fn neg(self) -> Matrix<S> {
        self.map(|x| -x.clone())
    }
}

impl<S: Scalar> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}
