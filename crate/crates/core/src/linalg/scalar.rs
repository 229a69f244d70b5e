use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::{LinalgError, LinearSubspace, Matrix};

/// Which arithmetic a value lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::Exact => f.write_str("exact"),
            Backend::Float => f.write_str("float"),
        }
    }
}

/// Field elements the matrix code is generic over.
///
/// Two implementations exist: `f64` and the exact quadratic field
/// [`QuadraticNumber`](super::QuadraticNumber). Every float comparison goes
/// through [`Scalar::negligible`], which refuses to run without an explicit
/// tolerance; the exact backend ignores the tolerance and compares with zero.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const BACKEND: Backend;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    /// `num / den`; panics on a zero denominator.
    fn from_ratio(num: i64, den: i64) -> Self;
    fn recip(&self) -> Option<Self>;
    /// Literal zero test. For floats this is `== 0.0`, never a tolerance test.
    fn is_zero(&self) -> bool;
    fn magnitude(&self) -> f64;
    fn to_f64(&self) -> f64;
    fn total_cmp(&self, other: &Self) -> Ordering;

    /// Whether `self` counts as zero relative to `reference`.
    ///
    /// Float: `|self| <= tol * max(reference, 1)`, and a missing `tol` is a
    /// configuration error. Exact: `self == 0`.
    fn negligible(&self, reference: f64, tol: Option<f64>) -> Result<bool, LinalgError>;

    /// Basis of the right null space of `m`.
    fn null_space(m: &Matrix<Self>, tol: Option<f64>) -> Result<LinearSubspace<Self>, LinalgError>;

    /// `(cos, sin)` of the angle `2πk/n`, if the backend can represent it.
    fn cos_sin_turn(k: i64, n: i64) -> Option<(Self, Self)>;

    /// JSON encoding: exact values as strings, floats as numbers.
    fn to_json(&self) -> serde_json::Value;
    fn from_json(value: &serde_json::Value) -> Result<Self, LinalgError>;

    fn div(&self, other: &Self) -> Option<Self> {
        other.recip().map(|inv| self.clone() * inv)
    }

    fn is_positive(&self) -> bool {
        self.total_cmp(&Self::zero()) == Ordering::Greater
    }
}

pub(crate) fn require_tol(tol: Option<f64>) -> Result<f64, LinalgError> {
    match tol {
        Some(t) if t.is_finite() && t >= 0.0 => Ok(t),
        Some(t) => Err(LinalgError::Configuration(format!("tolerance must be finite and non-negative, got {t}"))),
        None => Err(LinalgError::Configuration("float backend requires an explicit tolerance".into())),
    }
}

impl Scalar for f64 {
    const BACKEND: Backend = Backend::Float;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn recip(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }

    fn negligible(&self, reference: f64, tol: Option<f64>) -> Result<bool, LinalgError> {
        let tol = require_tol(tol)?;
        Ok(self.abs() <= tol * reference.max(1.0))
    }

    fn null_space(m: &Matrix<Self>, tol: Option<f64>) -> Result<LinearSubspace<Self>, LinalgError> {
        super::svd_null_space(m, require_tol(tol)?)
    }

    fn cos_sin_turn(k: i64, n: i64) -> Option<(Self, Self)> {
        if n == 0 {
            return None;
        }
        let angle = std::f64::consts::TAU * k as f64 / n as f64;
        Some((angle.cos(), angle.sin()))
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::from(*self)
    }

    fn from_json(value: &serde_json::Value) -> Result<Self, LinalgError> {
        value.as_f64().ok_or_else(|| LinalgError::InvalidInput(format!("expected a number, got {value}")))
    }
}
