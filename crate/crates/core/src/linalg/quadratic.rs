//! Exact arithmetic in the real quadratic field ℚ(√D).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::scalar::{Backend, Scalar};
use super::{rref_null_space, LinalgError, LinearSubspace, Matrix};

const fn is_valid_radicand(d: i64) -> bool {
    if d < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= d {
        if d % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// `rational + irrational * √D` with rational coefficients.
///
/// `D` must be a square-free integer greater than one, which is checked at
/// compile time the first time a value is built.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadraticNumber<const D: i64> {
    rational: BigRational,
    irrational: BigRational,
}

/// The field used for every base-point matrix: all rotation entries of the
/// Euclidean turnover groups lie in ℚ(√3).
pub type Q3 = QuadraticNumber<3>;

impl<const D: i64> QuadraticNumber<D> {
    const VALID: () = assert!(is_valid_radicand(D), "radicand must be square-free and > 1");

    pub fn new(rational: BigRational, irrational: BigRational) -> Self {
        #[allow(clippy::let_unit_value)]
        let () = Self::VALID;
        Self { rational, irrational }
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::new(q, BigRational::zero())
    }

    /// `(a_num/a_den) + (b_num/b_den)·√D`.
    pub fn from_parts(a_num: i64, a_den: i64, b_num: i64, b_den: i64) -> Self {
        Self::new(ratio(a_num, a_den), ratio(b_num, b_den))
    }

    pub fn sqrt_d() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn radicand() -> i64 {
        D
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.irrational
    }

    pub fn is_rational(&self) -> bool {
        self.irrational.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.rational.clone(), -self.irrational.clone())
    }

    /// Field norm `a² − D·b²`.
    pub fn norm(&self) -> BigRational {
        &self.rational * &self.rational - BigRational::from_integer(BigInt::from(D)) * &self.irrational * &self.irrational
    }

    pub fn signum(&self) -> i32 {
        let a = sign_of(&self.rational);
        let b = sign_of(&self.irrational);
        if b == 0 {
            return a;
        }
        if a == 0 || a == b {
            return b;
        }
        // Opposite signs: compare a² with D·b².
        let a2 = &self.rational * &self.rational;
        let db2 = BigRational::from_integer(BigInt::from(D)) * &self.irrational * &self.irrational;
        match a2.cmp(&db2) {
            Ordering::Greater => a,
            Ordering::Less => b,
            Ordering::Equal => 0,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

fn ratio(num: i64, den: i64) -> BigRational {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn sign_of(q: &BigRational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Fallback for huge numerators/denominators.
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl<const D: i64> Add for QuadraticNumber<D> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.rational + rhs.rational, self.irrational + rhs.irrational)
    }
}

impl<const D: i64> Sub for QuadraticNumber<D> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.rational - rhs.rational, self.irrational - rhs.irrational)
    }
}

impl<const D: i64> Mul for QuadraticNumber<D> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let d = BigRational::from_integer(BigInt::from(D));
        let rational = &self.rational * &rhs.rational + d * &self.irrational * &rhs.irrational;
        let irrational = &self.rational * &rhs.irrational + &self.irrational * &rhs.rational;
        Self::new(rational, irrational)
    }
}

impl<const D: i64> Neg for QuadraticNumber<D> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.rational, -self.irrational)
    }
}

impl<const D: i64> Div for QuadraticNumber<D> {
    type Output = Self;
    /// Panics on division by zero, like the integer types.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        let inv = rhs.recip().expect("division by zero in quadratic field");
        self * inv
    }
}

impl<const D: i64> PartialOrd for QuadraticNumber<D> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<const D: i64> Ord for QuadraticNumber<D> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).signum().cmp(&0)
    }
}

impl<const D: i64> From<i64> for QuadraticNumber<D> {
    fn from(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }
}

impl<const D: i64> Scalar for QuadraticNumber<D> {
    const BACKEND: Backend = Backend::Exact;

    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }

    fn from_i64(n: i64) -> Self {
        n.into()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(ratio(num, den))
    }

    fn recip(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            // D is not a square, so the norm vanishes only at zero.
            return None;
        }
        Some(Self::new(&self.rational / &n, -(&self.irrational / &n)))
    }

    fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.irrational.is_zero()
    }

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(&self.rational) + rational_to_f64(&self.irrational) * (D as f64).sqrt()
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn negligible(&self, _reference: f64, _tol: Option<f64>) -> Result<bool, LinalgError> {
        Ok(Scalar::is_zero(self))
    }

    fn null_space(m: &Matrix<Self>, _tol: Option<f64>) -> Result<LinearSubspace<Self>, LinalgError> {
        rref_null_space(m)
    }

    fn cos_sin_turn(k: i64, n: i64) -> Option<(Self, Self)> {
        if n == 0 {
            return None;
        }
        let (k, n) = if n < 0 { (-k, -n) } else { (k, n) };
        let g = k.gcd(&n);
        let (k, n) = (k / g, n / g);
        let k = k.rem_euclid(n);
        let half = || Self::from_ratio(1, 2);
        let half_root = || Self::from_parts(0, 1, 1, 2);
        let (c1, s1) = match n {
            1 => (Self::one(), Self::zero()),
            2 => (-Self::one(), Self::zero()),
            4 => (Self::zero(), Self::one()),
            3 if D == 3 => (-half(), half_root()),
            6 if D == 3 => (half(), half_root()),
            12 if D == 3 => (half_root(), half()),
            8 if D == 2 => (half_root(), half_root()),
            _ => return None,
        };
        let mut c = Self::one();
        let mut s = Self::zero();
        for _ in 0..k {
            let nc = c.clone() * c1.clone() - s.clone() * s1.clone();
            let ns = c * s1.clone() + s * c1.clone();
            c = nc;
            s = ns;
        }
        Some((c, s))
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }

    fn from_json(value: &serde_json::Value) -> Result<Self, LinalgError> {
        let text = value.as_str().ok_or_else(|| LinalgError::InvalidInput(format!("expected an exact string, got {value}")))?;
        text.parse().map_err(|e: ParseQuadraticError| LinalgError::InvalidInput(e.to_string()))
    }
}

impl<const D: i64> fmt::Display for QuadraticNumber<D> {
    /// Canonical string: `a`, `b*sqrtD`, `a+b*sqrtD` or `a-b*sqrtD`, with
    /// `a`, `b` printed as `p` or `p/q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.irrational.is_zero() {
            return write!(f, "{}", self.rational);
        }
        if self.rational.is_zero() {
            return write!(f, "{}*sqrt{}", self.irrational, D);
        }
        if self.irrational.is_negative() {
            write!(f, "{}-{}*sqrt{}", self.rational, -self.irrational.clone(), D)
        } else {
            write!(f, "{}+{}*sqrt{}", self.rational, self.irrational, D)
        }
    }
}

impl<const D: i64> fmt::Debug for QuadraticNumber<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?} as an element of Q(sqrt{radicand})")]
pub struct ParseQuadraticError {
    input: String,
    radicand: i64,
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

impl<const D: i64> FromStr for QuadraticNumber<D> {
    type Err = ParseQuadraticError;

    /// Accepts the `Display` forms plus `+-` and a bare `sqrtD`.
    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let err = || ParseQuadraticError { input: input.to_string(), radicand: D };
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let marker = format!("sqrt{D}");
        let Some(body) = s.strip_suffix(&marker) else {
            return parse_rational(&s).map(Self::from_rational).ok_or_else(err);
        };
        // `body` is now `[a(+|-)][b*]` with the radical removed.
        let body = body.strip_suffix('*').unwrap_or(body);
        // Find the split between the rational part and the coefficient: the
        // last '+' or '-' that is not a leading sign and not part of `+-`.
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'+' && bytes[i - 1] != b'-' {
                split = Some(i);
                break;
            }
        }
        let (a, b) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let b = b.strip_prefix('+').unwrap_or(b);
        let b = match b {
            "" => "1".to_string(),
            "-" => "-1".to_string(),
            other => other.replace("--", ""),
        };
        let a = parse_rational(a).ok_or_else(err)?;
        let b = parse_rational(&b).ok_or_else(err)?;
        Ok(Self::new(a, b))
    }
}
