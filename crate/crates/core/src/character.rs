//! Trace coordinates and the surface component of the character variety.

use std::cmp::Ordering;
use std::io::{self, Write};

use num_rational::BigRational;
use serde::Serialize;

use crate::atlas::{AtlasError, Representation};
use crate::group::Word;
use crate::linalg::{Backend, LinalgError, Matrix, Scalar, Q3};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CharacterError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("representation has no fixed vector, so it does not reduce to SL(3); use traces of words directly")]
    UnsupportedReduction,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Atlas(#[from] AtlasError),
}

/// How the SL(3) traces were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceSource {
    /// The images are `M ⊕ 1`; traces of the 3x3 block.
    Sl3Block,
    /// A common fixed vector exists; 4x4 trace minus one.
    Sl4MinusOne,
}

/// `x=χ(a), y=χ(b), z=χ(ab), u=χ(a⁻¹), v=χ(b⁻¹), w=χ((ab)⁻¹),
/// r=χ(ab⁻¹), s=χ(a⁻¹b), τ=χ(aba⁻¹b⁻¹)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceCoordinates<S> {
    pub x: S,
    pub y: S,
    pub z: S,
    pub u: S,
    pub v: S,
    pub w: S,
    pub r: S,
    pub s: S,
    pub tau: S,
    pub source: TraceSource,
}

impl<S: Scalar> TraceCoordinates<S> {
    pub fn auxiliary(&self) -> [&S; 6] {
        [&self.x, &self.y, &self.z, &self.u, &self.v, &self.w]
    }

    pub fn rst(&self) -> (S, S, S) {
        (self.r.clone(), self.s.clone(), self.tau.clone())
    }
}

/// Words whose traces give the nine coordinates, in field order.
pub fn coordinate_words() -> [Word; 9] {
    ["a", "b", "ab", "A", "B", "BA", "aB", "Ab", "abAB"].map(|s| s.parse().expect("literal word"))
}

fn is_block_sl3<S: Scalar>(m: &Matrix<S>, tol: Option<f64>) -> Result<bool, LinalgError> {
    for k in 0..3 {
        if !m.get(3, k).negligible(1.0, tol)? || !m.get(k, 3).negligible(1.0, tol)? {
            return Ok(false);
        }
    }
    (m.get(3, 3).clone() - S::one()).negligible(1.0, tol)
}

/// Dimension of the space of vectors fixed by both generator images.
pub fn fixed_vector_dimension<S: Scalar>(rho: &Representation<S>, tol: Option<f64>) -> Result<usize, LinalgError> {
    let id = Matrix::identity(4);
    let stacked = Matrix::vstack(&[&(rho.image_a() - &id), &(rho.image_b() - &id)])?;
    Ok(stacked.kernel_basis(tol)?.dim())
}

/// SL(3) trace coordinates of a representation that fixes a vector.
pub fn trace_coordinates<S: Scalar>(rho: &Representation<S>, tol: Option<f64>) -> Result<TraceCoordinates<S>, CharacterError> {
    let source = if is_block_sl3(rho.image_a(), tol)? && is_block_sl3(rho.image_b(), tol)? {
        TraceSource::Sl3Block
    } else if fixed_vector_dimension(rho, tol)? >= 1 {
        TraceSource::Sl4MinusOne
    } else {
        return Err(CharacterError::UnsupportedReduction);
    };
    let t: Vec<S> = coordinate_words()
        .iter()
        .map(|w| Ok(rho.evaluate_word(w).trace()? - S::one()))
        .collect::<Result<_, LinalgError>>()?;
    let mut it = t.into_iter();
    let mut next = || it.next().expect("nine coordinates");
    Ok(TraceCoordinates {
        x: next(),
        y: next(),
        z: next(),
        u: next(),
        v: next(),
        w: next(),
        r: next(),
        s: next(),
        tau: next(),
        source,
    })
}

/// `p(r,s,τ) = τ² − (rs−3)τ + r³ + s³ − 6rs + 9`.
pub fn surface_polynomial<S: Scalar>(r: &S, s: &S, tau: &S) -> S {
    let rs = r.clone() * s.clone();
    tau.clone() * tau.clone() - (rs.clone() - S::from_i64(3)) * tau.clone() + r.clone() * r.clone() * r.clone()
        + s.clone() * s.clone() * s.clone()
        - S::from_i64(6) * rs
        + S::from_i64(9)
}

/// `∇p = (3r² − sτ − 6s, 3s² − rτ − 6r, 2τ − rs + 3)`.
pub fn surface_gradient<S: Scalar>(r: &S, s: &S, tau: &S) -> [S; 3] {
    let three = S::from_i64(3);
    let six = S::from_i64(6);
    [
        three.clone() * r.clone() * r.clone() - s.clone() * tau.clone() - six.clone() * s.clone(),
        three.clone() * s.clone() * s.clone() - r.clone() * tau.clone() - six * r.clone(),
        S::from_i64(2) * tau.clone() - r.clone() * s.clone() + three,
    ]
}

/// Sum and product of the two roots of `p` as a quadratic in `τ`.
pub fn tau_root_sum_product<S: Scalar>(r: &S, s: &S) -> (S, S) {
    let rs = r.clone() * s.clone();
    (
        rs.clone() - S::from_i64(3),
        r.clone() * r.clone() * r.clone() + s.clone() * s.clone() * s.clone() - S::from_i64(6) * rs + S::from_i64(9),
    )
}

fn check_product<S: Scalar>(x: &[S; 3], tol: Option<f64>) -> Result<(), CharacterError> {
    let p = x[0].clone() * x[1].clone() * x[2].clone();
    if !(p.clone() - S::one()).negligible(1.0, tol)? {
        return Err(CharacterError::Domain(format!("x₁x₂x₃ must equal 1, got {p}")));
    }
    Ok(())
}

fn ratio<S: Scalar>(a: &S, b: &S) -> Result<S, CharacterError> {
    a.div(b).ok_or_else(|| CharacterError::Domain("coordinates must be non-zero".into()))
}

/// Closed form of `(r, s, τ)` on the diagonal family.
pub fn diagonal_to_traces<S: Scalar>(x: &[S; 3], tol: Option<f64>) -> Result<(S, S, S), CharacterError> {
    check_product(x, tol)?;
    let [x1, x2, x3] = x;
    let r = x1.clone() * x2.clone() + x2.clone() * x3.clone() + x3.clone() * x1.clone();
    let s = x1.clone() + x2.clone() + x3.clone();
    let tau = ratio(x2, x1)? + ratio(x3, x2)? + ratio(x1, x3)?;
    Ok((r, s, tau))
}

/// The other root `x₁/x₂ + x₂/x₃ + x₃/x₁`, obtained from odd permutations.
pub fn conjugate_tau<S: Scalar>(x: &[S; 3]) -> Result<S, CharacterError> {
    let [x1, x2, x3] = x;
    Ok(ratio(x1, x2)? + ratio(x2, x3)? + ratio(x3, x1)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Component {
    S1,
    S2,
    #[serde(rename = "off-surface")]
    OffSurface,
}

impl std::fmt::Display for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Component::S1 => "S1",
            Component::S2 => "S2",
            Component::OffSurface => "off-surface",
        })
    }
}

/// `S1` is the part of the surface with `r ≥ 3` and `s ≥ 3`; `S2` the rest.
pub fn classify_component<S: Scalar>(r: &S, s: &S, tau: &S, tol: Option<f64>) -> Result<Component, LinalgError> {
    let p = surface_polynomial(r, s, tau);
    let scale = r.magnitude().max(s.magnitude()).max(tau.magnitude()).powi(3);
    if !p.negligible(scale, tol)? {
        return Ok(Component::OffSurface);
    }
    let at_least_three = |v: &S| -> Result<bool, LinalgError> {
        let d = v.clone() - S::from_i64(3);
        Ok(!d.total_cmp(&S::zero()).is_lt() || d.negligible(3.0, tol)?)
    };
    Ok(if at_least_three(r)? && at_least_three(s)? { Component::S1 } else { Component::S2 })
}

fn rotations<S: Scalar>(x: &[S; 3]) -> [[S; 3]; 3] {
    let [a, b, c] = x.clone();
    [[a.clone(), b.clone(), c.clone()], [c.clone(), a.clone(), b.clone()], [b, c, a]]
}

fn lex_cmp<S: Scalar>(p: &[S; 3], q: &[S; 3]) -> Ordering {
    p.iter().zip(q).map(|(a, b)| a.total_cmp(b)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

/// Lexicographically least cyclic rotation.
pub fn cyclic_canonical_form<S: Scalar>(x: &[S; 3]) -> [S; 3] {
    rotations(x).into_iter().min_by(lex_cmp).expect("three rotations")
}

/// Size of the orbit of `x` under cyclic rotation: 1 or 3.
pub fn cyclic_orbit_size<S: Scalar>(x: &[S; 3]) -> usize {
    let r = rotations(x);
    if r[1] == r[0] {
        1
    } else {
        3
    }
}

/// A sampled point of the surface from the diagonal family.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfacePoint<S> {
    pub x: [S; 3],
    pub canonical: [S; 3],
    pub r: S,
    pub s: S,
    pub tau: S,
    pub residual: S,
    pub gradient: [S; 3],
    pub component: Component,
}

impl<S: Scalar> SurfacePoint<S> {
    pub fn from_triple(x: [S; 3], tol: Option<f64>) -> Result<Self, CharacterError> {
        let (r, s, tau) = diagonal_to_traces(&x, tol)?;
        let residual = surface_polynomial(&r, &s, &tau);
        let gradient = surface_gradient(&r, &s, &tau);
        let component = classify_component(&r, &s, &tau, tol)?;
        Ok(Self { canonical: cyclic_canonical_form(&x), x, r, s, tau, residual, gradient, component })
    }

    pub fn gradient_norm(&self) -> f64 {
        self.gradient.iter().map(|g| g.to_f64().powi(2)).sum::<f64>().sqrt()
    }

    pub fn is_positive(&self) -> bool {
        self.x.iter().all(Scalar::is_positive)
    }
}

/// Signs applied to the `(x₁, x₂)` grid magnitudes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SignPattern {
    PlusPlus,
    PlusMinus,
    MinusPlus,
    MinusMinus,
}

impl SignPattern {
    pub const ALL: [SignPattern; 4] = [SignPattern::PlusPlus, SignPattern::PlusMinus, SignPattern::MinusPlus, SignPattern::MinusMinus];

    fn signs(self) -> (i64, i64) {
        match self {
            SignPattern::PlusPlus => (1, 1),
            SignPattern::PlusMinus => (1, -1),
            SignPattern::MinusPlus => (-1, 1),
            SignPattern::MinusMinus => (-1, -1),
        }
    }
}

impl std::str::FromStr for SignPattern {
    type Err = CharacterError;
    fn from_str(s: &str) -> Result<Self, CharacterError> {
        match s {
            "++" => Ok(SignPattern::PlusPlus),
            "+-" => Ok(SignPattern::PlusMinus),
            "-+" => Ok(SignPattern::MinusPlus),
            "--" => Ok(SignPattern::MinusMinus),
            other => Err(CharacterError::Domain(format!("sign pattern must be one of ++, +-, -+, --; got {other:?}"))),
        }
    }
}

/// `n` equally spaced exact rationals from `lo` to `hi` inclusive.
pub fn rational_grid(lo: &BigRational, hi: &BigRational, n: usize) -> Result<Vec<Q3>, CharacterError> {
    if n < 2 || lo >= hi {
        return Err(CharacterError::Domain("grid needs n ≥ 2 and lo < hi".into()));
    }
    let step = (hi - lo) / BigRational::from_integer((n as i64 - 1).into());
    Ok((0..n).map(|i| Q3::from_rational(lo + &step * BigRational::from_integer((i as i64).into()))).collect())
}

/// Samples `x₃ = 1/(x₁x₂)` over the product grid, row-major in `(x₁, x₂)`,
/// once per sign pattern. Zero magnitudes are rejected.
pub fn sample_surface<S: Scalar>(magnitudes: &[S], patterns: &[SignPattern], tol: Option<f64>) -> Result<Vec<SurfacePoint<S>>, CharacterError> {
    if magnitudes.iter().any(|m| !m.is_positive()) {
        return Err(CharacterError::Domain("grid magnitudes must be positive".into()));
    }
    let mut out = Vec::with_capacity(patterns.len() * magnitudes.len().pow(2));
    for &pattern in patterns {
        let (s1, s2) = pattern.signs();
        for m1 in magnitudes {
            for m2 in magnitudes {
                let x1 = m1.clone() * S::from_i64(s1);
                let x2 = m2.clone() * S::from_i64(s2);
                let x3 = (x1.clone() * x2.clone()).recip().expect("non-zero");
                out.push(SurfacePoint::from_triple([x1, x2, x3], tol)?);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularLocusReport {
    pub samples: usize,
    pub threshold: f64,
    /// Indices of samples with gradient norm at most `threshold`.
    pub flagged: Vec<usize>,
    /// Smallest gradient norm among samples away from `(3,3,3)`.
    pub min_norm_elsewhere: Option<f64>,
    /// Flagged samples are exactly those at `(3,3,3)`.
    pub passed: bool,
}

/// Flags sampled points with a small gradient and checks that they all sit
/// at `(3,3,3)`. This verifies the sampled points only.
pub fn singular_locus_check<S: Scalar>(samples: &[SurfacePoint<S>], threshold: f64) -> SingularLocusReport {
    let three = S::from_i64(3);
    let at_singular = |p: &SurfacePoint<S>| p.r == three && p.s == three && p.tau == three;
    let mut flagged = Vec::new();
    let mut min_norm_elsewhere: Option<f64> = None;
    let mut passed = true;
    for (i, p) in samples.iter().enumerate() {
        let norm = p.gradient_norm();
        let small = norm <= threshold;
        if small {
            flagged.push(i);
        }
        if at_singular(p) {
            passed &= small;
        } else {
            passed &= !small;
            min_norm_elsewhere = Some(min_norm_elsewhere.map_or(norm, |m| m.min(norm)));
        }
    }
    SingularLocusReport { samples: samples.len(), threshold, flagged, min_norm_elsewhere, passed }
}

/// Whether the character of `rho` lies on the surface component: a common
/// fixed vector, vanishing auxiliary traces and `p(r,s,τ) = 0`.
pub fn lies_on_surface_component<S: Scalar>(rho: &Representation<S>) -> Result<bool, LinalgError> {
    lies_on_surface_component_tol(rho, None)
}

pub fn lies_on_surface_component_tol<S: Scalar>(rho: &Representation<S>, tol: Option<f64>) -> Result<bool, LinalgError> {
    let coords = match trace_coordinates(rho, tol) {
        Ok(c) => c,
        Err(CharacterError::UnsupportedReduction) => return Ok(false),
        Err(CharacterError::Linalg(e)) => return Err(e),
        Err(e) => return Err(LinalgError::InvalidInput(e.to_string())),
    };
    for t in coords.auxiliary() {
        if !t.negligible(1.0, tol)? {
            return Ok(false);
        }
    }
    surface_polynomial(&coords.r, &coords.s, &coords.tau).negligible(1.0, tol)
}

pub const CSV_HEADER: &str = "x1,x2,x3,canon_x1,canon_x2,canon_x3,r,s,tau,residual,component";

fn csv_value<S: Scalar>(v: &S) -> String {
    match S::BACKEND {
        Backend::Exact => v.to_string(),
        Backend::Float => format!("{:.16e}", v.to_f64()),
    }
}

/// Writes samples as CSV with a header row. Exact values are printed as
/// field elements, floats with 17 significant digits.
pub fn write_surface_csv<S: Scalar, W: Write>(points: &[SurfacePoint<S>], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for p in points {
        let fields: Vec<String> = p
            .x
            .iter()
            .chain(p.canonical.iter())
            .chain([&p.r, &p.s, &p.tau, &p.residual])
            .map(csv_value)
            .collect();
        writeln!(out, "{},{}", fields.join(","), p.component)?;
    }
    Ok(())
}
