//! What the peripheral subgroup `⟨a²b, ba²⟩` looks like under a
//! representation: a cusp, a diagonalizable end, or neither.

use serde::Serialize;

use crate::atlas::{similarity_turn, slice_polar, slice_representation, AtlasError, Representation};
use crate::group::{gamma0_generators, Generator};
use crate::linalg::{eigen_decomposition, norm2, EigenDecomposition, EigenPair, LinalgError, Matrix, Scalar, DEFAULT_EIGEN_TOL};

/// Above this, `(A − I)³` is treated as genuinely nonzero rather than
/// rounding noise.
const UNIPOTENT_NOISE: f64 = 1e-12;
/// Eigenvector bases worse conditioned than this are not trusted.
const CONDITION_LIMIT: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndKind {
    HyperbolicCusp,
    DiagonalizablePositive,
    Other,
}

impl std::fmt::Display for EndKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EndKind::HyperbolicCusp => "hyperbolic-cusp",
            EndKind::DiagonalizablePositive => "diagonalizable-positive",
            EndKind::Other => "other",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndEvidence {
    /// `(re, im)` eigenvalues of `ρ(a²b)`, by descending real part.
    pub spectrum: Vec<(f64, f64)>,
    /// Least `k ≤ 4` with `(A − I)^k` negligible.
    pub unipotency_degree: Option<u32>,
    /// Sup norm of `(A − I)³`.
    pub cube_residual: f64,
    pub peripheral_commutes: bool,
    pub eigenframe: Option<Vec<EigenPair>>,
    pub eigenvalue_product: Option<f64>,
    pub condition_number: Option<f64>,
    pub near_degenerate: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CuspVerdict {
    pub kind: EndKind,
    pub evidence: EndEvidence,
}

fn powers_of_shift(a: &Matrix<f64>) -> (Option<u32>, f64) {
    let n = a.rows();
    let shift = a - &Matrix::identity(n);
    let scale = a.sup_norm().max(1.0);
    let mut power = shift.clone();
    let mut degree = None;
    let mut cube = 0.0;
    for k in 1..=4u32 {
        if k == 3 {
            cube = power.sup_norm();
        }
        if degree.is_none() && power.sup_norm() <= UNIPOTENT_NOISE * scale.powi(k as i32) {
            degree = Some(k);
        }
        power = &power * &shift;
    }
    (degree, cube)
}

fn condition_number(vectors: &[Vec<f64>]) -> f64 {
    let n = vectors.len();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| vectors[j][i]);
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Classifies the end of `ρ` from `A = ρ(a²b)`.
///
/// `tol` governs eigenvalue reality, clustering and the distance of the
/// spectrum from 1. A matrix that is unipotent to within `tol` but not to
/// within rounding noise, or whose eigenvectors are nearly parallel, is
/// reported as `other` with the near-degenerate flag set.
pub fn classify_end<S: Scalar>(rho: &Representation<S>, tol: f64) -> Result<CuspVerdict, LinalgError> {
    let rho = rho.to_f64();
    let (g1, g2) = gamma0_generators();
    let a = rho.evaluate_word(&g1);
    let b = rho.evaluate_word(&g2);
    let commutes = (&a * &b).approx_eq(&(&b * &a), Some(tol))?;
    let decomposition = eigen_decomposition(&a, tol)?;
    let spectrum = match &decomposition {
        EigenDecomposition::Diagonalizable { pairs } => pairs.iter().map(|p| (p.value, 0.0)).collect(),
        EigenDecomposition::NotRealDiagonalizable { spectrum, .. } => spectrum.clone(),
    };
    let (degree, cube) = powers_of_shift(&a);
    let mut evidence = EndEvidence {
        spectrum,
        unipotency_degree: degree,
        cube_residual: cube,
        peripheral_commutes: commutes,
        eigenframe: None,
        eigenvalue_product: None,
        condition_number: None,
        near_degenerate: false,
        note: None,
    };
    let spectrum_at_one = evidence.spectrum.iter().all(|&(re, im)| (re - 1.0).abs() <= tol && im.abs() <= tol);
    let scale = a.sup_norm().max(1.0);

    if spectrum_at_one && cube <= tol * scale.powi(3) {
        let b_unipotent = matches!(powers_of_shift(&b).0, Some(k) if k <= 3);
        let genuine = matches!(degree, Some(2 | 3)) && b_unipotent && commutes;
        if genuine {
            return Ok(CuspVerdict { kind: EndKind::HyperbolicCusp, evidence });
        }
        if degree == Some(1) {
            evidence.note = Some("ρ(a²b) is the identity".into());
        } else {
            evidence.near_degenerate = true;
            evidence.note = Some("unipotent only up to tolerance".into());
        }
        return Ok(CuspVerdict { kind: EndKind::Other, evidence });
    }

    let EigenDecomposition::Diagonalizable { pairs } = decomposition else {
        evidence.note = Some("spectrum is not real or ρ(a²b) is not diagonalizable".into());
        return Ok(CuspVerdict { kind: EndKind::Other, evidence });
    };
    let vectors: Vec<Vec<f64>> = pairs.iter().map(|p| p.vector.clone()).collect();
    let cond = condition_number(&vectors);
    let product: f64 = pairs.iter().map(|p| p.value).product();
    evidence.condition_number = Some(cond);
    evidence.eigenvalue_product = Some(product);
    evidence.eigenframe = Some(pairs.clone());
    if cond > CONDITION_LIMIT {
        evidence.near_degenerate = true;
        evidence.note = Some(format!("eigenvector basis condition number {cond:.3e}"));
        return Ok(CuspVerdict { kind: EndKind::Other, evidence });
    }
    let positive = pairs.iter().all(|p| p.value > 0.0);
    let has_one = pairs.iter().any(|p| (p.value - 1.0).abs() <= tol);
    let kind = if positive && has_one && (product - 1.0).abs() <= tol {
        EndKind::DiagonalizablePositive
    } else {
        evidence.note = Some("spectrum is not positive with a unit eigenvalue".into());
        EndKind::Other
    };
    Ok(CuspVerdict { kind, evidence })
}

/// Vertices of the triangle preserved by the slice holonomy, as printed:
/// `p_∞ = e₁`, `p₁ = Ω_θ(1, 2t, 0, 2t²)`, `p₂ = Ω p₁`, `p₃ = Ω p₂` with
/// `Ω` the rotation by a third of a turn.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenFrame {
    pub t: f64,
    pub theta: f64,
    pub p_inf: [f64; 4],
    pub p1: [f64; 4],
    pub p2: [f64; 4],
    pub p3: [f64; 4],
}

impl EigenFrame {
    pub fn vectors(&self) -> [[f64; 4]; 4] {
        [self.p_inf, self.p1, self.p2, self.p3]
    }

    pub fn determinant(&self) -> f64 {
        let m = Matrix::from_fn(4, 4, |i, j| self.vectors()[j][i]);
        m.determinant().unwrap_or(f64::NAN)
    }
}

fn to_array(v: Vec<f64>) -> [f64; 4] {
    [v[0], v[1], v[2], v[3]]
}

pub fn eigenframe(t: f64, theta: f64) -> Result<EigenFrame, AtlasError> {
    if t.is_nan() || t <= 0.0 || !t.is_finite() || !theta.is_finite() {
        return Err(AtlasError::Domain(format!("eigenframe needs finite t > 0 and θ, got ({t}, {theta})")));
    }
    let rotate = Matrix::block_diag(&[
        &Matrix::identity(1),
        &Matrix::from_rows(vec![vec![theta.cos(), -theta.sin()], vec![theta.sin(), theta.cos()]])?,
        &Matrix::identity(1),
    ]);
    let omega = similarity_turn(&1.0, 1, 3)?;
    let p1 = rotate.apply(&[1.0, 2.0 * t, 0.0, 2.0 * t * t]);
    let p2 = omega.apply(&p1);
    let p3 = omega.apply(&p2);
    Ok(EigenFrame { t, theta, p_inf: [1.0, 0.0, 0.0, 0.0], p1: to_array(p1), p2: to_array(p2), p3: to_array(p3) })
}

/// Sine of the angle between `v` and the line through `p`.
pub fn line_deviation(v: &[f64], p: &[f64]) -> f64 {
    let (nv, np) = (norm2(v), norm2(p));
    if nv == 0.0 || np == 0.0 {
        return if nv == np { 0.0 } else { 1.0 };
    }
    let dot: f64 = v.iter().zip(p).map(|(x, y)| x * y).sum();
    let residual: Vec<f64> = v.iter().zip(p).map(|(x, y)| x - dot / (np * np) * y).collect();
    norm2(&residual) / nv
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameCheck {
    pub t: f64,
    pub theta: f64,
    pub u: f64,
    pub v: f64,
    pub frame: EigenFrame,
    /// Deviation of `Ψ(a²b)p` from the line of `p`, for `p_∞, p₁, p₂, p₃`.
    pub deviations: [f64; 4],
    /// Deviation of `Ψ(a)p₁` from the line of `p₂`.
    pub permutation_deviation: f64,
    pub computed: EigenDecomposition,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compares the printed frame with the slice holonomy at
/// `(u, v) = t(cos 3θ, sin 3θ)`. Failures are reported, not raised.
pub fn check_frame_against_slice(t: f64, theta: f64, tol: f64) -> Result<FrameCheck, AtlasError> {
    let frame = eigenframe(t, theta)?;
    let (u, v) = slice_polar(t, theta);
    let psi = slice_representation(u, v)?;
    let (g1, _) = gamma0_generators();
    let a2b = psi.evaluate_word(&g1);
    let deviations = frame.vectors().map(|p| line_deviation(&a2b.apply(&p), &p));
    let permutation_deviation = line_deviation(&psi.image_a().apply(&frame.p1), &frame.p2);
    let computed = eigen_decomposition(&a2b, DEFAULT_EIGEN_TOL)?;
    let passed = deviations.iter().all(|&d| d < tol) && permutation_deviation < tol;
    Ok(FrameCheck { t, theta, u, v, frame, deviations, permutation_deviation, computed, tolerance: tol, passed })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameConsistency {
    pub u: f64,
    pub v: f64,
    /// Unit joint eigenvectors of `Ψ(a²b)` and `Ψ(ba²)`.
    pub joint_eigenvectors: Vec<Vec<f64>>,
    /// Largest deviation of either peripheral generator from preserving a
    /// joint eigenline.
    pub joint_residual: f64,
    /// Image of each eigenline under `Ψ(a)`.
    pub permutation: Vec<usize>,
    pub permutation_residual: f64,
    /// Index of the line through `e₁`, if any.
    pub e1_line: Option<usize>,
    pub e1_residual: f64,
    pub passed: bool,
}

/// Checks the triangle structure without reference to any printed frame:
/// the peripheral images share an eigenbasis, `Ψ(a)` permutes its lines
/// fixing the one through `e₁` and cycling the other three.
pub fn frame_consistency(u: f64, v: f64, tol: f64) -> Result<FrameConsistency, AtlasError> {
    let psi = slice_representation(u, v)?;
    let (g1, g2) = gamma0_generators();
    let (m1, m2) = (psi.evaluate_word(&g1), psi.evaluate_word(&g2));
    let generic = &m1 + &m2.scale(&0.618_033_988_749_895);
    let fail = || -> Result<FrameConsistency, AtlasError> {
        Ok(FrameConsistency {
            u,
            v,
            joint_eigenvectors: Vec::new(),
            joint_residual: f64::INFINITY,
            permutation: Vec::new(),
            permutation_residual: f64::INFINITY,
            e1_line: None,
            e1_residual: f64::INFINITY,
            passed: false,
        })
    };
    let EigenDecomposition::Diagonalizable { pairs } = eigen_decomposition(&generic, DEFAULT_EIGEN_TOL)? else {
        return fail();
    };
    if pairs.len() != 4 {
        return fail();
    }
    let lines: Vec<Vec<f64>> = pairs.into_iter().map(|p| p.vector).collect();
    let joint_residual = lines
        .iter()
        .map(|p| line_deviation(&m1.apply(p), p).max(line_deviation(&m2.apply(p), p)))
        .fold(0.0, f64::max);
    let image_a = psi.image(Generator::A);
    let mut permutation = Vec::new();
    let mut permutation_residual: f64 = 0.0;
    for p in &lines {
        let image = image_a.apply(p);
        let (best, dev) = lines
            .iter()
            .enumerate()
            .map(|(j, q)| (j, line_deviation(&image, q)))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("four lines");
        permutation.push(best);
        permutation_residual = permutation_residual.max(dev);
    }
    let e1 = [1.0, 0.0, 0.0, 0.0];
    let (e1_line, e1_residual) = lines
        .iter()
        .enumerate()
        .map(|(j, q)| (j, line_deviation(q, &e1)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(j, d)| (Some(j), d))
        .expect("four lines");
    let is_cycle = match e1_line {
        Some(i) => {
            let mut seen = [false; 4];
            permutation.iter().for_each(|&j| seen[j] = true);
            let bijective = seen.iter().all(|&s| s);
            let others_move = (0..4).filter(|&j| j != i).all(|j| permutation[j] != j);
            bijective && permutation[i] == i && others_move
        }
        None => false,
    };
    let passed = is_cycle && joint_residual < tol && permutation_residual < tol && e1_residual < tol;
    Ok(FrameConsistency { u, v, joint_eigenvectors: lines, joint_residual, permutation, permutation_residual, e1_line, e1_residual, passed })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Faithfulness {
    NotFaithful { witness: String },
    NoObstructionFound,
}

impl Faithfulness {
    pub fn is_faithful_candidate(&self) -> bool {
        matches!(self, Faithfulness::NoObstructionFound)
    }
}

/// `a²b` has infinite order and `a` is nontrivial, so a representation
/// killing `(a²b)^k` for `k ≤ 3`, or `a`, is not faithful.
pub fn faithfulness_obstruction<S: Scalar>(rho: &Representation<S>, tol: Option<f64>) -> Result<Faithfulness, LinalgError> {
    let id = Matrix::identity(4);
    if rho.image_a().approx_eq(&id, tol)? {
        return Ok(Faithfulness::NotFaithful { witness: "a ↦ 1".into() });
    }
    let (g1, _) = gamma0_generators();
    let m = rho.evaluate_word(&g1);
    let mut power = m.clone();
    for k in 1..=3u32 {
        if power.approx_eq(&id, tol)? {
            let word = if k == 1 { g1.to_string() } else { format!("({g1})^{k}") };
            return Ok(Faithfulness::NotFaithful { witness: format!("{word} ↦ 1") });
        }
        power = &power * &m;
    }
    Ok(Faithfulness::NoObstructionFound)
}
