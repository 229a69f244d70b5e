//! Representations of turnover groups into SL(4,R) and the families built
//! from cusp translations and similarities.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::group::{Generator, GroupError, Letter, TurnoverPresentation, Word};
use crate::linalg::{matrix_exponential, require_tol, nilpotent_exponential, traceless_coords, Backend, LinalgError, Matrix, Scalar, Q3};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AtlasError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("malformed representation document: {0}")]
    Format(String),
    #[error("expected 19 isolated classes off the surface component, found {found} (tallies by case: {tallies:?})")]
    IsolatedCountMismatch { found: usize, tallies: [usize; 4] },
}

/// Which construction a representation came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilyTag {
    Hyperbolic,
    Slice { u: f64, v: f64 },
    Diagonal { x: [String; 3] },
    Isolated { index: usize, case: u8, blocks: String },
    Conjugated { by: String },
    Custom,
}

/// A homomorphism from a turnover group, given by the images of `a` and `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation<S: Scalar> {
    presentation: TurnoverPresentation,
    family: FamilyTag,
    image_a: Matrix<S>,
    image_b: Matrix<S>,
    inverse_a: Matrix<S>,
    inverse_b: Matrix<S>,
}

/// Residual of each relator image from the identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationReport {
    pub backend: Backend,
    pub tolerance: Option<f64>,
    pub residuals: Vec<RelatorResidual>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelatorResidual {
    pub relator: Word,
    pub deviation: f64,
}

impl RelationReport {
    pub fn max_deviation(&self) -> f64 {
        self.residuals.iter().map(|r| r.deviation).fold(0.0, f64::max)
    }
}

fn check_unimodular<S: Scalar>(m: &Matrix<S>, name: &str, tol: Option<f64>) -> Result<(), AtlasError> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(AtlasError::Domain(format!("{name} must be 4x4, got {}x{}", m.rows(), m.cols())));
    }
    let det = m.determinant()?;
    if !(det.clone() - S::one()).negligible(1.0, tol)? {
        return Err(AtlasError::Domain(format!("det {name} = {det}, expected 1")));
    }
    Ok(())
}

impl<S: Scalar> Representation<S> {
    /// Checks that both images are unimodular 4x4 matrices. Relations are
    /// not checked here; see [`Representation::verify_relations`].
    pub fn new(
        presentation: TurnoverPresentation,
        image_a: Matrix<S>,
        image_b: Matrix<S>,
        family: FamilyTag,
        tol: Option<f64>,
    ) -> Result<Self, AtlasError> {
        check_unimodular(&image_a, "image_a", tol)?;
        check_unimodular(&image_b, "image_b", tol)?;
        let inverse_a = image_a.inverse()?;
        let inverse_b = image_b.inverse()?;
        Ok(Self { presentation, family, image_a, image_b, inverse_a, inverse_b })
    }

    /// Builds a representation of the (3,3,3) group from `ρ(a)` and
    /// `ρ(a²b)`, using `b = a·(a²b)` (valid because `a³ = 1`).
    pub fn from_a_and_a2b(image_a: Matrix<S>, image_a2b: &Matrix<S>, family: FamilyTag, tol: Option<f64>) -> Result<Self, AtlasError> {
        let image_b = &image_a * image_a2b;
        Self::new(TurnoverPresentation::triangle333(), image_a, image_b, family, tol)
    }

    pub fn presentation(&self) -> TurnoverPresentation {
        self.presentation
    }

    pub fn family(&self) -> &FamilyTag {
        &self.family
    }

    pub fn with_family(mut self, family: FamilyTag) -> Self {
        self.family = family;
        self
    }

    pub fn image_a(&self) -> &Matrix<S> {
        &self.image_a
    }

    pub fn image_b(&self) -> &Matrix<S> {
        &self.image_b
    }

    pub fn image(&self, g: Generator) -> &Matrix<S> {
        match g {
            Generator::A => &self.image_a,
            Generator::B => &self.image_b,
        }
    }

    pub fn letter_image(&self, l: Letter) -> &Matrix<S> {
        match l {
            Letter::A => &self.image_a,
            Letter::AInv => &self.inverse_a,
            Letter::B => &self.image_b,
            Letter::BInv => &self.inverse_b,
        }
    }

    pub fn evaluate_word(&self, w: &Word) -> Matrix<S> {
        w.letters().iter().fold(Matrix::identity(4), |acc, &l| &acc * self.letter_image(l))
    }

    /// Sup-norm residual of each relator. The exact backend passes only
    /// when every relator maps to the identity exactly; floats need `tol`.
    pub fn verify_relations(&self, tol: Option<f64>) -> Result<RelationReport, AtlasError> {
        let mut passed = true;
        let mut residuals = Vec::new();
        for relator in self.presentation.relators() {
            let image = self.evaluate_word(&relator);
            let ok = match S::BACKEND {
                Backend::Exact => image.is_identity(),
                Backend::Float => image.deviation_from_identity() < require_tol(tol)?,
            };
            passed &= ok;
            residuals.push(RelatorResidual { relator, deviation: image.deviation_from_identity() });
        }
        Ok(RelationReport { backend: S::BACKEND, tolerance: tol, residuals, passed })
    }

    /// `g ↦ C ρ(g) C⁻¹`.
    pub fn conjugate(&self, c: &Matrix<S>, family: FamilyTag) -> Result<Self, AtlasError> {
        let inv = c.inverse()?;
        Ok(Self {
            presentation: self.presentation,
            family,
            image_a: &(c * &self.image_a) * &inv,
            image_b: &(c * &self.image_b) * &inv,
            inverse_a: &(c * &self.inverse_a) * &inv,
            inverse_b: &(c * &self.inverse_b) * &inv,
        })
    }

    pub fn to_f64(&self) -> Representation<f64> {
        Representation {
            presentation: self.presentation,
            family: self.family.clone(),
            image_a: self.image_a.to_f64(),
            image_b: self.image_b.to_f64(),
            inverse_a: self.inverse_a.to_f64(),
            inverse_b: self.inverse_b.to_f64(),
        }
    }

    pub fn to_json(&self) -> Value {
        let encode = |m: &Matrix<S>| -> Value {
            Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(Scalar::to_json).collect())).collect())
        };
        json!({
            "orders": self.presentation.orders(),
            "backend": S::BACKEND,
            "family": self.family,
            "image_a": encode(&self.image_a),
            "image_b": encode(&self.image_b),
        })
    }

    pub fn from_json(doc: &Value, tol: Option<f64>) -> Result<Self, AtlasError> {
        let backend: Backend = serde_json::from_value(doc["backend"].clone()).map_err(|e| AtlasError::Format(format!("backend: {e}")))?;
        if backend != S::BACKEND {
            return Err(LinalgError::BackendMismatch(format!("document is {backend}, requested {}", S::BACKEND)).into());
        }
        let presentation: TurnoverPresentation =
            serde_json::from_value(doc["orders"].clone()).map_err(|e| AtlasError::Format(format!("orders: {e}")))?;
        let family: FamilyTag = serde_json::from_value(doc["family"].clone()).map_err(|e| AtlasError::Format(format!("family: {e}")))?;
        let decode = |key: &str| -> Result<Matrix<S>, AtlasError> {
            let rows = doc[key].as_array().ok_or_else(|| AtlasError::Format(format!("{key} is not an array")))?;
            let rows = rows
                .iter()
                .map(|row| {
                    row.as_array()
                        .ok_or_else(|| AtlasError::Format(format!("{key} row is not an array")))?
                        .iter()
                        .map(|x| S::from_json(x).map_err(AtlasError::from))
                        .collect::<Result<Vec<S>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Matrix::from_rows(rows)?)
        };
        Self::new(presentation, decode("image_a")?, decode("image_b")?, family, tol)
    }
}

/// `M(x, y)`: the unipotent translation of the standard generalized cusp.
pub fn cusp_translation<S: Scalar>(x: &S, y: &S) -> Matrix<S> {
    let corner = (x.clone() * x.clone() + y.clone() * y.clone()) * S::from_ratio(1, 2);
    let (o, z) = (S::one(), S::zero());
    Matrix::from_rows(vec![
        vec![o.clone(), x.clone(), y.clone(), corner],
        vec![z.clone(), o.clone(), z.clone(), x.clone()],
        vec![z.clone(), z.clone(), o.clone(), y.clone()],
        vec![z.clone(), z.clone(), z, o],
    ])
    .expect("4x4 literal")
}

/// `Ω = r ⊕ R ⊕ 1/r` where `R` is the rotation with the given cosine and sine.
pub fn similarity<S: Scalar>(r: &S, cos: &S, sin: &S) -> Result<Matrix<S>, AtlasError> {
    if !r.is_positive() {
        return Err(AtlasError::Domain(format!("similarity ratio must be positive, got {r}")));
    }
    let rinv = r.recip().expect("positive");
    let rot = Matrix::from_rows(vec![vec![cos.clone(), -sin.clone()], vec![sin.clone(), cos.clone()]])?;
    Ok(Matrix::block_diag(&[&Matrix::diagonal(std::slice::from_ref(r)), &rot, &Matrix::diagonal(&[rinv])]))
}

/// Similarity with rotation angle `2πk/n`.
pub fn similarity_turn<S: Scalar>(r: &S, k: i64, n: i64) -> Result<Matrix<S>, AtlasError> {
    let (c, s) = S::cos_sin_turn(k, n).ok_or_else(|| AtlasError::Domain(format!("angle 2π·{k}/{n} is not representable in this backend")))?;
    similarity(r, &c, &s)
}

pub fn similarity_angle(r: f64, theta: f64) -> Result<Matrix<f64>, AtlasError> {
    similarity(&r, &theta.cos(), &theta.sin())
}

/// The rotation by `2π/3` as a 2x2 matrix.
pub fn rotation_third<S: Scalar>() -> Matrix<S> {
    let (c, s) = S::cos_sin_turn(1, 3).expect("both backends represent 2π/3");
    Matrix::from_rows(vec![vec![c.clone(), -s.clone()], vec![s, c]]).expect("2x2 literal")
}

/// Holonomy of the Euclidean turnover `(n₁, n₂, n₃)` inside the normalizer of
/// the standard cusp: `ρ(a) = Ω_{2π/n₁}`, `ρ(b) = Ω_{2π/n₂}·M(1,0)`.
///
/// Both images are rotations about vertices of a Euclidean triangle, and
/// `ρ(ab)` is the rotation by `-2π/n₃` about the third vertex.
pub fn hyperbolic_cusp_holonomy<S: Scalar>(n1: u32, n2: u32, n3: u32) -> Result<Representation<S>, AtlasError> {
    let presentation = TurnoverPresentation::new(n1, n2, n3)?;
    if !presentation.is_euclidean() {
        return Err(AtlasError::Domain(format!("({n1},{n2},{n3}) is not a Euclidean turnover")));
    }
    let one = S::one();
    let a = similarity_turn(&one, 1, n1 as i64)?;
    let b = &similarity_turn(&one, 1, n2 as i64)? * &cusp_translation(&one, &S::zero());
    Representation::new(presentation, a, b, FamilyTag::Hyperbolic, Some(1e-12))
}

/// Generator of the slice at `(u, v)`; its exponential is `Ψ(a²b)`.
pub fn slice_generator<S: Scalar>(u: &S, v: &S) -> Matrix<S> {
    let (z, o) = (S::zero(), S::one());
    let corner = (u.clone() * u.clone() + v.clone() * v.clone()) * S::from_i64(2);
    Matrix::from_rows(vec![
        vec![z.clone(), o.clone(), z.clone(), z.clone()],
        vec![z.clone(), u.clone(), v.clone(), o],
        vec![z.clone(), v.clone(), -u.clone(), z.clone()],
        vec![z.clone(), corner, z.clone(), z],
    ])
    .expect("4x4 literal")
}

/// `Ψ_(u,v)`: `Ψ(a) = Ω_{2π/3}` and `Ψ(a²b) = exp` of the slice generator.
pub fn slice_representation(u: f64, v: f64) -> Result<Representation<f64>, AtlasError> {
    if !u.is_finite() || !v.is_finite() {
        return Err(AtlasError::Domain(format!("slice parameters must be finite, got ({u}, {v})")));
    }
    let a2b = matrix_exponential(&slice_generator(&u, &v), 1e-18)?;
    let a = similarity_turn(&1.0, 1, 3)?;
    Representation::from_a_and_a2b(a, &a2b, FamilyTag::Slice { u, v }, Some(1e-9))
}

/// `(u, v) = t(cos 3θ, sin 3θ)`.
pub fn slice_polar(t: f64, theta: f64) -> (f64, f64) {
    (t * (3.0 * theta).cos(), t * (3.0 * theta).sin())
}

/// Values of a 1-cocycle with coefficients in the traceless matrices on
/// `a`, `b` and `a²b`, in the fixed traceless basis.
#[derive(Clone, Debug, PartialEq)]
pub struct CocycleValues<S> {
    pub a: Vec<S>,
    pub b: Vec<S>,
    pub a2b: Vec<S>,
}

/// Tangent data of the slice at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct TransversalityData {
    /// `∂Ψ(a²b)/∂u` and `∂Ψ(a²b)/∂v` at the origin.
    pub derivatives: [Matrix<Q3>; 2],
    /// The cocycles `g ↦ (∂Ψ(g)) Ψ(g)⁻¹`.
    pub cocycles: [CocycleValues<Q3>; 2],
}

/// Exact first derivatives of `Ψ(a²b)` at `(0,0)` and the corresponding
/// cocycles `d₁, d₂`.
///
/// `d/dε exp(N + εE)` at `ε = 0` is the upper-right block of
/// `exp [[N, E], [0, N]]`, and with `N` nilpotent that exponential is a
/// finite sum.
pub fn transversality_cocycles() -> Result<TransversalityData, AtlasError> {
    let zero = Q3::zero();
    let n0 = slice_generator(&zero, &zero);
    let mut e_u = Matrix::<Q3>::zeros(4, 4);
    e_u.set(1, 1, Q3::one());
    e_u.set(2, 2, -Q3::one());
    let mut e_v = Matrix::<Q3>::zeros(4, 4);
    e_v.set(1, 2, Q3::one());
    e_v.set(2, 1, Q3::one());

    let m10 = cusp_translation(&Q3::one(), &zero);
    let m10_inv = m10.inverse()?;
    let omega = similarity_turn(&Q3::one(), 1, 3)?;
    let ad_omega = crate::linalg::adjoint_action(&omega, None)?;

    let derive = |e: &Matrix<Q3>| -> Result<(Matrix<Q3>, CocycleValues<Q3>), AtlasError> {
        let big = Matrix::hstack(&[
            &Matrix::vstack(&[&n0, &Matrix::zeros(4, 4)])?,
            &Matrix::vstack(&[e, &n0])?,
        ])?;
        let derivative = nilpotent_exponential(&big)?.submatrix(0..4, 4..8);
        let a2b = traceless_coords(&(&derivative * &m10_inv))?;
        let a = vec![Q3::zero(); 15];
        let b = ad_omega.apply(&a2b);
        Ok((derivative, CocycleValues { a, b, a2b }))
    };
    let (du, d1) = derive(&e_u)?;
    let (dv, d2) = derive(&e_v)?;
    Ok(TransversalityData { derivatives: [du, dv], cocycles: [d1, d2] })
}

/// Central difference of `Ψ(a²b)` at the origin along `u` (`axis = 0`) or `v`.
pub fn slice_finite_difference(axis: usize, step: f64) -> Result<Matrix<f64>, AtlasError> {
    let point = |s: f64| if axis == 0 { (s, 0.0) } else { (0.0, s) };
    let image = |s: f64| -> Result<Matrix<f64>, AtlasError> {
        let (u, v) = point(s);
        Ok(matrix_exponential(&slice_generator(&u, &v), 1e-18)?)
    };
    let diff = &image(step)? - &image(-step)?;
    Ok(diff.scale(&(0.5 / step)))
}

/// The order-three permutation matrix `P₃` with `P₃ e₁ = e₃`.
pub fn permutation_p3<S: Scalar>() -> Matrix<S> {
    Matrix::from_ratios(&[&[(0, 1), (1, 1), (0, 1)], &[(0, 1), (0, 1), (1, 1)], &[(1, 1), (0, 1), (0, 1)]])
}

/// `M ↦ M ⊕ 1`.
pub fn include_sl3<S: Scalar>(m: &Matrix<S>, tol: Option<f64>) -> Result<Matrix<S>, AtlasError> {
    if m.rows() != 3 || m.cols() != 3 {
        return Err(AtlasError::Domain(format!("expected a 3x3 block, got {}x{}", m.rows(), m.cols())));
    }
    if !(m.determinant()? - S::one()).negligible(1.0, tol)? {
        return Err(AtlasError::Domain("SL(3) block must have determinant 1".into()));
    }
    Ok(Matrix::block_diag(&[m, &Matrix::identity(1)]))
}

/// `(A, B) ↦ A ⊕ B`.
pub fn include_sl2_pair<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>, tol: Option<f64>) -> Result<Matrix<S>, AtlasError> {
    for (name, m) in [("first", a), ("second", b)] {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(AtlasError::Domain(format!("{name} block must be 2x2")));
        }
        if !(m.determinant()? - S::one()).negligible(1.0, tol)? {
            return Err(AtlasError::Domain(format!("{name} SL(2) block must have determinant 1")));
        }
    }
    Ok(Matrix::block_diag(&[a, b]))
}

/// `ρ(a²b) = diag(x₁,x₂,x₃,1)`, `ρ(a) = P₃ ⊕ 1`.
pub fn diagonal_representation<S: Scalar>(x: [S; 3], tol: Option<f64>) -> Result<Representation<S>, AtlasError> {
    let product = x[0].clone() * x[1].clone() * x[2].clone();
    if !(product.clone() - S::one()).negligible(1.0, tol)? {
        return Err(AtlasError::Domain(format!("x₁x₂x₃ must equal 1, got {product}")));
    }
    let a = include_sl3(&permutation_p3(), tol)?;
    let a2b = Matrix::diagonal(&[x[0].clone(), x[1].clone(), x[2].clone(), S::one()]);
    let family = FamilyTag::Diagonal { x: x.clone().map(|v| v.to_string()) };
    Representation::from_a_and_a2b(a, &a2b, family, tol)
}

/// `C_x = diag(x, 1, 1, 1/x)`.
pub fn degeneration_conjugator<S: Scalar>(x: &S) -> Result<Matrix<S>, AtlasError> {
    let inv = x.recip().ok_or_else(|| AtlasError::Domain("x must be non-zero".into()))?;
    Ok(Matrix::diagonal(&[x.clone(), S::one(), S::one(), inv]))
}

/// One step of the path `x ↦ C_x ρ_hyp C_x⁻¹`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegenerationStep {
    pub x: String,
    /// Sup-norm distance of `C_x ρ_hyp(a²b) C_x⁻¹` from the identity.
    pub deviation: f64,
    /// Whether `C_x ρ_hyp(a) C_x⁻¹ = ρ_hyp(a)` holds exactly.
    pub fixes_a: bool,
}

/// Conjugates the (3,3,3) holonomy by `C_x` for each `x = 10^-k`, exactly.
pub fn degeneration_path(exponents: &[u32]) -> Result<Vec<DegenerationStep>, AtlasError> {
    let rho = hyperbolic_cusp_holonomy::<Q3>(3, 3, 3)?;
    let (a2b, _) = crate::group::gamma0_generators();
    exponents
        .iter()
        .map(|&k| {
            let x = Q3::from_rational(num_rational::BigRational::new(1.into(), num_bigint::BigInt::from(10).pow(k)));
            let c = degeneration_conjugator(&x)?;
            let conj = rho.conjugate(&c, FamilyTag::Conjugated { by: format!("C_{x}") })?;
            Ok(DegenerationStep {
                x: x.to_string(),
                deviation: conj.evaluate_word(&a2b).deviation_from_identity(),
                fixes_a: conj.image_a() == rho.image_a(),
            })
        })
        .collect()
}

/// One SL(4,R)-conjugacy class of block-diagonal representations with
/// `ρ(a²b)` and `ρ(a)` in `{I, R, R⁻¹} ⊕ {I, R, R⁻¹}`.
#[derive(Clone, Debug)]
pub struct IsolatedClass {
    pub case: u8,
    /// Block indices `(a²b₁, a²b₂, a₁, a₂)` with `0 = I`, `1 = R`, `2 = R⁻¹`.
    pub blocks: [u8; 4],
    pub representation: Representation<Q3>,
    pub orbit_size: usize,
    /// Character lies on the surface component.
    pub on_surface: bool,
}

impl IsolatedClass {
    pub fn label(&self) -> String {
        let name = |i: u8| ["I", "R", "R^-1"][i as usize];
        format!(
            "a2b = {} + {}, a = {} + {}",
            name(self.blocks[0]),
            name(self.blocks[1]),
            name(self.blocks[2]),
            name(self.blocks[3])
        )
    }
}

#[derive(Clone, Debug)]
pub struct IsolatedEnumeration {
    pub candidates: usize,
    pub satisfying_relations: usize,
    /// Every class, including those on the surface component.
    pub classes: Vec<IsolatedClass>,
    /// Number of classes off the surface, per case 1..=4.
    pub tallies: [usize; 4],
    /// Number of distinct trace vectors over words of length at most 4
    /// among the classes off the surface.
    pub distinct_trace_vectors: usize,
}

impl IsolatedEnumeration {
    pub fn off_surface(&self) -> impl Iterator<Item = &IsolatedClass> {
        self.classes.iter().filter(|c| !c.on_surface)
    }
}

fn block(i: u8) -> Matrix<Q3> {
    let r = rotation_third::<Q3>();
    match i {
        0 => Matrix::identity(2),
        1 => r,
        _ => r.inverse().expect("rotation is invertible"),
    }
}

/// Case label from the type of `ρ(a²b) = X₁ ⊕ X₂`.
fn case_of(x1: u8, x2: u8) -> u8 {
    match (x1, x2) {
        (0, 0) => 4,
        (0, _) | (_, 0) => 3,
        (p, q) if p == q => 1,
        _ => 2,
    }
}

/// Images of `(k₁,k₂,j₁,j₂)` under the conjugations by the block swap and by
/// `diag(1,-1,1,-1)`, which inverts every rotation block simultaneously.
fn block_orbit(key: [u8; 4]) -> BTreeSet<[u8; 4]> {
    let swap = |k: [u8; 4]| [k[1], k[0], k[3], k[2]];
    let flip = |k: [u8; 4]| k.map(|i| [0, 2, 1][i as usize]);
    [key, swap(key), flip(key), flip(swap(key))].into_iter().collect()
}

/// Enumerates all block pairs, keeps those satisfying the relators exactly and
/// groups them into conjugacy classes.
pub fn enumerate_isolated_classes() -> Result<IsolatedEnumeration, AtlasError> {
    let mut seen = BTreeSet::new();
    let mut classes = Vec::new();
    let mut candidates = 0;
    let mut satisfying = 0;
    for k1 in 0..3u8 {
        for k2 in 0..3u8 {
            for j1 in 0..3u8 {
                for j2 in 0..3u8 {
                    candidates += 1;
                    let key = [k1, k2, j1, j2];
                    let a2b = include_sl2_pair(&block(k1), &block(k2), None)?;
                    let a = include_sl2_pair(&block(j1), &block(j2), None)?;
                    let rep = Representation::from_a_and_a2b(a, &a2b, FamilyTag::Custom, None)?;
                    if !rep.verify_relations(None)?.passed {
                        continue;
                    }
                    satisfying += 1;
                    if seen.contains(&key) {
                        continue;
                    }
                    let orbit = block_orbit(key);
                    seen.extend(orbit.iter().copied());
                    let on_surface = crate::character::lies_on_surface_component(&rep)?;
                    classes.push(IsolatedClass { case: case_of(k1, k2), blocks: key, representation: rep, orbit_size: orbit.len(), on_surface });
                }
            }
        }
    }
    classes.sort_by_key(|c| (c.case, c.blocks));
    let mut tallies = [0usize; 4];
    let mut index = 0;
    for c in classes.iter_mut() {
        let family = FamilyTag::Isolated { index, case: c.case, blocks: c.label() };
        c.representation = c.representation.clone().with_family(family);
        if !c.on_surface {
            tallies[c.case as usize - 1] += 1;
            index += 1;
        }
    }
    let ball = Word::ball(4);
    let trace_vectors: BTreeSet<Vec<Q3>> = classes
        .iter()
        .filter(|c| !c.on_surface)
        .map(|c| ball.iter().map(|w| c.representation.evaluate_word(w).trace().expect("square")).collect())
        .collect();
    Ok(IsolatedEnumeration { candidates, satisfying_relations: satisfying, classes, tallies, distinct_trace_vectors: trace_vectors.len() })
}

/// Expected number of isolated characters off the surface component.
pub const EXPECTED_ISOLATED_POINTS: usize = 19;

/// The isolated classes off the surface component. Fails unless there are
/// exactly [`EXPECTED_ISOLATED_POINTS`] of them.
pub fn enumerate_isolated_points() -> Result<Vec<IsolatedClass>, AtlasError> {
    let e = enumerate_isolated_classes()?;
    let off: Vec<IsolatedClass> = e.off_surface().cloned().collect();
    if off.len() != EXPECTED_ISOLATED_POINTS {
        return Err(AtlasError::IsolatedCountMismatch { found: off.len(), tallies: e.tallies });
    }
    Ok(off)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Q3 {
        Q3::from_ratio(n, d)
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn cusp_translation_examples() {
        assert!(cusp_translation(&Q3::zero(), &Q3::zero()).is_identity());
        let m = cusp_translation(&Q3::one(), &Q3::zero());
        assert_eq!(m.row(0), vec![q(1, 1), q(1, 1), q(0, 1), q(1, 2)]);
        assert_eq!(*m.get(1, 3), q(1, 1));
        assert_eq!(*m.get(2, 3), q(0, 1));
        let back = cusp_translation(&q(-1, 1), &Q3::zero());
        assert!((&m * &back).is_identity());
    }

    #[test]
    fn similarity_examples() {
        assert!(similarity_turn(&Q3::one(), 0, 1).unwrap().is_identity());
        let omega = similarity_turn(&Q3::one(), 1, 3).unwrap();
        let h = Q3::from_parts(0, 1, 1, 2);
        assert_eq!(*omega.get(1, 1), q(-1, 2));
        assert_eq!(*omega.get(1, 2), -h.clone());
        assert_eq!(*omega.get(2, 1), h.clone());
        assert_eq!(*omega.get(2, 2), q(-1, 2));
        let conj = &(&omega * &cusp_translation(&Q3::one(), &Q3::zero())) * &omega.inverse().unwrap();
        assert_eq!(conj, cusp_translation(&q(-1, 2), &h));
        assert!(similarity(&q(-1, 1), &Q3::one(), &Q3::zero()).is_err());
        assert!(similarity_angle(0.0, 1.0).is_err());
    }

    #[test]
    fn hyperbolic_holonomy_of_333() {
        let rho = hyperbolic_cusp_holonomy::<Q3>(3, 3, 3).unwrap();
        assert_eq!(*rho.image_a(), similarity_turn(&Q3::one(), 1, 3).unwrap());
        let (g1, g2) = crate::group::gamma0_generators();
        assert_eq!(rho.evaluate_word(&g1), cusp_translation(&Q3::one(), &Q3::zero()));
        let h = Q3::from_parts(0, 1, 1, 2);
        assert_eq!(rho.evaluate_word(&g2), cusp_translation(&q(-1, 2), &h));
        assert!(rho.evaluate_word(&w("aaa")).is_identity());
        assert!(rho.evaluate_word(&Word::identity()).is_identity());
        let report = rho.verify_relations(None).unwrap();
        assert!(report.passed);
        assert_eq!(report.max_deviation(), 0.0);
    }

    #[test]
    fn euclidean_holonomies_satisfy_relations() {
        for [n1, n2, n3] in [[3, 3, 3], [2, 3, 6], [2, 4, 4], [6, 3, 2], [4, 2, 4]] {
            let rho = hyperbolic_cusp_holonomy::<Q3>(n1, n2, n3).unwrap();
            assert!(rho.verify_relations(None).unwrap().passed, "{n1},{n2},{n3}");
        }
        let rho = hyperbolic_cusp_holonomy::<Q3>(2, 3, 6).unwrap();
        let order = |m: &Matrix<Q3>| (1..=12).find(|&k| m.pow(k).unwrap().is_identity());
        assert_eq!(order(rho.image_a()), Some(2));
        assert_eq!(order(rho.image_b()), Some(3));
        assert_eq!(order(&rho.evaluate_word(&w("ab"))), Some(6));
        assert!(hyperbolic_cusp_holonomy::<Q3>(2, 3, 7).is_err());
    }

    #[test]
    fn slice_at_origin_is_the_cusp() {
        let psi = slice_representation(0.0, 0.0).unwrap();
        let (g1, _) = crate::group::gamma0_generators();
        let m10 = cusp_translation(&1.0, &0.0);
        assert!(psi.evaluate_word(&g1).approx_eq(&m10, Some(1e-12)).unwrap());
        let report = slice_representation(0.2, 0.1).unwrap().verify_relations(Some(1e-9)).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.max_deviation() < 1e-9);
        assert_eq!(slice_polar(0.05, 0.0), (0.05, 0.0));
    }

    #[test]
    fn custom_unipotent_image_breaks_a_cubed() {
        let m10 = cusp_translation(&Q3::one(), &Q3::zero());
        let rho = Representation::new(TurnoverPresentation::triangle333(), m10, Matrix::identity(4), FamilyTag::Custom, None).unwrap();
        let report = rho.verify_relations(None).unwrap();
        assert!(!report.passed);
        assert!(report.residuals[0].deviation > 0.0);
    }

    #[test]
    fn printed_derivatives() {
        let data = transversality_cocycles().unwrap();
        let [du, dv] = &data.derivatives;
        assert_eq!(*du.get(0, 1), q(1, 2));
        assert_eq!(*du.get(0, 3), q(1, 6));
        assert_eq!(du.row(1), vec![q(0, 1), q(1, 1), q(0, 1), q(1, 2)]);
        assert_eq!(*du.get(2, 2), q(-1, 1));
        assert_eq!(dv.row(0), vec![q(0, 1), q(0, 1), q(1, 2), q(0, 1)]);
        assert_eq!(dv.row(2), vec![q(0, 1), q(1, 1), q(0, 1), q(1, 2)]);
        assert!(dv.row(3).iter().all(Scalar::is_zero));
        for c in &data.cocycles {
            assert!(c.a.iter().all(Scalar::is_zero));
        }
        for (axis, d) in data.derivatives.iter().enumerate() {
            let fd = slice_finite_difference(axis, 1e-4).unwrap();
            assert!(fd.approx_eq(&d.to_f64(), Some(1e-6)).unwrap());
        }
    }

    #[test]
    fn diagonal_family() {
        let red = diagonal_representation([Q3::one(), Q3::one(), Q3::one()], None).unwrap();
        let (g1, _) = crate::group::gamma0_generators();
        assert!(red.evaluate_word(&g1).is_identity());
        let rho = diagonal_representation([q(2, 1), q(1, 1), q(1, 2)], None).unwrap();
        assert!(rho.verify_relations(None).unwrap().passed);
        assert!(rho.image_b().pow(3).unwrap().is_identity());
        let mixed = diagonal_representation([q(-1, 1), q(-1, 1), q(1, 1)], None).unwrap();
        assert!(mixed.verify_relations(None).unwrap().passed);
        assert!(diagonal_representation([q(2, 1), q(1, 1), q(1, 1)], None).is_err());
        assert_eq!(*rho.image_a(), include_sl3(&permutation_p3(), None).unwrap());
    }

    #[test]
    fn inclusions() {
        assert!(include_sl3(&Matrix::<Q3>::identity(3), None).unwrap().is_identity());
        let r = rotation_third::<Q3>();
        let m = include_sl2_pair(&r, &r.inverse().unwrap(), None).unwrap();
        assert_eq!(m.trace().unwrap(), q(-2, 1));
        assert!(include_sl3(&Matrix::<Q3>::diagonal(&[q(2, 1), q(1, 1), q(1, 1)]), None).is_err());
    }

    #[test]
    fn degeneration_is_monotone() {
        let steps = degeneration_path(&[1, 2, 3, 4, 5, 6]).unwrap();
        assert!(steps.iter().all(|s| s.fixes_a));
        assert!(steps.windows(2).all(|p| p[1].deviation < p[0].deviation));
        assert!(steps.last().unwrap().deviation < 1e-5);
    }

    #[test]
    fn isolated_classes_satisfy_relations() {
        let e = enumerate_isolated_classes().unwrap();
        assert_eq!(e.candidates, 81);
        assert_eq!(e.satisfying_relations, 81);
        assert_eq!(e.classes.iter().map(|c| c.orbit_size).sum::<usize>(), 81);
        let on: Vec<_> = e.classes.iter().filter(|c| c.on_surface).collect();
        assert_eq!(on.len(), 1);
        assert_eq!(on[0].blocks, [0, 0, 0, 1]);
        assert!(e.off_surface().any(|c| c.blocks == [0, 0, 0, 0] && c.case == 4));
        let (g1, _) = crate::group::gamma0_generators();
        for c in &e.classes {
            assert!(c.representation.evaluate_word(&g1).pow(3).unwrap().is_identity());
        }
    }

    #[test]
    fn json_round_trip() {
        let rho = hyperbolic_cusp_holonomy::<Q3>(2, 4, 4).unwrap();
        let doc = rho.to_json();
        assert_eq!(Representation::<Q3>::from_json(&doc, None).unwrap(), rho);
        assert!(matches!(Representation::<f64>::from_json(&doc, Some(1e-9)), Err(AtlasError::Linalg(LinalgError::BackendMismatch(_)))));
        let psi = slice_representation(0.2, 0.1).unwrap();
        let back = Representation::<f64>::from_json(&psi.to_json(), Some(1e-9)).unwrap();
        assert_eq!(back.image_a(), psi.image_a());
        assert_eq!(back.family(), psi.family());
    }

    proptest! {
        #[test]
        fn similarity_conjugation_rotates_translations(x in -20i64..20, y in -20i64..20, den in 1i64..6, k in prop_oneof![Just(1i64), Just(-1i64)]) {
            let (x, y) = (q(x, den), q(y, den));
            let omega = similarity_turn(&Q3::one(), k, 3).unwrap();
            let lhs = &(&omega * &cusp_translation(&x, &y)) * &omega.inverse().unwrap();
            let (c, s) = Q3::cos_sin_turn(k, 3).unwrap();
            let rx = c.clone() * x.clone() - s.clone() * y.clone();
            let ry = s * x + c * y;
            prop_assert_eq!(lhs, cusp_translation(&rx, &ry));
        }

        #[test]
        fn translations_commute_and_compose(x in -9i64..9, y in -9i64..9, x2 in -9i64..9, y2 in -9i64..9) {
            let m1 = cusp_translation(&q(x, 2), &q(y, 3));
            let m2 = cusp_translation(&q(x2, 2), &q(y2, 3));
            prop_assert_eq!(&m1 * &m2, &m2 * &m1);
            prop_assert_eq!(&m1 * &m2, cusp_translation(&q(x + x2, 2), &q(y + y2, 3)));
        }

        #[test]
        fn word_evaluation_is_multiplicative(u in "[aAbB]{0,6}", v in "[aAbB]{0,6}") {
            let rho = hyperbolic_cusp_holonomy::<Q3>(3, 3, 3).unwrap();
            let (u, v) = (w(&u), w(&v));
            prop_assert_eq!(rho.evaluate_word(&u.concat(&v)), &rho.evaluate_word(&u) * &rho.evaluate_word(&v));
        }

        #[test]
        fn slice_relations_hold(u in -0.5f64..0.5, v in -0.5f64..0.5) {
            let report = slice_representation(u, v).unwrap().verify_relations(Some(1e-9)).unwrap();
            prop_assert!(report.passed);
        }
    }
}
