//! Group cohomology of turnover groups twisted by a representation, in
//! degrees 0 and 1, via Fox calculus.

use serde::Serialize;

use crate::atlas::Representation;
use crate::group::{fox_derivative, gamma0_generators, Generator, GroupRingElement, Letter, TurnoverPresentation, Word};
use crate::linalg::{adjoint_action, exterior_square, Backend, LinalgError, Matrix, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CohomologyError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("h0 needs at least one group element")]
    NoElements,
    #[error("a turnover has three cone points, got {0} stabilizer dimensions")]
    ConePointCount(usize),
    #[error("inconsistent ranks: z1 = {z1} is smaller than b1 = {b1}")]
    Inconsistent { z1: usize, b1: usize },
}

/// The module a representation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModuleKind {
    /// Traceless 4x4 matrices under conjugation.
    Adjoint,
    /// `R⁴`.
    Standard,
    /// `Λ²R⁴`.
    ExteriorSquare,
}

impl ModuleKind {
    pub fn dim(self) -> usize {
        match self {
            ModuleKind::Adjoint => 15,
            ModuleKind::Standard => 4,
            ModuleKind::ExteriorSquare => 6,
        }
    }

    /// Matrix by which `g ∈ SL(4)` acts on the module.
    pub fn action<S: Scalar>(self, g: &Matrix<S>, tol: Option<f64>) -> Result<Matrix<S>, LinalgError> {
        match self {
            ModuleKind::Adjoint => adjoint_action(g, tol),
            ModuleKind::Standard => Ok(g.clone()),
            ModuleKind::ExteriorSquare => exterior_square(g),
        }
    }
}

impl std::str::FromStr for ModuleKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "adjoint" => Ok(ModuleKind::Adjoint),
            "standard" => Ok(ModuleKind::Standard),
            "wedge2" | "exterior-square" => Ok(ModuleKind::ExteriorSquare),
            other => Err(format!("unknown module {other:?} (expected adjoint, standard or wedge2)")),
        }
    }
}

fn word_action<S: Scalar>(rho: &Representation<S>, module: ModuleKind, w: &Word, tol: Option<f64>) -> Result<Matrix<S>, LinalgError> {
    module.action(&rho.evaluate_word(w), tol)
}

/// Image of a group-ring element in the module's endomorphisms.
pub fn group_ring_action<S: Scalar>(
    rho: &Representation<S>,
    module: ModuleKind,
    element: &GroupRingElement,
    tol: Option<f64>,
) -> Result<Matrix<S>, LinalgError> {
    let n = module.dim();
    let mut acc = Matrix::zeros(n, n);
    for (w, c) in element.terms() {
        let coeff = S::from_ratio(
            c.numer().try_into().map_err(|_| LinalgError::NumericOverflow("Fox coefficient too large".into()))?,
            c.denom().try_into().map_err(|_| LinalgError::NumericOverflow("Fox coefficient too large".into()))?,
        );
        acc = &acc + &word_action(rho, module, w, tol)?.scale(&coeff);
    }
    Ok(acc)
}

/// Dimension of the subspace fixed by every listed element.
pub fn h0_dimension<S: Scalar>(rho: &Representation<S>, module: ModuleKind, elements: &[Word], tol: Option<f64>) -> Result<usize, CohomologyError> {
    if elements.is_empty() {
        return Err(CohomologyError::NoElements);
    }
    let id = Matrix::identity(module.dim());
    let blocks = elements
        .iter()
        .map(|w| Ok(&word_action(rho, module, w, tol)? - &id))
        .collect::<Result<Vec<_>, LinalgError>>()?;
    let refs: Vec<&Matrix<S>> = blocks.iter().collect();
    Ok(Matrix::vstack(&refs)?.kernel_basis(tol)?.dim())
}

/// Stacked Fox conditions: row block `i` is `[ρ(∂Rᵢ/∂a) | ρ(∂Rᵢ/∂b)]`.
pub fn fox_matrix<S: Scalar>(rho: &Representation<S>, module: ModuleKind, tol: Option<f64>) -> Result<Matrix<S>, LinalgError> {
    let rows = rho
        .presentation()
        .relators()
        .iter()
        .map(|r| {
            let da = group_ring_action(rho, module, &fox_derivative(r, Generator::A), tol)?;
            let db = group_ring_action(rho, module, &fox_derivative(r, Generator::B), tol)?;
            Matrix::hstack(&[&da, &db])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&Matrix<S>> = rows.iter().collect();
    Matrix::vstack(&refs)
}

/// The coboundary map `v ↦ (ρ(a)v − v, ρ(b)v − v)`.
pub fn coboundary_matrix<S: Scalar>(rho: &Representation<S>, module: ModuleKind, tol: Option<f64>) -> Result<Matrix<S>, LinalgError> {
    let id = Matrix::identity(module.dim());
    let a = &module.action(rho.image_a(), tol)? - &id;
    let b = &module.action(rho.image_b(), tol)? - &id;
    Matrix::vstack(&[&a, &b])
}

pub fn z1_dimension<S: Scalar>(rho: &Representation<S>, module: ModuleKind, tol: Option<f64>) -> Result<usize, CohomologyError> {
    Ok(fox_matrix(rho, module, tol)?.kernel_basis(tol)?.dim())
}

pub fn b1_dimension<S: Scalar>(rho: &Representation<S>, module: ModuleKind, tol: Option<f64>) -> Result<usize, CohomologyError> {
    Ok(coboundary_matrix(rho, module, tol)?.rank(tol)?)
}

pub fn h1_dimension<S: Scalar>(rho: &Representation<S>, module: ModuleKind, tol: Option<f64>) -> Result<usize, CohomologyError> {
    let z1 = z1_dimension(rho, module, tol)?;
    let b1 = b1_dimension(rho, module, tol)?;
    z1.checked_sub(b1).ok_or(CohomologyError::Inconsistent { z1, b1 })
}

/// `−dim + Σ h0(cone point)`.
pub fn twisted_euler_characteristic(module_dim: usize, cone_point_h0: &[usize]) -> Result<i64, CohomologyError> {
    if cone_point_h0.len() != 3 {
        return Err(CohomologyError::ConePointCount(cone_point_h0.len()));
    }
    Ok(cone_point_h0.iter().map(|&h| h as i64).sum::<i64>() - module_dim as i64)
}

/// `h0` of the stabilizers `⟨a⟩`, `⟨b⟩`, `⟨ab⟩`.
pub fn cone_point_h0<S: Scalar>(rho: &Representation<S>, module: ModuleKind, tol: Option<f64>) -> Result<[usize; 3], CohomologyError> {
    let [a, b, ab] = TurnoverPresentation::cone_point_generators();
    Ok([
        h0_dimension(rho, module, &[a], tol)?,
        h0_dimension(rho, module, &[b], tol)?,
        h0_dimension(rho, module, &[ab], tol)?,
    ])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CohomologyReport {
    pub orders: [u32; 3],
    pub module: ModuleKind,
    pub module_dim: usize,
    pub backend: Backend,
    pub h0: usize,
    pub z1: usize,
    pub b1: usize,
    pub h1: usize,
    pub euler_characteristic: i64,
    pub cone_point_h0: [usize; 3],
    /// `h0 − h1 + h2` with `h2 = h0` equals the Euler characteristic.
    pub duality_consistent: bool,
}

pub fn cohomology_report<S: Scalar>(rho: &Representation<S>, module: ModuleKind, tol: Option<f64>) -> Result<CohomologyReport, CohomologyError> {
    let gens = [Word::generator(Generator::A), Word::generator(Generator::B)];
    let h0 = h0_dimension(rho, module, &gens, tol)?;
    let z1 = z1_dimension(rho, module, tol)?;
    let b1 = b1_dimension(rho, module, tol)?;
    let h1 = z1.checked_sub(b1).ok_or(CohomologyError::Inconsistent { z1, b1 })?;
    let cones = cone_point_h0(rho, module, tol)?;
    let chi = twisted_euler_characteristic(module.dim(), &cones)?;
    Ok(CohomologyReport {
        orders: rho.presentation().orders(),
        module,
        module_dim: module.dim(),
        backend: S::BACKEND,
        h0,
        z1,
        b1,
        h1,
        euler_characteristic: chi,
        cone_point_h0: cones,
        duality_consistent: 2 * h0 as i64 - h1 as i64 == chi,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrongRegularity {
    pub h0_lattice: usize,
    pub lattice_commutes: bool,
    pub strongly_regular: bool,
}

/// `h0` over `⟨a²b, ba²⟩` equals 3 and the two generator images commute.
pub fn is_strongly_regular<S: Scalar>(rho: &Representation<S>, tol: Option<f64>) -> Result<StrongRegularity, CohomologyError> {
    let (g1, g2) = gamma0_generators();
    let h0 = h0_dimension(rho, ModuleKind::Adjoint, &[g1.clone(), g2.clone()], tol)?;
    let (m1, m2) = (rho.evaluate_word(&g1), rho.evaluate_word(&g2));
    let commutes = (&m1 * &m2).approx_eq(&(&m2 * &m1), tol)?;
    Ok(StrongRegularity { h0_lattice: h0, lattice_commutes: commutes, strongly_regular: h0 == 3 && commutes })
}

/// Whether `(z(a), z(b))` satisfies the Fox conditions of every relator.
pub fn is_cocycle<S: Scalar>(rho: &Representation<S>, module: ModuleKind, z_a: &[S], z_b: &[S], tol: Option<f64>) -> Result<bool, LinalgError> {
    let v: Vec<S> = z_a.iter().chain(z_b).cloned().collect();
    let image = fox_matrix(rho, module, tol)?.apply(&v);
    let scale = v.iter().map(Scalar::magnitude).fold(0.0, f64::max);
    for x in &image {
        if !x.negligible(scale, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `(z(a), z(b))` is `(ρ(a)v − v, ρ(b)v − v)` for some `v`.
pub fn is_coboundary<S: Scalar>(rho: &Representation<S>, module: ModuleKind, z_a: &[S], z_b: &[S], tol: Option<f64>) -> Result<bool, LinalgError> {
    let b = coboundary_matrix(rho, module, tol)?;
    let z: Vec<S> = z_a.iter().chain(z_b).cloned().collect();
    let augmented = Matrix::hstack(&[&b, &Matrix::column_vector(&z)])?;
    Ok(augmented.rank(tol)? == b.rank(tol)?)
}

/// Extends a cocycle from the generators to any word by
/// `z(uv) = z(u) + ρ(u)·z(v)` and `z(g⁻¹) = −ρ(g⁻¹)·z(g)`.
pub fn extend_cocycle<S: Scalar>(
    rho: &Representation<S>,
    module: ModuleKind,
    z_a: &[S],
    z_b: &[S],
    w: &Word,
    tol: Option<f64>,
) -> Result<Vec<S>, LinalgError> {
    let mut value = vec![S::zero(); module.dim()];
    let mut prefix = Matrix::identity(module.dim());
    for &l in w.letters() {
        let g = module.action(rho.letter_image(l), tol)?;
        let base = if l.generator() == Generator::A { z_a } else { z_b };
        let z_l: Vec<S> = match l {
            Letter::A | Letter::B => base.to_vec(),
            Letter::AInv | Letter::BInv => g.apply(base).into_iter().map(|x| -x).collect(),
        };
        let contribution = prefix.apply(&z_l);
        value = value.into_iter().zip(contribution).map(|(x, y)| x + y).collect();
        prefix = &prefix * &g;
    }
    Ok(value)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoboundaryGrid {
    /// Nonzero `(λ₁, λ₂)` tried.
    pub combinations: usize,
    /// Combinations whose `λ₁d₁ + λ₂d₂` is a cocycle.
    pub cocycles: usize,
    /// Combinations found to be coboundaries.
    pub coboundaries: Vec<(i64, i64)>,
    pub passed: bool,
}

/// Tests every nonzero `λ₁d₁ + λ₂d₂` with `λᵢ ∈ {-2, …, 2}` for being a
/// cocycle that is not a coboundary.
pub fn coboundary_grid<S: Scalar>(
    rho: &Representation<S>,
    d1: (&[S], &[S]),
    d2: (&[S], &[S]),
    tol: Option<f64>,
) -> Result<CoboundaryGrid, LinalgError> {
    let combine = |x: &[S], y: &[S], l1: i64, l2: i64| -> Vec<S> {
        x.iter().zip(y).map(|(p, q)| p.clone() * S::from_i64(l1) + q.clone() * S::from_i64(l2)).collect()
    };
    let mut report = CoboundaryGrid { combinations: 0, cocycles: 0, coboundaries: Vec::new(), passed: false };
    for l1 in -2..=2 {
        for l2 in -2..=2 {
            if l1 == 0 && l2 == 0 {
                continue;
            }
            report.combinations += 1;
            let za = combine(d1.0, d2.0, l1, l2);
            let zb = combine(d1.1, d2.1, l1, l2);
            if is_cocycle(rho, ModuleKind::Adjoint, &za, &zb, tol)? {
                report.cocycles += 1;
            }
            if is_coboundary(rho, ModuleKind::Adjoint, &za, &zb, tol)? {
                report.coboundaries.push((l1, l2));
            }
        }
    }
    report.passed = report.cocycles == report.combinations && report.coboundaries.is_empty();
    Ok(report)
}
