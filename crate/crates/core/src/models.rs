//! The three contact model hypersurfaces: tubes around the totally geodesic
//! quadric of one dimension less and around the real hyperbolic space, and
//! the horosphere. Normals point inward, so every tabulated curvature is
//! non-negative and the contact constant `k` is positive.

use std::f64::consts::SQRT_2;
use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypersurface::HypersurfaceFrame;
use crate::quadric::{check_unit, curvature, orthonormal_complement, Conjugation, TangentVector};
use crate::report::ser_sig15;

/// Width of the band around `k = sqrt(2)` classified as a horosphere.
pub const HOROSPHERE_K_TOL: f64 = 1e-9;

/// Relative size below which a Jacobi factor counts as vanishing.
pub const FOCAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FocalModel {
    ComplexQuadricHypersurface,
    RealHyperbolicForm,
    Horosphere,
}

impl FocalModel {
    pub const ALL: [FocalModel; 3] = [
        FocalModel::ComplexQuadricHypersurface,
        FocalModel::RealHyperbolicForm,
        FocalModel::Horosphere,
    ];

    pub fn is_tube(&self) -> bool {
        !matches!(self, FocalModel::Horosphere)
    }

    pub fn slug(&self) -> &'static str {
        match self {
            FocalModel::ComplexQuadricHypersurface => "quadric-tube",
            FocalModel::RealHyperbolicForm => "realform-tube",
            FocalModel::Horosphere => "horosphere",
        }
    }
}

impl fmt::Display for FocalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EigenLabel {
    ReebLine,
    JVMinusN,
    VMinusN,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableEntry {
    #[serde(serialize_with = "ser_sig15")]
    pub value: f64,
    pub multiplicity: usize,
    pub label: EigenLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrincipalCurvatureTable {
    pub entries: Vec<TableEntry>,
}

impl PrincipalCurvatureTable {
    pub fn value(&self, label: EigenLabel) -> f64 {
        self.entries
            .iter()
            .find(|e| e.label == label)
            .map(|e| e.value)
            .expect("every table has all three labels")
    }

    pub fn alpha(&self) -> f64 {
        self.value(EigenLabel::ReebLine)
    }

    pub fn lambda(&self) -> f64 {
        self.value(EigenLabel::JVMinusN)
    }

    pub fn mu(&self) -> f64 {
        self.value(EigenLabel::VMinusN)
    }

    pub fn dimension(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// Largest absolute difference of values with the same label.
    pub fn max_difference(&self, other: &PrincipalCurvatureTable) -> f64 {
        self.entries
            .iter()
            .map(|e| (e.value - other.value(e.label)).abs())
            .fold(0.0, f64::max)
    }
}

fn check_m(m: usize) -> Result<()> {
    if m < 3 {
        return Err(Error::DimensionTooSmall(m));
    }
    Ok(())
}

fn check_radius(model: FocalModel, r: f64) -> Result<()> {
    if model.is_tube() && !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidRadius(r));
    }
    Ok(())
}

fn sqrt2_tanh(r: f64) -> f64 {
    SQRT_2 * (SQRT_2 * r).tanh()
}

fn sqrt2_coth(r: f64) -> f64 {
    SQRT_2 / (SQRT_2 * r).tanh()
}

/// Principal curvatures of the model at radius `r` (ignored for the horosphere).
pub fn tube_table(model: FocalModel, r: f64, m: usize) -> Result<PrincipalCurvatureTable> {
    check_m(m)?;
    check_radius(model, r)?;
    let (alpha, mu) = match model {
        FocalModel::ComplexQuadricHypersurface => (sqrt2_coth(r), sqrt2_tanh(r)),
        FocalModel::RealHyperbolicForm => (sqrt2_tanh(r), sqrt2_coth(r)),
        FocalModel::Horosphere => (SQRT_2, SQRT_2),
    };
    Ok(PrincipalCurvatureTable {
        entries: vec![
            TableEntry {
                value: 0.0,
                multiplicity: m - 1,
                label: EigenLabel::JVMinusN,
            },
            TableEntry {
                value: mu,
                multiplicity: m - 1,
                label: EigenLabel::VMinusN,
            },
            TableEntry {
                value: alpha,
                multiplicity: 1,
                label: EigenLabel::ReebLine,
            },
        ],
    })
}

/// `k` in `S phi + phi S = k phi`.
pub fn tube_contact_constant(model: FocalModel, r: f64) -> Result<f64> {
    check_radius(model, r)?;
    Ok(match model {
        FocalModel::ComplexQuadricHypersurface => sqrt2_tanh(r),
        FocalModel::RealHyperbolicForm => sqrt2_coth(r),
        FocalModel::Horosphere => SQRT_2,
    })
}

/// Frame at the canonical point with normal `N = e1`.
///
/// Basis order is `J(V ominus N)`, `V ominus N`, `xi`, where `V` is the fixed
/// space of the conjugation fixing `N`. The tube around the real form carries
/// `A = -A0`, for which `AN = -N`; the other two carry `A0`.
pub fn build_frame(model: FocalModel, r: f64, m: usize) -> Result<HypersurfaceFrame> {
    let table = tube_table(model, r, m)?;
    let k = tube_contact_constant(model, r)?;
    let normal = TangentVector::basis(m, 0);
    let mut basis: Vec<_> = (1..m).map(|i| TangentVector::basis(m, i).j()).collect();
    basis.extend((1..m).map(|i| TangentVector::basis(m, i)));
    basis.push(-&normal.j());
    let mut diag = vec![table.lambda(); m - 1];
    diag.extend(vec![table.mu(); m - 1]);
    diag.push(table.alpha());
    let conj = match model {
        FocalModel::RealHyperbolicForm => Conjugation::base().negated(),
        _ => Conjugation::base(),
    };
    Ok(HypersurfaceFrame::new(
        normal,
        basis,
        DMatrix::from_diagonal(&DVector::from_vec(diag)),
    )?
    .with_contact_constant(k)
    .with_conjugation(conj))
}

/// Eigen-block label of each basis vector of [`build_frame`].
pub fn frame_labels(m: usize) -> Vec<EigenLabel> {
    let mut labels = vec![EigenLabel::JVMinusN; m - 1];
    labels.extend(vec![EigenLabel::VMinusN; m - 1]);
    labels.push(EigenLabel::ReebLine);
    labels
}

/// `Z -> R(Z, N) N` on `N^perp`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalJacobi {
    pub basis: Vec<TangentVector>,
    pub operator: DMatrix<f64>,
    /// Eigenvalues in ascending order.
    pub spectrum: Vec<f64>,
}

fn operator_in_basis(
    basis: &[TangentVector],
    f: impl Fn(&TangentVector) -> TangentVector,
) -> DMatrix<f64> {
    let n = basis.len();
    let images: Vec<_> = basis.iter().map(&f).collect();
    DMatrix::from_fn(n, n, |i, j| basis[i].dot(&images[j]))
}

fn ascending_spectrum(op: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(op.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Normal Jacobi operator in the basis `basis` of `N^perp`.
pub fn normal_jacobi_in(normal: &TangentVector, basis: &[TangentVector]) -> Result<NormalJacobi> {
    check_unit(normal)?;
    let operator = operator_in_basis(basis, |z| curvature(z, normal, normal));
    let spectrum = ascending_spectrum(&operator);
    Ok(NormalJacobi {
        basis: basis.to_vec(),
        operator,
        spectrum,
    })
}

/// Normal Jacobi operator in an orthonormal basis of `N^perp`.
pub fn normal_jacobi(normal: &TangentVector) -> Result<NormalJacobi> {
    let basis = orthonormal_complement(std::slice::from_ref(normal), normal.m());
    normal_jacobi_in(normal, &basis)
}

/// The closed-form expression `Z + AZ - 2g(Z,N)N + 2g(Z,JN)JN`, for `AN = N`,
/// as an operator on `N^perp` in the basis of `jac`.
pub fn displayed_normal_jacobi(
    jac: &NormalJacobi,
    normal: &TangentVector,
    a: &Conjugation,
) -> DMatrix<f64> {
    let jn = normal.j();
    operator_in_basis(&jac.basis, |z| {
        let mut out = z + &a.apply(z);
        out = &out - &(normal * (2.0 * z.dot(normal)));
        &out + &(&jn * (2.0 * z.dot(&jn)))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum JacobiEigencase {
    Zero,
    MinusTwo,
}

impl JacobiEigencase {
    /// Eigenvalue of the normal Jacobi operator on the block.
    pub fn eigenvalue(&self) -> f64 {
        match self {
            JacobiEigencase::Zero => 0.0,
            JacobiEigencase::MinusTwo => -2.0,
        }
    }

    pub fn of_label(label: EigenLabel) -> Self {
        match label {
            EigenLabel::JVMinusN => JacobiEigencase::Zero,
            EigenLabel::VMinusN | EigenLabel::ReebLine => JacobiEigencase::MinusTwo,
        }
    }
}

/// Scalar Jacobi factor `Z(r)` and `Z'(r)` for a principal direction with
/// curvature `sigma`, started on the hypersurface with `Z(0) = 1`,
/// `Z'(0) = -sigma` and following the inward normal geodesic.
pub fn jacobi_closed_form(case: JacobiEigencase, sigma: f64, r: f64) -> Result<(f64, f64)> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::InvalidRadius(r));
    }
    Ok(match case {
        JacobiEigencase::Zero => (1.0 - sigma * r, -sigma),
        JacobiEigencase::MinusTwo => {
            let (c, s) = ((SQRT_2 * r).cosh(), (SQRT_2 * r).sinh());
            (c - sigma / SQRT_2 * s, SQRT_2 * s - sigma * c)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureTriple {
    pub alpha: f64,
    pub lambda: f64,
    pub mu: f64,
}

/// `2 sigma^2 - 2 k sigma + alpha k - 2`, whose roots are the principal
/// curvatures on the maximal complex distribution.
pub fn contact_quadratic(k: f64, alpha: f64, sigma: f64) -> f64 {
    2.0 * sigma * sigma - 2.0 * k * sigma + alpha * k - 2.0
}

fn check_k(k: f64) -> Result<()> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidContactConstant(k));
    }
    Ok(())
}

/// `alpha = 2/k`, `lambda = 0`, `mu = k`.
pub fn solve_principal_curvatures(k: f64) -> Result<CurvatureTriple> {
    check_k(k)?;
    let alpha = 2.0 / k;
    let triple = CurvatureTriple {
        alpha,
        lambda: 0.0,
        mu: k,
    };
    let worst = contact_quadratic(k, alpha, 0.0)
        .abs()
        .max(contact_quadratic(k, alpha, k).abs());
    debug_assert!(worst <= 1e-12 * (1.0 + k * k));
    Ok(triple)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseId {
    TubeAroundQuadric,
    Horosphere,
    TubeAroundRealForm,
}

impl CaseId {
    pub fn model(&self) -> FocalModel {
        match self {
            CaseId::TubeAroundQuadric => FocalModel::ComplexQuadricHypersurface,
            CaseId::Horosphere => FocalModel::Horosphere,
            CaseId::TubeAroundRealForm => FocalModel::RealHyperbolicForm,
        }
    }

    pub fn of_model(model: FocalModel) -> Self {
        match model {
            FocalModel::ComplexQuadricHypersurface => CaseId::TubeAroundQuadric,
            FocalModel::Horosphere => CaseId::Horosphere,
            FocalModel::RealHyperbolicForm => CaseId::TubeAroundRealForm,
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassificationCase {
    pub case_id: CaseId,
    #[serde(serialize_with = "ser_opt_sig15")]
    pub r: Option<f64>,
    #[serde(serialize_with = "ser_sig15")]
    pub alpha: f64,
    #[serde(serialize_with = "ser_sig15")]
    pub lambda: f64,
    #[serde(serialize_with = "ser_sig15")]
    pub mu: f64,
}

fn ser_opt_sig15<S: serde::Serializer>(
    x: &Option<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => ser_sig15(v, s),
        None => s.serialize_none(),
    }
}

/// The contact hypersurface with constant `k`.
pub fn classify(k: f64) -> Result<ClassificationCase> {
    classify_with_band(k, HOROSPHERE_K_TOL)
}

/// [`classify`] with a custom half-width for the horosphere band.
pub fn classify_with_band(k: f64, band: f64) -> Result<ClassificationCase> {
    if !(band.is_finite() && band >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "horosphere band must be non-negative, got {band}"
        )));
    }
    let triple = solve_principal_curvatures(k)?;
    let x = k / SQRT_2;
    let (case_id, r) = if (k - SQRT_2).abs() <= band {
        (CaseId::Horosphere, None)
    } else if k < SQRT_2 {
        (CaseId::TubeAroundQuadric, Some(x.atanh() / SQRT_2))
    } else {
        // arcoth(x) = artanh(1/x)
        (CaseId::TubeAroundRealForm, Some((1.0 / x).atanh() / SQRT_2))
    };
    Ok(ClassificationCase {
        case_id,
        r,
        alpha: triple.alpha,
        lambda: triple.lambda,
        mu: triple.mu,
    })
}

/// `dim ker dF` for the map sending a point to the end of its inward normal
/// geodesic of length `r`: the number of principal directions whose Jacobi
/// factor vanishes there. The horosphere is evaluated at unit distance.
pub fn focal_map_kernel(case: &ClassificationCase, m: usize) -> Result<usize> {
    check_m(m)?;
    let model = case.case_id.model();
    let r = case.r.unwrap_or(1.0);
    let table = tube_table(model, r, m)?;
    let mut dim = 0;
    for e in &table.entries {
        let (z, _) = jacobi_closed_form(JacobiEigencase::of_label(e.label), e.value, r)?;
        if z.abs() <= FOCAL_TOL * (SQRT_2 * r).cosh() {
            dim += e.multiplicity;
        }
    }
    Ok(dim)
}
