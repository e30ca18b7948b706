//! Pointwise almost contact structure of a real hypersurface and residual
//! evaluators for the identities satisfied by Hopf and contact hypersurfaces.
//!
//! A [`HypersurfaceFrame`] fixes a point of the hypersurface, identified with
//! the origin of the quadric: the unit normal `N`, an orthonormal basis of
//! `N^perp` ending with `xi = -JN`, and the shape operator in that basis.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::quadric::{
    check_unit, orthonormal_complement, singular_decompose, Conjugation, IsotropyRotation,
    TangentVector, VectorKind,
};

/// Tolerance on the preconditions (orthonormality, Hopf, contact) checked
/// before evaluating identities.
pub const PRECONDITION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct HypersurfaceFrame {
    normal: TangentVector,
    basis: Vec<TangentVector>,
    shape: DMatrix<f64>,
    k: Option<f64>,
    conj: Option<Conjugation>,
}

impl HypersurfaceFrame {
    /// Validates that `basis` completes `normal` to an orthonormal frame with
    /// `xi = -JN` last and that `shape` is a symmetric `(2m-1)`-square matrix.
    pub fn new(
        normal: TangentVector,
        basis: Vec<TangentVector>,
        shape: DMatrix<f64>,
    ) -> Result<Self> {
        check_unit(&normal)?;
        let m = normal.m();
        let dim = 2 * m - 1;
        if basis.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: basis.len(),
            });
        }
        if shape.nrows() != dim || shape.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: shape.nrows(),
            });
        }
        if basis.iter().any(|b| b.m() != m) {
            return Err(Error::InvalidFrame(
                "basis vectors of mixed dimension".into(),
            ));
        }
        let residual = orthonormality_residual(&normal, &basis);
        if residual > PRECONDITION_TOL {
            return Err(Error::InvalidFrame(format!(
                "frame not orthonormal (residual {residual:e})"
            )));
        }
        let xi = -&normal.j();
        let gap = (&basis[dim - 1] - &xi).norm();
        if gap > PRECONDITION_TOL {
            return Err(Error::InvalidFrame(format!(
                "last basis vector is not -JN (gap {gap:e})"
            )));
        }
        let asym = (&shape - shape.transpose()).norm();
        if asym > PRECONDITION_TOL {
            return Err(Error::InvalidFrame(format!(
                "shape operator not symmetric ({asym:e})"
            )));
        }
        if shape.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("shape operator"));
        }
        Ok(Self {
            normal,
            basis,
            shape,
            k: None,
            conj: None,
        })
    }

    pub fn with_contact_constant(mut self, k: f64) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_conjugation(mut self, a: Conjugation) -> Self {
        self.conj = Some(a);
        self
    }

    /// Same frame with a different shape operator.
    pub fn with_shape(&self, shape: DMatrix<f64>) -> Result<Self> {
        let mut out = Self::new(self.normal.clone(), self.basis.clone(), shape)?;
        out.k = self.k;
        out.conj = self.conj;
        Ok(out)
    }

    pub fn m(&self) -> usize {
        self.normal.m()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn normal(&self) -> &TangentVector {
        &self.normal
    }

    pub fn basis(&self) -> &[TangentVector] {
        &self.basis
    }

    pub fn xi(&self) -> &TangentVector {
        &self.basis[self.dim() - 1]
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    pub fn alpha(&self) -> f64 {
        let last = self.dim() - 1;
        self.shape[(last, last)]
    }

    pub fn k(&self) -> Option<f64> {
        self.k
    }

    pub fn conjugation(&self) -> Option<Conjugation> {
        self.conj
    }

    /// `+1` if `AN = N`, `-1` if `AN = -N` for the attached conjugation,
    /// `None` otherwise.
    pub fn normal_orientation(&self) -> Option<f64> {
        let a = self.conj?;
        let an = a.apply(&self.normal);
        if (&an - &self.normal).norm() <= PRECONDITION_TOL {
            Some(1.0)
        } else if (&an + &self.normal).norm() <= PRECONDITION_TOL {
            Some(-1.0)
        } else {
            None
        }
    }

    /// The conjugation `A'` with `A'N = N` (the attached one or its negative).
    pub fn principal_conjugation(&self) -> Option<Conjugation> {
        let a = self.conj?;
        match self.normal_orientation()? {
            s if s > 0.0 => Some(a),
            _ => Some(a.negated()),
        }
    }

    /// Coordinates of the tangential part of `v` in the frame basis.
    pub fn coords_of(&self, v: &TangentVector) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.basis.iter().map(|b| b.dot(v)))
    }

    pub fn vector_from(&self, coords: &DVector<f64>) -> TangentVector {
        let mut out = TangentVector::zeros(self.m());
        for (b, c) in self.basis.iter().zip(coords.iter()) {
            out = &out + &(b * *c);
        }
        out
    }

    /// `S` applied to the tangential part of `v`.
    pub fn apply_shape(&self, v: &TangentVector) -> TangentVector {
        self.vector_from(&(&self.shape * self.coords_of(v)))
    }

    /// Tangential projection of an ambient vector.
    pub fn tangential(&self, v: &TangentVector) -> TangentVector {
        v - &(&self.normal * self.normal.dot(v))
    }

    /// The frame moved by an isotropy rotation; the shape operator is unchanged
    /// in the moved basis and the conjugation is transported along.
    pub fn rotated(&self, k: &IsotropyRotation) -> Result<Self> {
        if k.rotation().nrows() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                got: k.rotation().nrows(),
            });
        }
        Ok(Self {
            normal: k.apply(&self.normal),
            basis: self.basis.iter().map(|b| k.apply(b)).collect(),
            shape: self.shape.clone(),
            k: self.k,
            conj: self.conj.map(|a| k.conjugation(&a)),
        })
    }

    pub fn almost_contact(&self) -> AlmostContact {
        induced_structure(&self.normal, &self.basis).expect("frame validated at construction")
    }
}

fn orthonormality_residual(normal: &TangentVector, basis: &[TangentVector]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        worst = worst.max(a.dot(normal).abs());
        for (j, b) in basis.iter().enumerate().skip(i) {
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.dot(b) - expect).abs());
        }
    }
    worst
}

/// The induced structure `(phi, xi, eta)` in frame coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AlmostContact {
    /// `phi[(i, j)] = g(phi b_j, b_i)`.
    pub phi: DMatrix<f64>,
    /// `eta_i = g(b_i, xi)`; also the coordinates of `xi`.
    pub eta: DVector<f64>,
    /// Position of `xi` in the basis, when it is a basis vector.
    pub xi_index: Option<usize>,
}

/// Residuals of the five almost contact metric axioms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomResiduals {
    pub phi_squared: f64,
    pub phi_xi: f64,
    pub eta_phi: f64,
    pub eta_xi: f64,
    pub compatibility: f64,
}

impl AxiomResiduals {
    pub fn max(&self) -> f64 {
        [
            self.phi_squared,
            self.phi_xi,
            self.eta_phi,
            self.eta_xi,
            self.compatibility,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl AlmostContact {
    pub fn axioms(&self) -> AxiomResiduals {
        let n = self.phi.nrows();
        let id = DMatrix::<f64>::identity(n, n);
        let xi_eta = &self.eta * self.eta.transpose();
        AxiomResiduals {
            phi_squared: (&self.phi * &self.phi + &id - &xi_eta).amax(),
            phi_xi: (&self.phi * &self.eta).amax(),
            eta_phi: (self.eta.transpose() * &self.phi).amax(),
            eta_xi: (self.eta.dot(&self.eta) - 1.0).abs(),
            compatibility: (self.phi.transpose() * &self.phi - &id + &xi_eta).amax(),
        }
    }
}

/// `xi = -JN`, `phi X = JX - g(JX, N) N` and `eta = g(., xi)` in the given basis.
pub fn induced_structure(normal: &TangentVector, basis: &[TangentVector]) -> Result<AlmostContact> {
    check_unit(normal)?;
    let m = normal.m();
    if basis.len() != 2 * m - 1 {
        return Err(Error::DimensionMismatch {
            expected: 2 * m - 1,
            got: basis.len(),
        });
    }
    let residual = orthonormality_residual(normal, basis);
    if residual > PRECONDITION_TOL {
        return Err(Error::InvalidFrame(format!(
            "frame not orthonormal (residual {residual:e})"
        )));
    }
    let xi = -&normal.j();
    let n = basis.len();
    let phi = DMatrix::from_fn(n, n, |i, j| {
        let jb = basis[j].j();
        let tangential = &jb - &(normal * jb.dot(normal));
        tangential.dot(&basis[i])
    });
    let eta = DVector::from_iterator(n, basis.iter().map(|b| b.dot(&xi)));
    let xi_index = eta
        .iter()
        .position(|&v| (v - 1.0).abs() <= PRECONDITION_TOL);
    Ok(AlmostContact { phi, eta, xi_index })
}

fn spectral_norm(mat: &DMatrix<f64>) -> f64 {
    mat.clone().svd(false, false).singular_values.max()
}

/// `||S phi + phi S - k phi||` (operator norm).
pub fn contact_defect(frame: &HypersurfaceFrame, k: f64) -> f64 {
    let phi = frame.almost_contact().phi;
    let s = frame.shape();
    spectral_norm(&(s * &phi + &phi * s - &phi * k))
}

/// `max |d eta(b_i, b_j) - rho g(phi b_i, b_j)|` with
/// `d eta(X, Y) = g((phi S + S phi) X, Y) / 2`, which follows from
/// `nabla_X xi = phi S X`.
pub fn deta_defect(frame: &HypersurfaceFrame, rho: f64) -> f64 {
    let phi = frame.almost_contact().phi;
    let s = frame.shape();
    let deta = (&phi * s + s * &phi) * 0.5;
    (deta - &phi * rho).amax()
}

/// `alpha = g(S xi, xi)` and the Hopf defect `||S xi - alpha xi||`.
pub fn hopf_data(frame: &HypersurfaceFrame) -> (f64, f64) {
    let last = frame.dim() - 1;
    let alpha = frame.alpha();
    let mut col = frame.shape().column(last).into_owned();
    col[last] -= alpha;
    (alpha, col.norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCurvature {
    pub h: f64,
    /// `|H - alpha - (m-1) k|` when the frame carries a contact constant.
    pub residual: Option<f64>,
}

pub fn mean_curvature(frame: &HypersurfaceFrame) -> MeanCurvature {
    let h = frame.shape().trace();
    let residual = frame
        .k()
        .map(|k| (h - frame.alpha() - (frame.m() as f64 - 1.0) * k).abs());
    MeanCurvature { h, residual }
}

/// The maximal subspace of `N^perp ominus R xi` invariant under every
/// conjugation.
#[derive(Debug, Clone, PartialEq)]
pub struct QSubspace {
    pub dim: usize,
    pub basis: Vec<TangentVector>,
}

impl QSubspace {
    /// Largest component of `A_theta q` leaving the subspace, over the basis.
    pub fn invariance_residual(&self, a: &Conjugation) -> f64 {
        self.basis
            .iter()
            .map(|q| {
                let aq = a.apply(q);
                let mut rest = aq.clone();
                for b in &self.basis {
                    rest = &rest - &(b * b.dot(&aq));
                }
                rest.norm()
            })
            .fold(0.0, f64::max)
    }
}

/// `C` itself for principal normals, otherwise `C ominus C(JX + Y)` with
/// `X, Y` from the singular decomposition of `N`.
pub fn q_subspace(normal: &TangentVector) -> Result<QSubspace> {
    let d = singular_decompose(normal)?;
    let m = normal.m();
    let mut removed = vec![normal.clone(), normal.j()];
    if d.kind != VectorKind::Principal {
        let v = &d.x.j() + &d.y;
        removed.push(v.j());
        removed.push(v);
    }
    let basis = orthonormal_complement(&removed, m);
    Ok(QSubspace {
        dim: basis.len(),
        basis,
    })
}

fn require_hopf(frame: &HypersurfaceFrame) -> Result<()> {
    let (_, defect) = hopf_data(frame);
    if defect > PRECONDITION_TOL {
        return Err(Error::Precondition(format!(
            "not a Hopf frame (defect {defect:e})"
        )));
    }
    Ok(())
}

fn require_contact(frame: &HypersurfaceFrame) -> Result<f64> {
    let k = frame
        .k()
        .ok_or_else(|| Error::Precondition("frame has no contact constant".into()))?;
    let defect = contact_defect(frame, k);
    if defect > PRECONDITION_TOL {
        return Err(Error::Precondition(format!(
            "not a contact frame (defect {defect:e})"
        )));
    }
    Ok(k)
}

fn attached_conjugation(frame: &HypersurfaceFrame) -> Result<Conjugation> {
    frame
        .conjugation()
        .ok_or_else(|| Error::Precondition("frame has no adapted conjugation".into()))
}

/// Hopf identity residual with the frame's adapted conjugation.
pub fn hopf_identity_residual(frame: &HypersurfaceFrame) -> Result<f64> {
    hopf_identity_residual_with(frame, &attached_conjugation(frame)?)
}

/// Largest absolute value over basis pairs of
/// `2g(S phi S X, Y) - alpha g((phi S + S phi) X, Y) + 2g(phi X, Y)
///  - 2g(X, AN) g(Y, A xi) + 2g(Y, AN) g(X, A xi)
///  - 2g(xi, A xi) {g(Y, AN) eta(X) - g(X, AN) eta(Y)}`.
pub fn hopf_identity_residual_with(frame: &HypersurfaceFrame, a: &Conjugation) -> Result<f64> {
    require_hopf(frame)?;
    let ac = frame.almost_contact();
    let (phi, eta, s) = (&ac.phi, &ac.eta, frame.shape());
    let alpha = frame.alpha();
    let an = frame.coords_of(&a.apply(frame.normal()));
    let axi = a.apply(frame.xi());
    let axi_c = frame.coords_of(&axi);
    let xi_axi = frame.xi().dot(&axi);
    let main = s * phi * s * 2.0 - (phi * s + s * phi) * alpha + phi * 2.0;
    let n = frame.dim();
    let mut worst: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            let v = main[(y, x)] - 2.0 * an[x] * axi_c[y] + 2.0 * an[y] * axi_c[x]
                - 2.0 * xi_axi * (an[y] * eta[x] - an[x] * eta[y]);
            worst = worst.max(v.abs());
        }
    }
    Ok(worst)
}

/// Contact identity for `2 S^2 X` with the frame's adapted conjugation.
pub fn contact_square_residual(frame: &HypersurfaceFrame) -> Result<f64> {
    contact_square_residual_with(frame, &attached_conjugation(frame)?)
}

/// Largest `||2 S^2 X - RHS(X)||` over basis vectors `X`, where `RHS` is the
/// contact identity written with `A`, `alpha`, `k` and tangential parts of
/// `A xi`, `AN` and `JA xi`.
pub fn contact_square_residual_with(frame: &HypersurfaceFrame, a: &Conjugation) -> Result<f64> {
    let k = require_contact(frame)?;
    require_hopf(frame)?;
    let ac = frame.almost_contact();
    let (phi, eta, s) = (&ac.phi, &ac.eta, frame.shape());
    let alpha = frame.alpha();
    let an = a.apply(frame.normal());
    let axi = a.apply(frame.xi());
    let an_c = frame.coords_of(&an);
    let axi_c = frame.coords_of(&axi);
    let jaxi_c = frame.coords_of(&axi.j());
    let eta_an = frame.xi().dot(&an);
    let eta_axi = frame.xi().dot(&axi);
    let lhs = s * s * 2.0;
    let n = frame.dim();
    let mut worst: f64 = 0.0;
    for x in 0..n {
        let phix = phi.column(x);
        let g_phix_an = phix.dot(&an_c);
        let g_phix_axi = phix.dot(&axi_c);
        let xi_coeff = eta[x] * (2.0 * alpha * alpha - alpha * k - 2.0)
            - 2.0 * (g_phix_an * eta_axi - eta_an * g_phix_axi);
        let mut rhs = eta * xi_coeff + s.column(x) * (2.0 * k);
        rhs[x] -= alpha * k - 2.0;
        rhs += &axi_c * g_phix_an - &an_c * g_phix_axi + &jaxi_c * g_phix_axi
            - &axi_c * (axi_c[x] - eta[x] * eta_axi);
        worst = worst.max((lhs.column(x) - rhs).norm());
    }
    Ok(worst)
}

/// `max ||A S X - S X||` over basis vectors of `C = N^perp ominus R xi`, with
/// `A` the conjugation fixing `N`.
pub fn principal_shape_residual(frame: &HypersurfaceFrame) -> Result<f64> {
    let a = frame.principal_conjugation().ok_or_else(|| {
        Error::Precondition("normal is not principal for the attached conjugation".into())
    })?;
    let n = frame.dim();
    let mut worst: f64 = 0.0;
    for x in &frame.basis()[..n - 1] {
        let sx = frame.apply_shape(x);
        worst = worst.max((&a.apply(&sx) - &sx).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadric::v_space_basis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::SQRT_2;

    /// Normal `e1`, basis `i e_k`, `e_k` (k >= 2), `xi`; shape `diag(0, mu, alpha)`.
    fn model_frame(m: usize, alpha: f64, mu: f64) -> HypersurfaceFrame {
        let n = TangentVector::basis(m, 0);
        let mut basis: Vec<_> = (1..m).map(|k| TangentVector::basis(m, k).j()).collect();
        basis.extend((1..m).map(|k| TangentVector::basis(m, k)));
        basis.push(-&n.j());
        let mut diag = vec![0.0; m - 1];
        diag.extend(vec![mu; m - 1]);
        diag.push(alpha);
        HypersurfaceFrame::new(n, basis, DMatrix::from_diagonal(&DVector::from_vec(diag)))
            .unwrap()
            .with_contact_constant(mu)
            .with_conjugation(Conjugation::base())
    }

    fn random_unit(m: usize, rng: &mut ChaCha8Rng) -> TangentVector {
        TangentVector::from_block(DMatrix::from_fn(2, m, |_, _| rng.random_range(-1.0..1.0)))
            .unwrap()
            .normalized()
    }

    fn frame_for(normal: &TangentVector) -> Vec<TangentVector> {
        let xi = -&normal.j();
        let mut basis = orthonormal_complement(&[normal.clone(), xi.clone()], normal.m());
        basis.push(xi);
        basis
    }

    #[test]
    fn frame_validation() {
        let f = model_frame(3, 1.0, 2.0);
        assert_eq!(f.dim(), 5);
        let mut bad = f.basis().to_vec();
        bad.swap(0, 4);
        assert!(HypersurfaceFrame::new(f.normal().clone(), bad, f.shape().clone()).is_err());
        let mut asym = f.shape().clone();
        asym[(0, 1)] = 1.0;
        assert!(f.with_shape(asym).is_err());
        assert!(HypersurfaceFrame::new(
            &TangentVector::basis(3, 0) * 2.0,
            f.basis().to_vec(),
            f.shape().clone()
        )
        .is_err());
        assert_eq!(f.normal_orientation(), Some(1.0));
        assert_eq!(
            f.clone()
                .with_conjugation(Conjugation::new(std::f64::consts::PI))
                .normal_orientation(),
            Some(-1.0)
        );
        assert_eq!(
            f.clone()
                .with_conjugation(Conjugation::new(1.0))
                .normal_orientation(),
            None
        );
    }

    #[test]
    fn almost_contact_axioms_on_random_normals() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for m in 3..=5 {
            for _ in 0..30 {
                let n = random_unit(m, &mut rng);
                let basis = frame_for(&n);
                let ac = induced_structure(&n, &basis).unwrap();
                assert!(ac.axioms().max() < 1e-12);
                assert_eq!(ac.xi_index, Some(2 * m - 2));
                // phi agrees with J on C.
                for (j, b) in basis[..2 * m - 2].iter().enumerate() {
                    let jb = b.j();
                    let c = DVector::from_iterator(2 * m - 1, basis.iter().map(|e| e.dot(&jb)));
                    assert!((ac.phi.column(j) - c).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn induced_structure_rejects_bad_basis() {
        let n = TangentVector::basis(3, 0);
        let mut basis = frame_for(&n);
        basis[0] = &basis[0] * 1.1;
        assert!(induced_structure(&n, &basis).is_err());
    }

    #[test]
    fn contact_defect_examples() {
        let f = model_frame(3, 1.0, 1.0)
            .with_shape(DMatrix::identity(5, 5))
            .unwrap();
        assert!(contact_defect(&f, 2.0) < 1e-15);
        assert!((contact_defect(&f, 1.0) - 1.0).abs() < 1e-14);
        let r = 1.0f64;
        let mu = SQRT_2 * (SQRT_2 * r).tanh();
        let alpha = SQRT_2 / (SQRT_2 * r).tanh();
        let tube = model_frame(3, alpha, mu);
        assert!(contact_defect(&tube, mu) < 1e-12);
        assert!(deta_defect(&tube, mu / 2.0) < 1e-12);
        let zero = tube.with_shape(DMatrix::zeros(5, 5)).unwrap();
        assert!((deta_defect(&zero, 0.7) - 0.7).abs() < 1e-14);
    }

    #[test]
    fn hopf_and_mean_curvature() {
        let f = model_frame(3, 1.591890, 1.256367);
        let (alpha, defect) = hopf_data(&f);
        assert_eq!(alpha, 1.591890);
        assert_eq!(defect, 0.0);
        let mut s = f.shape().clone();
        s[(4, 1)] = 1e-3;
        s[(1, 4)] = 1e-3;
        let coupled = f.with_shape(s).unwrap();
        assert!((hopf_data(&coupled).1 - 1e-3).abs() < 1e-15);
        let h = mean_curvature(&f);
        assert!((h.h - (1.591890 + 2.0 * 1.256367)).abs() < 1e-14);
        assert!(h.residual.unwrap() < 1e-14);
        assert!(hopf_identity_residual(&coupled).is_err());
    }

    #[test]
    fn q_subspace_dimensions() {
        let principal = TangentVector::basis(3, 0);
        let q = q_subspace(&principal).unwrap();
        assert_eq!(q.dim, 4);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let iso = &(&TangentVector::basis(3, 0) * h) + &(&TangentVector::basis(3, 1).j() * h);
        let q = q_subspace(&iso).unwrap();
        assert_eq!(q.dim, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for m in 3..=5 {
            let n = random_unit(m, &mut rng);
            let q = q_subspace(&n).unwrap();
            assert_eq!(q.dim, 2 * m - 4);
            for b in &q.basis {
                assert!(b.dot(&n).abs() < 1e-12 && b.dot(&n.j()).abs() < 1e-12);
            }
            for k in 0..16 {
                let a = Conjugation::new(k as f64 * 0.4);
                assert!(q.invariance_residual(&a) < 1e-10);
            }
        }
    }

    #[test]
    fn identities_on_model_frames() {
        for &r in &[0.5, 1.0, 2.0] {
            let t = SQRT_2 * (SQRT_2 * r).tanh();
            let c = SQRT_2 / (SQRT_2 * r).tanh();
            for (alpha, mu, theta) in [
                (c, t, 0.0),
                (t, c, std::f64::consts::PI),
                (SQRT_2, SQRT_2, 0.0),
            ] {
                let f = model_frame(4, alpha, mu).with_conjugation(Conjugation::new(theta));
                assert!(hopf_identity_residual(&f).unwrap() < 1e-10);
                assert!(contact_square_residual(&f).unwrap() < 1e-9);
                assert!(principal_shape_residual(&f).unwrap() < 1e-12);
                for k in 0..8 {
                    let a = Conjugation::new(0.8 * k as f64);
                    assert!(hopf_identity_residual_with(&f, &a).unwrap() < 1e-10);
                    assert!(contact_square_residual_with(&f, &a).unwrap() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn identities_detect_violations() {
        // alpha * mu != 2 breaks the Hopf identity on the C-block.
        let f = model_frame(3, 1.0, 1.0);
        assert!(hopf_identity_residual(&f).unwrap() > 0.5);
        assert!(contact_square_residual(&f).unwrap() > 0.5);
        // Shape mapping C into JV(A).
        let m = 3;
        let (_, jv) = v_space_basis(&Conjugation::base(), m);
        let g = model_frame(m, 2.0, 1.0);
        let mut s = g.shape().clone();
        s[(0, 0)] = 1.0;
        let bad = g.with_shape(s).unwrap();
        assert!(bad.basis()[0].dot(&jv[1]).abs() > 0.9);
        assert!(principal_shape_residual(&bad).unwrap() > 0.9);
        let not_contact = g
            .with_shape(DMatrix::identity(5, 5))
            .unwrap()
            .with_contact_constant(1.0);
        assert!(contact_square_residual(&not_contact).is_err());
        let no_conj =
            HypersurfaceFrame::new(g.normal().clone(), g.basis().to_vec(), g.shape().clone())
                .unwrap();
        assert!(principal_shape_residual(&no_conj).is_err());
    }

    #[test]
    fn rotated_frames_keep_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let t = SQRT_2 * SQRT_2.tanh();
        let f = model_frame(3, 2.0 / t, t);
        for _ in 0..10 {
            let a = rng.random_range(0.0..std::f64::consts::TAU);
            let (s, c) = a.sin_cos();
            let rot = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c]);
            let k = IsotropyRotation::new(rng.random_range(0.0..6.0), rot).unwrap();
            let g = f.rotated(&k).unwrap();
            assert_eq!(g.normal_orientation(), Some(1.0));
            assert!(contact_defect(&g, t) < 1e-12);
            assert!(hopf_identity_residual(&g).unwrap() < 1e-10);
            assert!(contact_square_residual(&g).unwrap() < 1e-9);
            assert!(principal_shape_residual(&g).unwrap() < 1e-10);
        }
    }
}
