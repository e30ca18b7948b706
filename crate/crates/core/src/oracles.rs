//! Brute-force cross-checks: fixed-step RK4 integration of Jacobi fields,
//! finite-difference parallel transport, and reproducible sampling.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::hypersurface::HypersurfaceFrame;
use crate::lie::{Context, LieElement};
use crate::models::{
    build_frame, frame_labels, normal_jacobi_in, EigenLabel, FocalModel, PrincipalCurvatureTable,
    TableEntry,
};
use crate::quadric::{transport_frame, Conjugation, IsotropyRotation, TangentVector};

/// Smallest singular value of `Z(r)` accepted when forming `Z' Z^-1`.
pub const NEAR_FOCAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeConfig {
    pub step: f64,
    pub max_t: f64,
}

impl Default for OdeConfig {
    fn default() -> Self {
        Self {
            step: 1e-4,
            max_t: 50.0,
        }
    }
}

impl OdeConfig {
    pub fn with_step(step: f64) -> Result<Self> {
        let cfg = Self {
            step,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "step must be positive, got {}",
                self.step
            )));
        }
        if self.max_t.is_nan() || self.max_t < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "max_t must be non-negative, got {}",
                self.max_t
            )));
        }
        Ok(())
    }
}

/// Integrates `Z'' = -R Z` column-wise from `0` to `r` with classical RK4,
/// using the largest step `<= cfg.step` that divides `r`.
pub fn integrate_jacobi_matrix(
    rn: &DMatrix<f64>,
    z0: &DMatrix<f64>,
    dz0: &DMatrix<f64>,
    r: f64,
    cfg: &OdeConfig,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    cfg.validate()?;
    if r.is_nan() || r < 0.0 || r > cfg.max_t {
        return Err(Error::InvalidRadius(r));
    }
    if (rn - rn.transpose()).amax() > 1e-10 {
        return Err(Error::Precondition(
            "Jacobi operator is not symmetric".into(),
        ));
    }
    let steps = (r / cfg.step).ceil().max(1.0) as usize;
    let h = r / steps as f64;
    let (mut z, mut v) = (z0.clone(), dz0.clone());
    let acc = |z: &DMatrix<f64>| -(rn * z);
    for _ in 0..steps {
        let (k1z, k1v) = (v.clone(), acc(&z));
        let (k2z, k2v) = (&v + &k1v * (h / 2.0), acc(&(&z + &k1z * (h / 2.0))));
        let (k3z, k3v) = (&v + &k2v * (h / 2.0), acc(&(&z + &k2z * (h / 2.0))));
        let (k4z, k4v) = (&v + &k3v * h, acc(&(&z + &k3z * h)));
        z += (k1z + k2z * 2.0 + k3z * 2.0 + k4z) * (h / 6.0);
        v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
    }
    if z.iter().chain(v.iter()).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("Jacobi field"));
    }
    Ok((z, v))
}

/// Single Jacobi field version of [`integrate_jacobi_matrix`].
pub fn integrate_jacobi(
    rn: &DMatrix<f64>,
    z0: &DVector<f64>,
    dz0: &DVector<f64>,
    r: f64,
    cfg: &OdeConfig,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let n = z0.len();
    let (z, v) = integrate_jacobi_matrix(
        rn,
        &DMatrix::from_column_slice(n, 1, z0.as_slice()),
        &DMatrix::from_column_slice(n, 1, dz0.as_slice()),
        r,
        cfg,
    )?;
    Ok((z.column(0).into_owned(), v.column(0).into_owned()))
}

/// Labels of the frame directions normal to the focal submanifold.
fn focal_normal(model: FocalModel, label: EigenLabel) -> bool {
    match model {
        FocalModel::ComplexQuadricHypersurface => label == EigenLabel::ReebLine,
        FocalModel::RealHyperbolicForm => label == EigenLabel::VMinusN,
        FocalModel::Horosphere => false,
    }
}

/// Shape operator of a tube reconstructed from Jacobi fields.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeShape {
    pub table: PrincipalCurvatureTable,
    /// `Z'(r) Z(r)^-1` in the frame basis.
    pub shape: DMatrix<f64>,
    /// Diagonal Jacobi factors `Z(r)` at the tube.
    pub z: DMatrix<f64>,
}

impl OdeShape {
    pub fn off_diagonal(&self) -> f64 {
        let mut s = self.shape.clone();
        s.fill_diagonal(0.0);
        s.amax()
    }
}

fn initial_focal(model: FocalModel, m: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let labels = frame_labels(m);
    let n = labels.len();
    let normal = DVector::from_iterator(
        n,
        labels
            .iter()
            .map(|&l| if focal_normal(model, l) { 1.0 } else { 0.0 }),
    );
    let tangent = DVector::from_element(n, 1.0) - &normal;
    (
        DMatrix::from_diagonal(&tangent),
        DMatrix::from_diagonal(&normal),
    )
}

/// Principal curvatures of the tube of radius `r` from Jacobi fields started
/// on the focal submanifold (`Z(0) = 0, Z'(0) = 1` in focal normal directions,
/// `Z(0) = 1, Z'(0) = 0` in focal tangent ones), as `Z'(r) / Z(r)`.
pub fn tube_shape_from_ode(
    model: FocalModel,
    r: f64,
    m: usize,
    cfg: &OdeConfig,
) -> Result<OdeShape> {
    if !model.is_tube() {
        return Err(Error::Precondition(
            "the horosphere has no focal submanifold".into(),
        ));
    }
    let frame = build_frame(model, r, m)?;
    let rn = normal_jacobi_in(frame.normal(), frame.basis())?.operator;
    let (z0, dz0) = initial_focal(model, m);
    let (z, dz) = integrate_jacobi_matrix(&rn, &z0, &dz0, r, cfg)?;
    let smallest = z.clone().svd(false, false).singular_values.min();
    if smallest < NEAR_FOCAL_TOL {
        return Err(Error::NearFocal(smallest));
    }
    let inv = z.clone().try_inverse().ok_or(Error::NearFocal(smallest))?;
    let shape = dz * inv;
    let labels = frame_labels(m);
    let mut entries = Vec::new();
    for label in [
        EigenLabel::JVMinusN,
        EigenLabel::VMinusN,
        EigenLabel::ReebLine,
    ] {
        let idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == label).collect();
        let mean = idx.iter().map(|&i| shape[(i, i)]).sum::<f64>() / idx.len() as f64;
        entries.push(TableEntry {
            value: mean,
            multiplicity: idx.len(),
            label,
        });
    }
    Ok(OdeShape {
        table: PrincipalCurvatureTable { entries },
        shape,
        z,
    })
}

/// Jacobi fields started on the hypersurface with `Z(0) = 1`, `Z'(0) = -S`
/// and followed along the inward normal for `dist`.
pub fn propagate_from_hypersurface(
    frame: &HypersurfaceFrame,
    dist: f64,
    cfg: &OdeConfig,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let rn = normal_jacobi_in(frame.normal(), frame.basis())?.operator;
    let n = frame.dim();
    integrate_jacobi_matrix(&rn, &DMatrix::identity(n, n), &(-frame.shape()), dist, cfg)
}

/// Tube to focal set and back: hypersurface-side fields run for `r`, rescaled
/// by the focal-side factors, must return the focal initial data.
pub fn focal_round_trip(model: FocalModel, r: f64, m: usize, cfg: &OdeConfig) -> Result<f64> {
    let ode = tube_shape_from_ode(model, r, m, cfg)?;
    let frame = build_frame(model, r, m)?;
    let (h, dh) = propagate_from_hypersurface(&frame, r, cfg)?;
    let (z0, dz0) = initial_focal(model, m);
    let back = (&h * &ode.z - z0).amax();
    let slope = (&dh * &ode.z + dz0).amax();
    Ok(back.max(slope))
}

/// Error ratio `e(step) / e(step / 2)` for the `-2` block against the closed
/// form; close to 16 for a fourth-order method.
pub fn rk4_order_ratio(sigma: f64, r: f64, step: f64) -> Result<f64> {
    let rn = DMatrix::from_element(1, 1, -2.0);
    let exact =
        crate::models::jacobi_closed_form(crate::models::JacobiEigencase::MinusTwo, sigma, r)?.0;
    let err = |h: f64| -> Result<f64> {
        let cfg = OdeConfig::with_step(h)?;
        let (z, _) = integrate_jacobi(
            &rn,
            &DVector::from_element(1, 1.0),
            &DVector::from_element(1, -sigma),
            r,
            &cfg,
        )?;
        Ok((z[0] - exact).abs())
    };
    Ok(err(step)? / err(step / 2.0)?)
}

/// Drift of `(Z')^2 - 2 Z^2` for the `-2` block over `[0, r]`.
pub fn energy_drift(sigma: f64, r: f64, cfg: &OdeConfig) -> Result<f64> {
    let rn = DMatrix::from_element(1, 1, -2.0);
    let (z, dz) = integrate_jacobi(
        &rn,
        &DVector::from_element(1, 1.0),
        &DVector::from_element(1, -sigma),
        r,
        cfg,
    )?;
    let start = sigma * sigma - 2.0;
    Ok((dz[0] * dz[0] - 2.0 * z[0] * z[0] - start).abs())
}

/// Finite-difference checks of parallel transport along `exp(uX) p0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportCheck {
    /// Largest tangential part of the derivative of a transported vector.
    pub covariant: f64,
    pub metric_drift: f64,
    pub j_drift: f64,
    /// Fitted `q` in `nabla A = q JA` for the section `A_{theta0 + omega u}`.
    pub q: f64,
    pub omega: f64,
    /// Largest deviation of `nabla A` from `q JA`.
    pub q_residual: f64,
}

impl TransportCheck {
    pub fn max(&self) -> f64 {
        [
            self.covariant,
            self.metric_drift,
            self.j_drift,
            self.q_residual,
            (self.q - self.omega).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Samples along `[0, t]` probed by [`transport_fd_check`].
pub const TRANSPORT_NODES: usize = 8;

/// Angular speed of the rotating conjugation section used for the `q` probe.
pub const SECTION_OMEGA: f64 = 0.5;

/// Numerical check that `Ad(exp(uX))` is parallel transport: transported
/// vectors have vanishing covariant derivative, keep the metric and commute
/// with `J`; a conjugation section rotating at speed `omega` has
/// `nabla A = omega JA`. Derivatives use central differences with step
/// `cfg.step`.
pub fn transport_fd_check(x: &TangentVector, t: f64, cfg: &OdeConfig) -> Result<TransportCheck> {
    cfg.validate()?;
    let m = x.m();
    let ctx = Context::new(m)?;
    let s = ctx.s().clone();
    let h = cfg.step;
    let theta0 = 0.3;
    let omega = SECTION_OMEGA;
    let mpart = |y: &DMatrix<f64>| (y - &s * y * &s) * 0.5;
    let frame: Vec<TangentVector> = (0..2 * m)
        .map(|k| {
            let mut c = DVector::zeros(2 * m);
            c[k] = 1.0;
            TangentVector::from_coords(&c)
        })
        .collect();
    let embedded: Vec<DMatrix<f64>> = frame.iter().map(|v| v.to_lie().into_matrix()).collect();
    let j = ctx.j();
    let quarter = |a: &DMatrix<f64>, b: &DMatrix<f64>| (a * b).trace() / 4.0;
    let (mut covariant, mut metric_drift, mut j_drift) = (0.0f64, 0.0f64, 0.0f64);
    let (mut num, mut den) = (0.0, 0.0);
    let mut pairs: Vec<(DMatrix<f64>, DMatrix<f64>)> = Vec::new();
    for node in 0..=TRANSPORT_NODES {
        let u = t * node as f64 / TRANSPORT_NODES as f64;
        let tr = transport_frame(x, u)?;
        let (plus, minus) = (transport_frame(x, u + h)?, transport_frame(x, u - h)?);
        let g = tr.group();
        let ginv = g.inverse();
        let project = |w: &DMatrix<f64>| g.conjugate(&mpart(&ginv.conjugate(w)));
        let c_at = |v: f64| Conjugation::new(theta0 + omega * v).matrix(&ctx);
        let (c0, cp, cm) = (c_at(u)?, c_at(u + h)?, c_at(u - h)?);
        let moved: Vec<DMatrix<f64>> = embedded.iter().map(|e| g.conjugate(e)).collect();
        for (i, e) in embedded.iter().enumerate() {
            let d = (plus.group().conjugate(e) - minus.group().conjugate(e)) / (2.0 * h);
            let p = project(&d);
            covariant = covariant.max(quarter(&p, &p).max(0.0).sqrt());
            for (k, f) in moved.iter().enumerate() {
                let expect = if i == k { 1.0 } else { 0.0 };
                metric_drift = metric_drift.max((quarter(&moved[i], f) - expect).abs());
            }
            let j_p =
                tr.complex_structure_at(&ctx, &LieElement::from_matrix_unchecked(moved[i].clone()));
            let tj = tr.apply(&frame[i].j());
            let diff = j_p.mat() - tj.mat();
            j_drift = j_drift.max(quarter(&diff, &diff).max(0.0).sqrt());

            // A(u) W(u) = Ad(g_u c_u) w for the parallel field W.
            let aw = |gg: &crate::lie::GroupElement, c: &DMatrix<f64>| gg.conjugate(&(c * e * c));
            let da = project(&((aw(plus.group(), &cp) - aw(minus.group(), &cm)) / (2.0 * h)));
            let jaw = g.conjugate(&j.conjugate(&(&c0 * e * &c0)));
            num += quarter(&da, &jaw);
            den += quarter(&jaw, &jaw);
            pairs.push((da, jaw));
        }
    }
    let q = num / den;
    let q_residual = pairs
        .iter()
        .map(|(da, jaw)| {
            let r = da - jaw * q;
            quarter(&r, &r).max(0.0).sqrt()
        })
        .fold(0.0, f64::max);
    Ok(TransportCheck {
        covariant,
        metric_drift,
        j_drift,
        q,
        omega,
        q_residual,
    })
}

/// A deterministic ChaCha8 stream; `derive` gives independent streams for
/// separate suites under the same seed.
#[derive(Debug, Clone)]
pub struct SampleStream {
    seed: u64,
    stream: u64,
    counter: u64,
    rng: ChaCha8Rng,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    Any,
    Principal,
    Isotropic,
    Regular,
}

/// Distance kept from `0` and `pi/4` when drawing `t` for regular samples.
pub const REGULAR_MARGIN: f64 = 1e-2;

impl SampleStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            seed,
            stream,
            counter: 0,
            rng,
        }
    }

    pub fn derive(&self, index: u64) -> Self {
        Self::with_stream(self.seed, index + 1)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Number of samples drawn so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.counter += 1;
        self.rng.random_range(lo..hi)
    }

    pub fn angle(&mut self) -> f64 {
        self.uniform(0.0, TAU)
    }

    fn gaussian_vec(&mut self, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |_, _| self.rng.sample::<f64, _>(StandardNormal))
    }

    fn unit_real(&mut self, n: usize) -> DVector<f64> {
        loop {
            let v = self.gaussian_vec(n);
            let nv = v.norm();
            if nv > 1e-6 {
                return v / nv;
            }
        }
    }

    fn orthonormal_real_pair(&mut self, n: usize) -> (DVector<f64>, DVector<f64>) {
        let x = self.unit_real(n);
        loop {
            let mut y = self.gaussian_vec(n);
            y -= &x * x.dot(&y);
            let ny = y.norm();
            if ny > 1e-6 {
                return (x, y / ny);
            }
        }
    }

    /// A vector with `||Z|| = 1` of the requested orbit type.
    pub fn unit_tangent(&mut self, m: usize, kind: SampleKind) -> TangentVector {
        match kind {
            SampleKind::Any => {
                self.counter += 1;
                TangentVector::from_coords(&self.unit_real(2 * m))
            }
            SampleKind::Principal => {
                self.counter += 1;
                let x = self.unit_real(m);
                let theta = self.rng.random_range(0.0..TAU);
                lift(&x, &DVector::zeros(m), 0.0, theta)
            }
            SampleKind::Isotropic => {
                self.counter += 1;
                let (x, y) = self.orthonormal_real_pair(m);
                let theta = self.rng.random_range(0.0..TAU);
                lift(&x, &y, FRAC_PI_4, theta)
            }
            SampleKind::Regular => self.regular(m).0,
        }
    }

    /// A regular unit vector together with its prescribed `t` and `theta`.
    pub fn regular(&mut self, m: usize) -> (TangentVector, f64, f64) {
        self.counter += 1;
        let (x, y) = self.orthonormal_real_pair(m);
        let t = self
            .rng
            .random_range(REGULAR_MARGIN..FRAC_PI_4 - REGULAR_MARGIN);
        let theta = self.rng.random_range(0.0..2.0 * PI);
        (lift(&x, &y, t, theta), t, theta)
    }

    /// Haar-distributed element of SO(m).
    pub fn rotation(&mut self, m: usize) -> DMatrix<f64> {
        self.counter += 1;
        let g = DMatrix::from_fn(m, m, |_, _| self.rng.sample::<f64, _>(StandardNormal));
        let qr = g.qr();
        let (mut q, r) = (qr.q(), qr.r());
        for i in 0..m {
            if r[(i, i)] < 0.0 {
                q.column_mut(i).neg_mut();
            }
        }
        if q.determinant() < 0.0 {
            q.column_mut(0).neg_mut();
        }
        q
    }

    pub fn isotropy(&mut self, m: usize) -> IsotropyRotation {
        let rot = self.rotation(m);
        let phase = self.rng.random_range(0.0..TAU);
        IsotropyRotation::new(phase, rot).expect("QR factor is orthogonal with det 1")
    }

    pub fn tangent(&mut self, m: usize) -> TangentVector {
        self.counter += 1;
        TangentVector::from_coords(&self.gaussian_vec(2 * m))
    }
}

/// `e^{i theta/2} (cos t x + i sin t y)` for real `x, y`.
fn lift(x: &DVector<f64>, y: &DVector<f64>, t: f64, theta: f64) -> TangentVector {
    let half = Complex64::from_polar(1.0, theta / 2.0);
    let (s, c) = t.sin_cos();
    let w: Vec<Complex64> = x
        .iter()
        .zip(y.iter())
        .map(|(&a, &b)| half * Complex64::new(c * a, s * b))
        .collect();
    TangentVector::from_complex(&w)
}

pub fn sample_unit_tangent(stream: &mut SampleStream, m: usize, kind: SampleKind) -> TangentVector {
    stream.unit_tangent(m, kind)
}

/// Horosphere Jacobi factor: with `sigma = sqrt(2)` every `-2` direction
/// decays like `exp(-sqrt(2) r)`.
pub fn horosphere_decay(r: f64) -> f64 {
    (-SQRT_2 * r).exp()
}
