//! Geometry of the complex hyperbolic quadric at the origin.
//!
//! The tangent space at `p0 = eK` is the `m`-part of so(2,m), i.e. the
//! symmetric block matrices `[[0, X12], [X12^t, 0]]`. A [`TangentVector`]
//! stores a real `2 x m` block `B` and is embedded as `X12 = sqrt(2) B`; with
//! that scale the metric is the Euclidean product of blocks and the nine-term
//! curvature formula coincides with `-[[X, Y], Z]`.
//!
//! The complex view of a block is `w = row1 + IMAG_ROW_SIGN * i * row2`, the
//! orientation for which `Ad(j)` acts as multiplication by `i`.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lie::{signature, Context, GroupElement, LieElement};

/// Sign of the second block row in the complex view.
pub const IMAG_ROW_SIGN: f64 = -1.0;

/// Scale between a tangent block and the `X12` block of its embedding.
pub const EMBED_SCALE: f64 = SQRT_2;

/// `t` threshold separating principal / isotropic vectors from regular ones.
pub const SINGULAR_T_TOL: f64 = 1e-8;

/// Below this `|sum w_k^2|` the conjugation angle is undetermined.
pub const ISOTROPIC_Q_TOL: f64 = 1e-10;

/// Accepted deviation from unit length for inputs that must be unit vectors.
pub const UNIT_TOL: f64 = 1e-10;

/// A tangent vector at the origin, stored as the real `2 x m` block.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    block: DMatrix<f64>,
}

impl TangentVector {
    pub fn zeros(m: usize) -> Self {
        Self {
            block: DMatrix::zeros(2, m),
        }
    }

    pub fn from_block(block: DMatrix<f64>) -> Result<Self> {
        if block.nrows() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: block.nrows(),
            });
        }
        Ok(Self { block })
    }

    /// Builds the vector whose complex view is `w`.
    pub fn from_complex(w: &[Complex64]) -> Self {
        let m = w.len();
        let block = DMatrix::from_fn(2, m, |r, c| {
            if r == 0 {
                w[c].re
            } else {
                IMAG_ROW_SIGN * w[c].im
            }
        });
        Self { block }
    }

    /// Real coordinates `(row1, row2)` of length `2m`.
    pub fn from_coords(coords: &DVector<f64>) -> Self {
        let m = coords.len() / 2;
        Self {
            block: DMatrix::from_fn(2, m, |r, c| coords[r * m + c]),
        }
    }

    /// The real unit vector `e_k` (complex view), `k` zero-based.
    pub fn basis(m: usize, k: usize) -> Self {
        let mut block = DMatrix::zeros(2, m);
        block[(0, k)] = 1.0;
        Self { block }
    }

    pub fn m(&self) -> usize {
        self.block.ncols()
    }

    pub fn block(&self) -> &DMatrix<f64> {
        &self.block
    }

    pub fn coords(&self) -> DVector<f64> {
        let m = self.m();
        DVector::from_fn(2 * m, |i, _| self.block[(i / m, i % m)])
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        (0..self.m())
            .map(|c| Complex64::new(self.block[(0, c)], IMAG_ROW_SIGN * self.block[(1, c)]))
            .collect()
    }

    /// Inner product; panics if the dimensions differ.
    pub fn dot(&self, other: &TangentVector) -> f64 {
        self.block.dot(&other.block)
    }

    pub fn norm(&self) -> f64 {
        self.block.norm()
    }

    pub fn normalized(&self) -> TangentVector {
        Self {
            block: &self.block / self.norm(),
        }
    }

    /// Complex structure `J = Ad(j)` restricted to the tangent space.
    pub fn j(&self) -> TangentVector {
        let m = self.m();
        let block = DMatrix::from_fn(2, m, |r, c| {
            if r == 0 {
                self.block[(1, c)]
            } else {
                -self.block[(0, c)]
            }
        });
        Self { block }
    }

    /// Multiplication by a complex scalar in the complex view.
    pub fn mul_complex(&self, z: Complex64) -> TangentVector {
        &(self * z.re) + &(&self.j() * z.im)
    }

    /// The symmetric embedding into so(2,m) with `X12 = sqrt(2) * block`.
    pub fn to_lie(&self) -> LieElement {
        let m = self.m();
        let n = m + 2;
        let mut mat = DMatrix::zeros(n, n);
        for r in 0..2 {
            for c in 0..m {
                let v = EMBED_SCALE * self.block[(r, c)];
                mat[(r, c + 2)] = v;
                mat[(c + 2, r)] = v;
            }
        }
        LieElement::from_matrix_unchecked(mat)
    }

    /// Reads back the `X12` block of an element of the `m`-part.
    pub fn from_lie(x: &LieElement) -> Result<TangentVector> {
        let n = x.dim();
        if n < 5 {
            return Err(Error::DimensionTooSmall(n.saturating_sub(2)));
        }
        let m = n - 2;
        let mat = x.mat();
        let block = DMatrix::from_fn(2, m, |r, c| mat[(r, c + 2)] / EMBED_SCALE);
        Ok(Self { block })
    }

    fn same_dim(&self, other: &TangentVector) -> Result<()> {
        if self.m() != other.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                got: other.m(),
            });
        }
        Ok(())
    }
}

impl Add for &TangentVector {
    type Output = TangentVector;
    fn add(self, rhs: &TangentVector) -> TangentVector {
        TangentVector {
            block: &self.block + &rhs.block,
        }
    }
}

impl Sub for &TangentVector {
    type Output = TangentVector;
    fn sub(self, rhs: &TangentVector) -> TangentVector {
        TangentVector {
            block: &self.block - &rhs.block,
        }
    }
}

impl Mul<f64> for &TangentVector {
    type Output = TangentVector;
    fn mul(self, rhs: f64) -> TangentVector {
        TangentVector {
            block: &self.block * rhs,
        }
    }
}

impl Neg for &TangentVector {
    type Output = TangentVector;
    fn neg(self) -> TangentVector {
        TangentVector {
            block: -&self.block,
        }
    }
}

/// `g(X, Y) = tr(Y12^t X12)` on blocks.
pub fn metric(x: &TangentVector, y: &TangentVector) -> Result<f64> {
    x.same_dim(y)?;
    Ok(x.dot(y))
}

pub fn complex_structure(x: &TangentVector) -> TangentVector {
    x.j()
}

/// A member `A_theta: w -> e^{i theta} conj(w)` of the circle of conjugations
/// at the origin. `theta = 0` is `Ad(a0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conjugation {
    theta: f64,
}

impl Conjugation {
    pub fn new(theta: f64) -> Self {
        Self {
            theta: theta.rem_euclid(2.0 * PI),
        }
    }

    pub fn base() -> Self {
        Self { theta: 0.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `-A`, whose `+1` eigenspace is `JV(A)`.
    pub fn negated(&self) -> Self {
        Self::new(self.theta + PI)
    }

    pub fn apply(&self, x: &TangentVector) -> TangentVector {
        // conj(w) has real part row1 and imaginary part -IMAG_ROW_SIGN * row2.
        let (s, c) = self.theta.sin_cos();
        let b = x.block();
        let m = x.m();
        let block = DMatrix::from_fn(2, m, |r, k| {
            let re = b[(0, k)];
            let im = -IMAG_ROW_SIGN * b[(1, k)];
            if r == 0 {
                c * re - s * im
            } else {
                IMAG_ROW_SIGN * (s * re + c * im)
            }
        });
        TangentVector { block }
    }

    /// The involutive matrix `c` in O(2,m) with `c X c = A X` on the tangent
    /// space: `a0` conjugated by the isotropy phase `theta / 2`.
    pub fn matrix(&self, ctx: &Context) -> Result<DMatrix<f64>> {
        let m = ctx.m();
        let k =
            IsotropyRotation::new(self.theta / 2.0, DMatrix::identity(m, m))?.group_element(ctx)?;
        Ok(k.conjugate(ctx.a0()))
    }
}

pub fn conjugation_apply(a: &Conjugation, x: &TangentVector) -> TangentVector {
    a.apply(x)
}

/// Orthonormal bases of `V(A)` (fixed vectors) and `JV(A)`, both of size `m`.
pub fn v_space_basis(a: &Conjugation, m: usize) -> (Vec<TangentVector>, Vec<TangentVector>) {
    let half = Complex64::from_polar(1.0, a.theta() / 2.0);
    let v: Vec<_> = (0..m)
        .map(|k| TangentVector::basis(m, k).mul_complex(half))
        .collect();
    let jv = v.iter().map(|x| x.j()).collect();
    (v, jv)
}

/// Curvature tensor `R(X, Y) Z` from the metric, `J` and the base conjugation.
pub fn curvature(x: &TangentVector, y: &TangentVector, z: &TangentVector) -> TangentVector {
    curvature_with(&Conjugation::base(), x, y, z)
}

/// The nine-term curvature formula evaluated with an explicit conjugation.
/// The result does not depend on the choice of `a`.
pub fn curvature_with(
    a: &Conjugation,
    x: &TangentVector,
    y: &TangentVector,
    z: &TangentVector,
) -> TangentVector {
    let g = |u: &TangentVector, v: &TangentVector| u.dot(v);
    let (jx, jy, jz) = (x.j(), y.j(), z.j());
    let (ax, ay) = (a.apply(x), a.apply(y));
    let (jax, jay) = (ax.j(), ay.j());
    let terms: [(f64, &TangentVector); 9] = [
        (-g(y, z), x),
        (g(x, z), y),
        (-g(&jy, z), &jx),
        (g(&jx, z), &jy),
        (2.0 * g(&jx, y), &jz),
        (-g(&ay, z), &ax),
        (g(&ax, z), &ay),
        (-g(&jay, z), &jax),
        (g(&jax, z), &jay),
    ];
    let mut block = DMatrix::zeros(2, x.m());
    for (c, v) in terms {
        block += v.block() * c;
    }
    TangentVector { block }
}

/// `-[[X, Y], Z]` computed on the so(2,m) embeddings.
pub fn curvature_oracle(
    x: &TangentVector,
    y: &TangentVector,
    z: &TangentVector,
) -> Result<TangentVector> {
    x.same_dim(y)?;
    x.same_dim(z)?;
    let inner = x.to_lie().bracket(&y.to_lie())?;
    let outer = inner.bracket(&z.to_lie())?;
    TangentVector::from_lie(&outer.scale(-1.0))
}

/// `sum_k w_k^2`, the complex bilinear square of the complex view.
pub fn bilinear_square(z: &TangentVector) -> Complex64 {
    z.to_complex().iter().map(|w| w * w).sum()
}

/// Orbit type of a unit tangent vector under the isotropy action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VectorKind {
    Principal,
    Isotropic,
    Regular(f64),
}

impl VectorKind {
    pub fn label(&self) -> &'static str {
        match self {
            VectorKind::Principal => "Principal",
            VectorKind::Isotropic => "Isotropic",
            VectorKind::Regular(_) => "Regular",
        }
    }

    fn from_t(t: f64) -> Self {
        if t <= SINGULAR_T_TOL {
            VectorKind::Principal
        } else if (t - FRAC_PI_4).abs() <= SINGULAR_T_TOL {
            VectorKind::Isotropic
        } else {
            VectorKind::Regular(t)
        }
    }
}

/// `Z = cos(t) X + sin(t) J Y` with `X, Y` orthonormal in `V(A_theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularDecomposition {
    pub t: f64,
    pub theta: f64,
    pub x: TangentVector,
    pub y: TangentVector,
    pub kind: VectorKind,
    /// False when `sum w_k^2` vanished and `theta = 0` was chosen by convention.
    pub theta_determined: bool,
    /// False when `Y` was completed by Gram-Schmidt because `sin(t)` vanished.
    pub y_determined: bool,
}

impl SingularDecomposition {
    pub fn conjugation(&self) -> Conjugation {
        Conjugation::new(self.theta)
    }

    pub fn reconstruct(&self) -> TangentVector {
        let (s, c) = self.t.sin_cos();
        &(&self.x * c) + &(&self.y.j() * s)
    }
}

/// Decomposes a unit vector as `cos(t) X + sin(t) J Y`.
///
/// With `q = sum w_k^2 = e^{i theta} cos(2t)`, `theta = arg q` and the
/// rotated vector `u = e^{-i theta/2} w` has real part `cos(t) x` and
/// imaginary part `sin(t) y` for real orthonormal `x, y`.
pub fn singular_decompose(z: &TangentVector) -> Result<SingularDecomposition> {
    check_unit(z)?;
    let m = z.m();
    let q = bilinear_square(z);
    let (theta, theta_determined) = if q.norm() > ISOTROPIC_Q_TOL {
        (q.arg().rem_euclid(2.0 * PI), true)
    } else {
        (0.0, false)
    };
    let half = Complex64::from_polar(1.0, theta / 2.0);
    let u: Vec<Complex64> = z.to_complex().iter().map(|w| w * half.conj()).collect();
    let re = DVector::from_iterator(m, u.iter().map(|w| w.re));
    let mut im = DVector::from_iterator(m, u.iter().map(|w| w.im));
    let t = im.norm().atan2(re.norm()).min(FRAC_PI_4);
    let xr = &re / re.norm();
    im -= &xr * xr.dot(&im);
    let (yr, y_determined) = if im.norm() > 1e-12 {
        (&im / im.norm(), true)
    } else {
        (real_completion(&xr), false)
    };
    let lift = |v: &DVector<f64>| {
        let w: Vec<Complex64> = v.iter().map(|&c| half * c).collect();
        TangentVector::from_complex(&w)
    };
    Ok(SingularDecomposition {
        t,
        theta,
        x: lift(&xr),
        y: lift(&yr),
        kind: VectorKind::from_t(t),
        theta_determined,
        y_determined,
    })
}

pub fn classify_vector(z: &TangentVector) -> Result<VectorKind> {
    Ok(singular_decompose(z)?.kind)
}

/// First standard basis vector not parallel to `x`, orthonormalized against it.
fn real_completion(x: &DVector<f64>) -> DVector<f64> {
    let m = x.len();
    for k in 0..m {
        let mut e = DVector::zeros(m);
        e[k] = 1.0;
        e -= x * x.dot(&e);
        let n = e.norm();
        if n > 0.5 {
            return e / n;
        }
    }
    unreachable!("some basis vector is at least 1/sqrt(m) away from a line");
}

pub(crate) fn check_unit(z: &TangentVector) -> Result<()> {
    let n = z.norm();
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit(n));
    }
    Ok(())
}

/// Orthonormal basis of the orthogonal complement of `span(vectors)`.
pub fn orthonormal_complement(vectors: &[TangentVector], m: usize) -> Vec<TangentVector> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        let mut c = v.coords();
        for b in &basis {
            c -= b * b.dot(&c);
        }
        let n = c.norm();
        if n > 1e-10 {
            basis.push(c / n);
        }
    }
    let start = basis.len();
    for k in 0..2 * m {
        let mut c = DVector::zeros(2 * m);
        c[k] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                c -= b * b.dot(&c);
            }
        }
        let n = c.norm();
        if n > 1e-6 {
            basis.push(c / n);
        }
    }
    basis[start..]
        .iter()
        .map(TangentVector::from_coords)
        .collect()
}

/// An element of the isotropy group acting as `w -> e^{i phase} R w` with
/// `R` in SO(m).
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropyRotation {
    phase: f64,
    rotation: DMatrix<f64>,
}

impl IsotropyRotation {
    pub fn new(phase: f64, rotation: DMatrix<f64>) -> Result<Self> {
        let m = rotation.nrows();
        if rotation.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: rotation.ncols(),
            });
        }
        let residual = (rotation.transpose() * &rotation - DMatrix::identity(m, m)).norm();
        if residual > 1e-10 || (rotation.determinant() - 1.0).abs() > 1e-8 {
            return Err(Error::NotMember {
                what: "SO(m)",
                residual,
            });
        }
        Ok(Self { phase, rotation })
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn rotation(&self) -> &DMatrix<f64> {
        &self.rotation
    }

    pub fn apply(&self, x: &TangentVector) -> TangentVector {
        let rotated = TangentVector {
            block: x.block() * self.rotation.transpose(),
        };
        rotated.mul_complex(Complex64::from_polar(1.0, self.phase))
    }

    /// The transported conjugation `g A g^-1`.
    pub fn conjugation(&self, a: &Conjugation) -> Conjugation {
        Conjugation::new(a.theta() + 2.0 * self.phase)
    }

    /// The matrix `diag(rot(-phase), R)` of the isotropy group.
    pub fn group_element(&self, ctx: &Context) -> Result<GroupElement> {
        let m = self.rotation.nrows();
        if m != ctx.m() {
            return Err(Error::DimensionMismatch {
                expected: ctx.m(),
                got: m,
            });
        }
        let n = m + 2;
        let (s, c) = (-self.phase).sin_cos();
        let mut mat = DMatrix::zeros(n, n);
        mat[(0, 0)] = c;
        mat[(0, 1)] = -s;
        mat[(1, 0)] = s;
        mat[(1, 1)] = c;
        mat.view_mut((2, 2), (m, m)).copy_from(&self.rotation);
        ctx.group_element(mat)
    }
}

/// A point represented through the Cartan embedding `gK -> g s g^-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    cartan_mat: DMatrix<f64>,
}

impl Point {
    pub fn origin(m: usize) -> Self {
        Self {
            cartan_mat: signature(m + 2),
        }
    }

    pub fn from_group(g: &GroupElement) -> Self {
        Self {
            cartan_mat: g.conjugate(&signature(g.dim())),
        }
    }

    pub fn cartan_mat(&self) -> &DMatrix<f64> {
        &self.cartan_mat
    }

    /// `||P^2 - I||`.
    pub fn involution_residual(&self) -> f64 {
        let n = self.cartan_mat.nrows();
        (&self.cartan_mat * &self.cartan_mat - DMatrix::identity(n, n)).norm()
    }

    pub fn distance_to(&self, other: &Point) -> f64 {
        (&self.cartan_mat - &other.cartan_mat).norm()
    }
}

/// `gamma(t) = exp(tX) p0` in the Cartan embedding.
pub fn geodesic_point(x: &TangentVector, t: f64) -> Result<Point> {
    let g = x.to_lie().exp(t)?;
    Ok(Point::from_group(&g))
}

/// Parallel transport along `gamma(t) = exp(tX) p0`, realized by the
/// transvection `exp(tX)`.
///
/// Tangent vectors at `gamma(t)` are represented in `Ad(g) m`, where the
/// `Ad`-invariant form `tr(VW)/4` is the metric and `Ad(g j g^-1)` the complex
/// structure.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelTransport {
    g: GroupElement,
    m: usize,
}

impl ParallelTransport {
    pub fn group(&self) -> &GroupElement {
        &self.g
    }

    pub fn endpoint(&self) -> Point {
        Point::from_group(&self.g)
    }

    pub fn apply(&self, v: &TangentVector) -> LieElement {
        self.g
            .ad(&v.to_lie())
            .expect("dimensions fixed at construction")
    }

    pub fn pull_back(&self, w: &LieElement) -> Result<TangentVector> {
        TangentVector::from_lie(&self.g.inverse().ad(w)?)
    }

    /// Transport expressed in origin coordinates (`2m x 2m`).
    pub fn matrix(&self) -> DMatrix<f64> {
        let dim = 2 * self.m;
        let mut out = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            let mut e = DVector::zeros(dim);
            e[k] = 1.0;
            let back = self
                .pull_back(&self.apply(&TangentVector::from_coords(&e)))
                .expect("same dimensions");
            out.set_column(k, &back.coords());
        }
        out
    }

    pub fn metric_at(&self, v: &LieElement, w: &LieElement) -> f64 {
        (v.mat() * w.mat()).trace() / 4.0
    }

    pub fn complex_structure_at(&self, ctx: &Context, v: &LieElement) -> LieElement {
        let jp = self.g.conjugate(ctx.j().mat());
        let jp_inv = self.g.conjugate(ctx.j().inverse().mat());
        LieElement::from_matrix_unchecked(&jp * v.mat() * jp_inv)
    }
}

pub fn transport_frame(x: &TangentVector, t: f64) -> Result<ParallelTransport> {
    let g = x.to_lie().exp(t)?;
    Ok(ParallelTransport { g, m: x.m() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(m: usize, rng: &mut ChaCha8Rng) -> TangentVector {
        TangentVector::from_block(DMatrix::from_fn(2, m, |_, _| rng.random_range(-1.0..1.0)))
            .unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn metric_examples() {
        let e1 = TangentVector::basis(3, 0);
        assert_eq!(metric(&e1, &e1).unwrap(), 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = random(4, &mut rng);
        let y = random(4, &mut rng);
        assert!(metric(&x, &x.j()).unwrap().abs() < 1e-15);
        // Quarter trace of the embeddings.
        let emb = (y.to_lie().mat().transpose() * x.to_lie().mat()).trace() / 4.0;
        assert!((metric(&x, &y).unwrap() - emb).abs() < 1e-13);
        // Real part of the Hermitian product.
        let herm: f64 = x
            .to_complex()
            .iter()
            .zip(y.to_complex())
            .map(|(a, b)| (a * b.conj()).re)
            .sum();
        assert!((metric(&x, &y).unwrap() - herm).abs() < 1e-13);
        assert!(metric(&x, &TangentVector::zeros(3)).is_err());
    }

    #[test]
    fn complex_structure_is_ad_j() {
        let ctx = Context::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let x = random(3, &mut rng);
        let via_ad = TangentVector::from_lie(&ctx.j().ad(&x.to_lie()).unwrap()).unwrap();
        assert!((&via_ad - &x.j()).norm() < 1e-15);
        assert!((&x.j().j() + &x).norm() < 1e-15);
        // Multiplication by i on the complex view.
        let w = x.to_complex();
        for (a, b) in x.j().to_complex().iter().zip(&w) {
            assert!((a - c(0.0, 1.0) * b).norm() < 1e-15);
        }
        // e1 -> i e1 sits in the second block row with sign IMAG_ROW_SIGN.
        let je1 = TangentVector::basis(3, 0).j();
        assert_eq!(je1.block()[(0, 0)], 0.0);
        assert_eq!(je1.block()[(1, 0)], IMAG_ROW_SIGN);
        let y = random(3, &mut rng);
        assert!((x.j().dot(&y.j()) - x.dot(&y)).abs() < 1e-15);
    }

    #[test]
    fn conjugation_properties() {
        let ctx = Context::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let x = random(4, &mut rng);
        let y = random(4, &mut rng);
        let a0 = Conjugation::base();
        let via_ad = TangentVector::from_lie(&LieElement::from_matrix_unchecked(
            ctx.a0() * x.to_lie().mat() * ctx.a0(),
        ))
        .unwrap();
        assert!((&via_ad - &a0.apply(&x)).norm() < 1e-15);
        let real =
            TangentVector::from_complex(&[c(0.3, 0.0), c(-1.0, 0.0), c(0.2, 0.0), c(0.5, 0.0)]);
        assert_eq!(a0.apply(&real), real);
        for k in 0..8 {
            let a = Conjugation::new(0.8 * k as f64);
            assert!((&a.apply(&a.apply(&x)) - &x).norm() < 1e-14);
            assert!((&a.apply(&x.j()) + &a.apply(&x).j()).norm() < 1e-14);
            assert!((a.apply(&x).dot(&a.apply(&y)) - x.dot(&y)).abs() < 1e-14);
            let expect: Vec<_> = x
                .to_complex()
                .iter()
                .map(|w| Complex64::from_polar(1.0, a.theta()) * w.conj())
                .collect();
            assert!((&TangentVector::from_complex(&expect) - &a.apply(&x)).norm() < 1e-14);
            let c = a.matrix(&ctx).unwrap();
            assert!((&c * &c - DMatrix::<f64>::identity(6, 6)).norm() < 1e-14);
            let via_group = TangentVector::from_lie(&LieElement::from_matrix_unchecked(
                &c * x.to_lie().mat() * &c,
            ))
            .unwrap();
            assert!((&via_group - &a.apply(&x)).norm() < 1e-14);
        }
    }

    #[test]
    fn v_spaces() {
        for m in 3..=5 {
            for &theta in &[0.0, 1.0, 2.5, 5.9] {
                let a = Conjugation::new(theta);
                let (v, jv) = v_space_basis(&a, m);
                assert_eq!(v.len(), m);
                assert_eq!(jv.len(), m);
                let all: Vec<_> = v.iter().chain(&jv).collect();
                for (i, p) in all.iter().enumerate() {
                    for (j, q) in all.iter().enumerate() {
                        let expect = if i == j { 1.0 } else { 0.0 };
                        assert!((p.dot(q) - expect).abs() < 1e-14);
                    }
                }
                for u in &v {
                    assert!((&a.apply(u) - u).norm() < 1e-14);
                }
                for u in &jv {
                    assert!((&a.apply(u) + u).norm() < 1e-14);
                }
            }
        }
        let (v, jv) = v_space_basis(&Conjugation::base(), 3);
        assert_eq!(v[1], TangentVector::basis(3, 1));
        assert_eq!(jv[1], TangentVector::basis(3, 1).j());
    }

    #[test]
    fn curvature_matches_bracket() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for m in 3..=5 {
            for _ in 0..50 {
                let (x, y, z) = (
                    random(m, &mut rng),
                    random(m, &mut rng),
                    random(m, &mut rng),
                );
                let r = curvature(&x, &y, &z);
                let o = curvature_oracle(&x, &y, &z).unwrap();
                assert!((&r - &o).norm() < 1e-12);
                let r2 = curvature_with(&Conjugation::new(2.2), &x, &y, &z);
                assert!((&r - &r2).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn curvature_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let (x, y, z, w) = (
            random(3, &mut rng),
            random(3, &mut rng),
            random(3, &mut rng),
            random(3, &mut rng),
        );
        assert!(curvature(&x, &x, &z).norm() < 1e-14);
        assert!(curvature_oracle(&x, &x, &z).unwrap().norm() < 1e-14);
        assert!((&curvature(&x, &y, &z) + &curvature(&y, &x, &z)).norm() < 1e-13);
        assert!((curvature(&x, &y, &z).dot(&w) + curvature(&x, &y, &w).dot(&z)).abs() < 1e-13);
        let bianchi = &(&curvature(&x, &y, &z) + &curvature(&y, &z, &x)) + &curvature(&z, &x, &y);
        assert!(bianchi.norm() < 1e-13);
    }

    #[test]
    fn holomorphic_sectional_curvature_of_principal_vector() {
        let x = TangentVector::basis(4, 2);
        let jx = x.j();
        assert!((curvature(&x, &jx, &jx).dot(&x) + 2.0).abs() < 1e-14);
        assert!((curvature_oracle(&x, &jx, &jx).unwrap().dot(&x) + 2.0).abs() < 1e-14);
    }

    #[test]
    fn singular_decomposition_examples() {
        let e1 = TangentVector::basis(3, 0);
        let d = singular_decompose(&e1).unwrap();
        assert_eq!(d.kind, VectorKind::Principal);
        assert_eq!(d.t, 0.0);
        assert!(!d.y_determined);
        assert!(d.x.dot(&d.y).abs() < 1e-15);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let iso = TangentVector::from_complex(&[c(h, 0.0), c(0.0, h), c(0.0, 0.0)]);
        assert!(bilinear_square(&iso).norm() < 1e-15);
        let d = singular_decompose(&iso).unwrap();
        assert_eq!(d.kind, VectorKind::Isotropic);
        assert!(!d.theta_determined);
        assert!((&d.reconstruct() - &iso).norm() < 1e-15);

        let t = 0.3f64;
        let reg = TangentVector::from_complex(&[c(t.cos(), 0.0), c(0.0, t.sin()), c(0.0, 0.0)]);
        assert!((bilinear_square(&reg) - c(0.6f64.cos(), 0.0)).norm() < 1e-15);
        let d = singular_decompose(&reg).unwrap();
        assert!((d.t - 0.3).abs() < 1e-14);
        assert!(d.theta.abs() < 1e-14);
        assert!(matches!(d.kind, VectorKind::Regular(v) if (v - 0.3).abs() < 1e-14));
        assert!((&d.reconstruct() - &reg).norm() < 1e-15);

        assert_eq!(classify_vector(&e1).unwrap(), VectorKind::Principal);
        assert!(matches!(
            singular_decompose(&(&e1 * 2.0)),
            Err(Error::NotUnit(_))
        ));
    }

    #[test]
    fn decomposition_of_rotated_regular_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..50 {
            let z = random(5, &mut rng).normalized();
            let d = singular_decompose(&z).unwrap();
            assert!((&d.reconstruct() - &z).norm() < 1e-12);
            let a = d.conjugation();
            assert!((&a.apply(&d.x) - &d.x).norm() < 1e-12);
            assert!((&a.apply(&d.y) - &d.y).norm() < 1e-12);
            assert!((d.x.norm() - 1.0).abs() < 1e-12 && (d.y.norm() - 1.0).abs() < 1e-12);
            assert!(d.x.dot(&d.y).abs() < 1e-12);
            assert!((bilinear_square(&z).norm() - (2.0 * d.t).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn isotropy_rotation_matches_adjoint() {
        let ctx = Context::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let (s, c) = 0.7f64.sin_cos();
        let rot = DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
        let k = IsotropyRotation::new(0.45, rot).unwrap();
        let g = k.group_element(&ctx).unwrap();
        let x = random(3, &mut rng);
        let via_ad = TangentVector::from_lie(&g.ad(&x.to_lie()).unwrap()).unwrap();
        assert!((&via_ad - &k.apply(&x)).norm() < 1e-14);
        let a = Conjugation::new(1.3);
        let moved = k.conjugation(&a);
        // g A g^-1 x == moved(x)
        let lhs = k.apply(
            &a.apply(&TangentVector::from_lie(&g.inverse().ad(&x.to_lie()).unwrap()).unwrap()),
        );
        assert!((&lhs - &moved.apply(&x)).norm() < 1e-14);
        assert!(IsotropyRotation::new(0.0, DMatrix::from_diagonal_element(3, 3, 2.0)).is_err());
    }

    #[test]
    fn geodesic_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let x = random(3, &mut rng);
        assert_eq!(geodesic_point(&x, 0.0).unwrap(), Point::origin(3));
        let p = geodesic_point(&x, 1.3).unwrap();
        assert!(p.involution_residual() < 1e-10);
        let (a, b) = (0.6, 0.9);
        let ga = x.to_lie().exp(a).unwrap();
        let rebased = Point {
            cartan_mat: ga.conjugate(geodesic_point(&x, b).unwrap().cartan_mat()),
        };
        let direct = geodesic_point(&x, a + b).unwrap();
        assert!(rebased.distance_to(&direct) / direct.cartan_mat().norm() < 1e-12);
    }

    #[test]
    fn transport_frames() {
        let ctx = Context::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let x = random(3, &mut rng);
        let id = transport_frame(&x, 0.0).unwrap();
        assert!((id.matrix() - DMatrix::<f64>::identity(6, 6)).norm() < 1e-15);
        let tr = transport_frame(&x, 1.2).unwrap();
        assert!((tr.matrix() - DMatrix::<f64>::identity(6, 6)).norm() < 1e-10);
        for _ in 0..10 {
            let (u, v) = (random(3, &mut rng), random(3, &mut rng));
            let (tu, tv) = (tr.apply(&u), tr.apply(&v));
            assert!((tr.metric_at(&tu, &tv) - u.dot(&v)).abs() < 1e-12);
            let jt = tr.complex_structure_at(&ctx, &tu);
            let tj = tr.apply(&u.j());
            assert!((jt.mat() - tj.mat()).norm() / tj.mat().norm() < 1e-12);
        }
    }
}
