//! The matrix Lie algebra so(2,m), its Cartan decomposition and exponential.
//!
//! Elements are stored as dense real `(m+2) x (m+2)` matrices. The
//! signature involution `s = diag(-1,-1,1,...,1)` defines both the algebra
//! (`X^t s = -s X`) and the Cartan splitting `g = k + m` into the `+1` and
//! `-1` eigenspaces of `X -> s X s`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative residual accepted when validating membership of a matrix.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Degree of the Taylor polynomial used after scaling in [`LieElement::exp`].
const EXP_TAYLOR_DEGREE: usize = 18;

/// Scaled argument bound for the Taylor stage; `0.5^19 / 19!` is far below
/// double precision.
const EXP_SCALED_NORM: f64 = 0.5;

/// The fixed matrices of the model for one dimension parameter `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Context {
    m: usize,
    s: DMatrix<f64>,
    j: DMatrix<f64>,
    a0: DMatrix<f64>,
}

impl Context {
    pub fn new(m: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::DimensionTooSmall(m));
        }
        let n = m + 2;
        let s = signature(n);
        let mut j = DMatrix::identity(n, n);
        j[(0, 0)] = 0.0;
        j[(0, 1)] = 1.0;
        j[(1, 0)] = -1.0;
        j[(1, 1)] = 0.0;
        let mut a0 = DMatrix::identity(n, n);
        a0[(1, 1)] = -1.0;
        Ok(Self { m, s, j, a0 })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Matrix size `m + 2`.
    pub fn n(&self) -> usize {
        self.m + 2
    }

    pub fn s(&self) -> &DMatrix<f64> {
        &self.s
    }

    /// Central rotation of the isotropy group; `Ad(j)` is the complex structure.
    pub fn j(&self) -> GroupElement {
        GroupElement {
            mat: self.j.clone(),
        }
    }

    /// Reflection whose adjoint action is the base conjugation `A_0`.
    pub fn a0(&self) -> &DMatrix<f64> {
        &self.a0
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            mat: DMatrix::identity(self.n(), self.n()),
        }
    }

    /// `||X^t s + s X|| / ||X||`, zero for the zero matrix.
    pub fn membership_residual(&self, x: &LieElement) -> f64 {
        let r = x.mat.transpose() * &self.s + &self.s * &x.mat;
        relative(r.norm(), x.mat.norm())
    }

    /// `||g^t s g - s|| / ||g||^2`.
    pub fn group_residual(&self, g: &GroupElement) -> f64 {
        let r = g.mat.transpose() * &self.s * &g.mat - &self.s;
        relative(r.norm(), g.mat.norm_squared())
    }

    /// Validates `mat` as an element of so(2,m).
    pub fn lie_element(&self, mat: DMatrix<f64>) -> Result<LieElement> {
        self.check_shape(&mat)?;
        check_finite(&mat, "Lie algebra element")?;
        let x = LieElement { mat };
        let residual = self.membership_residual(&x);
        if residual > MEMBERSHIP_TOL {
            return Err(Error::NotMember {
                what: "so(2,m)",
                residual,
            });
        }
        Ok(x)
    }

    /// Validates `mat` as an element of SO(2,m).
    pub fn group_element(&self, mat: DMatrix<f64>) -> Result<GroupElement> {
        self.check_shape(&mat)?;
        check_finite(&mat, "group element")?;
        let g = GroupElement { mat };
        let residual = self.group_residual(&g);
        if residual > MEMBERSHIP_TOL {
            return Err(Error::NotMember {
                what: "O(2,m)",
                residual,
            });
        }
        let det = g.mat.determinant();
        if (det - 1.0).abs() > 1e-6 {
            return Err(Error::NotMember {
                what: "SO(2,m)",
                residual: (det - 1.0).abs(),
            });
        }
        Ok(g)
    }

    /// Splits `X` into its `k` (block-diagonal) and `m` (block-off-diagonal) parts:
    /// `k = (X + sXs)/2`, `m = (X - sXs)/2`.
    pub fn cartan_split(&self, x: &LieElement) -> Result<(LieElement, LieElement)> {
        self.check_shape(&x.mat)?;
        let sxs = &self.s * &x.mat * &self.s;
        let k = (&x.mat + &sxs) * 0.5;
        let p = (&x.mat - &sxs) * 0.5;
        Ok((LieElement { mat: k }, LieElement { mat: p }))
    }

    fn check_shape(&self, mat: &DMatrix<f64>) -> Result<()> {
        let n = self.n();
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: mat.nrows().max(mat.ncols()),
            });
        }
        Ok(())
    }
}

/// An element of so(2,m).
#[derive(Debug, Clone, PartialEq)]
pub struct LieElement {
    mat: DMatrix<f64>,
}

impl LieElement {
    /// Wraps a matrix without checking the algebra condition. Callers that
    /// build elements by construction (block embeddings) use this.
    pub fn from_matrix_unchecked(mat: DMatrix<f64>) -> Self {
        Self { mat }
    }

    pub fn mat(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// `XY - YX`.
    pub fn bracket(&self, other: &LieElement) -> Result<LieElement> {
        same_dim(self.dim(), other.dim())?;
        Ok(LieElement {
            mat: &self.mat * &other.mat - &other.mat * &self.mat,
        })
    }

    pub fn scale(&self, t: f64) -> LieElement {
        LieElement { mat: &self.mat * t }
    }

    /// Matrix exponential `exp(tX)` by scaling and squaring.
    ///
    /// `tX` is scaled by `2^-s` until its 1-norm is at most 0.5, the Taylor
    /// polynomial of degree 18 is evaluated by Horner's rule, and the result
    /// is squared `s` times.
    pub fn exp(&self, t: f64) -> Result<GroupElement> {
        if !t.is_finite() {
            return Err(Error::NonFinite("exponential parameter"));
        }
        check_finite(&self.mat, "exponential argument")?;
        let a = &self.mat * t;
        let norm1 = (0..a.ncols())
            .map(|c| a.column(c).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let squarings = if norm1 > EXP_SCALED_NORM {
            (norm1 / EXP_SCALED_NORM).log2().ceil() as i32
        } else {
            0
        };
        let scaled = a * 2f64.powi(-squarings);
        let n = scaled.nrows();
        let id = DMatrix::<f64>::identity(n, n);
        let mut result = id.clone();
        for k in (1..=EXP_TAYLOR_DEGREE).rev() {
            result = &id + (&scaled * result) / k as f64;
        }
        for _ in 0..squarings {
            result = &result * &result;
        }
        check_finite(&result, "exponential")?;
        Ok(GroupElement { mat: result })
    }
}

/// An element of the transvection group SO(2,m), produced by [`LieElement::exp`]
/// or validated through [`Context::group_element`].
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    mat: DMatrix<f64>,
}

impl GroupElement {
    pub fn mat(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            mat: &self.mat * &other.mat,
        }
    }

    /// `g^-1 = s g^t s`, exact for elements of O(2,m).
    pub fn inverse(&self) -> GroupElement {
        let s = signature(self.dim());
        GroupElement {
            mat: &s * self.mat.transpose() * &s,
        }
    }

    /// `Ad(g) X = g X g^-1`.
    pub fn ad(&self, x: &LieElement) -> Result<LieElement> {
        same_dim(self.dim(), x.dim())?;
        Ok(LieElement {
            mat: &self.mat * &x.mat * self.inverse().mat,
        })
    }

    /// `g M g^-1` for an arbitrary matrix of matching size.
    pub fn conjugate(&self, mat: &DMatrix<f64>) -> DMatrix<f64> {
        &self.mat * mat * self.inverse().mat
    }
}

/// `diag(-1, -1, 1, ..., 1)` of size `n`.
pub(crate) fn signature(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| match (i == j, i < 2) {
        (true, true) => -1.0,
        (true, false) => 1.0,
        _ => 0.0,
    })
}

fn relative(residual: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        residual
    } else {
        residual / scale
    }
}

fn same_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

fn check_finite(mat: &DMatrix<f64>, what: &'static str) -> Result<()> {
    if mat.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_element(ctx: &Context, rng: &mut ChaCha8Rng) -> LieElement {
        let n = ctx.n();
        let raw = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        // Project onto so(2,m): X = (R - s R^t s) / 2.
        let mat = (&raw - ctx.s() * raw.transpose() * ctx.s()) * 0.5;
        ctx.lie_element(mat).unwrap()
    }

    #[test]
    fn context_matrices() {
        let ctx = Context::new(3).unwrap();
        assert_eq!(
            ctx.s(),
            &DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                -1.0, -1.0, 1.0, 1.0, 1.0
            ]))
        );
        assert_eq!(
            ctx.a0(),
            &DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0, 1.0, 1.0, 1.0]))
        );
        assert_eq!(ctx.s() * ctx.s(), DMatrix::identity(5, 5));
        assert_eq!(ctx.a0() * ctx.a0(), DMatrix::identity(5, 5));
        assert!(ctx.group_residual(&ctx.j()) < 1e-15);
    }

    #[test]
    fn rejects_small_m() {
        assert_eq!(Context::new(2), Err(Error::DimensionTooSmall(2)));
        assert!(Context::new(0).is_err());
    }

    #[test]
    fn rejects_non_members() {
        let ctx = Context::new(3).unwrap();
        assert!(matches!(
            ctx.lie_element(DMatrix::identity(5, 5)),
            Err(Error::NotMember { .. })
        ));
        assert!(matches!(
            ctx.lie_element(DMatrix::zeros(4, 4)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bracket_basics() {
        let ctx = Context::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_element(&ctx, &mut rng);
        let y = random_element(&ctx, &mut rng);
        let z = random_element(&ctx, &mut rng);
        assert!(x.bracket(&x).unwrap().mat().norm() < 1e-15);
        assert!(ctx.membership_residual(&x.bracket(&y).unwrap()) < 1e-12);
        let jac = x.bracket(&y.bracket(&z).unwrap()).unwrap().mat()
            + y.bracket(&z.bracket(&x).unwrap()).unwrap().mat()
            + z.bracket(&x.bracket(&y).unwrap()).unwrap().mat();
        assert!(jac.norm() < 1e-12);
        let other = Context::new(3).unwrap();
        let w = random_element(&other, &mut rng);
        assert!(x.bracket(&w).is_err());
    }

    #[test]
    fn cartan_bracket_relations() {
        let ctx = Context::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let (k1, m1) = ctx.cartan_split(&random_element(&ctx, &mut rng)).unwrap();
            let (k2, m2) = ctx.cartan_split(&random_element(&ctx, &mut rng)).unwrap();
            let m_of = |x: &LieElement| ctx.cartan_split(x).unwrap().1.mat().norm();
            let k_of = |x: &LieElement| ctx.cartan_split(x).unwrap().0.mat().norm();
            assert!(m_of(&k1.bracket(&k2).unwrap()) < 1e-12);
            assert!(k_of(&k1.bracket(&m2).unwrap()) < 1e-12);
            assert!(m_of(&m1.bracket(&m2).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn cartan_split_structure() {
        let ctx = Context::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_element(&ctx, &mut rng);
        let (k, p) = ctx.cartan_split(&x).unwrap();
        assert!((k.mat() + p.mat() - x.mat()).norm() < 1e-15);
        assert!((k.mat().transpose() * p.mat()).trace().abs() < 1e-13);
        for i in 0..7 {
            for j in 0..7 {
                if (i < 2) == (j < 2) {
                    assert_eq!(p.mat()[(i, j)], 0.0);
                } else {
                    assert_eq!(k.mat()[(i, j)], 0.0);
                }
            }
        }
        let (kk, km) = ctx.cartan_split(&k).unwrap();
        let (pk, pm) = ctx.cartan_split(&p).unwrap();
        assert_eq!(kk, k);
        assert!(km.mat().norm() == 0.0 && pk.mat().norm() == 0.0);
        assert_eq!(pm, p);
    }

    #[test]
    fn exp_group_properties() {
        let ctx = Context::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = random_element(&ctx, &mut rng);
        let id = DMatrix::<f64>::identity(5, 5);
        assert!((x.exp(0.0).unwrap().mat() - &id).norm() < 1e-15);
        let g = x.exp(1.0).unwrap();
        assert!(ctx.group_residual(&g) < 1e-10);
        assert!((g.mat() * x.exp(-1.0).unwrap().mat() - &id).norm() < 1e-10);
        for &(a, b) in &[(0.3, 1.1), (-2.0, 1.5), (2.0, 2.0), (-0.7, -1.9)] {
            let lhs = x.exp(a).unwrap().mul(&x.exp(b).unwrap());
            let rhs = x.exp(a + b).unwrap();
            assert!((lhs.mat() - rhs.mat()).norm() / rhs.mat().norm() < 1e-10);
        }
        assert!(x.exp(f64::NAN).is_err());
    }

    #[test]
    fn exp_matches_closed_form_boost() {
        // A pure boost in the (0, 2) plane: exp = cosh/sinh block.
        let ctx = Context::new(3).unwrap();
        let mut mat = DMatrix::zeros(5, 5);
        mat[(0, 2)] = 1.0;
        mat[(2, 0)] = 1.0;
        let x = ctx.lie_element(mat).unwrap();
        for &t in &[0.1, 1.0, 4.0, 8.0] {
            let g = x.exp(t).unwrap();
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
            assert!(rel(g.mat()[(0, 0)], t.cosh()) < 1e-12);
            assert!(rel(g.mat()[(0, 2)], t.sinh()) < 1e-12);
            assert!(rel(g.mat()[(2, 2)], t.cosh()) < 1e-12);
        }
    }

    #[test]
    fn ad_properties() {
        let ctx = Context::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_element(&ctx, &mut rng);
        assert!((ctx.identity().ad(&x).unwrap().mat() - x.mat()).norm() < 1e-15);
        let j = ctx.j();
        let back = j.ad(&j.inverse().ad(&x).unwrap()).unwrap();
        assert!((back.mat() - x.mat()).norm() < 1e-14);

        // A rotation in the SO(m) block keeps the m-part in m.
        let (_, p) = ctx.cartan_split(&x).unwrap();
        let mut rot = DMatrix::identity(6, 6);
        let (c, s) = (0.4f64.cos(), 0.4f64.sin());
        rot[(3, 3)] = c;
        rot[(3, 4)] = -s;
        rot[(4, 3)] = s;
        rot[(4, 4)] = c;
        let g = ctx.group_element(rot).unwrap();
        let moved = g.ad(&p).unwrap();
        assert!(ctx.cartan_split(&moved).unwrap().0.mat().norm() < 1e-14);
        let y = random_element(&ctx, &mut rng);
        let g = y.exp(0.8).unwrap();
        assert!(ctx.membership_residual(&g.ad(&x).unwrap()) < 1e-10);
    }
}
