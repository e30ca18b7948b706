//! Numerical geometry of the complex hyperbolic quadric `SO(2,m)/SO(2)SO(m)`
//! and its contact hypersurfaces.
//!
//! Everything is pointwise: the quadric is homogeneous, so curvature,
//! conjugations and hypersurface frames are evaluated at the origin and moved
//! around with isotropy rotations and transvections.

pub mod error;
pub mod hypersurface;
pub mod lie;
pub mod models;
pub mod oracles;
pub mod quadric;
pub mod report;
pub mod suites;

pub use error::{Error, Result};
pub use hypersurface::{AlmostContact, HypersurfaceFrame, QSubspace};
pub use lie::{Context, GroupElement, LieElement};
pub use models::{
    CaseId, ClassificationCase, EigenLabel, FocalModel, JacobiEigencase, PrincipalCurvatureTable,
};
pub use oracles::{OdeConfig, SampleKind, SampleStream};
pub use quadric::{
    Conjugation, IsotropyRotation, Point, SingularDecomposition, TangentVector, VectorKind,
};
pub use report::{Check, Report};
pub use suites::{run_suite, Suite, SuiteConfig};
