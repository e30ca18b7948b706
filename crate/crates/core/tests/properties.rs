//! Property tests over arbitrary (not sampled) inputs.

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use hyperquadric::models::{classify, tube_contact_constant, tube_table};
use hyperquadric::quadric::{bilinear_square, curvature, singular_decompose};
use hyperquadric::{Conjugation, FocalModel, IsotropyRotation, TangentVector, VectorKind};

fn tangent(m: usize) -> impl Strategy<Value = TangentVector> {
    prop::collection::vec(-3.0f64..3.0, 2 * m)
        .prop_map(move |v| TangentVector::from_block(DMatrix::from_row_slice(2, m, &v)).unwrap())
}

fn unit(m: usize) -> impl Strategy<Value = TangentVector> {
    tangent(m)
        .prop_filter("nonzero", |v| v.norm() > 1e-3)
        .prop_map(|v| v.normalized())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn curvature_is_antisymmetric_and_j_invariant(x in tangent(4), y in tangent(4), z in tangent(4)) {
        let r = curvature(&x, &y, &z);
        prop_assert!((&r + &curvature(&y, &x, &z)).norm() <= 1e-10);
        // Kaehler: R(X, Y) commutes with J.
        prop_assert!((&curvature(&x, &y, &z.j()) - &r.j()).norm() <= 1e-10);
    }

    #[test]
    fn conjugations_are_antilinear_involutions(x in tangent(3), theta in 0.0f64..6.3) {
        let a = Conjugation::new(theta);
        prop_assert!((&a.apply(&a.apply(&x)) - &x).norm() <= 1e-12);
        prop_assert!((&a.apply(&x.j()) + &a.apply(&x).j()).norm() <= 1e-12);
    }

    #[test]
    fn decomposition_reconstructs(z in unit(5)) {
        let d = singular_decompose(&z).unwrap();
        prop_assert!((&d.reconstruct() - &z).norm() <= 1e-10);
        prop_assert!(d.t >= 0.0 && d.t <= FRAC_PI_4 + 1e-15);
        prop_assert!((bilinear_square(&z).norm() - (2.0 * d.t).cos()).abs() <= 1e-14);
    }

    #[test]
    fn isotropy_preserves_decomposition_parameter(z in unit(3), phase in -3.0f64..3.0, angle in -3.0f64..3.0) {
        let (c, s) = (angle.cos(), angle.sin());
        let rot = DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
        let k = IsotropyRotation::new(phase, rot).unwrap();
        let (a, b) = (singular_decompose(&z).unwrap(), singular_decompose(&k.apply(&z)).unwrap());
        prop_assert!((a.t - b.t).abs() <= 1e-7);
    }

    #[test]
    fn real_multiples_of_phases_are_principal(re in prop::collection::vec(-1.0f64..1.0, 4), phase in 0.0f64..6.3) {
        let n: f64 = re.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(n > 1e-2);
        let w: Vec<Complex64> = re.iter().map(|v| Complex64::from_polar(v / n, phase)).collect();
        let d = singular_decompose(&TangentVector::from_complex(&w)).unwrap();
        prop_assert_eq!(d.kind, VectorKind::Principal);
    }

    #[test]
    fn classification_inverts_contact_constant(r in 0.05f64..4.0, realform in any::<bool>()) {
        let model = if realform { FocalModel::RealHyperbolicForm } else { FocalModel::ComplexQuadricHypersurface };
        let k = tube_contact_constant(model, r).unwrap();
        prop_assume!((k - SQRT_2).abs() > 1e-6);
        let c = classify(k).unwrap();
        prop_assert_eq!(c.case_id.model(), model);
        prop_assert!((c.r.unwrap() - r).abs() <= 1e-8 * (1.0 + r));
        let t = tube_table(model, r, 3).unwrap();
        prop_assert!((t.alpha() * t.mu() - 2.0).abs() <= 1e-12);
    }
}
