use num_complex::Complex;
use proptest::prelude::*;
use stdsub_core::fock::{
    ccr_defect, coherent, grading_defect, tail_bound, weyl, CMat, TruncatedFock,
};

fn vec1(re: f64, im: f64) -> Vec<Complex<f64>> {
    vec![Complex::new(re, im)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weyl_inverse_is_reflection(re in -0.7f64..0.7, im in -0.7f64..0.7) {
        let fock = TruncatedFock::new(1, 32, 1.0).unwrap();
        let w = weyl(&fock, &vec1(re, im)).unwrap();
        let wm = weyl(&fock, &vec1(-re, -im)).unwrap();
        let low = fock.low_sector_len();
        let prod = w.matrix.rows(0, low) * wm.matrix.columns(0, low) - CMat::<f64>::identity(low, low);
        let bound = 2.0 * w.unitarity_defect.unwrap().max(fock.rounding_floor::<f64>(2, 1.0));
        prop_assert!(prod.iter().map(|z| z.norm()).fold(0.0, f64::max) <= bound);
    }

    #[test]
    fn ccr_defect_is_antisymmetric(a in -0.45f64..0.45, b in -0.45f64..0.45, c in -0.45f64..0.45, d in -0.45f64..0.45) {
        let fock = TruncatedFock::new(1, 32, 1.5).unwrap();
        let h = vec1(a, b);
        let k = vec1(c, d);
        let mk: Vec<_> = h.iter().map(|z| -z).collect();
        let one = ccr_defect(&fock, &h, &k).unwrap();
        let two = ccr_defect(&fock, &k, &mk).unwrap();
        prop_assert!(one.defect <= one.tolerance && two.defect <= two.tolerance);
        prop_assert!((one.defect - two.defect).abs() <= 2.0 * one.tolerance);
    }

    #[test]
    fn number_grading_is_exact(phi in -3.0f64..3.0) {
        let fock = TruncatedFock::new(2, 8, 1.0).unwrap();
        prop_assert!(grading_defect::<f64>(&fock, phi).unwrap() <= 1e-13);
    }
}

#[test]
fn coherent_vectors_respect_the_radius() {
    let fock = TruncatedFock::new(1, 32, 1.0).unwrap();
    assert!(coherent(&fock, &vec1(1.2, 0.0)).is_err());
    let v = coherent(&fock, &vec1(1.0, 0.0)).unwrap();
    assert_eq!(v.tail_bound, tail_bound(32, 1.0));
}

#[test]
fn basis_enumeration_is_deterministic() {
    let a = TruncatedFock::new(3, 4, 1.0).unwrap();
    let b = TruncatedFock::new(3, 4, 1.0).unwrap();
    assert_eq!(a.basis(), b.basis());
    assert_eq!(a.dim(), 35);
    assert_eq!(a.basis()[1], vec![1, 0, 0]);
}
