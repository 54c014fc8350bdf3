use proptest::prelude::*;
use stdsub_core::hilbert::{angle_fiber, random_standard, symplectic_complement, ComplexSpace};
use stdsub_core::modular::{fiber, kernel_j_plus_i, pairing_report, spectral_flags, tomita};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conjugation_maps_onto_complement(d in 1usize..=4, seed in any::<u64>()) {
        let k = random_standard::<f64>(ComplexSpace::new(d).unwrap(), seed, (0.15, 1.5)).unwrap();
        let md = tomita(&k).unwrap();
        prop_assert!(md.residuals.reconstruction <= 1e-8);
        prop_assert!(md.j.image(&k).distance(&symplectic_complement(&k)) <= 1e-8);
    }

    #[test]
    fn modular_flow_preserves_subspace(d in 1usize..=4, seed in any::<u64>(), t in -3.0f64..3.0) {
        let k = random_standard::<f64>(ComplexSpace::new(d).unwrap(), seed, (0.15, 1.5)).unwrap();
        let md = tomita(&k).unwrap();
        prop_assert!(md.delta_it(t).image(&k).distance(&k) <= 1e-8);
    }

    #[test]
    fn spectrum_is_inversion_symmetric(d in 1usize..=4, seed in any::<u64>()) {
        let k = random_standard::<f64>(ComplexSpace::new(d).unwrap(), seed, (0.15, 1.5)).unwrap();
        let md = tomita(&k).unwrap();
        let spectrum = md.delta_spectrum();
        let n = spectrum.len();
        for i in 0..n {
            let prod = spectrum[i] * spectrum[n - 1 - i];
            prop_assert!((prod - 1.0).abs() <= 1e-9 * spectrum[n - 1 - i].max(1.0), "{spectrum:?}");
        }
    }

    #[test]
    fn complement_has_same_conjugation_and_inverse_modulus(d in 1usize..=3, seed in any::<u64>()) {
        let k = random_standard::<f64>(ComplexSpace::new(d).unwrap(), seed, (0.2, 1.4)).unwrap();
        let md = tomita(&k).unwrap();
        let mdp = tomita(&symplectic_complement(&k)).unwrap();
        prop_assert!(md.j.distance(&mdp.j) <= 1e-7);
        let inv = md.delta_power(-1.0);
        prop_assert!(inv.distance(&mdp.delta) <= 1e-7 * md.delta_spectrum().last().unwrap().max(1.0));
    }

    #[test]
    fn fiber_spectrum_and_angle(theta in 0.05f64..=std::f64::consts::FRAC_PI_2) {
        let f = fiber(theta).unwrap();
        let spectrum = f.modular.delta_spectrum();
        let (small, large) = ((theta / 2.0).tan().powi(2), 1.0 / (theta / 2.0).tan().powi(2));
        prop_assert!((spectrum[0] - small).abs() <= 1e-10 * large);
        prop_assert!((spectrum[1] - large).abs() <= 1e-10 * large);
        for a in f.modular.theta_spectrum() {
            prop_assert!((a - theta).abs() <= 1e-9);
        }
        prop_assert_eq!(kernel_j_plus_i(&f.modular.j).unwrap().dim(), 2);
    }

    #[test]
    fn pairing_constants_hold_on_fibers(theta in 0.05f64..=std::f64::consts::FRAC_PI_2) {
        let rep = pairing_report(&fiber(theta).unwrap().subspace).unwrap();
        prop_assert!(rep.sup_re_pairing <= rep.bound_sup + 1e-9);
        prop_assert!(rep.min_graph_ratio >= rep.bound_ratio - 1e-9);
    }
}

#[test]
fn spectral_flags_report_bounded_modulus() {
    let k = random_standard::<f64>(ComplexSpace::new(3).unwrap(), 7, (0.3, 1.2)).unwrap();
    let flags = spectral_flags(&tomita(&k).unwrap());
    assert!(flags.lambda_min > 0.0 && flags.lambda_max.is_finite());
    assert!((flags.lambda_min * flags.lambda_max - 1.0).abs() < 1e-9);
}

#[test]
fn single_precision_fiber_matches_closed_form() {
    let theta = 0.9f32;
    let k: stdsub_core::SubspaceF32 = angle_fiber(theta).unwrap();
    let md = tomita(&k).unwrap();
    let spectrum = md.delta_spectrum();
    let t = (theta / 2.0).tan().powi(2);
    assert!((spectrum[0] - t).abs() < 1e-4 && (spectrum[1] - 1.0 / t).abs() < 1e-3, "{spectrum:?}");
    assert!(md.j.image(&k).distance(&symplectic_complement(&k)) < 1e-4);
}
