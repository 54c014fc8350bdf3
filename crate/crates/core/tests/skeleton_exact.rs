use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stdsub_core::skeleton::{random_skeleton, skeleton_build, skeleton_verify, CenterComparison};
use stdsub_core::{Error, ExactSkeleton};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn even_skeletons_have_trivial_radical(q in 1usize..=2, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sk: ExactSkeleton = random_skeleton(&mut rng, 2 * q, 3, false).unwrap();
        let rep = skeleton_verify(&sk).unwrap();
        prop_assert!(rep.isotropic);
        prop_assert_eq!(rep.isotropy_residual, 0.0);
        prop_assert_eq!(rep.radical_dim, 0);
        prop_assert_eq!(rep.factor, Some(true));
    }

    #[test]
    fn odd_skeletons_reproduce_center(p in 1usize..=2, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sk: ExactSkeleton = random_skeleton(&mut rng, 2 * p + 1, 2, true).unwrap();
        let rep = skeleton_verify(&sk).unwrap();
        prop_assert!(rep.isotropic);
        prop_assert!(rep.axioms.iter().all(|a| a.ok));
        let center = rep.center.unwrap();
        prop_assert_eq!(center.center_dim, sk.dims()[0]);
        prop_assert_eq!(center.chain_relation, CenterComparison::Matches);
    }
}

#[test]
fn unit_skeleton_is_a_factor() {
    let sk: ExactSkeleton = skeleton_build(&[1, 1, 1, 1], None, 1, false).unwrap();
    assert_eq!(skeleton_verify(&sk).unwrap().factor, Some(true));
}

#[test]
fn literal_sum_is_evaluable_for_three_blocks_only() {
    let three: ExactSkeleton = skeleton_build(&[2, 2, 2], None, 4, true).unwrap();
    let rep = skeleton_verify(&three).unwrap().center.unwrap();
    assert_eq!(rep.literal_sum, CenterComparison::Matches);
    let five: ExactSkeleton = skeleton_build(&[1, 1, 1, 1, 1], None, 4, true).unwrap();
    let rep = skeleton_verify(&five).unwrap().center.unwrap();
    assert!(matches!(rep.literal_sum, CenterComparison::NotEvaluable { .. }));
    assert_eq!(rep.chain_relation, CenterComparison::Matches);
}

#[test]
fn odd_skeleton_without_involutions_is_rejected() {
    let sk: ExactSkeleton = skeleton_build(&[1, 1, 1], None, 2, false).unwrap();
    assert_eq!(skeleton_verify(&sk).unwrap_err(), Error::MissingInvolutions);
}

#[test]
fn unequal_blocks_are_degenerate() {
    let r: Result<ExactSkeleton, _> = skeleton_build(&[1, 2], None, 0, false);
    assert!(matches!(r, Err(Error::DegeneratePairing { .. })));
}
