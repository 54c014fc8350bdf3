use num_rational::BigRational;
use stdsub_core::seqmodel::{construct_extension, AngleDescriptor, AngleSequenceModel, Goal};
use stdsub_core::skeleton::skeleton_build;
use stdsub_core::tower::{b_space, crossproduct_checks, identity_report, skeleton_tower, truncated_tower};

#[test]
fn skeleton_backed_tower_satisfies_the_fixed_point_identity() {
    for (dims, seed) in [(vec![1, 1, 1, 1], 2u64), (vec![2, 2, 2, 2], 5), (vec![1, 1, 1, 1, 1, 1], 9)] {
        let sk = skeleton_build::<BigRational>(&dims, None, seed, false).unwrap();
        let st = skeleton_tower(&sk).unwrap();
        let cp = crossproduct_checks(&st.tower).unwrap();
        assert_eq!(cp.pairing_rank, cp.dim_b0.min(cp.dim_b1));
        assert!(cp.fixedpoint_residual <= 1e-6, "{dims:?}: {}", cp.fixedpoint_residual);
    }
}

#[test]
fn truncated_codim_one_tower_pairs_new_directions() {
    let m = AngleSequenceModel::new(AngleDescriptor::PowerLaw { c: 1.0, alpha: 1.0 }).unwrap();
    let ext = construct_extension(&m, Goal::Standard).unwrap();
    let m = m.with_extension(ext.vector);
    let t = truncated_tower::<f64>(&m, 12, -1, 2).unwrap();
    let cp = crossproduct_checks(&t).unwrap();
    assert_eq!(cp.pairing_rank, cp.dim_b0.min(cp.dim_b1));
    assert_eq!(b_space(&t, 0).unwrap().space.dim(), 1);
}

#[test]
fn identity_report_on_skeleton_tower() {
    let sk = skeleton_build::<BigRational>(&[1, 1, 1, 1], None, 3, false).unwrap();
    let st = skeleton_tower(&sk).unwrap();
    let rep = identity_report(&st.tower, 0, 1);
    assert!(!rep.items.is_empty());
    for item in &rep.items {
        assert!(!item.name.is_empty());
    }
}
