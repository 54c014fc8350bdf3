use proptest::prelude::*;
use stdsub_core::seqmodel::{
    construct_extension, cross_check, itpfi_classify, partial_sum, weighted_sum_test, AngleDescriptor,
    AngleSequenceModel, CoeffDescriptor, Goal, TypeLabel, Verdict, WeightRule,
};
use stdsub_core::Error;

fn power(c: f64, alpha: f64) -> CoeffDescriptor {
    CoeffDescriptor::PowerLaw { c, alpha }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constant_angle_gives_tan_squared_ratio(theta in 0.01f64..1.57) {
        match itpfi_classify(&AngleDescriptor::Constant { theta }) {
            TypeLabel::ThreeLambda { lambda, inverse } => {
                let expect = (theta / 2.0).tan().powi(2);
                prop_assert!((lambda - expect).abs() <= 1e-12);
                prop_assert!((lambda * inverse - 1.0).abs() <= 1e-12);
            }
            other => prop_assert!(false, "unexpected {other:?}"),
        }
    }

    #[test]
    fn constant_models_admit_no_extension(theta in 0.01f64..1.57) {
        let m = AngleSequenceModel::new(AngleDescriptor::Constant { theta }).unwrap();
        for goal in [Goal::Standard, Goal::Irreducible, Goal::Both] {
            let is_infeasible = matches!(construct_extension(&m, goal), Err(Error::GoalInfeasible { .. }));
            prop_assert!(is_infeasible);
        }
    }

    #[test]
    fn unit_weight_verdict_matches_p_series(alpha in 0.05f64..2.0) {
        let cert = weighted_sum_test(&AngleDescriptor::Constant { theta: 1.0 }, &power(1.0, alpha), WeightRule::Unit);
        let expect = if 2.0 * alpha > 1.0 { Verdict::Converges } else { Verdict::Diverges };
        prop_assert_eq!(cert.verdict, expect);
    }

    #[test]
    fn vanishing_angle_extension_is_certified(c in 0.2f64..1.5, alpha in 0.3f64..2.0) {
        let m = AngleSequenceModel::new(AngleDescriptor::PowerLaw { c, alpha }).unwrap();
        let ext = construct_extension(&m, Goal::Standard).unwrap();
        prop_assert!(ext.certified());
    }

    #[test]
    fn partial_sums_are_monotone(alpha in 0.2f64..1.5, n in 10usize..400) {
        let a = AngleDescriptor::PowerLaw { c: 1.0, alpha: 1.0 };
        let s1 = partial_sum(&a, &power(1.0, alpha), WeightRule::DeltaLarge, n).unwrap();
        let s2 = partial_sum(&a, &power(1.0, alpha), WeightRule::DeltaLarge, 2 * n).unwrap();
        prop_assert!(s2 >= s1);
    }
}

#[test]
fn inverse_angle_extension_cross_checks() {
    let m = AngleSequenceModel::new(AngleDescriptor::PowerLaw { c: 1.0, alpha: 1.0 }).unwrap();
    let ext = construct_extension(&m, Goal::Standard).unwrap();
    assert_eq!(ext.divergence[0].verdict, Verdict::Diverges);
    assert_eq!(ext.membership.verdict, Verdict::Converges);
    let c = &ext.vector.coefficients;
    let div = cross_check(&m.angles, c, WeightRule::DeltaLarge, 1_000_000).unwrap();
    assert!(div.relative_gap < 0.01, "{div:?}");
    let conv = cross_check(&m.angles, c, WeightRule::Unit, 1_000_000).unwrap();
    assert!(conv.relative_gap < 0.01, "{conv:?}");
}

#[test]
fn non_constant_angles_are_unknown() {
    let a = AngleDescriptor::PowerLaw { c: 1.0, alpha: 1.0 };
    assert!(matches!(itpfi_classify(&a), TypeLabel::Unknown { .. }));
}

#[test]
fn scenario_json_rejects_unknown_fields() {
    let ok = r#"{"angles": {"kind": "constant", "theta": 1.0}}"#;
    let m: AngleSequenceModel = serde_json::from_str(ok).unwrap();
    assert_eq!(m.n_materialize, 64);
    let bad = r#"{"angles": {"kind": "constant", "theta": 1.0, "phi": 2}}"#;
    assert!(serde_json::from_str::<AngleSequenceModel>(bad).is_err());
}
