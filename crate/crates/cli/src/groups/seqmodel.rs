use stdsub_core::seqmodel::{
    construct_extension, cross_check, AngleDescriptor, AngleSequenceModel, Verdict, WeightRule,
};
use stdsub_core::Error;

use crate::report::{CheckRecord, GroupOutput};
use crate::scenario::SeqmodelParams;

fn verdict_gap(got: Verdict, want: Verdict) -> usize {
    usize::from(got != want)
}

pub fn run(p: &SeqmodelParams) -> stdsub_core::Result<GroupOutput> {
    let mut out = GroupOutput::default();
    let model = AngleSequenceModel::new(p.angles.clone())?;
    let ext = construct_extension(&model, p.goal)?;
    let div_gap: usize = ext.divergence.iter().map(|c| verdict_gap(c.verdict, Verdict::Diverges)).sum();
    out.push(CheckRecord::count("extension.weighted-norm-diverges", "extension-divergence", div_gap));
    out.push(CheckRecord::count(
        "extension.norm-converges",
        "extension-membership",
        verdict_gap(ext.membership.verdict, Verdict::Converges),
    ));

    let coeffs = &ext.vector.coefficients;
    let mut gaps = Vec::new();
    for cert in &ext.divergence {
        let weight = weight_by_name(&cert.weight);
        if let Some(check) = weight.and_then(|w| cross_check(&p.angles, coeffs, w, p.cross_check_n)) {
            gaps.push(("extension.cross-check-divergent", "extension-divergence", check));
        }
    }
    if let Some(check) = cross_check(&p.angles, coeffs, WeightRule::Unit, p.cross_check_n) {
        gaps.push(("extension.cross-check-convergent", "extension-membership", check));
    }
    for (name, anchor, check) in &gaps {
        out.push(
            CheckRecord::new(*name, anchor, check.relative_gap, p.cross_check_tolerance)
                .with_detail(format!("partial sum at n = {} against its asymptotic reference", check.n)),
        );
    }
    if gaps.len() < ext.divergence.len() + 1 {
        out.push(CheckRecord::count(
            "extension.cross-check-available",
            "extension-membership",
            ext.divergence.len() + 1 - gaps.len(),
        ));
    }

    let mut feasible = 0usize;
    let mut reasons = Vec::new();
    for &theta in &p.constant_angles {
        let m = AngleSequenceModel::new(AngleDescriptor::Constant { theta })?;
        match construct_extension(&m, p.goal) {
            Err(Error::GoalInfeasible { reason, .. }) => reasons.push(reason),
            _ => feasible += 1,
        }
    }
    out.push(
        CheckRecord::count("extension.constant-angle-infeasible", "extension-infeasible", feasible)
            .with_detail(format!("{} constant angles", p.constant_angles.len())),
    );
    out.data("extension", &ext);
    out.data("cross_checks", gaps.iter().map(|g| &g.2).collect::<Vec<_>>());
    out.data("infeasibility_reasons", reasons);
    Ok(out)
}

fn weight_by_name(name: &str) -> Option<WeightRule> {
    [WeightRule::DeltaLarge, WeightRule::DeltaSmall, WeightRule::PairForm, WeightRule::Unit]
        .into_iter()
        .find(|w| w.name() == name)
}
