use std::f64::consts::FRAC_PI_3;

use stdsub_core::seqmodel::{itpfi_classify, AngleDescriptor, TypeLabel};

use super::modular::grid;
use crate::report::{CheckRecord, GroupOutput};
use crate::scenario::ClassifyParams;

fn lambda_of(label: &TypeLabel) -> Option<f64> {
    match label {
        TypeLabel::ThreeLambda { lambda, .. } | TypeLabel::TrivialModular { lambda } => Some(*lambda),
        TypeLabel::Unknown { .. } => None,
    }
}

pub fn run(p: &ClassifyParams) -> GroupOutput {
    let mut out = GroupOutput::default();
    let third = itpfi_classify(&AngleDescriptor::Constant { theta: FRAC_PI_3 });
    let third_gap = match &third {
        TypeLabel::ThreeLambda { lambda, .. } => (lambda - 1.0 / 3.0).abs(),
        _ => f64::INFINITY,
    };
    out.push(CheckRecord::new("classify.third", "itpfi-type", third_gap, 1e-12).with_detail("θ = π/3"));

    // (1 − cos θ)/(1 + cos θ) is an independent closed form for tan²(θ/2).
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for theta in grid(p.grid_points) {
        let label = itpfi_classify(&AngleDescriptor::Constant { theta });
        let oracle = (1.0 - theta.cos()) / (1.0 + theta.cos());
        let gap = lambda_of(&label).map_or(f64::INFINITY, |l| (l - oracle).abs());
        worst = worst.max(gap);
        rows.push((theta, label));
    }
    out.push(
        CheckRecord::new("classify.constant-grid", "itpfi-type", worst, 1e-12)
            .with_detail(format!("{}-point grid in (0, π/2]", p.grid_points)),
    );
    let misclassified = p
        .non_constant
        .iter()
        .filter(|a| !matches!(itpfi_classify(a), TypeLabel::Unknown { .. }))
        .count();
    out.push(CheckRecord::count("classify.non-constant-unknown", "itpfi-unknown", misclassified));
    out.data("labels", rows);
    out
}
