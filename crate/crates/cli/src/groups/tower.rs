use num_rational::BigRational;
use stdsub_core::seqmodel::{construct_extension, AngleDescriptor, AngleSequenceModel, Goal};
use stdsub_core::skeleton::skeleton_build;
use stdsub_core::tower::{crossproduct_checks, identity_report, skeleton_tower, truncated_tower};

use crate::report::{CheckRecord, GroupOutput};
use crate::scenario::TowerParams;

pub fn run(p: &TowerParams, seed: u64) -> stdsub_core::Result<GroupOutput> {
    let mut out = GroupOutput::default();
    let (mut rank_gap, mut fixed) = (0usize, 0.0f64);
    let mut skeleton_rows = Vec::new();
    for (i, dims) in p.skeleton_dims.iter().enumerate() {
        let sk = skeleton_build::<BigRational>(dims, None, seed.wrapping_add(i as u64), false)?;
        let st = skeleton_tower(&sk)?;
        let cp = crossproduct_checks(&st.tower)?;
        rank_gap += cp.dim_b0.min(cp.dim_b1).abs_diff(cp.pairing_rank);
        fixed = fixed.max(cp.fixedpoint_residual);
        let identities = identity_report(&st.tower, 0, 2);
        skeleton_rows.push(serde_json::json!({
            "dims": dims,
            "embedding_defect": st.embedding_defect,
            "crossproduct": cp,
            "identities": identities,
        }));
    }
    out.push(
        CheckRecord::count("crossproduct.skeleton-pairing-rank", "crossproduct-pairing", rank_gap)
            .with_detail(format!("{} skeleton-backed towers", p.skeleton_dims.len())),
    );
    out.push(CheckRecord::new(
        "crossproduct.skeleton-fixed-point",
        "crossproduct-fixed-point",
        fixed,
        p.fixedpoint_tolerance,
    ));

    let model = AngleSequenceModel::new(AngleDescriptor::PowerLaw { c: 1.0, alpha: 1.0 })?;
    let ext = construct_extension(&model, Goal::Standard)?;
    let model = model.with_extension(ext.vector);
    let mut truncated_gap = 0usize;
    let mut truncated_rows = Vec::new();
    for &d in &p.truncated_fibers {
        let t = truncated_tower::<f64>(&model, d, -1, 2)?;
        let cp = crossproduct_checks(&t)?;
        truncated_gap += cp.dim_b0.min(cp.dim_b1).abs_diff(cp.pairing_rank);
        truncated_rows.push(serde_json::json!({
            "fibers": d,
            "repairs": t.repairs,
            "crossproduct": cp,
            "defects": t.defects,
        }));
    }
    out.push(
        CheckRecord::count("crossproduct.truncated-pairing-rank", "crossproduct-pairing", truncated_gap)
            .with_detail(format!("codimension-one models with D ∈ {:?}", p.truncated_fibers)),
    );
    out.data("skeleton_backed", skeleton_rows);
    out.data("truncated", truncated_rows);
    Ok(out)
}
