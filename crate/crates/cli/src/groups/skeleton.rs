use num_rational::BigRational;
use rand::Rng;
use stdsub_core::skeleton::{random_skeleton, skeleton_build, skeleton_verify, CenterComparison, SkeletonReport};
use stdsub_core::ExactSkeleton;

use super::group_rng;
use crate::report::{CheckRecord, GroupOutput};
use crate::scenario::SkeletonParams;

pub fn run(p: &SkeletonParams, seed: u64) -> stdsub_core::Result<GroupOutput> {
    if let Some(dims) = &p.dims {
        return single(dims, seed);
    }
    let mut rng = group_rng(seed, 4);
    let max_half = p.max_half_length.max(1);
    let (mut radical_violations, mut non_isotropic) = (0usize, 0usize);
    for _ in 0..p.even_cases {
        let half = rng.random_range(1..=max_half);
        let sk: ExactSkeleton = random_skeleton(&mut rng, 2 * half, p.max_block_dim.max(1), false)?;
        let rep = skeleton_verify(&sk)?;
        if rep.radical_dim != 0 {
            radical_violations += 1;
        }
        if !rep.isotropic {
            non_isotropic += 1;
        }
    }
    let (mut chain_mismatch, mut literal_mismatch, mut literal_evaluated, mut axiom_failures) = (0, 0, 0, 0);
    for _ in 0..p.odd_cases {
        let half = rng.random_range(1..=max_half);
        let sk: ExactSkeleton = random_skeleton(&mut rng, 2 * half + 1, p.odd_max_block_dim.max(1), true)?;
        let rep = skeleton_verify(&sk)?;
        if !rep.isotropic {
            non_isotropic += 1;
        }
        axiom_failures += rep.axioms.iter().filter(|a| !a.ok).count();
        let center = rep.center.expect("odd skeletons carry a center report");
        if center.chain_relation != CenterComparison::Matches {
            chain_mismatch += 1;
        }
        match center.literal_sum {
            CenterComparison::Matches => literal_evaluated += 1,
            CenterComparison::Differs => {
                literal_evaluated += 1;
                literal_mismatch += 1;
            }
            CenterComparison::NotEvaluable { .. } => {}
        }
    }
    let mut out = GroupOutput::default();
    out.push(
        CheckRecord::count("skeleton.even-radical-trivial", "skeleton-factor", radical_violations)
            .with_detail(format!("{} even skeletons over ℚ, length ≤ {}", p.even_cases, 2 * max_half)),
    );
    out.push(
        CheckRecord::count("skeleton.odd-center-chain", "skeleton-center", chain_mismatch)
            .with_detail(format!("{} odd skeletons with involutions", p.odd_cases)),
    );
    out.push(
        CheckRecord::count("skeleton.odd-center-literal-sum", "skeleton-center", literal_mismatch).with_detail(format!(
            "alternating sum evaluated on {literal_evaluated} length-3 skeletons, not evaluable on {} longer ones",
            p.odd_cases - literal_evaluated
        )),
    );
    out.push(CheckRecord::count("skeleton.involution-axioms", "skeleton-center", axiom_failures));
    out.push(CheckRecord::count("skeleton.blocks-isotropic", "skeleton-isotropy", non_isotropic));
    Ok(out)
}

fn single(dims: &[usize], seed: u64) -> stdsub_core::Result<GroupOutput> {
    let odd = dims.len() % 2 == 1;
    let sk = skeleton_build::<BigRational>(dims, None, seed, odd)?;
    let rep: SkeletonReport = skeleton_verify(&sk)?;
    let mut out = GroupOutput::default();
    out.push(CheckRecord::count("skeleton.blocks-isotropic", "skeleton-isotropy", usize::from(!rep.isotropic)));
    if let Some(factor) = rep.factor {
        out.push(CheckRecord::count("skeleton.even-radical-trivial", "skeleton-factor", usize::from(!factor)));
    }
    if let Some(center) = &rep.center {
        out.push(CheckRecord::count(
            "skeleton.odd-center-chain",
            "skeleton-center",
            usize::from(center.chain_relation != CenterComparison::Matches),
        ));
    }
    out.data("skeleton", &rep);
    out.data("pairings", (0..sk.len().saturating_sub(1)).map(|m| stdsub_core::skeleton::to_f64_matrix(sk.pairing(m))).collect::<Vec<_>>());
    Ok(out)
}
