use rand::Rng;
use stdsub_core::hilbert::{classify_subspace, join, meet, random_subspace, symplectic_complement, ComplexSpace};

use super::group_rng;
use crate::report::{CheckRecord, GroupOutput};
use crate::scenario::LatticeParams;

const TOL: f64 = 1e-8;

pub fn run(p: &LatticeParams, seed: u64) -> GroupOutput {
    let mut rng = group_rng(seed, 1);
    let (mut double, mut join_dual, mut meet_dual) = (0.0f64, 0.0f64, 0.0f64);
    let (mut dim_violations, mut class_violations) = (0usize, 0usize);
    for _ in 0..p.cases {
        let d = rng.random_range(1..=p.d_max.max(1));
        let space = ComplexSpace::new(d).expect("positive dimension");
        let n = space.real_dim();
        let e = random_subspace::<f64>(space, rng.random_range(0..=n), &mut rng);
        let f = random_subspace::<f64>(space, rng.random_range(0..=n), &mut rng);
        let ep = symplectic_complement(&e);
        let fp = symplectic_complement(&f);
        double = double.max(symplectic_complement(&ep).distance(&e));
        join_dual = join_dual.max(symplectic_complement(&join(&e, &f)).distance(&meet(&ep, &fp)));
        meet_dual = meet_dual.max(symplectic_complement(&meet(&e, &f)).distance(&join(&ep, &fp)));
        if e.dim() + ep.dim() != n {
            dim_violations += 1;
        }
        let c = classify_subspace(&e);
        if c.is_standard != (c.dim_complex_part == 0 && c.dim_cyclic_defect == 0) {
            class_violations += 1;
        }
    }
    let mut out = GroupOutput::default();
    let detail = format!("{} random pairs, d ≤ {}", p.cases, p.d_max);
    out.push(CheckRecord::new("lattice.double-complement", "complement-duality", double, TOL).with_detail(detail.clone()));
    out.push(CheckRecord::new("lattice.complement-of-join", "complement-duality", join_dual, TOL).with_detail(detail.clone()));
    out.push(CheckRecord::new("lattice.complement-of-meet", "complement-duality", meet_dual, TOL).with_detail(detail));
    out.push(CheckRecord::count("lattice.complement-dimension", "complement-duality", dim_violations));
    out.push(CheckRecord::count("lattice.standard-flags", "standard-classification", class_violations));
    out
}
