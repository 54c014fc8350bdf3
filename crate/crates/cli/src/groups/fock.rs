use num_complex::Complex;
use rand::Rng;
use stdsub_core::fock::{
    ccr_defect, commutant_defect, gamma_matrix_element, grading_defect, norm, random_vector, tail_bound,
    vacuum_amplitude, weyl, weyl_vacuum_is_coherent, CMat, TruncatedFock,
};
use stdsub_core::hilbert::{angle_fiber, direct_sum, real_line, ComplexSpace};
use stdsub_core::linalg::spectral_norm;
use stdsub_core::Subspace;

use super::group_rng;
use crate::report::{CheckRecord, GroupOutput};
use crate::scenario::FockParams;

/// Test subspace for the commutant check: `ℝ ⊂ ℂ` in one dimension, angle
/// fibers (plus a real line for odd `d`) otherwise.
fn commutant_subspace(d: usize) -> stdsub_core::Result<Subspace> {
    if d == 1 {
        return Ok(real_line());
    }
    let mut parts = Vec::new();
    for i in 0..d / 2 {
        parts.push(angle_fiber(0.4 + 0.5 * i as f64)?);
    }
    if d % 2 == 1 {
        parts.push(real_line());
    }
    direct_sum(&parts)
}

pub fn run(p: &FockParams, seed: u64) -> stdsub_core::Result<GroupOutput> {
    let fock = TruncatedFock::new(p.d, p.cutoff, p.radius)?;
    let mut rng = group_rng(seed, 5);
    let mut out = GroupOutput::default();
    let tau = tail_bound(p.cutoff, p.radius);

    // ⟨e^0, Φ(h)²e^0⟩ = ‖h‖²/2 pins the field normalisation.
    let probe = random_vector::<f64>(p.d, 0.5 * p.radius, &mut rng);
    let phi_vac = fock.field(&probe).column(0).into_owned();
    let convention = (phi_vac.norm_squared() - norm(&probe).powi(2) / 2.0).abs();
    out.push(CheckRecord::new(
        "fock.field-convention",
        "vacuum-amplitude",
        convention,
        fock.rounding_floor::<f64>(1, 1.0),
    ));

    let (mut vac, mut vac_tol, mut coh, mut unit) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..p.samples {
        // include the boundary ‖h‖ = radius
        let len = if i == 0 { p.radius } else { p.radius * rng.random_range(0.05..1.0) };
        let h = random_vector::<f64>(p.d, len, &mut rng);
        let rep = vacuum_amplitude(&fock, &h)?;
        vac = vac.max(rep.defect);
        vac_tol = vac_tol.max(rep.tolerance);
        coh = coh.max(weyl_vacuum_is_coherent(&fock, &h)?);
        unit = unit.max(weyl(&fock, &h)?.unitarity_defect.unwrap_or(f64::INFINITY));
    }
    out.push(
        CheckRecord::new("fock.vacuum-amplitude", "vacuum-amplitude", vac, vac_tol)
            .with_detail(format!("τ({}, {}) = {tau:.3e}; tolerance τ plus rounding floor", p.cutoff, p.radius)),
    );
    let prod_tol = fock.calibrated_tolerance::<f64>(p.radius, 3, 1.0);
    out.push(CheckRecord::new("fock.vacuum-is-coherent", "vacuum-amplitude", coh, prod_tol));
    out.push(CheckRecord::new("fock.unitarity", "weyl-relation", unit, prod_tol));

    let (mut ccr, mut leak) = (0.0f64, 0.0f64);
    let mut ccr_tol = 0.0f64;
    for _ in 0..p.samples {
        let total = p.radius * rng.random_range(0.05..=1.0);
        let split = rng.random_range(0.1..0.9);
        let h = random_vector::<f64>(p.d, total * split, &mut rng);
        let k = random_vector::<f64>(p.d, total * (1.0 - split), &mut rng);
        let rep = ccr_defect(&fock, &h, &k)?;
        ccr = ccr.max(rep.defect);
        leak = leak.max(rep.leakage_defect);
        ccr_tol = ccr_tol.max(rep.tolerance);
    }
    out.push(
        CheckRecord::new("fock.weyl-relation", "weyl-relation", ccr, ccr_tol).with_detail(format!(
            "{} pairs, compressed to |n| ≤ {}; tolerance 10τ plus rounding floor; largest leakage past the sector {leak:.3e}",
            p.samples,
            fock.low_cutoff()
        )),
    );

    let k = commutant_subspace(p.d)?;
    let comm = commutant_defect(&fock, &k, p.samples.min(20), rng.random())?;
    out.push(
        CheckRecord::new("fock.commutant", "weyl-commutant", comm.defect, comm.tolerance)
            .with_detail(format!("h ∈ K, k ∈ K′, {} samples", comm.samples)),
    );
    out.push(
        CheckRecord::new("fock.commutant-control", "weyl-commutant", (1e-2 - comm.control).max(0.0), 0.0)
            .with_detail(format!(
                "pair from {} with Im⟨h,k⟩ ≠ 0: commutator {:.6}, predicted |2 sin(ω/2)| = {:.6}",
                comm.control_source, comm.control, comm.control_predicted
            )),
    );

    // Γ of a random contraction against exp⟨f, Ag⟩.
    let a = CMat::<f64>::from_fn(p.d, p.d, |_, _| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    // The realification has the same singular values as `a`.
    let norm = spectral_norm(&ComplexSpace::new(p.d)?.realify(&a));
    let a = a.unscale(norm.max(1.0));
    let f = random_vector::<f64>(p.d, 0.5 * p.radius, &mut rng);
    let g = random_vector::<f64>(p.d, 0.5 * p.radius, &mut rng);
    let gm = gamma_matrix_element(&fock, &a, &f, &g)?;
    out.push(CheckRecord::new("fock.second-quantization", "second-quantization", gm.defect, gm.tolerance));
    let grading = grading_defect::<f64>(&fock, 0.7)?;
    out.push(CheckRecord::new(
        "fock.number-grading",
        "second-quantization",
        grading,
        fock.rounding_floor::<f64>(1, 1.0),
    ));

    out.data(
        "fock",
        serde_json::json!({
            "dim": fock.dim(),
            "low_cutoff": fock.low_cutoff(),
            "tail_bound": tau,
            "rounding_floor": fock.rounding_floor::<f64>(1, 1.0),
            "largest_leakage": leak,
            "commutant": comm,
        }),
    );
    Ok(out)
}
