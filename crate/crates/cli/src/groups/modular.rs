use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use stdsub_core::hilbert::{angle_fiber, direct_sum, random_standard, symplectic_complement, ComplexSpace};
use stdsub_core::linalg::sym_eigen_sorted;
use stdsub_core::modular::{pairing_report, tomita};

use super::group_rng;
use crate::report::{CheckRecord, GroupOutput};
use crate::scenario::ModularParams;

/// Random standard subspaces: reconstruction, conjugation, flow and spectrum.
pub fn run_random(p: &ModularParams, seed: u64) -> stdsub_core::Result<GroupOutput> {
    let mut rng = group_rng(seed, 2);
    let (mut recon, mut conj, mut flow, mut inversion) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..p.cases {
        let d = rng.random_range(1..=p.d_max.max(1));
        let k = random_standard::<f64>(ComplexSpace::new(d)?, rng.random(), p.angle_range)?;
        let md = tomita(&k)?;
        recon = recon.max(md.residuals.reconstruction);
        conj = conj.max(md.j.image(&k).distance(&symplectic_complement(&k)));
        for &t in &p.flow_times {
            flow = flow.max(md.delta_it(t).image(&k).distance(&k));
        }
        let spectrum = md.delta_spectrum();
        let n = spectrum.len();
        for i in 0..n {
            inversion = inversion.max((spectrum[i] * spectrum[n - 1 - i] - 1.0).abs());
        }
    }
    let mut out = GroupOutput::default();
    let detail = format!("{} random standard subspaces, d ≤ {}", p.cases, p.d_max);
    out.push(CheckRecord::new("modular.reconstruction", "modular-polar-decomposition", recon, 1e-8).with_detail(detail.clone()));
    out.push(CheckRecord::new("modular.conjugation-maps-to-complement", "modular-conjugation-complement", conj, 1e-8));
    out.push(
        CheckRecord::new("modular.flow-invariance", "modular-flow-invariance", flow, 1e-8)
            .with_detail(format!("t ∈ {:?}", p.flow_times)),
    );
    out.push(CheckRecord::new("modular.spectrum-inversion", "modular-spectrum-inversion", inversion, 1e-9));
    Ok(out)
}

pub fn grid(points: usize) -> Vec<f64> {
    (1..=points).map(|i| i as f64 * FRAC_PI_2 / points as f64).collect()
}

/// Fiber spectra against closed forms, with `sᵀs` as an oracle independent of
/// the SVD-based polar decomposition.
pub fn run_fibers(p: &ModularParams) -> stdsub_core::Result<GroupOutput> {
    let (mut oracle_err, mut polar_err, mut theta_err) = (0.0f64, 0.0f64, 0.0f64);
    let mut series = Vec::new();
    for theta in grid(p.grid_points) {
        let k = angle_fiber::<f64>(theta)?;
        let md = tomita(&k)?;
        let t2 = (theta / 2.0).tan().powi(2);
        let expect = [t2, t2, 1.0 / t2, 1.0 / t2];
        let s = md.s.matrix();
        let (brute, _) = sym_eigen_sorted(&(s.transpose() * s));
        for (i, e) in expect.iter().enumerate() {
            oracle_err = oracle_err.max((brute[i] - e).abs());
            polar_err = polar_err.max((md.delta_eigvals[i] - e).abs());
        }
        for a in md.theta_spectrum() {
            theta_err = theta_err.max((a - theta).abs());
        }
        series.push([theta, brute[0], brute[3]]);
    }
    let mut out = GroupOutput::default();
    let detail = format!("{}-point grid in (0, π/2]", p.grid_points);
    out.push(CheckRecord::new("fiber.delta-spectrum-oracle", "fiber-spectrum", oracle_err, 1e-10).with_detail(detail.clone()));
    out.push(CheckRecord::new("fiber.delta-spectrum-polar", "fiber-spectrum", polar_err, 1e-10).with_detail(detail));
    out.push(CheckRecord::new("fiber.angle-operator", "angle-operator", theta_err, 1e-9));
    out.data("fiber_spectrum", &series);
    Ok(out)
}

/// Pairing constants over grid fibers and random direct sums of fibers.
pub fn run_pairing(p: &ModularParams, seed: u64) -> stdsub_core::Result<GroupOutput> {
    let mut rng = group_rng(seed, 3);
    let mut subspaces = Vec::new();
    for theta in grid(p.grid_points) {
        subspaces.push(angle_fiber::<f64>(theta)?);
    }
    for _ in 0..p.direct_sums {
        let count = rng.random_range(2..=3);
        let parts = (0..count)
            .map(|_| angle_fiber::<f64>(rng.random_range(0.05..=FRAC_PI_2)))
            .collect::<stdsub_core::Result<Vec<_>>>()?;
        subspaces.push(direct_sum(&parts)?);
    }
    let (mut sup_excess, mut ratio_deficit) = (0.0f64, 0.0f64);
    let (mut sup_max, mut ratio_min) = (0.0f64, f64::INFINITY);
    for k in &subspaces {
        let rep = pairing_report(k)?;
        sup_excess = sup_excess.max(rep.sup_re_pairing - rep.bound_sup);
        ratio_deficit = ratio_deficit.max(rep.bound_ratio - rep.min_graph_ratio);
        sup_max = sup_max.max(rep.sup_re_pairing);
        ratio_min = ratio_min.min(rep.min_graph_ratio);
    }
    let mut out = GroupOutput::default();
    out.push(
        CheckRecord::new("pairing.sup-bound", "pairing-bound", sup_excess.max(0.0), 1e-9)
            .with_detail(format!("largest sup |Re⟨h,k⟩| = {sup_max:.12}")),
    );
    out.push(
        CheckRecord::new("pairing.graph-ratio", "graph-norm-ratio", ratio_deficit.max(0.0), 1e-9)
            .with_detail(format!("smallest ratio = {ratio_min:.12}")),
    );
    out.data("pairing_subspaces", subspaces.len());
    Ok(out)
}
