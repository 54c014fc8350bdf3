//! Towers `M_k` of real subspaces generated by `M_{k+1} = j_k M′_{k−1}` and
//! `M_{k−1} = j_k M′_{k+1}`, the relative commutants `A_{k,l} = M′_k ∩ M_l`, the
//! spaces `B_k = M_{k+1} ∩ Ker(j_k + I)` and the identities relating them.
//!
//! A standard subspace of `ℂ^d` has real dimension exactly `d`, so a proper
//! inclusion of standard subspaces never exists in finite dimension. Three
//! regimes are offered and every state records which one produced it:
//!
//! * **exact**: any `M_0 ⊆ M_1`; proper inclusions fail at the first Tomita step
//!   with the dimension obstruction spelled out, `M_0 = M_1` gives the constant tower;
//! * **truncated**: the first `D` fibers of a sequence model plus extension
//!   vectors. The extended level `M` picks up a small complex part `C = M ∩ iM`.
//!   Before its Tomita step `C` is replaced by its real form `Jc·(C ∩ M_{k−1})`,
//!   the directions of `C` that are new relative to the level below, and the
//!   replacement is logged;
//! * **skeleton-backed**: an even-length exact skeleton realised in `ℂ^n` by a
//!   symplectic basis, with `M_k = Σ_{m<k} B_m` and the `B_m` given explicitly.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{
    canonical_parts, classify_subspace, join, join_all, meet, symplectic_complement, ComplexSpace,
    RealSubspace,
};
use crate::linalg;
use crate::modular::{kernel_j_plus_i, tomita, ModularData};
use crate::scalar::{to_f64, ExactField, Real};
use crate::seqmodel::{materialize, AngleSequenceModel};
use crate::skeleton::{skeleton_verify, SkeletonReport, SymplecticSkeleton};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum Regime {
    Exact,
    Truncated { fibers: usize },
    SkeletonBacked { length: usize },
}

/// One replacement of a complex part by its real form.
#[derive(Debug, Clone, Serialize)]
pub struct RepairRecord {
    pub step: i64,
    pub stripped_real_dim: usize,
    pub stripped_complex_dim: usize,
    pub real_form_dim: usize,
}

#[derive(Debug, Clone)]
pub struct TowerState<T: Real> {
    pub space: ComplexSpace,
    pub regime: Regime,
    pub k_min: i64,
    pub k_max: i64,
    pub levels: BTreeMap<i64, RealSubspace<T>>,
    /// Level actually fed to the Tomita step (differs from `levels` after repair).
    pub standard_levels: BTreeMap<i64, RealSubspace<T>>,
    pub modular: BTreeMap<i64, ModularData<T>>,
    pub explicit_b: BTreeMap<i64, RealSubspace<T>>,
    pub defects: BTreeMap<String, f64>,
    pub repairs: Vec<RepairRecord>,
}

fn obstruction_note<T: Real>(m: &RealSubspace<T>) -> String {
    let d = m.space().complex_dim();
    if m.dim() == d {
        String::new()
    } else {
        format!(
            "; a standard subspace of ℂ^{d} has real dimension exactly {d}, this level has {} \
             (no proper standard inclusions exist in finite dimension)",
            m.dim()
        )
    }
}

impl<T: Real> TowerState<T> {
    fn level(&self, k: i64) -> Result<&RealSubspace<T>> {
        self.levels.get(&k).ok_or(Error::IndexOutOfRange {
            index: k,
            min: self.k_min,
            max: self.k_max,
        })
    }

    pub fn m(&self, k: i64) -> Result<&RealSubspace<T>> {
        self.level(k)
    }

    pub fn modular_at(&self, k: i64) -> Option<&ModularData<T>> {
        self.modular.get(&k)
    }

    /// Run the Tomita step on level `k`, repairing a complex part when `repair`.
    fn ensure_modular(&mut self, k: i64, repair: bool) -> Result<()> {
        if self.modular.contains_key(&k) {
            return Ok(());
        }
        let level = self.level(k)?.clone();
        let class = classify_subspace(&level);
        let standard = if class.is_standard {
            level
        } else if repair && class.dim_complex_part > 0 {
            self.repaired(k, &level)?
        } else {
            return Err(Error::NotStandardAtStep {
                step: k,
                reason: format!(
                    "dim(K∩iK) = {}, codim(K+iK) = {}{}",
                    class.dim_complex_part,
                    class.dim_cyclic_defect,
                    obstruction_note(&level)
                ),
            });
        };
        let md = tomita(&standard).map_err(|e| Error::NotStandardAtStep {
            step: k,
            reason: e.to_string(),
        })?;
        self.standard_levels.insert(k, standard);
        self.modular.insert(k, md);
        Ok(())
    }

    fn repaired(&mut self, k: i64, level: &RealSubspace<T>) -> Result<RealSubspace<T>> {
        let (c, r) = canonical_parts(level);
        let below = self.levels.get(&(k - 1)).ok_or_else(|| Error::NotStandardAtStep {
            step: k,
            reason: "complex part found but no lower level to fix its real form".into(),
        })?;
        let old = meet(&c, below);
        if 2 * old.dim() != c.dim() {
            return Err(Error::NotStandardAtStep {
                step: k,
                reason: format!(
                    "complex part of real dimension {} meets the level below in {} dimensions, expected {}",
                    c.dim(),
                    old.dim(),
                    c.dim() / 2
                ),
            });
        }
        let real_form = old.times_i();
        let fixed = join(&r, &real_form);
        let class = classify_subspace(&fixed);
        if !class.is_standard {
            return Err(Error::NotStandardAtStep {
                step: k,
                reason: format!(
                    "repaired level still not standard: dim(K∩iK) = {}, codim(K+iK) = {}",
                    class.dim_complex_part, class.dim_cyclic_defect
                ),
            });
        }
        self.repairs.push(RepairRecord {
            step: k,
            stripped_real_dim: c.dim(),
            stripped_complex_dim: c.dim() / 2,
            real_form_dim: real_form.dim(),
        });
        Ok(fixed)
    }

    fn record(&mut self, name: String, value: T) {
        self.defects.insert(name, to_f64(value));
    }

    /// Forward and backward recursion, then consistency residuals.
    fn run(&mut self, repair: bool) -> Result<()> {
        for k in 1..self.k_max {
            self.ensure_modular(k, repair)?;
            let prev = symplectic_complement(self.level(k - 1)?);
            let next = self.modular[&k].j.image(&prev);
            self.levels.insert(k + 1, next);
        }
        for k in ((self.k_min + 1)..=0).rev() {
            self.ensure_modular(k, repair)?;
            let next = symplectic_complement(self.level(k + 1)?);
            let prev = self.modular[&k].j.image(&next);
            self.levels.insert(k - 1, prev);
        }
        let ks: Vec<i64> = self.modular.keys().copied().collect();
        for k in ks {
            let (Some(lo), Some(hi)) = (self.levels.get(&(k - 1)), self.levels.get(&(k + 1))) else {
                continue;
            };
            let j = &self.modular[&k].j;
            let fwd = j.image(&symplectic_complement(lo)).distance(hi);
            let bwd = j.image(&symplectic_complement(hi)).distance(lo);
            self.record(format!("recursion_forward_k{k:+}"), fwd);
            self.record(format!("recursion_backward_k{k:+}"), bwd);
        }
        let keys: Vec<i64> = self.levels.keys().copied().collect();
        for w in keys.windows(2) {
            let d = self.levels[&w[1]].inclusion_defect(&self.levels[&w[0]]);
            self.record(format!("inclusion_k{:+}", w[0]), d);
        }
        for (k, s) in &self.standard_levels.clone() {
            if let Some(lower) = self.levels.get(&(k - 1)) {
                let d = s.inclusion_defect(lower);
                self.record(format!("repaired_contains_lower_k{k:+}"), d);
            }
        }
        Ok(())
    }
}

fn check_range(k_min: i64, k_max: i64) -> Result<()> {
    if k_min > 0 || k_max < 1 {
        return Err(Error::Precondition(format!(
            "index range [{k_min}, {k_max}] must contain 0 and 1"
        )));
    }
    Ok(())
}

fn new_state<T: Real>(m0: &RealSubspace<T>, m1: &RealSubspace<T>, k_min: i64, k_max: i64, regime: Regime) -> TowerState<T> {
    let mut levels = BTreeMap::new();
    levels.insert(0, m0.clone());
    levels.insert(1, m1.clone());
    TowerState {
        space: m0.space(),
        regime,
        k_min,
        k_max,
        levels,
        standard_levels: BTreeMap::new(),
        modular: BTreeMap::new(),
        explicit_b: BTreeMap::new(),
        defects: BTreeMap::new(),
        repairs: Vec::new(),
    }
}

/// Exact recursion from `M_0 ⊆ M_1`; every level must be standard as is.
pub fn extend_tower<T: Real>(m0: &RealSubspace<T>, m1: &RealSubspace<T>, k_min: i64, k_max: i64) -> Result<TowerState<T>> {
    check_range(k_min, k_max)?;
    if !m1.contains(m0) {
        return Err(Error::Precondition(format!(
            "M_0 not contained in M_1 (defect {})",
            to_f64(m1.inclusion_defect(m0))
        )));
    }
    let mut t = new_state(m0, m1, k_min, k_max, Regime::Exact);
    t.run(false)?;
    Ok(t)
}

/// Tower of the first `d` fibers of a sequence model with its extension vectors.
pub fn truncated_tower<T: Real>(model: &AngleSequenceModel, d: usize, k_min: i64, k_max: i64) -> Result<TowerState<T>> {
    check_range(k_min, k_max)?;
    let mat = materialize::<T>(model, d)?;
    let mut t = new_state(&mat.m0, &mat.m1, k_min, k_max, Regime::Truncated { fibers: d });
    t.run(true)?;
    Ok(t)
}

/// `A_{k,l} = M′_k ∩ M_l`.
pub fn relative_commutant<T: Real>(t: &TowerState<T>, k: i64, l: i64) -> Result<RealSubspace<T>> {
    if k > l {
        return Err(Error::Precondition(format!("relative commutant needs k ≤ l, got {k} > {l}")));
    }
    Ok(meet(&symplectic_complement(t.level(k)?), t.level(l)?))
}

/// `B_k` with the residual of its inclusion in `A_{k−1,k+1}` when that is computable.
#[derive(Debug, Clone)]
pub struct BSpace<T: Real> {
    pub space: RealSubspace<T>,
    pub containment_residual: Option<f64>,
}

pub fn b_space<T: Real>(t: &TowerState<T>, k: i64) -> Result<BSpace<T>> {
    let b = if let Some(b) = t.explicit_b.get(&k) {
        b.clone()
    } else {
        let md = t.modular.get(&k).ok_or(Error::IndexOutOfRange {
            index: k,
            min: t.k_min,
            max: t.k_max,
        })?;
        meet(t.level(k + 1)?, &kernel_j_plus_i(&md.j)?)
    };
    let containment_residual = relative_commutant(t, k - 1, k + 1)
        .ok()
        .map(|a| to_f64(a.inclusion_defect(&b)));
    Ok(BSpace {
        space: b,
        containment_residual,
    })
}

fn b_sum<T: Real>(t: &TowerState<T>, from: i64, to: i64) -> Option<RealSubspace<T>> {
    let parts: Vec<RealSubspace<T>> = (from..=to).map(|m| b_space(t, m).ok().map(|b| b.space)).collect::<Option<_>>()?;
    Some(join_all(t.space, parts.iter()))
}

/// Largest `|ω(x, y)|` over unit `x, y ∈ B`.
pub fn isotropy_residual<T: Real>(b: &RealSubspace<T>) -> f64 {
    to_f64(b.omega_norm(b))
}

/// Real dimension of the ω-radical `S ∩ S′`.
pub fn radical_dim<T: Real>(s: &RealSubspace<T>) -> usize {
    meet(s, &symplectic_complement(s)).dim()
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityItem {
    pub name: String,
    pub anchor: String,
    /// `None` when some ingredient lies outside the computed range.
    pub residual: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub regime: Regime,
    pub k: i64,
    pub p: i64,
    pub items: Vec<IdentityItem>,
}

fn item(name: &str, anchor: &str, residual: Option<f64>, detail: String) -> IdentityItem {
    IdentityItem {
        name: name.into(),
        anchor: anchor.into(),
        residual,
        detail,
    }
}

/// The seven structural identities of the `B_k` decomposition at `(k, p)`.
pub fn identity_report<T: Real>(t: &TowerState<T>, k: i64, p: i64) -> IdentityReport {
    let mut items = Vec::new();

    // sum decomposition of the upper level
    let r = (|| {
        let lhs = t.level(k + p).ok()?;
        let rhs = join(t.level(k).ok()?, &b_sum(t, k, k + p - 1)?);
        Some(to_f64(lhs.distance(&rhs)))
    })();
    items.push(item("level-sum", "level-sum-decomposition", r, "M_{k+p} vs M_k + B_k + … + B_{k+p-1}".into()));

    let r = (|| {
        let lhs = relative_commutant(t, k - 1, k + p).ok()?;
        let rhs = join(&relative_commutant(t, k - 1, k).ok()?, &b_sum(t, k, k + p - 1)?);
        Some(to_f64(lhs.distance(&rhs)))
    })();
    items.push(item("commutant-sum", "relative-commutant-sum", r, "A_{k-1,k+p} vs A_{k-1,k} + B_k + … + B_{k+p-1}".into()));

    let r = (k..k + p.max(1))
        .map(|m| b_space(t, m).ok().map(|b| isotropy_residual(&b.space)))
        .collect::<Option<Vec<f64>>>()
        .map(|v| v.into_iter().fold(0.0, f64::max));
    items.push(item("b-isotropic", "b-commutative", r, "max |ω| on B_m × B_m".into()));

    let r = b_sum(t, k + 1, k + 2 * p).map(|s| radical_dim(&s) as f64);
    items.push(item("even-sum-factor", "b-sum-factor", r, "dim of the ω-radical of B_{k+1} + … + B_{k+2p}".into()));

    let r = (|| {
        let s = b_sum(t, k + 1, k + 2 * p + 1)?;
        let center = meet(&s, &symplectic_complement(&s));
        let b1 = b_space(t, k + 1).ok()?.space;
        let n = t.space.real_dim();
        let mut op = DMatrix::<T>::identity(n, n);
        for i in 1..=p {
            let md = t.modular.get(&(k + 2 * i))?;
            if i % 2 == 1 {
                op -= md.j.matrix();
            } else {
                op += md.j.matrix();
            }
        }
        let image = b1.image(&op);
        Some(to_f64(center.distance(&image)))
    })();
    items.push(item("odd-sum-center", "b-sum-center", r, "center of B_{k+1} + … + B_{k+2p+1} vs (I − j_{k+2} + j_{k+4} − …)B_{k+1}".into()));

    let r = (|| {
        let a = relative_commutant(t, k - 1, k + 1).ok()?;
        Some(to_f64(a.distance(&b_space(t, k).ok()?.space)))
    })();
    items.push(item("abelian-step", "two-step-commutant", r, "A_{k-1,k+1} vs B_k".into()));

    let r = (|| {
        let a = relative_commutant(t, k - 1, k + 2).ok()?;
        let s = join(&b_space(t, k).ok()?.space, &b_space(t, k + 1).ok()?.space);
        Some(to_f64(a.distance(&s)) + radical_dim(&s) as f64)
    })();
    items.push(item("factor-step", "three-step-commutant", r, "A_{k-1,k+2} vs B_k + B_{k+1}, plus dim of its ω-radical".into()));

    IdentityReport {
        regime: t.regime.clone(),
        k,
        p,
        items,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossProductChecks {
    /// Distance between `M_1 ∩ B′_1` and `M_0`.
    pub fixedpoint_residual: f64,
    pub pairing_rank: usize,
    pub dim_b0: usize,
    pub dim_b1: usize,
    pub pairing_nondegenerate: bool,
    pub pairing_bounded: bool,
    pub note: String,
}

pub const BOUNDED_NOTE: &str = "B_0 and B_1 are finite-dimensional, so the pairing is automatically bounded";

pub fn crossproduct_checks<T: Real>(t: &TowerState<T>) -> Result<CrossProductChecks> {
    let b0 = b_space(t, 0)?.space;
    let b1 = b_space(t, 1)?.space;
    let m0 = t.level(0)?;
    let m1 = t.level(1)?;
    let fixed = meet(m1, &symplectic_complement(&b1));
    let gram = t.space.omega_gram(b0.frame(), b1.frame());
    let rank = linalg::rank(&gram);
    Ok(CrossProductChecks {
        fixedpoint_residual: to_f64(fixed.distance(m0)),
        pairing_rank: rank,
        dim_b0: b0.dim(),
        dim_b1: b1.dim(),
        pairing_nondegenerate: rank == b0.dim().min(b1.dim()),
        pairing_bounded: true,
        note: BOUNDED_NOTE.into(),
    })
}

/// Symplectic basis `(u_1, v_1, …)` with `ω(u_i, v_i) = 1` for a non-degenerate form.
fn symplectic_basis(omega: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = omega.nrows();
    if n % 2 == 1 {
        return Err(Error::Precondition("odd-dimensional form is degenerate".into()));
    }
    let w = |x: &nalgebra::DVector<f64>, y: &nalgebra::DVector<f64>| (x.transpose() * omega * y)[(0, 0)];
    let mut pool: Vec<nalgebra::DVector<f64>> = (0..n)
        .map(|i| {
            let mut e = nalgebra::DVector::zeros(n);
            e[i] = 1.0;
            e
        })
        .collect();
    let mut cols = Vec::with_capacity(n);
    while !pool.is_empty() {
        let u = pool.remove(0);
        let (best, val) = pool
            .iter()
            .enumerate()
            .map(|(i, v)| (i, w(&u, v)))
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap_or(std::cmp::Ordering::Equal))
            .ok_or_else(|| Error::Precondition("form is degenerate".into()))?;
        if val.abs() < 1e-12 {
            return Err(Error::Precondition("form is degenerate".into()));
        }
        let v = pool.remove(best) / val;
        for x in pool.iter_mut() {
            let (xv, xu) = (w(x, &v), w(x, &u));
            *x = &*x - &u * xv + &v * xu;
        }
        cols.push(u);
        cols.push(v);
    }
    Ok(DMatrix::from_columns(&cols))
}

/// Even-length skeleton realised as a tower. Blocks are labelled `B_{−q} … B_{q−1}`
/// and `M_k = Σ_{m<k} B_m` for `k ∈ [−q, q]`.
#[derive(Debug, Clone)]
pub struct SkeletonTower {
    pub tower: TowerState<f64>,
    pub exact: SkeletonReport,
    /// `max |ω_V(x,y) − ω(Φx, Φy)|` over basis vectors.
    pub embedding_defect: f64,
}

pub fn skeleton_tower<F: ExactField>(sk: &SymplecticSkeleton<F>) -> Result<SkeletonTower> {
    let l = sk.len();
    if l % 2 == 1 || l == 0 {
        return Err(Error::Precondition("skeleton-backed towers need an even number of blocks".into()));
    }
    let exact = skeleton_verify(sk)?;
    let q = (l / 2) as i64;
    let n = sk.total_dim();
    let omega = DMatrix::from_fn(n, n, |r, c| sk.omega()[r][c].to_f64().unwrap_or(f64::NAN));
    let basis = symplectic_basis(&omega)?;
    let phi = basis
        .clone()
        .try_inverse()
        .ok_or(Error::Singular { sigma_min: 0.0 })?;
    let space = ComplexSpace::new(n / 2)?;
    let embedded_omega = space.omega_gram(&phi, &phi);
    let embedding_defect = (embedded_omega - &omega).amax();

    let mut offset = 0;
    let mut blocks = Vec::with_capacity(l);
    for &d in sk.dims() {
        blocks.push(RealSubspace::from_columns(space, &phi.columns(offset, d).into_owned())?);
        offset += d;
    }
    let mut levels = BTreeMap::new();
    let mut explicit_b = BTreeMap::new();
    let mut acc = RealSubspace::zero(space);
    for (i, b) in blocks.iter().enumerate() {
        let label = i as i64 - q;
        levels.insert(label, acc.clone());
        explicit_b.insert(label, b.clone());
        acc = join(&acc, b);
    }
    levels.insert(q, acc);
    let mut modular = BTreeMap::new();
    let mut standard_levels = BTreeMap::new();
    for (k, m) in &levels {
        if classify_subspace(m).is_standard {
            if let Ok(md) = tomita(m) {
                modular.insert(*k, md);
                standard_levels.insert(*k, m.clone());
            }
        }
    }
    let mut tower = TowerState {
        space,
        regime: Regime::SkeletonBacked { length: l },
        k_min: -q,
        k_max: q,
        levels,
        standard_levels,
        modular,
        explicit_b,
        defects: BTreeMap::new(),
        repairs: Vec::new(),
    };
    tower.defects.insert("embedding_omega".into(), embedding_defect);
    Ok(SkeletonTower {
        tower,
        exact,
        embedding_defect,
    })
}
