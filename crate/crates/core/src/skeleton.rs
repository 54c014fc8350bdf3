//! Exact symplectic skeletons: a chain `B_1, …, B_L` of isotropic blocks in which
//! only neighbours pair, optionally with local anti-symplectic involutions.
//!
//! `V = ⊕ B_m` carries the block-tridiagonal form
//!
//! ```text
//!   Ω[m, m+1] = P_m,   Ω[m+1, m] = −P_mᵀ,   Ω[m, n] = 0 for |m − n| ≠ 1
//! ```
//!
//! A pairing is accepted only when `P_m` is square and invertible, so every
//! block has the same dimension. All rank decisions go through
//! [`ExactField`]; with rationals they are exact.
//!
//! The local involution `J_m` (for an interior block `m`) acts on
//! `B_{m−1} ⊕ B_m ⊕ B_{m+1}` as `−I` on `B_m`, maps `B_{m+1}` to `B_{m−1}` by
//! `T_m = −P_{m−1}^{−ᵀ} P_m` and `B_{m−1}` back by `T_m^{−1}`. That is the unique
//! choice of this block shape with `ω(J x, J y) = −ω(x, y)`.
//!
//! For odd length the ω-radical (the center) is spanned by chains
//! `b_1 + b_3 + … + b_L` with `b_{m+1} = −J_m b_{m−1}`.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{exact_null_space, exact_rank, exact_same_span, row_reduce};
use crate::scalar::ExactField;

type Mat<F> = Vec<Vec<F>>;

fn zeros<F: ExactField>(r: usize, c: usize) -> Mat<F> {
    vec![vec![F::zero(); c]; r]
}

fn identity<F: ExactField>(n: usize) -> Mat<F> {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = F::one();
    }
    m
}

fn transpose<F: ExactField>(a: &Mat<F>, rows: usize, cols: usize) -> Mat<F> {
    (0..cols).map(|c| (0..rows).map(|r| a[r][c].clone()).collect()).collect()
}

fn matmul<F: ExactField>(a: &Mat<F>, b: &Mat<F>, inner: usize, cols: usize) -> Mat<F> {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| {
                    (0..inner).fold(F::zero(), |acc, k| acc + row[k].clone() * b[k][c].clone())
                })
                .collect()
        })
        .collect()
}

fn matvec<F: ExactField>(a: &Mat<F>, x: &[F]) -> Vec<F> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(F::zero(), |acc, (p, q)| acc + p.clone() * q.clone()))
        .collect()
}

/// Inverse by Gauss–Jordan on `[A | I]`; `None` when singular.
fn inverse<F: ExactField>(a: &Mat<F>, n: usize) -> Option<Mat<F>> {
    let aug: Mat<F> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            r
        })
        .collect();
    let (red, pivots) = row_reduce(aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn is_zero_block<F: ExactField>(m: &Mat<F>) -> bool {
    m.iter().flatten().all(ExactField::is_negligible)
}

fn max_abs<F: ExactField>(m: &Mat<F>) -> f64 {
    m.iter()
        .flatten()
        .map(|x| x.abs().to_f64().unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max)
}

/// Local involution `J_m`, stored as a full `n × n` matrix supported on its triple.
#[derive(Debug, Clone)]
pub struct LocalInvolution<F: ExactField> {
    /// Interior block index (0-based).
    pub center: usize,
    pub matrix: Mat<F>,
}

/// One recomputed axiom with its verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub name: String,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct SymplecticSkeleton<F: ExactField> {
    dims: Vec<usize>,
    offsets: Vec<usize>,
    pairings: Vec<Mat<F>>,
    omega: Mat<F>,
    involutions: Option<Vec<LocalInvolution<F>>>,
}

/// Random `r × c` integer matrix with entries in `[-3, 3]`.
fn random_int_matrix<F: ExactField>(rng: &mut impl Rng, r: usize, c: usize) -> Mat<F> {
    (0..r)
        .map(|_| (0..c).map(|_| F::from_i64(rng.random_range(-3..=3))).collect())
        .collect()
}

/// Random invertible integer pairing (rejection sampling).
fn random_pairing<F: ExactField>(rng: &mut impl Rng, n: usize) -> Mat<F> {
    loop {
        let m = random_int_matrix(rng, n, n);
        if exact_rank(&m, n) == n {
            return m;
        }
    }
}

/// Build a skeleton with blocks of the given dimensions. When `pairings` is
/// `None` they are drawn from `seed`.
pub fn skeleton_build<F: ExactField>(
    dims: &[usize],
    pairings: Option<Vec<Mat<F>>>,
    seed: u64,
    with_involutions: bool,
) -> Result<SymplecticSkeleton<F>> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Precondition("skeleton needs at least one nonzero block".into()));
    }
    let l = dims.len();
    let pairings = match pairings {
        Some(p) => p,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..l - 1)
                .map(|m| {
                    if dims[m] == dims[m + 1] {
                        random_pairing(&mut rng, dims[m])
                    } else {
                        random_int_matrix(&mut rng, dims[m], dims[m + 1])
                    }
                })
                .collect()
        }
    };
    if pairings.len() != l - 1 {
        return Err(Error::Precondition(format!(
            "{} blocks need {} pairings, got {}",
            l,
            l - 1,
            pairings.len()
        )));
    }
    for (m, p) in pairings.iter().enumerate() {
        let shape_ok = p.len() == dims[m] && p.iter().all(|r| r.len() == dims[m + 1]);
        if !shape_ok {
            return Err(Error::DegeneratePairing {
                left: m + 1,
                right: m + 2,
                reason: format!("pairing must be a {}×{} matrix", dims[m], dims[m + 1]),
            });
        }
        if dims[m] != dims[m + 1] {
            return Err(Error::DegeneratePairing {
                left: m + 1,
                right: m + 2,
                reason: format!("unequal block dimensions {} and {}", dims[m], dims[m + 1]),
            });
        }
        let rank = exact_rank(p, dims[m + 1]);
        if rank < dims[m] {
            return Err(Error::DegeneratePairing {
                left: m + 1,
                right: m + 2,
                reason: format!("pairing rank {rank} < {}", dims[m]),
            });
        }
    }
    let mut offsets = vec![0];
    for d in dims {
        offsets.push(offsets.last().copied().unwrap_or(0) + d);
    }
    let n = offsets[l];
    let mut omega = zeros::<F>(n, n);
    for (m, p) in pairings.iter().enumerate() {
        for i in 0..dims[m] {
            for j in 0..dims[m + 1] {
                omega[offsets[m] + i][offsets[m + 1] + j] = p[i][j].clone();
                omega[offsets[m + 1] + j][offsets[m] + i] = -p[i][j].clone();
            }
        }
    }
    let mut sk = SymplecticSkeleton {
        dims: dims.to_vec(),
        offsets,
        pairings,
        omega,
        involutions: None,
    };
    if with_involutions {
        sk.involutions = Some(sk.build_involutions()?);
    }
    Ok(sk)
}

impl<F: ExactField> SymplecticSkeleton<F> {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        *self.offsets.last().expect("offsets nonempty")
    }

    pub fn omega(&self) -> &Mat<F> {
        &self.omega
    }

    pub fn pairing(&self, m: usize) -> &Mat<F> {
        &self.pairings[m]
    }

    pub fn involutions(&self) -> Option<&[LocalInvolution<F>]> {
        self.involutions.as_deref()
    }

    /// Coordinate vectors (rows) spanning block `m`.
    pub fn block_basis(&self, m: usize) -> Vec<Vec<F>> {
        let n = self.total_dim();
        (0..self.dims[m])
            .map(|i| {
                let mut v = vec![F::zero(); n];
                v[self.offsets[m] + i] = F::one();
                v
            })
            .collect()
    }

    fn block(&self, m: &Mat<F>, a: usize, b: usize) -> Mat<F> {
        (0..self.dims[a])
            .map(|i| {
                (0..self.dims[b])
                    .map(|j| m[self.offsets[a] + i][self.offsets[b] + j].clone())
                    .collect()
            })
            .collect()
    }

    fn build_involutions(&self) -> Result<Vec<LocalInvolution<F>>> {
        let l = self.len();
        let n = self.total_dim();
        let mut out = Vec::new();
        for m in 1..l.saturating_sub(1) {
            let d = self.dims[m];
            let p_prev = &self.pairings[m - 1];
            let p_next = &self.pairings[m];
            let p_prev_t_inv = inverse(&transpose(p_prev, d, d), d).ok_or(Error::InvolutionInfeasible {
                index: m + 1,
                axiom: "left pairing not invertible".into(),
            })?;
            // T = −P_{m−1}^{−ᵀ} P_m : B_{m+1} → B_{m−1}
            let t: Mat<F> = matmul(&p_prev_t_inv, p_next, d, d)
                .into_iter()
                .map(|r| r.into_iter().map(|x| -x).collect())
                .collect();
            let t_inv = inverse(&t, d).ok_or(Error::InvolutionInfeasible {
                index: m + 1,
                axiom: "transfer map not invertible".into(),
            })?;
            let mut j = zeros::<F>(n, n);
            let (o_prev, o_mid, o_next) = (self.offsets[m - 1], self.offsets[m], self.offsets[m + 1]);
            for i in 0..d {
                j[o_mid + i][o_mid + i] = -F::one();
                for k in 0..d {
                    j[o_prev + i][o_next + k] = t[i][k].clone();
                    j[o_next + i][o_prev + k] = t_inv[i][k].clone();
                }
            }
            let inv = LocalInvolution { center: m, matrix: j };
            if let Some(failed) = self.involution_axioms(&inv).into_iter().find(|a| !a.ok) {
                return Err(Error::InvolutionInfeasible {
                    index: m + 1,
                    axiom: failed.name,
                });
            }
            out.push(inv);
        }
        Ok(out)
    }

    fn triple_range(&self, m: usize) -> std::ops::Range<usize> {
        self.offsets[m - 1]..self.offsets[m + 2]
    }

    fn involution_axioms(&self, inv: &LocalInvolution<F>) -> Vec<AxiomCheck> {
        let m = inv.center;
        let range = self.triple_range(m);
        let sub = |a: &Mat<F>| -> Mat<F> {
            range.clone().map(|r| range.clone().map(|c| a[r][c].clone()).collect()).collect()
        };
        let w = range.len();
        let jl = sub(&inv.matrix);
        let om = sub(&self.omega);
        let j2 = matmul(&jl, &jl, w, w);
        let id = identity::<F>(w);
        let involutive = j2.iter().zip(&id).all(|(a, b)| a.iter().zip(b).all(|(x, y)| (x.clone() - y.clone()).is_negligible()));
        // J = −id on B_m
        let minus_on_center = self.block_basis(m).iter().all(|e| {
            let je = matvec(&inv.matrix, e);
            je.iter().zip(e).all(|(a, b)| (a.clone() + b.clone()).is_negligible())
        });
        // J(B_{m+1}) ⊆ B_{m−1}
        let next_to_prev = self.block_basis(m + 1).iter().all(|e| {
            let je = matvec(&inv.matrix, e);
            je.iter().enumerate().all(|(i, x)| {
                (self.offsets[m - 1]..self.offsets[m]).contains(&i) || x.is_negligible()
            })
        }) && exact_rank(
            &self.block_basis(m + 1).iter().map(|e| matvec(&inv.matrix, e)).collect::<Vec<_>>(),
            self.total_dim(),
        ) == self.dims[m - 1];
        // Jᵀ Ω J = −Ω on the triple
        let jt = transpose(&jl, w, w);
        let pulled = matmul(&matmul(&jt, &om, w, w), &jl, w, w);
        let anti = pulled
            .iter()
            .zip(&om)
            .all(|(a, b)| a.iter().zip(b).all(|(x, y)| (x.clone() + y.clone()).is_negligible()));
        vec![
            AxiomCheck { name: "J_m squares to the identity".into(), ok: involutive },
            AxiomCheck { name: "J_m = -id on B_m".into(), ok: minus_on_center },
            AxiomCheck { name: "J_m maps B_{m+1} onto B_{m-1}".into(), ok: next_to_prev },
            AxiomCheck { name: "J_m reverses omega".into(), ok: anti },
        ]
    }

    /// Recompute every construction axiom from the stored form.
    pub fn check_axioms(&self) -> Vec<AxiomCheck> {
        let l = self.len();
        let mut far_ok = true;
        let mut diag_ok = true;
        for a in 0..l {
            for b in 0..l {
                let blk = self.block(&self.omega, a, b);
                if a == b {
                    diag_ok &= is_zero_block(&blk);
                } else if a.abs_diff(b) >= 2 {
                    far_ok &= is_zero_block(&blk);
                }
            }
        }
        let adjacent_ok = (0..l.saturating_sub(1)).all(|m| {
            // B_{m+1} ∩ B_m′ = {0}: no vector of B_{m+1} is ω-orthogonal to B_m
            let blk = self.block(&self.omega, m, m + 1);
            exact_rank(&blk, self.dims[m + 1]) == self.dims[m + 1]
        });
        let mut checks = vec![
            AxiomCheck { name: "omega vanishes between blocks at distance >= 2".into(), ok: far_ok },
            AxiomCheck { name: "each block is isotropic".into(), ok: diag_ok },
            AxiomCheck { name: "adjacent blocks pair without radical".into(), ok: adjacent_ok },
        ];
        if let Some(invs) = &self.involutions {
            for inv in invs {
                for a in self.involution_axioms(inv) {
                    checks.push(AxiomCheck {
                        name: format!("{} (m = {})", a.name, inv.center + 1),
                        ok: a.ok,
                    });
                }
            }
        }
        checks
    }

    /// Largest `|ω|` on `B_m × B_m` over all blocks.
    pub fn isotropy_residual(&self) -> f64 {
        (0..self.len())
            .map(|m| max_abs(&self.block(&self.omega, m, m)))
            .fold(0.0, f64::max)
    }

    /// Basis of the ω-radical of the whole skeleton, by exact null space of Ω.
    pub fn radical(&self) -> Vec<Vec<F>> {
        exact_null_space(&self.omega, self.total_dim())
    }

    /// Apply `J_{m}` (0-based center) to a vector, or `None` when the vector has
    /// components outside the triple on which `J_m` is declared.
    fn apply_involution(&self, m: usize, x: &[F]) -> Option<Vec<F>> {
        let invs = self.involutions.as_ref()?;
        let inv = invs.iter().find(|i| i.center == m)?;
        let range = self.triple_range(m);
        if x.iter().enumerate().any(|(i, v)| !range.contains(&i) && !v.is_negligible()) {
            return None;
        }
        Some(matvec(&inv.matrix, x))
    }

    /// Chain `x, −J_2 x, J_4 J_2 x, …` (1-based block labels) through every odd
    /// block, summed. This is the relation used to derive the center.
    fn chain_image(&self, x: &[F]) -> Option<Vec<F>> {
        let mut total = x.to_vec();
        let mut cur = x.to_vec();
        let mut m = 1;
        while m + 1 < self.len() {
            cur = self.apply_involution(m, &cur)?.into_iter().map(|v| -v).collect();
            for (t, c) in total.iter_mut().zip(&cur) {
                *t = t.clone() + c.clone();
            }
            m += 2;
        }
        Some(total)
    }

    /// `(I + Σ_{i=1}^{p} (−1)^i J_{2i}) x` applied literally, each `J` to `x`
    /// itself. Defined only while every `J_{2i}` has `B_1` inside its triple.
    fn stated_sum_image(&self, x: &[F]) -> Option<Vec<F>> {
        let mut total = x.to_vec();
        let p = (self.len() - 1) / 2;
        for i in 1..=p {
            let jx = self.apply_involution(2 * i - 1, x)?;
            let sign_neg = i % 2 == 1;
            for (t, v) in total.iter_mut().zip(jx) {
                *t = if sign_neg { t.clone() - v } else { t.clone() + v };
            }
        }
        Some(total)
    }
}

/// Outcome of comparing a formula image with the brute-force center.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CenterComparison {
    Matches,
    Differs,
    NotEvaluable { reason: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct CenterReport {
    pub center_dim: usize,
    /// Image of `B_1` under the chained relation `b_{m+1} = −J_m b_{m−1}`.
    pub chain_relation: CenterComparison,
    /// Image of `B_1` under the literal alternating sum of involutions.
    pub literal_sum: CenterComparison,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkeletonReport {
    pub length: usize,
    pub exact: bool,
    pub axioms: Vec<AxiomCheck>,
    /// Every block isotropic (exact zero check).
    pub isotropic: bool,
    pub isotropy_residual: f64,
    /// Dimension of the ω-radical of the full sum.
    pub radical_dim: usize,
    /// Even length only: radical is zero.
    pub factor: Option<bool>,
    /// Odd length with involutions only.
    pub center: Option<CenterReport>,
}

fn compare_center<F: ExactField>(
    images: Option<Vec<Vec<F>>>,
    radical: &[Vec<F>],
    n: usize,
    reason: &str,
) -> CenterComparison {
    match images {
        None => CenterComparison::NotEvaluable {
            reason: reason.to_string(),
        },
        Some(imgs) => {
            if exact_same_span(&imgs, radical, n) {
                CenterComparison::Matches
            } else {
                CenterComparison::Differs
            }
        }
    }
}

/// Check isotropy, factoriality (even length) and the center formulas (odd length).
pub fn skeleton_verify<F: ExactField>(sk: &SymplecticSkeleton<F>) -> Result<SkeletonReport> {
    let l = sk.len();
    let n = sk.total_dim();
    let radical = sk.radical();
    let isotropy = sk.isotropy_residual();
    let center = if l % 2 == 1 {
        if l >= 3 && sk.involutions.is_none() {
            return Err(Error::MissingInvolutions);
        }
        let b1 = sk.block_basis(0);
        let chain: Option<Vec<Vec<F>>> = b1.iter().map(|x| sk.chain_image(x)).collect();
        let literal: Option<Vec<Vec<F>>> = b1.iter().map(|x| sk.stated_sum_image(x)).collect();
        Some(CenterReport {
            center_dim: radical.len(),
            chain_relation: compare_center(chain, &radical, n, "involution missing"),
            literal_sum: compare_center(
                literal,
                &radical,
                n,
                "needs J_{2i} applied to B_1, which lies outside the triple on which J_{2i} acts once i >= 2",
            ),
        })
    } else {
        None
    };
    Ok(SkeletonReport {
        length: l,
        exact: F::EXACT,
        axioms: sk.check_axioms(),
        isotropic: isotropy == 0.0 || (0..l).all(|m| is_zero_block(&sk.block(&sk.omega, m, m))),
        isotropy_residual: isotropy,
        radical_dim: radical.len(),
        factor: l.is_multiple_of(2).then_some(radical.is_empty()),
        center,
    })
}

/// Random skeleton of the given length with equal block dimension in `1..=max_dim`.
pub fn random_skeleton<F: ExactField>(
    rng: &mut impl Rng,
    length: usize,
    max_dim: usize,
    with_involutions: bool,
) -> Result<SymplecticSkeleton<F>> {
    let d = rng.random_range(1..=max_dim);
    let seed = rng.random::<u64>();
    skeleton_build(&vec![d; length], None, seed, with_involutions)
}

/// Exact rational skeleton.
pub type ExactSkeleton = SymplecticSkeleton<BigRational>;

/// Convert an exact form to `f64` entries.
pub fn to_f64_matrix<F: ExactField>(m: &Mat<F>) -> Vec<Vec<f64>> {
    m.iter()
        .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> BigRational {
        <BigRational as ExactField>::from_i64(v)
    }

    #[test]
    fn symplectic_plane() {
        let sk = skeleton_build::<BigRational>(&[1, 1], Some(vec![vec![vec![q(1)]]]), 0, false).unwrap();
        let r = skeleton_verify(&sk).unwrap();
        assert_eq!(r.radical_dim, 0);
        assert_eq!(r.factor, Some(true));
        assert!(r.axioms.iter().all(|a| a.ok));
    }

    #[test]
    fn zero_pairing_is_degenerate() {
        let err = skeleton_build::<BigRational>(&[1, 1], Some(vec![vec![vec![q(0)]]]), 0, false);
        assert!(matches!(err, Err(Error::DegeneratePairing { .. })));
        let err = skeleton_build::<BigRational>(&[1, 2], None, 0, false);
        assert!(matches!(err, Err(Error::DegeneratePairing { .. })));
    }

    #[test]
    fn three_blocks_with_involutions() {
        let sk = skeleton_build::<BigRational>(&[1, 1, 1], None, 5, true).unwrap();
        assert!(sk.omega()[0][2].is_negligible());
        let r = skeleton_verify(&sk).unwrap();
        assert!(r.axioms.iter().all(|a| a.ok), "{:?}", r.axioms);
        let c = r.center.unwrap();
        assert_eq!(c.center_dim, 1);
        assert_eq!(c.chain_relation, CenterComparison::Matches);
        assert_eq!(c.literal_sum, CenterComparison::Matches);
    }

    #[test]
    fn odd_without_involutions_is_an_error() {
        let sk = skeleton_build::<BigRational>(&[1, 1, 1], None, 5, false).unwrap();
        assert!(matches!(skeleton_verify(&sk), Err(Error::MissingInvolutions)));
    }

    #[test]
    fn seven_pairs_of_two_pass_axioms() {
        let sk = skeleton_build::<BigRational>(&[2, 2, 2, 2], None, 7, true).unwrap();
        assert!(sk.check_axioms().iter().all(|a| a.ok));
        let r = skeleton_verify(&sk).unwrap();
        assert_eq!(r.factor, Some(true));
    }

    /// Brute-force oracle for the center: solve Ω x = 0 by trying the chain
    /// formula with explicit inverses, independent of the involution matrices.
    #[test]
    fn longer_odd_chain_matches_and_literal_sum_is_not_evaluable() {
        let sk = skeleton_build::<BigRational>(&[2, 2, 2, 2, 2], None, 11, true).unwrap();
        let r = skeleton_verify(&sk).unwrap();
        let c = r.center.unwrap();
        assert_eq!(c.center_dim, 2);
        assert_eq!(c.chain_relation, CenterComparison::Matches);
        assert!(matches!(c.literal_sum, CenterComparison::NotEvaluable { .. }));

        // b_{m+1} = P_m^{-1} P_{m-1}ᵀ b_{m-1}, computed directly
        let d = 2;
        let n = sk.total_dim();
        let mut images = Vec::new();
        for e in 0..d {
            let mut b: Vec<BigRational> = (0..d).map(|i| if i == e { q(1) } else { q(0) }).collect();
            let mut x = vec![q(0); n];
            x[..d].clone_from_slice(&b);
            for m in [1usize, 3] {
                let pt = transpose(sk.pairing(m - 1), d, d);
                let pinv = inverse(sk.pairing(m), d).unwrap();
                b = matvec(&pinv, &matvec(&pt, &b));
                x[sk.offsets[m + 1]..sk.offsets[m + 1] + d].clone_from_slice(&b);
            }
            images.push(x);
        }
        assert!(exact_same_span(&images, &sk.radical(), n));
    }

    #[test]
    fn float_skeleton_works_with_cutoff() {
        let sk = skeleton_build::<f64>(&[1, 1, 1, 1], None, 2, true).unwrap();
        let r = skeleton_verify(&sk).unwrap();
        assert!(!r.exact);
        assert_eq!(r.factor, Some(true));
    }
}
