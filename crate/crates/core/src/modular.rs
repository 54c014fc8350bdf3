//! Tomita operators of standard subspaces and standard pairs, their polar
//! decompositions, the angle operator and the two-dimensional fiber model.
//!
//! Every operator lives on the realification ℝ^{2d} and carries a linearity tag
//! that is recomputed from its matrix, never trusted from the caller.
//!
//! The polar decomposition `s = j δ^{1/2}` is taken from the SVD `s = U Σ Vᵀ`
//! (`j = U Vᵀ`, `δ^{1/2} = V Σ Vᵀ`). Going through the eigendecomposition of
//! `sᵀs` squares the condition number and loses the involution property of `j`
//! once δ spans more than about eight decades.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    angle_fiber, classify_pair, classify_subspace, gaussian, symplectic_complement,
    ComplexSpace, RealSubspace,
};
use crate::linalg;
use crate::scalar::{lit, to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Linearity {
    ComplexLinear,
    ConjugateLinear,
    Neither,
}

impl fmt::Display for Linearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linearity::ComplexLinear => "complex-linear",
            Linearity::ConjugateLinear => "conjugate-linear",
            Linearity::Neither => "neither",
        })
    }
}

/// Decide how `a` interacts with `Jc`, relative to the size of `a`.
pub fn linearity_of<T: Real>(space: ComplexSpace, a: &DMatrix<T>) -> Linearity {
    // (Jc Aᵀ)ᵀ = A Jcᵀ = −A Jc
    let neg_aj = space.apply_jc(&a.transpose()).transpose();
    let ja = space.apply_jc(a);
    let tol = T::identity_tol() * T::one().max(a.amax());
    if (&ja + &neg_aj).amax() <= tol {
        Linearity::ComplexLinear
    } else if (&ja - &neg_aj).amax() <= tol {
        Linearity::ConjugateLinear
    } else {
        Linearity::Neither
    }
}

/// A real-linear operator on ℝ^{2d} with its recomputed linearity tag.
#[derive(Debug, Clone)]
pub struct OperatorOnRealification<T: Real> {
    space: ComplexSpace,
    matrix: DMatrix<T>,
    linearity: Linearity,
}

impl<T: Real> OperatorOnRealification<T> {
    pub fn new(space: ComplexSpace, matrix: DMatrix<T>) -> Result<Self> {
        let n = space.real_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: matrix.nrows().max(matrix.ncols()),
            });
        }
        let linearity = linearity_of(space, &matrix);
        Ok(Self {
            space,
            matrix,
            linearity,
        })
    }

    /// Like [`new`](Self::new) but fails when the computed tag differs from `declared`.
    pub fn with_declared(space: ComplexSpace, matrix: DMatrix<T>, declared: Linearity) -> Result<Self> {
        let op = Self::new(space, matrix)?;
        if op.linearity != declared {
            return Err(Error::LinearityMismatch {
                declared: declared.to_string(),
                computed: op.linearity.to_string(),
            });
        }
        Ok(op)
    }

    pub fn identity(space: ComplexSpace) -> Self {
        let n = space.real_dim();
        Self {
            space,
            matrix: DMatrix::identity(n, n),
            linearity: Linearity::ComplexLinear,
        }
    }

    /// Complex conjugation `z ↦ z̄`.
    pub fn conjugation(space: ComplexSpace) -> Self {
        let n = space.real_dim();
        let matrix = DMatrix::from_fn(n, n, |r, c| {
            if r != c {
                T::zero()
            } else if r % 2 == 0 {
                T::one()
            } else {
                -T::one()
            }
        });
        Self {
            space,
            matrix,
            linearity: Linearity::ConjugateLinear,
        }
    }

    pub fn space(&self) -> ComplexSpace {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn linearity(&self) -> Linearity {
        self.linearity
    }

    /// Product `self ∘ other`, with the tag recomputed.
    pub fn compose(&self, other: &Self) -> Self {
        let matrix = &self.matrix * &other.matrix;
        Self {
            space: self.space,
            linearity: linearity_of(self.space, &matrix),
            matrix,
        }
    }

    pub fn apply(&self, x: &DVector<T>) -> DVector<T> {
        &self.matrix * x
    }

    pub fn image(&self, k: &RealSubspace<T>) -> RealSubspace<T> {
        k.image(&self.matrix)
    }

    /// `‖A² − I‖` in operator norm.
    pub fn involution_defect(&self) -> T {
        let n = self.matrix.nrows();
        linalg::spectral_norm(&(&self.matrix * &self.matrix - DMatrix::identity(n, n)))
    }

    pub fn distance(&self, other: &Self) -> T {
        linalg::spectral_norm(&(&self.matrix - &other.matrix))
    }

    fn rows_f64(&self) -> Vec<Vec<f64>> {
        self.matrix
            .row_iter()
            .map(|r| r.iter().map(|&x| to_f64(x)).collect())
            .collect()
    }
}

/// Residuals of the defining identities, recorded when modular data is built.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ModularResiduals {
    /// `‖s x − x‖` over an orthonormal frame of K.
    pub s_fixes_k: f64,
    /// `‖s² − I‖`.
    pub s_involution: f64,
    /// `‖s − j δ^{1/2}‖ / max(1, ‖s‖)`.
    pub reconstruction: f64,
    /// `‖j² − I‖`.
    pub j_involution: f64,
    /// `‖j δ^{1/2} j − δ^{−1/2}‖ / max(1, ‖δ^{1/2}‖)`.
    pub j_delta_j: f64,
}

/// `(s, j, δ)` of a standard subspace with the eigendata of δ.
#[derive(Debug, Clone)]
pub struct ModularData<T: Real> {
    pub s: OperatorOnRealification<T>,
    pub j: OperatorOnRealification<T>,
    pub delta: OperatorOnRealification<T>,
    pub delta_sqrt: OperatorOnRealification<T>,
    /// Eigenvalues of δ as a real operator, ascending (each appears twice).
    pub delta_eigvals: DVector<T>,
    /// Matching g-orthonormal eigenvectors (columns).
    pub delta_eigvecs: DMatrix<T>,
    pub residuals: ModularResiduals,
}

impl<T: Real> ModularData<T> {
    pub fn space(&self) -> ComplexSpace {
        self.s.space
    }

    /// Spectrum of δ as a complex-linear operator, ascending, with complex multiplicity.
    pub fn delta_spectrum(&self) -> Vec<T> {
        self.delta_eigvals.iter().step_by(2).copied().collect()
    }

    /// Spectrum of the angle operator, ascending, with complex multiplicity.
    pub fn theta_spectrum(&self) -> Vec<T> {
        let mut t: Vec<T> = self.delta_spectrum().into_iter().map(theta_of_delta).collect();
        t.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        t
    }

    /// `δ^p` for a real exponent.
    pub fn delta_power(&self, p: T) -> OperatorOnRealification<T> {
        let m = linalg::sym_function(&self.delta_eigvals, &self.delta_eigvecs, |l| l.powf(p));
        OperatorOnRealification {
            space: self.space(),
            matrix: m,
            linearity: Linearity::ComplexLinear,
        }
    }

    /// The unitary `δ^{it} = cos(t log δ) + Jc sin(t log δ)`.
    pub fn delta_it(&self, t: T) -> OperatorOnRealification<T> {
        let (vals, vecs) = (&self.delta_eigvals, &self.delta_eigvecs);
        let c = linalg::sym_function(vals, vecs, |l| (t * l.ln()).cos());
        let s = linalg::sym_function(vals, vecs, |l| (t * l.ln()).sin());
        let matrix = c + self.space().apply_jc(&s);
        OperatorOnRealification {
            space: self.space(),
            linearity: linearity_of(self.space(), &matrix),
            matrix,
        }
    }

    pub fn to_json(&self) -> ModularDataJson {
        ModularDataJson {
            dim_complex: self.space().complex_dim(),
            s: self.s.rows_f64(),
            j: self.j.rows_f64(),
            delta: self.delta.rows_f64(),
            delta_spectrum: self.delta_spectrum().into_iter().map(to_f64).collect(),
            theta_spectrum: self.theta_spectrum().into_iter().map(to_f64).collect(),
            residuals: self.residuals,
        }
    }
}

/// JSON form of [`ModularData`]: row-major operator arrays, spectra ascending.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModularDataJson {
    pub dim_complex: usize,
    pub s: Vec<Vec<f64>>,
    pub j: Vec<Vec<f64>>,
    pub delta: Vec<Vec<f64>>,
    pub delta_spectrum: Vec<f64>,
    pub theta_spectrum: Vec<f64>,
    pub residuals: ModularResiduals,
}

/// `Θ = arccos(|λ − 1| / (λ + 1))` for an eigenvalue λ of δ.
pub fn theta_of_delta<T: Real>(lambda: T) -> T {
    let c = (lambda - T::one()).abs() / (lambda + T::one());
    c.min(T::one()).acos()
}

fn square_inverse<T: Real>(m: DMatrix<T>) -> Result<DMatrix<T>> {
    let (_, s, _) = linalg::svd_sorted(&m);
    let smax = s.first().copied().unwrap_or(T::zero());
    let smin = s.last().copied().unwrap_or(T::zero());
    if smax == T::zero() || smin < T::rank_tol() * smax {
        return Err(Error::Singular {
            sigma_min: to_f64(smin),
        });
    }
    m.try_inverse().ok_or(Error::Singular {
        sigma_min: to_f64(smin),
    })
}

/// Tomita operator `s(h + i k) = h − i k` of a standard subspace and its polar data.
pub fn tomita<T: Real>(k: &RealSubspace<T>) -> Result<ModularData<T>> {
    let class = classify_subspace(k);
    if !class.is_standard {
        return Err(Error::NotStandard {
            complex_part: class.dim_complex_part,
            cyclic_defect: class.dim_cyclic_defect,
        });
    }
    let space = k.space();
    let n = space.real_dim();
    let f = k.frame();
    let jf = space.apply_jc(f);
    let basis = concat(f, &jf);
    let image = concat(f, &(-&jf));
    let s_mat = image * square_inverse(basis)?;
    let s = OperatorOnRealification::new(space, s_mat)?;

    let (u, sig, vt) = linalg::svd(&s.matrix);
    let v = vt.transpose();
    let j_mat = &u * &vt;
    let dsqrt_mat = &v * DMatrix::from_diagonal(&sig) * &vt;
    let d_mat = &v * DMatrix::from_diagonal(&sig.map(|x| x * x)) * &vt;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sig[a].partial_cmp(&sig[b]).unwrap_or(std::cmp::Ordering::Equal));
    let delta_eigvals = DVector::from_iterator(n, order.iter().map(|&i| sig[i] * sig[i]));
    let delta_eigvecs = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);

    let j = OperatorOnRealification::with_declared(space, j_mat, Linearity::ConjugateLinear)?;
    let delta_sqrt = OperatorOnRealification::with_declared(space, dsqrt_mat, Linearity::ComplexLinear)?;
    let delta = OperatorOnRealification::with_declared(space, d_mat, Linearity::ComplexLinear)?;

    let id = DMatrix::<T>::identity(n, n);
    let s_norm = T::one().max(sig.max());
    let dinv_sqrt = &v * DMatrix::from_diagonal(&sig.map(|x| T::one() / x)) * &vt;
    let residuals = ModularResiduals {
        s_fixes_k: to_f64((&s.matrix * f - f).amax()),
        s_involution: to_f64(s.involution_defect()),
        reconstruction: to_f64(
            linalg::spectral_norm(&(&s.matrix - &j.matrix * &delta_sqrt.matrix)) / s_norm,
        ),
        j_involution: to_f64(linalg::spectral_norm(&(&j.matrix * &j.matrix - &id))),
        j_delta_j: to_f64(
            linalg::spectral_norm(&(&j.matrix * &delta_sqrt.matrix * &j.matrix - dinv_sqrt)) / s_norm,
        ),
    };
    Ok(ModularData {
        s,
        j,
        delta,
        delta_sqrt,
        delta_eigvals,
        delta_eigvecs,
        residuals,
    })
}

fn concat<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let mut m = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    m.columns_mut(0, a.ncols()).copy_from(a);
    m.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    m
}

/// `s_{E,F}(e + f) = e − f` for a standard pair.
#[derive(Debug, Clone)]
pub struct PairTomita<T: Real> {
    pub op: OperatorOnRealification<T>,
    /// Largest `|‖x‖² + ‖s x‖² − 2(‖e‖² + ‖f‖²)|` relative to `‖e‖² + ‖f‖²`
    /// over the sampled `x = e + f`.
    pub graph_norm_defect: f64,
    pub samples: usize,
}

pub fn tomita_pair<T: Real>(
    e: &RealSubspace<T>,
    f: &RealSubspace<T>,
    samples: usize,
    seed: u64,
) -> Result<PairTomita<T>> {
    let pc = classify_pair(e, f);
    if !pc.standard {
        return Err(Error::NotStandardPair {
            meet_dim: pc.meet_dim,
            join_codim: pc.join_codim,
        });
    }
    let space = e.space();
    let basis = concat(e.frame(), f.frame());
    let image = concat(e.frame(), &(-f.frame()));
    let m = image * square_inverse(basis)?;
    let op = OperatorOnRealification::new(space, m)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::zero();
    for _ in 0..samples {
        let a = DVector::from_fn(e.dim(), |_, _| gaussian::<T>(&mut rng));
        let b = DVector::from_fn(f.dim(), |_, _| gaussian::<T>(&mut rng));
        let ev = e.frame() * a;
        let fv = f.frame() * b;
        let x = &ev + &fv;
        let sx = op.apply(&x);
        let two = T::one() + T::one();
        let rhs = two * (ev.norm_squared() + fv.norm_squared());
        let lhs = x.norm_squared() + sx.norm_squared();
        worst = worst.max((lhs - rhs).abs() / rhs.max(T::default_epsilon()));
    }
    Ok(PairTomita {
        op,
        graph_norm_defect: to_f64(worst),
        samples,
    })
}

/// Polar factors `A = u · p` with `p = (AᵀA)^{1/2}`.
#[derive(Debug, Clone)]
pub struct Polar<T: Real> {
    pub u: OperatorOnRealification<T>,
    pub positive: OperatorOnRealification<T>,
    pub positive_eigvals: DVector<T>,
    pub positive_eigvecs: DMatrix<T>,
    /// For involutive input: `(‖u² − I‖, ‖u p u − p^{−1}‖ / max(1, ‖p‖))`.
    pub involution_check: Option<(f64, f64)>,
}

pub fn polar<T: Real>(a: &OperatorOnRealification<T>) -> Result<Polar<T>> {
    let space = a.space;
    let n = space.real_dim();
    let (u, sig, vt) = linalg::svd(&a.matrix);
    let smax = sig.max();
    let smin = sig.min();
    if smax == T::zero() || smin < T::rank_tol() * smax {
        return Err(Error::Singular {
            sigma_min: to_f64(smin),
        });
    }
    let v = vt.transpose();
    let u_op = OperatorOnRealification::new(space, &u * &vt)?;
    let p_mat = &v * DMatrix::from_diagonal(&sig) * &vt;
    let p_inv = &v * DMatrix::from_diagonal(&sig.map(|x| T::one() / x)) * &vt;
    let positive = OperatorOnRealification::new(space, p_mat)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| sig[x].partial_cmp(&sig[y]).unwrap_or(std::cmp::Ordering::Equal));
    let positive_eigvals = DVector::from_iterator(n, order.iter().map(|&i| sig[i]));
    let positive_eigvecs = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);

    let involution_check = if a.involution_defect() <= T::identity_tol() * T::one().max(smax * smax) {
        let id = DMatrix::<T>::identity(n, n);
        let uu = linalg::spectral_norm(&(&u_op.matrix * &u_op.matrix - id));
        let upu = linalg::spectral_norm(&(&u_op.matrix * &positive.matrix * &u_op.matrix - p_inv))
            / T::one().max(smax);
        Some((to_f64(uu), to_f64(upu)))
    } else {
        None
    };
    Ok(Polar {
        u: u_op,
        positive,
        positive_eigvals,
        positive_eigvecs,
        involution_check,
    })
}

/// The angle operator `Θ`, diagonal in the eigenbasis of δ.
#[derive(Debug, Clone)]
pub struct AngleOperator<T: Real> {
    pub theta: OperatorOnRealification<T>,
    pub eigvals: DVector<T>,
    pub eigvecs: DMatrix<T>,
}

impl<T: Real> AngleOperator<T> {
    /// Range of the spectral projection `χ_{[a,b]}(Θ)`.
    pub fn chi(&self, a: T, b: T) -> RealSubspace<T> {
        let eps = T::rank_tol();
        let cols: Vec<usize> = (0..self.eigvals.len())
            .filter(|&i| self.eigvals[i] >= a - eps && self.eigvals[i] <= b + eps)
            .collect();
        let space = self.theta.space;
        let m = DMatrix::from_fn(space.real_dim(), cols.len(), |r, c| self.eigvecs[(r, cols[c])]);
        RealSubspace::from_orthonormal(space, m)
    }

    pub fn chi_projector(&self, a: T, b: T) -> DMatrix<T> {
        self.chi(a, b).projector()
    }
}

pub fn angle_operator<T: Real>(md: &ModularData<T>) -> AngleOperator<T> {
    let eigvals = md.delta_eigvals.map(theta_of_delta);
    let matrix = linalg::sym_function(&md.delta_eigvals, &md.delta_eigvecs, theta_of_delta);
    AngleOperator {
        theta: OperatorOnRealification {
            space: md.space(),
            linearity: linearity_of(md.space(), &matrix),
            matrix,
        },
        eigvals,
        eigvecs: md.delta_eigvecs.clone(),
    }
}

/// The −1 eigenspace of a conjugate-linear involution.
///
/// An orthogonal involution is symmetric, so the eigenspace is read off from
/// the sign of the eigenvalues of `(j + jᵀ)/2`. This stays clean even when
/// `j² − I` is only small rather than zero, where a singular-value cutoff on
/// `j + I` would misjudge the rank.
pub fn kernel_j_plus_i<T: Real>(j: &OperatorOnRealification<T>) -> Result<RealSubspace<T>> {
    let defect = j.involution_defect();
    if defect > T::identity_tol() {
        return Err(Error::NotInvolution {
            residual: to_f64(defect),
        });
    }
    let space = j.space;
    let m = &j.matrix;
    let asym = (m - m.transpose()).amax();
    if asym <= T::identity_tol() {
        let (vals, vecs) = linalg::sym_eigen_sorted(m);
        let cols: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] < T::zero()).collect();
        let mut f = DMatrix::from_fn(space.real_dim(), cols.len(), |r, c| vecs[(r, cols[c])]);
        linalg::normalize_signs(&mut f);
        return Ok(RealSubspace::from_orthonormal(space, f));
    }
    let n = space.real_dim();
    let shifted = m + DMatrix::<T>::identity(n, n);
    RealSubspace::from_columns(space, &linalg::null_space(&shifted))
}

/// Finite-dimensional surrogates of the spectral criteria `0 ∈ σ(δ)` and `1 ∈ σ(δ)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralFlags {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub dist_of_1_to_spectrum: f64,
    pub note: String,
}

pub const SPECTRAL_NOTE: &str = "finite spectrum: exact membership of 0 or 1 in the spectrum is only \
decidable in the sequence model; these are margins along a truncation";

pub fn spectral_flags<T: Real>(md: &ModularData<T>) -> SpectralFlags {
    let spectrum = md.delta_spectrum();
    let lo = spectrum.first().copied().unwrap_or(T::one());
    let hi = spectrum.last().copied().unwrap_or(T::one());
    let dist = spectrum
        .iter()
        .map(|&l| (l - T::one()).abs())
        .fold(T::max_value().unwrap_or(T::one()), |a, b| a.min(b));
    SpectralFlags {
        lambda_min: to_f64(lo),
        lambda_max: to_f64(hi),
        dist_of_1_to_spectrum: to_f64(dist),
        note: SPECTRAL_NOTE.to_string(),
    }
}

/// One spectral block of `|log δ|` in the pairing report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairingBlock {
    pub abs_log_delta: f64,
    pub real_dim: usize,
    pub sup_re_pairing: f64,
    pub method: String,
}

/// Maximal real overlap between K and Ker(j+I), and the graph-norm ratio.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairingReport {
    pub sup_re_pairing: f64,
    pub min_graph_ratio: f64,
    /// Same supremum from one global SVD, as an internal cross-check.
    pub global_sup: f64,
    pub bound_sup: f64,
    pub bound_ratio: f64,
    pub blocks: Vec<PairingBlock>,
}

impl PairingReport {
    pub fn sup_within_bound(&self, tol: f64) -> bool {
        self.sup_re_pairing <= self.bound_sup + tol
    }

    pub fn ratio_within_bound(&self, tol: f64) -> bool {
        self.min_graph_ratio >= self.bound_ratio - tol
    }
}

/// Largest singular value of a 2×2 matrix, in closed form.
fn sigma_max_2x2<T: Real>(m: &DMatrix<T>) -> T {
    let fro2 = m.norm_squared();
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let four: T = lit(4.0);
    let disc = (fro2 * fro2 - four * det * det).max(T::zero()).sqrt();
    ((fro2 + disc) / (T::one() + T::one())).sqrt()
}

/// Maximize `‖M (cos a, sin a)‖` over `a ∈ [0, π]` by golden-section search.
/// The function is `π`-periodic with one maximum per period, so a bracket
/// around the best of a coarse scan is unimodal.
fn golden_section_2x2<T: Real>(m: &DMatrix<T>) -> T {
    let f = |a: T| {
        let v = DVector::from_vec(vec![a.cos(), a.sin()]);
        (m * v).norm()
    };
    let pi = T::pi();
    let steps = 16;
    let h = pi / lit::<T>(steps as f64);
    let best = (0..steps)
        .max_by(|&x, &y| {
            f(lit::<T>(x as f64) * h)
                .partial_cmp(&f(lit::<T>(y as f64) * h))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or(0);
    let mut lo = lit::<T>(best as f64 - 1.0) * h;
    let mut hi = lit::<T>(best as f64 + 1.0) * h;
    let g: T = lit((5f64.sqrt() - 1.0) / 2.0);
    let tol: T = lit(1e-9);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

/// Supremum of `|Re⟨h,k⟩|` over unit `h ∈ K`, `k ∈ Ker(j+I)`, computed block by
/// block on the spectral subspaces of `|log δ|` (each is invariant under j and
/// δ^{it}, so K splits along them). Two-dimensional blocks are solved in closed
/// form and refined by golden-section search; larger blocks use an SVD.
pub fn pairing_report<T: Real>(k: &RealSubspace<T>) -> Result<PairingReport> {
    let md = tomita(k)?;
    let kernel = kernel_j_plus_i(&md.j)?;
    let space = k.space();
    let n = space.real_dim();

    let logs: Vec<T> = md.delta_eigvals.iter().map(|l| l.ln().abs()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| logs[a].partial_cmp(&logs[b]).unwrap_or(std::cmp::Ordering::Equal));
    let gap: T = lit(1e-6);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if logs[i] - logs[*g.last().expect("nonempty")] <= gap * T::one().max(logs[i]) => {
                g.push(i)
            }
            _ => groups.push(vec![i]),
        }
    }

    let mut blocks = Vec::with_capacity(groups.len());
    let mut sup = T::zero();
    for g in &groups {
        let vb = DMatrix::from_fn(n, g.len(), |r, c| md.delta_eigvecs[(r, g[c])]);
        let pk = linalg::orthonormal_span(&(&vb * (vb.transpose() * k.frame())));
        let pn = linalg::orthonormal_span(&(&vb * (vb.transpose() * kernel.frame())));
        let cross = pk.transpose() * &pn;
        let (value, method) = if cross.nrows() == 2 && cross.ncols() == 2 {
            let closed = sigma_max_2x2(&cross);
            let refined = golden_section_2x2(&cross);
            (closed.max(refined), "closed-form 2x2 + golden section")
        } else if cross.is_empty() {
            (T::zero(), "empty")
        } else {
            (linalg::spectral_norm(&cross), "svd")
        };
        sup = sup.max(value);
        blocks.push(PairingBlock {
            abs_log_delta: to_f64(logs[g[0]]),
            real_dim: g.len(),
            sup_re_pairing: to_f64(value),
            method: method.to_string(),
        });
    }
    let global = linalg::spectral_norm(&(k.frame().transpose() * kernel.frame()));
    let half_sqrt2 = std::f64::consts::SQRT_2 / 2.0;
    let sup = to_f64(sup);
    Ok(PairingReport {
        sup_re_pairing: sup,
        min_graph_ratio: 1.0 - sup,
        global_sup: to_f64(global),
        bound_sup: half_sqrt2,
        bound_ratio: (std::f64::consts::SQRT_2 - 1.0) / std::f64::consts::SQRT_2,
        blocks,
    })
}

/// Two-dimensional fiber with angle θ together with its modular data.
#[derive(Debug, Clone)]
pub struct Fiber<T: Real> {
    pub theta: T,
    pub subspace: RealSubspace<T>,
    pub modular: ModularData<T>,
}

impl<T: Real> Fiber<T> {
    /// Closed-form δ-spectrum `{tan²(θ/2), cot²(θ/2)}`, ascending.
    pub fn predicted_spectrum(&self) -> [T; 2] {
        let t = (self.theta / (T::one() + T::one())).tan();
        let (a, b) = (t * t, T::one() / (t * t));
        if a <= b { [a, b] } else { [b, a] }
    }

    /// Eigenvector of δ on the small branch `tan²(θ/2)`: the first coordinate axis.
    pub fn small_branch() -> DVector<T> {
        DVector::from_vec(vec![T::one(), T::zero(), T::zero(), T::zero()])
    }

    /// Eigenvector of δ on the large branch `cot²(θ/2)`: the third coordinate axis.
    pub fn large_branch() -> DVector<T> {
        DVector::from_vec(vec![T::zero(), T::zero(), T::one(), T::zero()])
    }

    pub fn complement(&self) -> RealSubspace<T> {
        symplectic_complement(&self.subspace)
    }
}

pub fn fiber<T: Real>(theta: T) -> Result<Fiber<T>> {
    let subspace = angle_fiber(theta)?;
    let modular = tomita(&subspace)?;
    Ok(Fiber {
        theta,
        subspace,
        modular,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{direct_sum, real_line, span};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};

    /// Independent oracle: δ = sᵀs by direct multiplication, eigenvalues via
    /// the symmetric eigensolver.
    fn delta_oracle(k: &RealSubspace<f64>) -> Vec<f64> {
        let space = k.space();
        let f = k.frame().clone();
        let jf = space.apply_jc(&f);
        let mut b = DMatrix::zeros(f.nrows(), 2 * f.ncols());
        let mut im = b.clone();
        for c in 0..f.ncols() {
            b.set_column(c, &f.column(c));
            b.set_column(f.ncols() + c, &jf.column(c));
            im.set_column(c, &f.column(c));
            im.set_column(f.ncols() + c, &(-jf.column(c)));
        }
        let s = im * b.try_inverse().unwrap();
        let d = s.transpose() * s;
        let mut ev: Vec<f64> = d.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    #[test]
    fn real_line_is_self_dual() {
        let k = real_line::<f64>();
        let md = tomita(&k).unwrap();
        let conj = OperatorOnRealification::<f64>::conjugation(k.space());
        assert!(md.s.distance(&conj) < 1e-12);
        assert!(md.j.distance(&conj) < 1e-12);
        assert!(md.delta.distance(&OperatorOnRealification::identity(k.space())) < 1e-12);
        let ker = kernel_j_plus_i(&md.j).unwrap();
        assert_eq!(ker, real_line::<f64>().times_i());
    }

    #[test]
    fn fiber_spectrum_matches_closed_form_and_oracle() {
        for theta in [0.2, FRAC_PI_3, 1.2, FRAC_PI_2] {
            let fb = fiber::<f64>(theta).unwrap();
            let spectrum = fb.modular.delta_spectrum();
            let pred = fb.predicted_spectrum();
            assert!((spectrum[0] - pred[0]).abs() < 1e-10 && (spectrum[1] - pred[1]).abs() < 1e-10);
            let oracle = delta_oracle(&fb.subspace);
            assert!((oracle[0] - pred[0]).abs() < 1e-10);
            assert!((oracle[3] - pred[1]).abs() < 1e-8 * pred[1]);
            let r = fb.modular.residuals;
            assert!(r.reconstruction < 1e-12 && r.j_involution < 1e-12 && r.j_delta_j < 1e-12);
            let small = Fiber::<f64>::small_branch();
            let large = Fiber::<f64>::large_branch();
            assert!((fb.modular.delta.apply(&small) - &small * pred[0]).norm() < 1e-10);
            assert!((fb.modular.delta.apply(&large) - &large * pred[1]).norm() < 1e-8 * pred[1]);
        }
    }

    #[test]
    fn non_standard_is_rejected() {
        let c2 = ComplexSpace::new(2).unwrap();
        let v = |xs: &[f64]| DVector::from_column_slice(xs);
        let k = span(c2, &[v(&[1.0, 0.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0, 0.0])]).unwrap();
        assert!(matches!(tomita(&k), Err(Error::NotStandard { complex_part: 2, .. })));
    }

    #[test]
    fn angle_operator_values() {
        assert!((theta_of_delta(1.0f64) - FRAC_PI_2).abs() < 1e-15);
        assert!((theta_of_delta(4.0f64).cos() - 0.6).abs() < 1e-15);
        assert!((theta_of_delta(0.25f64).cos() - 0.6).abs() < 1e-15);
        for theta in [0.3, 0.9, 1.4] {
            let fb = fiber::<f64>(theta).unwrap();
            let ao = angle_operator(&fb.modular);
            for &t in ao.eigvals.iter() {
                assert!((t - theta).abs() < 1e-9);
            }
            assert_eq!(ao.chi(0.0, FRAC_PI_2).dim(), 4);
            let th = &ao.theta.matrix;
            let d = &fb.modular.delta.matrix;
            assert!((th * d - d * th).amax() < 1e-9);
        }
    }

    #[test]
    fn kernel_of_fiber_involution_is_two_dimensional() {
        let fb = fiber::<f64>(FRAC_PI_3).unwrap();
        let ker = kernel_j_plus_i(&fb.modular.j).unwrap();
        assert_eq!(ker.dim(), 2);
        // {(a, −ā)} in interleaved coordinates: (x, y, −x, y)
        let expected = span(
            ComplexSpace::new(2).unwrap(),
            &[
                DVector::from_vec(vec![1.0, 0.0, -1.0, 0.0]),
                DVector::from_vec(vec![0.0, 1.0, 0.0, 1.0]),
            ],
        )
        .unwrap();
        assert_eq!(ker, expected);
    }

    #[test]
    fn kernel_rejects_non_involution() {
        let c1 = ComplexSpace::new(1).unwrap();
        let op = OperatorOnRealification::new(c1, DMatrix::<f64>::identity(2, 2) * 2.0).unwrap();
        assert!(matches!(kernel_j_plus_i(&op), Err(Error::NotInvolution { .. })));
    }

    #[test]
    fn polar_examples() {
        let c1 = ComplexSpace::new(1).unwrap();
        let id = OperatorOnRealification::<f64>::identity(c1);
        let p = polar(&id).unwrap();
        assert!(p.u.distance(&id) < 1e-14 && p.positive.distance(&id) < 1e-14);
        let conj = OperatorOnRealification::<f64>::conjugation(c1);
        let p = polar(&conj).unwrap();
        assert!(p.u.distance(&conj) < 1e-14 && p.positive.distance(&id) < 1e-14);
        assert_eq!(p.u.linearity(), Linearity::ConjugateLinear);

        let fb = fiber::<f64>(1.0).unwrap();
        let p = polar(&fb.modular.s).unwrap();
        let (uu, upu) = p.involution_check.unwrap();
        assert!(uu < 1e-12 && upu < 1e-12);
        // j swaps the δ-eigenspaces
        let small = Fiber::<f64>::small_branch();
        let js = p.u.apply(&small);
        let large_space = span(
            ComplexSpace::new(2).unwrap(),
            &[Fiber::<f64>::large_branch(), DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0])],
        )
        .unwrap();
        assert!(large_space.inclusion_defect(&span(large_space.space(), &[js]).unwrap()) < 1e-12);
        assert!(matches!(
            polar(&OperatorOnRealification::new(c1, DMatrix::<f64>::zeros(2, 2)).unwrap()),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn linearity_tags() {
        let c1 = ComplexSpace::new(1).unwrap();
        let j = c1.jc::<f64>();
        assert_eq!(linearity_of(c1, &j), Linearity::ComplexLinear);
        let conj = OperatorOnRealification::<f64>::conjugation(c1);
        assert_eq!(linearity_of(c1, conj.matrix()), Linearity::ConjugateLinear);
        let skew = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(linearity_of(c1, &skew), Linearity::Neither);
        assert!(matches!(
            OperatorOnRealification::with_declared(c1, skew, Linearity::ComplexLinear),
            Err(Error::LinearityMismatch { .. })
        ));
        let prod = conj.compose(&conj);
        assert_eq!(prod.linearity(), Linearity::ComplexLinear);
    }

    #[test]
    fn pair_tomita_examples() {
        let re = real_line::<f64>();
        let pt = tomita_pair(&re, &re.times_i(), 50, 3).unwrap();
        let conj = OperatorOnRealification::<f64>::conjugation(re.space());
        assert!(pt.op.distance(&conj) < 1e-14);
        assert!(pt.graph_norm_defect < 1e-12);
        assert!(tomita_pair(&re, &re, 1, 0).is_err());

        let fb = fiber::<f64>(FRAC_PI_6).unwrap();
        let pt = tomita_pair(&fb.subspace, &fb.subspace.times_i(), 10, 1).unwrap();
        assert!(pt.op.distance(&fb.modular.s) < 1e-10);
    }

    /// At angle θ the pair (N, N′) has polar part d with eigenvalues
    /// (1 ∓ sin θ)/(1 ± sin θ), i.e. |d − I|(d + I)^{−1} = sin θ.
    #[test]
    fn pair_with_complement_gives_sine_of_angle() {
        for theta in [0.4, FRAC_PI_3, 1.3] {
            let fb = fiber::<f64>(theta).unwrap();
            let pt = tomita_pair(&fb.subspace, &fb.complement(), 20, 0).unwrap();
            assert!(pt.graph_norm_defect < 1e-12);
            let p = polar(&pt.op).unwrap();
            let (uu, upu) = p.involution_check.unwrap();
            assert!(uu < 1e-10 && upu < 1e-10);
            for &sqrt_d in p.positive_eigvals.iter() {
                let d = sqrt_d * sqrt_d;
                assert!(((d - 1.0).abs() / (d + 1.0) - theta.sin()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn spectral_flag_values() {
        let fb = fiber::<f64>(FRAC_PI_3).unwrap();
        let fl = spectral_flags(&fb.modular);
        assert!((fl.lambda_min - 1.0 / 3.0).abs() < 1e-12);
        let id = spectral_flags(&tomita(&real_line::<f64>()).unwrap());
        assert_eq!(id.lambda_min, 1.0);
        assert_eq!(id.dist_of_1_to_spectrum, 0.0);
    }

    #[test]
    fn pairing_report_examples() {
        let r = pairing_report(&real_line::<f64>()).unwrap();
        assert!(r.sup_re_pairing < 1e-14);
        assert!((r.min_graph_ratio - 1.0).abs() < 1e-14);

        let k = angle_fiber::<f64>(FRAC_PI_3).unwrap();
        let r = pairing_report(&k).unwrap();
        assert!(r.sup_within_bound(1e-9) && r.ratio_within_bound(1e-9));
        assert!((r.sup_re_pairing - r.global_sup).abs() < 1e-9);

        let ds = direct_sum(&[
            angle_fiber::<f64>(FRAC_PI_6).unwrap(),
            angle_fiber::<f64>(FRAC_PI_3).unwrap(),
        ])
        .unwrap();
        let r = pairing_report(&ds).unwrap();
        assert_eq!(r.blocks.len(), 2);
        assert!(r.sup_within_bound(1e-9) && r.ratio_within_bound(1e-9));
        assert!((r.sup_re_pairing - r.global_sup).abs() < 1e-9);
    }

    #[test]
    fn delta_it_preserves_subspace() {
        let fb = fiber::<f64>(0.8).unwrap();
        for t in [-2.7, -1.0, -0.3, 0.3, 1.0, 2.7] {
            let u = fb.modular.delta_it(t);
            assert_eq!(u.linearity(), Linearity::ComplexLinear);
            assert_eq!(u.image(&fb.subspace), fb.subspace);
        }
    }

    #[test]
    fn json_spectra_ascending() {
        let fb = fiber::<f64>(0.5).unwrap();
        let js = fb.modular.to_json();
        assert!(js.delta_spectrum.windows(2).all(|w| w[0] <= w[1]));
        assert!(js.theta_spectrum.windows(2).all(|w| w[0] <= w[1]));
        let text = serde_json::to_string(&js).unwrap();
        assert!(text.contains("delta_spectrum"));
    }
}
