//! Finite-dimensional complex Hilbert spaces seen as real spaces, and the
//! complemented lattice of their closed real-linear subspaces.
//!
//! Coordinates are interleaved: `z = (z₁, …, z_d)` is stored as
//! `(Re z₁, Im z₁, …, Re z_d, Im z_d)`. Multiplication by `i` is the sparse
//! matrix `Jc` built from 2×2 rotation blocks. The complex inner product is
//! conjugate-linear in its first slot, so `Re⟨x,y⟩ = g(x,y)` (Euclidean) and
//! `Im⟨x,y⟩ = g(Jc x, y) =: ω(x,y)`.
//!
//! The lattice operations are
//! * meet: intersection, through principal angles (cosine ≥ 1 − rank_tol),
//! * join: closed real span,
//! * complement: `K′ = {y : ω(x,y) = 0 ∀x∈K} = Jc·K^⊥`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{lit, to_f64, Real};

/// ℂ^d realified to ℝ^{2d}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComplexSpace {
    d: usize,
}

impl ComplexSpace {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Precondition("complex dimension must be positive".into()));
        }
        Ok(Self { d })
    }

    pub fn complex_dim(&self) -> usize {
        self.d
    }

    pub fn real_dim(&self) -> usize {
        2 * self.d
    }

    /// The complex structure as an explicit matrix (entries 0, ±1).
    pub fn jc<T: Real>(&self) -> DMatrix<T> {
        let n = self.real_dim();
        let mut j = DMatrix::zeros(n, n);
        for k in 0..self.d {
            j[(2 * k + 1, 2 * k)] = T::one();
            j[(2 * k, 2 * k + 1)] = -T::one();
        }
        j
    }

    /// `Jc · m`, applied row-pair by row-pair.
    pub fn apply_jc<T: Real>(&self, m: &DMatrix<T>) -> DMatrix<T> {
        let mut out = DMatrix::zeros(m.nrows(), m.ncols());
        for k in 0..self.d {
            for c in 0..m.ncols() {
                out[(2 * k, c)] = -m[(2 * k + 1, c)];
                out[(2 * k + 1, c)] = m[(2 * k, c)];
            }
        }
        out
    }

    /// Matrix of `ω(aᵢ, bⱼ)` for the columns of `a` and `b`.
    pub fn omega_gram<T: Real>(&self, a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
        self.apply_jc(a).transpose() * b
    }

    pub fn omega<T: Real>(&self, x: &DVector<T>, y: &DVector<T>) -> T {
        let xm = DMatrix::from_column_slice(x.len(), 1, x.as_slice());
        let ym = DMatrix::from_column_slice(y.len(), 1, y.as_slice());
        self.omega_gram(&xm, &ym)[(0, 0)]
    }

    pub fn to_complex<T: Real>(&self, x: &DVector<T>) -> Vec<Complex<T>> {
        (0..self.d).map(|k| Complex::new(x[2 * k], x[2 * k + 1])).collect()
    }

    pub fn from_complex<T: Real>(&self, z: &[Complex<T>]) -> DVector<T> {
        let mut x = DVector::zeros(self.real_dim());
        for (k, c) in z.iter().enumerate() {
            x[2 * k] = c.re;
            x[2 * k + 1] = c.im;
        }
        x
    }

    /// Realify a complex-linear d×d matrix.
    pub fn realify<T: Real>(&self, u: &DMatrix<Complex<T>>) -> DMatrix<T> {
        let n = self.real_dim();
        let mut out = DMatrix::zeros(n, n);
        for r in 0..self.d {
            for c in 0..self.d {
                let z = u[(r, c)];
                out[(2 * r, 2 * c)] = z.re;
                out[(2 * r, 2 * c + 1)] = -z.im;
                out[(2 * r + 1, 2 * c)] = z.im;
                out[(2 * r + 1, 2 * c + 1)] = z.re;
            }
        }
        out
    }

    /// Checks `Jc² = −I`, `Jc` orthogonal, `ω` antisymmetric and non-degenerate,
    /// and that `ω(x,y)` equals `Im⟨x,y⟩` for the conjugate-linear-first inner
    /// product on a fixed pair of test vectors.
    pub fn convention_self_test(&self) -> Result<()> {
        let j: DMatrix<f64> = self.jc();
        let n = self.real_dim();
        let id = DMatrix::<f64>::identity(n, n);
        if (&j * &j + &id).amax() != 0.0 {
            return Err(Error::Precondition("Jc² ≠ −I".into()));
        }
        if (j.transpose() * &j - &id).amax() != 0.0 {
            return Err(Error::Precondition("Jc not orthogonal".into()));
        }
        let omega = j.transpose();
        if (&omega + omega.transpose()).amax() != 0.0 || linalg::rank(&omega) != n {
            return Err(Error::Precondition("ω degenerate or not antisymmetric".into()));
        }
        let x = DVector::from_fn(n, |i, _| (i as f64 + 1.0) * 0.5);
        let y = DVector::from_fn(n, |i, _| 1.0 - (i as f64) * 0.25);
        let zx = self.to_complex(&x);
        let zy = self.to_complex(&y);
        let inner: Complex<f64> = zx.iter().zip(&zy).map(|(a, b)| a.conj() * b).sum();
        let omega_xy = self.omega(&x, &y);
        let re = x.dot(&y);
        if (inner.im - omega_xy).abs() > 1e-12 || (inner.re - re).abs() > 1e-12 {
            return Err(Error::Precondition(
                "ω(x,y) = g(Jc x, y) does not reproduce Im⟨x,y⟩".into(),
            ));
        }
        Ok(())
    }
}

/// A real-linear subspace of a [`ComplexSpace`], stored as an orthonormal frame.
#[derive(Debug, Clone)]
pub struct RealSubspace<T: Real> {
    space: ComplexSpace,
    frame: DMatrix<T>,
}

impl<T: Real> PartialEq for RealSubspace<T> {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.distance(other) <= T::subspace_tol()
    }
}

impl<T: Real> RealSubspace<T> {
    pub fn zero(space: ComplexSpace) -> Self {
        Self {
            space,
            frame: DMatrix::zeros(space.real_dim(), 0),
        }
    }

    pub fn full(space: ComplexSpace) -> Self {
        let n = space.real_dim();
        Self {
            space,
            frame: DMatrix::identity(n, n),
        }
    }

    /// Real-linear span of the columns of `generators`.
    pub fn from_columns(space: ComplexSpace, generators: &DMatrix<T>) -> Result<Self> {
        if generators.nrows() != space.real_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.real_dim(),
                got: generators.nrows(),
            });
        }
        Ok(Self {
            space,
            frame: linalg::orthonormal_span(generators),
        })
    }

    pub(crate) fn from_orthonormal(space: ComplexSpace, frame: DMatrix<T>) -> Self {
        debug_assert_eq!(frame.nrows(), space.real_dim());
        Self { space, frame }
    }

    pub fn space(&self) -> ComplexSpace {
        self.space
    }

    pub fn frame(&self) -> &DMatrix<T> {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn projector(&self) -> DMatrix<T> {
        linalg::projector(&self.frame)
    }

    /// Operator-norm distance between orthogonal projections.
    pub fn distance(&self, other: &Self) -> T {
        linalg::spectral_norm(&(self.projector() - other.projector()))
    }

    /// `sup ‖(I − P_self) x‖` over unit `x ∈ other`; zero iff `other ⊆ self`.
    pub fn inclusion_defect(&self, other: &Self) -> T {
        if other.is_zero() {
            return T::zero();
        }
        let resid = &other.frame - self.projector() * &other.frame;
        linalg::spectral_norm(&resid)
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.inclusion_defect(other) <= T::subspace_tol()
    }

    /// `Jc·K`, i.e. `iK`.
    pub fn times_i(&self) -> Self {
        Self::from_orthonormal(self.space, self.space.apply_jc(&self.frame))
    }

    /// Image under a real-linear operator on ℝ^{2d}.
    pub fn image(&self, op: &DMatrix<T>) -> Self {
        Self {
            space: self.space,
            frame: linalg::orthonormal_span(&(op * &self.frame)),
        }
    }

    pub fn orthogonal_complement(&self) -> Self {
        Self::from_orthonormal(self.space, linalg::complement(&self.frame))
    }

    pub fn meet(&self, other: &Self) -> Self {
        meet(self, other)
    }

    pub fn join(&self, other: &Self) -> Self {
        join(self, other)
    }

    pub fn complement(&self) -> Self {
        symplectic_complement(self)
    }

    /// Largest `|ω(x, y)|` over unit `x ∈ self`, `y ∈ other`.
    pub fn omega_norm(&self, other: &Self) -> T {
        linalg::spectral_norm(&self.space.omega_gram(&self.frame, &other.frame))
    }

    pub fn to_literal(&self) -> SubspaceLiteral {
        let rows = (0..self.frame.nrows())
            .map(|r| (0..self.frame.ncols()).map(|c| to_f64(self.frame[(r, c)])).collect())
            .collect();
        SubspaceLiteral {
            dim_complex: self.space.complex_dim(),
            frame: rows,
        }
    }

    pub fn from_literal(lit_: &SubspaceLiteral) -> Result<Self> {
        let space = ComplexSpace::new(lit_.dim_complex)?;
        if lit_.frame.len() != space.real_dim() {
            return Err(Error::InvalidLiteral(format!(
                "frame has {} rows, expected {}",
                lit_.frame.len(),
                space.real_dim()
            )));
        }
        let r = lit_.frame.first().map_or(0, Vec::len);
        if lit_.frame.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidLiteral("ragged frame rows".into()));
        }
        let m = DMatrix::from_fn(space.real_dim(), r, |i, j| lit::<T>(lit_.frame[i][j]));
        Self::from_columns(space, &m)
    }
}

/// JSON form of a subspace: complex dimension and a row-major `2d × r` frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceLiteral {
    pub dim_complex: usize,
    pub frame: Vec<Vec<f64>>,
}

/// Real-linear span of a list of real `2d`-coordinate vectors.
pub fn span<T: Real>(space: ComplexSpace, vectors: &[DVector<T>]) -> Result<RealSubspace<T>> {
    for v in vectors {
        if v.len() != space.real_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.real_dim(),
                got: v.len(),
            });
        }
    }
    let m = if vectors.is_empty() {
        DMatrix::zeros(space.real_dim(), 0)
    } else {
        DMatrix::from_columns(vectors)
    };
    RealSubspace::from_columns(space, &m)
}

fn same_space<T: Real>(e: &RealSubspace<T>, f: &RealSubspace<T>) {
    assert_eq!(e.space, f.space, "subspaces live in different ambient spaces");
}

/// Intersection `E ∧ F` from the principal angles between `E` and `F`.
pub fn meet<T: Real>(e: &RealSubspace<T>, f: &RealSubspace<T>) -> RealSubspace<T> {
    same_space(e, f);
    if e.is_zero() || f.is_zero() {
        return RealSubspace::zero(e.space);
    }
    let (u, cos, _) = linalg::svd_sorted(&(e.frame.transpose() * &f.frame));
    let k = cos.iter().filter(|&&c| c >= T::one() - T::rank_tol()).count();
    let dirs = &e.frame * u.columns(0, k);
    RealSubspace {
        space: e.space,
        frame: linalg::orthonormal_span(&dirs),
    }
}

/// Closed real span `E ∨ F`.
pub fn join<T: Real>(e: &RealSubspace<T>, f: &RealSubspace<T>) -> RealSubspace<T> {
    same_space(e, f);
    let m = DMatrix::from_fn(e.space.real_dim(), e.dim() + f.dim(), |r, c| {
        if c < e.dim() {
            e.frame[(r, c)]
        } else {
            f.frame[(r, c - e.dim())]
        }
    });
    RealSubspace {
        space: e.space,
        frame: linalg::orthonormal_span(&m),
    }
}

/// Sum of several subspaces.
pub fn join_all<'a, T: Real>(
    space: ComplexSpace,
    parts: impl IntoIterator<Item = &'a RealSubspace<T>>,
) -> RealSubspace<T> {
    parts
        .into_iter()
        .fold(RealSubspace::zero(space), |acc, p| join(&acc, p))
}

/// Symplectic complement `K′ = Jc·K^⊥`.
pub fn symplectic_complement<T: Real>(k: &RealSubspace<T>) -> RealSubspace<T> {
    let perp = linalg::complement(&k.frame);
    RealSubspace {
        space: k.space,
        frame: k.space.apply_jc(&perp),
    }
}

/// Standardness and factoriality data of a single subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceClass {
    pub is_standard: bool,
    pub is_factor: bool,
    /// Real dimension of `K ∩ iK`.
    pub dim_complex_part: usize,
    /// Real codimension of `K + iK`.
    pub dim_cyclic_defect: usize,
    /// Real dimension of `K ∩ K′`.
    pub dim_center: usize,
    /// Real codimension of `K ∨ K′`.
    pub codim_factor_join: usize,
}

pub fn classify_subspace<T: Real>(k: &RealSubspace<T>) -> SubspaceClass {
    let n = k.space.real_dim();
    let ik = k.times_i();
    let complex_part = meet(k, &ik).dim();
    let cyclic = n - join(k, &ik).dim();
    let kp = symplectic_complement(k);
    let center = meet(k, &kp).dim();
    let fjoin = n - join(k, &kp).dim();
    SubspaceClass {
        is_standard: complex_part == 0 && cyclic == 0,
        is_factor: center == 0 && fjoin == 0,
        dim_complex_part: complex_part,
        dim_cyclic_defect: cyclic,
        dim_center: center,
        codim_factor_join: fjoin,
    }
}

/// Standardness data of a pair of subspaces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairClass {
    pub standard: bool,
    pub strongly_standard: bool,
    pub meet_dim: usize,
    pub join_codim: usize,
    pub note: String,
}

pub const FINITE_DIM_PAIR_NOTE: &str =
    "finite dimension: E+F equals E∨F, so every standard pair is strongly standard";

pub fn classify_pair<T: Real>(e: &RealSubspace<T>, f: &RealSubspace<T>) -> PairClass {
    let meet_dim = meet(e, f).dim();
    let join_codim = e.space.real_dim() - join(e, f).dim();
    let standard = meet_dim == 0 && join_codim == 0;
    PairClass {
        standard,
        strongly_standard: standard,
        meet_dim,
        join_codim,
        note: FINITE_DIM_PAIR_NOTE.to_string(),
    }
}

/// Splits `M` into its complex part `M ∩ iM` and the orthogonal complement of
/// that part inside `M`.
pub fn canonical_parts<T: Real>(m: &RealSubspace<T>) -> (RealSubspace<T>, RealSubspace<T>) {
    let cpart = meet(m, &m.times_i());
    if cpart.is_zero() {
        return (cpart, m.clone());
    }
    let resid = &m.frame - cpart.projector() * &m.frame;
    let residual = RealSubspace {
        space: m.space,
        frame: linalg::orthonormal_span(&resid),
    };
    (cpart, residual)
}

/// Standard subspace of ℂ² spanned by `y⁺ = (cos θ/2, sin θ/2)` and
/// `y⁻ = (i cos θ/2, −i sin θ/2)`. Its modular operator has eigenvalues
/// `tan²(θ/2)` on `(1,0)` and `cot²(θ/2)` on `(0,1)`.
pub fn angle_fiber<T: Real>(theta: T) -> Result<RealSubspace<T>> {
    let half_pi: T = T::frac_pi_2();
    if !(theta > T::zero() && theta <= half_pi + T::default_epsilon()) {
        return Err(Error::Precondition(format!(
            "fiber angle {theta} outside (0, π/2]"
        )));
    }
    let space = ComplexSpace::new(2)?;
    let two = T::one() + T::one();
    let (c, s) = ((theta / two).cos(), (theta / two).sin());
    let z = T::zero();
    let yp = DVector::from_vec(vec![c, z, s, z]);
    let ym = DVector::from_vec(vec![z, c, z, -s]);
    span(space, &[yp, ym])
}

/// The real axis `ℝ ⊂ ℂ`.
pub fn real_line<T: Real>() -> RealSubspace<T> {
    let space = ComplexSpace { d: 1 };
    RealSubspace {
        space,
        frame: DMatrix::from_column_slice(2, 1, &[T::one(), T::zero()]),
    }
}

/// Orthogonal direct sum of subspaces of `ℂ^{d₁} ⊕ ℂ^{d₂} ⊕ …`.
pub fn direct_sum<T: Real>(parts: &[RealSubspace<T>]) -> Result<RealSubspace<T>> {
    let d: usize = parts.iter().map(|p| p.space.complex_dim()).sum();
    let space = ComplexSpace::new(d)?;
    let r: usize = parts.iter().map(RealSubspace::dim).sum();
    let mut frame = DMatrix::zeros(space.real_dim(), r);
    let (mut row, mut col) = (0, 0);
    for p in parts {
        frame
            .view_mut((row, col), (p.space.real_dim(), p.dim()))
            .copy_from(&p.frame);
        row += p.space.real_dim();
        col += p.dim();
    }
    Ok(RealSubspace { space, frame })
}

pub(crate) fn gaussian<T: Real>(rng: &mut impl Rng) -> T {
    lit(rng.sample::<f64, _>(StandardNormal))
}

/// Haar-distributed unitary on ℂ^d.
pub fn random_unitary<T: Real>(d: usize, rng: &mut impl Rng) -> DMatrix<Complex<T>> {
    let g = DMatrix::from_fn(d, d, |_, _| Complex::new(gaussian::<T>(rng), gaussian::<T>(rng)));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for c in 0..d {
        let diag = r[(c, c)];
        let norm = nalgebra::ComplexField::modulus(diag);
        if norm > T::zero() {
            let phase = diag / Complex::new(norm, T::zero());
            for row in 0..d {
                u[(row, c)] *= phase;
            }
        }
    }
    u
}

/// Random subspace of the given real dimension (Gaussian generators).
pub fn random_subspace<T: Real>(
    space: ComplexSpace,
    real_dim: usize,
    rng: &mut impl Rng,
) -> RealSubspace<T> {
    let m = DMatrix::from_fn(space.real_dim(), real_dim, |_, _| gaussian::<T>(rng));
    RealSubspace {
        space,
        frame: linalg::orthonormal_span(&m),
    }
}

/// Deterministic random standard subspace: a direct sum of angle fibers with
/// angles drawn uniformly from `angle_range` (plus `ℝ ⊂ ℂ` when `d` is odd),
/// rotated by a Haar unitary. Everything is a function of `seed`.
pub fn random_standard<T: Real>(
    space: ComplexSpace,
    seed: u64,
    angle_range: (f64, f64),
) -> Result<RealSubspace<T>> {
    let (lo, hi) = angle_range;
    if !(lo > 0.0 && lo <= hi && hi <= FRAC_PI_2 + 1e-15) {
        return Err(Error::Precondition(format!(
            "angle range [{lo}, {hi}] not inside (0, π/2]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = space.complex_dim();
    let mut parts = Vec::with_capacity(d / 2 + 1);
    for _ in 0..d / 2 {
        let theta = if hi > lo { rng.random_range(lo..=hi) } else { lo };
        parts.push(angle_fiber::<T>(lit(theta))?);
    }
    if d % 2 == 1 {
        parts.push(real_line());
    }
    let base = direct_sum(&parts)?;
    let u = space.realify(&random_unitary::<T>(d, &mut rng));
    Ok(base.image(&u))
}
