//! Truncated symmetric Fock space over `ℂ^d`.
//!
//! Basis vectors are occupation-number multi-indices `n ∈ ℕ^d` with total
//! particle number `|n| ≤ N`, enumerated degree by degree and, inside a degree,
//! in decreasing lexicographic order (`(1,0)` before `(0,1)`).
//!
//! Conventions: the one-particle inner product is conjugate-linear in its first
//! slot, the annihilator `a(h)` is conjugate-linear in `h`, the creator `a†(h)`
//! is linear, and the field is `Φ(h) = (a(h) + a†(h))/√2`. With these choices
//! `[Φ(h), Φ(k)] = i·Im⟨h,k⟩`, the vacuum expectation of `W(h) = exp(iΦ(h))` is
//! `exp(−‖h‖²/4)` and `W(h)W(k) = exp(−(i/2)Im⟨h,k⟩)·W(h+k)`.
//!
//! Truncation only corrupts states near the cutoff, so every defect is measured
//! on the low sector `|n| ≤ N/2`. Each reported tolerance is ten times the
//! coherent tail bound `τ(N, r) = Σ_{n>N} r^{2n}/n!` plus a rounding floor that
//! scales with machine epsilon, the Fock dimension and the operator norms
//! involved. Tolerances are always computed before a verdict is taken.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{gaussian, ComplexSpace, RealSubspace};
use crate::scalar::{lit, to_f64, Real};

pub type CVec<T> = DVector<Complex<T>>;
pub type CMat<T> = DMatrix<Complex<T>>;

/// Largest Fock dimension for which full-space diagnostics are formed.
const FULL_SPACE_MAX_DIM: usize = 256;

/// Rounding floor multiplier applied to `ε · dim`.
const FLOOR_FACTOR: f64 = 64.0;

/// Truncated bosonic Fock space with particle-number cutoff `N`.
#[derive(Debug, Clone)]
pub struct TruncatedFock {
    d: usize,
    cutoff: usize,
    radius: f64,
    basis: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl TruncatedFock {
    pub fn new(d: usize, cutoff: usize, radius: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Precondition("one-particle dimension must be positive".into()));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Precondition(format!("radius must be positive, got {radius}")));
        }
        let mut basis = Vec::new();
        for total in 0..=cutoff {
            compositions(d, total, &mut Vec::with_capacity(d), &mut basis);
        }
        let index = basis.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        Ok(Self { d, cutoff, radius, basis, index })
    }

    pub fn one_particle_dim(&self) -> usize {
        self.d
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<usize>] {
        &self.basis
    }

    pub fn position(&self, occupation: &[usize]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    /// Highest particle number in the sector used for defect measurements.
    pub fn low_cutoff(&self) -> usize {
        self.cutoff / 2
    }

    /// Contiguous basis range holding the `m`-particle states.
    pub fn level_range(&self, m: usize) -> std::ops::Range<usize> {
        let start = if m == 0 { 0 } else { fock_dim(self.d, m - 1) };
        start..fock_dim(self.d, m)
    }

    /// `g·x` for `g` preserving particle number (block diagonal over levels).
    pub fn level_mul<T: Real>(&self, g: &CMat<T>, x: &CMat<T>) -> CMat<T> {
        let mut out = CMat::zeros(g.nrows(), x.ncols());
        for m in 0..=self.cutoff {
            let range = self.level_range(m);
            let (start, len) = (range.start, range.len());
            let prod = g.view((start, start), (len, len)) * x.rows(start, len);
            out.rows_mut(start, len).copy_from(&prod);
        }
        out
    }

    /// Basis positions with `|n| ≤ N/2`. They form a prefix of the basis.
    pub fn low_sector_len(&self) -> usize {
        self.basis.iter().take_while(|n| total(n) <= self.low_cutoff()).count()
    }

    pub fn particle_number(&self, position: usize) -> usize {
        total(&self.basis[position])
    }

    pub fn vacuum<T: Real>(&self) -> CVec<T> {
        let mut v = CVec::zeros(self.dim());
        v[0] = Complex::new(T::one(), T::zero());
        v
    }

    /// Creator `a†(h)`, linear in `h`. States at the cutoff are sent to zero.
    pub fn creation<T: Real>(&self, h: &[Complex<T>]) -> CMat<T> {
        assert_eq!(h.len(), self.d, "one-particle vector has wrong dimension");
        let mut m = CMat::zeros(self.dim(), self.dim());
        for (col, n) in self.basis.iter().enumerate() {
            if total(n) == self.cutoff {
                continue;
            }
            for (i, hi) in h.iter().enumerate() {
                let mut up = n.clone();
                up[i] += 1;
                let row = self.index[&up];
                let amp: T = lit::<T>((up[i] as f64).sqrt());
                m[(row, col)] += *hi * amp;
            }
        }
        m
    }

    /// `a†(h)·v` without forming the matrix.
    pub fn apply_creation<T: Real>(&self, h: &[Complex<T>], v: &CVec<T>) -> CVec<T> {
        let mut out = CVec::zeros(self.dim());
        let mut up = vec![0usize; self.d];
        for (col, n) in self.basis.iter().enumerate() {
            let x = v[col];
            if total(n) == self.cutoff || (x.re == T::zero() && x.im == T::zero()) {
                continue;
            }
            up.copy_from_slice(n);
            for (i, hi) in h.iter().enumerate() {
                up[i] += 1;
                let row = self.index[&up];
                out[row] += *hi * x * lit::<T>((up[i] as f64).sqrt());
                up[i] -= 1;
            }
        }
        out
    }

    /// Annihilator `a(h) = a†(h)*`, conjugate-linear in `h`.
    pub fn annihilation<T: Real>(&self, h: &[Complex<T>]) -> CMat<T> {
        self.creation(h).adjoint()
    }

    /// Field operator `Φ(h) = (a(h) + a†(h))/√2`.
    pub fn field<T: Real>(&self, h: &[Complex<T>]) -> CMat<T> {
        let c = self.creation(h);
        (&c + c.adjoint()) * Complex::new(lit::<T>(std::f64::consts::FRAC_1_SQRT_2), T::zero())
    }

    fn check_radius<T: Real>(&self, norm: T) -> Result<()> {
        let n = to_f64(norm);
        if n > self.radius * (1.0 + 1e-12) {
            return Err(Error::RadiusExceeded { norm: n, radius: self.radius });
        }
        Ok(())
    }

    fn check_dim<T>(&self, h: &[Complex<T>]) -> Result<()> {
        if h.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: h.len() });
        }
        Ok(())
    }

    /// Rounding floor for a defect that involves `factors` operator products of
    /// norm at most `scale`.
    pub fn rounding_floor<T: Real>(&self, factors: usize, scale: f64) -> f64 {
        FLOOR_FACTOR * to_f64(T::default_epsilon()) * self.dim() as f64 * factors as f64 * scale.max(1.0)
    }

    /// `10·τ(N, r)` plus the rounding floor.
    pub fn calibrated_tolerance<T: Real>(&self, r: f64, factors: usize, scale: f64) -> f64 {
        10.0 * tail_bound(self.cutoff, r) + self.rounding_floor::<T>(factors, scale)
    }

    /// Checks `⟨e^0, Φ(h)² e^0⟩ = ‖h‖²/2`. This pins the annihilator convention
    /// and the `1/√2` normalisation that together produce `exp(−‖h‖²/4)`.
    pub fn convention_self_test<T: Real>(&self) -> Result<()> {
        let h: Vec<Complex<T>> = (0..self.d)
            .map(|i| Complex::new(lit::<T>(0.3 + 0.1 * i as f64), lit::<T>(-0.2)))
            .collect();
        let phi = self.field(&h);
        let v = self.vacuum::<T>();
        let pv = &phi * &v;
        let expect = to_f64(norm(&h)).powi(2) / 2.0;
        let got = to_f64(pv.norm_squared());
        if (got - expect).abs() > 1e3 * to_f64(T::default_epsilon()) {
            return Err(Error::Precondition(format!(
                "field convention self-test failed: ⟨Ω,Φ(h)²Ω⟩ = {got}, expected {expect}"
            )));
        }
        Ok(())
    }
}

fn total(n: &[usize]) -> usize {
    n.iter().sum()
}

/// Appends every `n ∈ ℕ^d` with `|n| = remaining`, leading entries largest first.
fn compositions(d: usize, remaining: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() + 1 == d {
        prefix.push(remaining);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=remaining).rev() {
        prefix.push(first);
        compositions(d, remaining - first, prefix, out);
        prefix.pop();
    }
}

/// Dimension `Σ_{k≤N} C(k+d−1, d−1)` of the truncated space, which equals
/// `C(N+d, d)`.
pub fn fock_dim(d: usize, cutoff: usize) -> usize {
    let mut acc: u128 = 1;
    for i in 1..=d as u128 {
        acc = acc * (cutoff as u128 + i) / i;
    }
    acc as usize
}

/// Coherent tail bound `τ(N, r) = Σ_{n>N} r^{2n}/n!`.
///
/// Summed term by term from `n = N+1` so the result keeps full relative
/// precision even when it is far below machine epsilon.
pub fn tail_bound(cutoff: usize, r: f64) -> f64 {
    let x = r * r;
    if x == 0.0 {
        return 0.0;
    }
    // log of the first term x^{N+1}/(N+1)!
    let n0 = cutoff as f64 + 1.0;
    let log_first = n0 * x.ln() - ln_factorial(cutoff + 1);
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut n = n0;
    while term > sum * 1e-17 {
        sum += term;
        n += 1.0;
        term *= x / n;
        if n > n0 + 10_000.0 {
            break;
        }
    }
    (log_first + sum.ln()).exp()
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

pub fn norm<T: Real>(h: &[Complex<T>]) -> T {
    h.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// `⟨h, k⟩`, conjugate-linear in `h`.
pub fn inner<T: Real>(h: &[Complex<T>], k: &[Complex<T>]) -> Complex<T> {
    h.iter().zip(k).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
}

/// Vector `e^f` together with the truncation tail bound `τ(N, ‖f‖)`.
#[derive(Debug, Clone)]
pub struct FockVector<T: Real> {
    pub coefficients: CVec<T>,
    pub tail_bound: f64,
}

/// Dense operator. `unitarity_defect` is `‖A*A − I‖` on the low sector when the
/// operator is claimed unitary up to truncation.
#[derive(Debug, Clone)]
pub struct FockOperator<T: Real> {
    pub matrix: CMat<T>,
    pub unitarity_defect: Option<f64>,
}

impl<T: Real> FockOperator<T> {
    pub fn apply(&self, v: &CVec<T>) -> CVec<T> {
        &self.matrix * v
    }
}

/// Coherent vector `e^f = ⊕ f^{⊗n}/√(n!)`, whose occupation-basis coefficient
/// at `n` is `Π_i f_i^{n_i}/√(n_i!)`.
pub fn coherent<T: Real>(fock: &TruncatedFock, f: &[Complex<T>]) -> Result<FockVector<T>> {
    fock.check_dim(f)?;
    let r = norm(f);
    fock.check_radius(r)?;
    let mut coefficients = CVec::zeros(fock.dim());
    for (pos, n) in fock.basis().iter().enumerate() {
        let mut c = Complex::new(T::one(), T::zero());
        for (i, &ni) in n.iter().enumerate() {
            for m in 1..=ni {
                c = c * f[i] / Complex::new(lit::<T>((m as f64).sqrt()), T::zero());
            }
        }
        coefficients[pos] = c;
    }
    Ok(FockVector { coefficients, tail_bound: tail_bound(fock.cutoff(), to_f64(r)) })
}

/// `exp(iH)` for Hermitian `H`, through its eigendecomposition.
pub fn exp_i_hermitian<T: Real>(h: &CMat<T>) -> CMat<T> {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let phases = CVec::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| Complex::new(l.cos(), l.sin())),
    );
    v * CMat::from_diagonal(&phases) * v.adjoint()
}

/// Operator norm of the compression of `a` to the first `len` basis vectors,
/// that is `‖P a P‖` with `P` the projection onto them.
pub fn compressed_norm<T: Real>(a: &CMat<T>, len: usize) -> f64 {
    sector_norm(&a.view((0, 0), (len, len)).into_owned(), len)
}

/// Compression of the product `a·b` to the first `len` basis vectors, formed
/// without the full product.
pub fn compressed_product<T: Real>(a: &CMat<T>, b: &CMat<T>, len: usize) -> CMat<T> {
    a.rows(0, len) * b.columns(0, len)
}

fn low_block<T: Real>(a: &CMat<T>, len: usize) -> CMat<T> {
    a.view((0, 0), (len, len)).into_owned()
}

/// Operator norm of `a` restricted to the first `cols` basis vectors.
pub fn sector_norm<T: Real>(a: &CMat<T>, cols: usize) -> f64 {
    let sub = a.columns(0, cols).into_owned();
    let gram = sub.adjoint() * &sub;
    let eig = SymmetricEigen::new(gram);
    to_f64(eig.eigenvalues.iter().fold(T::zero(), |acc, &x| acc.max(x))).max(0.0).sqrt()
}

fn low_unitarity_defect<T: Real>(fock: &TruncatedFock, u: &CMat<T>) -> f64 {
    let low = fock.low_sector_len();
    let cols = u.columns(0, low);
    let gram = cols.adjoint() * cols - CMat::identity(low, low);
    sector_norm(&gram, low)
}

/// Weyl unitary `W(h) = exp(iΦ(h))`.
///
/// With `u` a unitary taking `e_1` to `h/‖h‖`, second quantisation gives
/// `Φ(h) = Γ(u)Φ(‖h‖e_1)Γ(u)*` exactly on the truncated space, because `Γ(u)`
/// preserves every particle-number level. `Φ(‖h‖e_1)` only moves the first
/// mode, so it splits into one tridiagonal block per occupation of the other
/// modes, and each block is exponentiated through its eigendecomposition.
pub fn weyl<T: Real>(fock: &TruncatedFock, h: &[Complex<T>]) -> Result<FockOperator<T>> {
    fock.check_dim(h)?;
    let r = norm(h);
    fock.check_radius(r)?;
    let dim = fock.dim();
    if r == T::zero() {
        return Ok(FockOperator { matrix: CMat::identity(dim, dim), unitarity_defect: Some(0.0) });
    }
    let blocks = first_mode_blocks(fock, r);
    let matrix = if fock.one_particle_dim() == 1 {
        // Here u is the phase h/|h|, and Γ(u) is diagonal.
        let e = apply_blocks(&blocks, &CMat::identity(dim, dim));
        let u = h[0] / Complex::new(r, T::zero());
        let phases: Vec<Complex<T>> = fock.basis().iter().map(|n| u.powi(n[0] as i32)).collect();
        CMat::from_fn(dim, dim, |a, b| phases[a] * e[(a, b)] * phases[b].conj())
    } else {
        let g = gamma(fock, &unitary_with_first_column(h, r))?.matrix;
        let inner = apply_blocks(&blocks, &g.adjoint());
        fock.level_mul(&g, &inner)
    };
    let unitarity_defect = Some(low_unitarity_defect(fock, &matrix));
    Ok(FockOperator { matrix, unitarity_defect })
}

/// Reference construction of `W(h)`: one dense Hermitian eigendecomposition of
/// the full truncated field. Cubic in the Fock dimension.
pub fn weyl_dense<T: Real>(fock: &TruncatedFock, h: &[Complex<T>]) -> Result<FockOperator<T>> {
    fock.check_dim(h)?;
    fock.check_radius(norm(h))?;
    let matrix = exp_i_hermitian(&fock.field(h));
    let unitarity_defect = Some(low_unitarity_defect(fock, &matrix));
    Ok(FockOperator { matrix, unitarity_defect })
}

/// Diagonal blocks of `exp(iΦ(r·e_1))`: basis positions and the block itself.
type Blocks<T> = Vec<(Vec<usize>, CMat<T>)>;

fn apply_blocks<T: Real>(blocks: &Blocks<T>, x: &CMat<T>) -> CMat<T> {
    let mut out = CMat::zeros(x.nrows(), x.ncols());
    for (positions, block) in blocks {
        let sub = x.select_rows(positions.iter());
        let prod = block * sub;
        for (a, &p) in positions.iter().enumerate() {
            out.set_row(p, &prod.row(a));
        }
    }
    out
}

fn first_mode_blocks<T: Real>(fock: &TruncatedFock, r: T) -> Blocks<T> {
    let mut blocks: std::collections::BTreeMap<&[usize], Vec<usize>> = Default::default();
    for (pos, n) in fock.basis().iter().enumerate() {
        blocks.entry(&n[1..]).or_default().push(pos);
    }
    let mut out = Vec::with_capacity(blocks.len());
    let scale = r * lit::<T>(std::f64::consts::FRAC_1_SQRT_2);
    for positions in blocks.into_values() {
        let mut positions = positions;
        positions.sort_by_key(|&p| fock.basis()[p][0]);
        let m = positions.len();
        let mut field = DMatrix::<T>::zeros(m, m);
        for j in 0..m.saturating_sub(1) {
            let amp = scale * lit::<T>(((j + 1) as f64).sqrt());
            field[(j + 1, j)] = amp;
            field[(j, j + 1)] = amp;
        }
        let eig = SymmetricEigen::new(field);
        let v = eig.eigenvectors.map(|x| Complex::new(x, T::zero()));
        let phases = CVec::from_iterator(m, eig.eigenvalues.iter().map(|&l| Complex::new(l.cos(), l.sin())));
        let block = &v * CMat::from_diagonal(&phases) * v.transpose();
        out.push((positions, block));
    }
    out
}

/// Unitary whose first column is `h/r`, completed by Gram–Schmidt against the
/// standard basis.
fn unitary_with_first_column<T: Real>(h: &[Complex<T>], r: T) -> CMat<T> {
    let d = h.len();
    let mut cols: Vec<CVec<T>> = vec![CVec::from_iterator(d, h.iter().map(|z| *z / Complex::new(r, T::zero())))];
    // Try standard basis vectors in order of least overlap with h.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| h[a].norm_sqr().partial_cmp(&h[b].norm_sqr()).expect("finite"));
    for i in order {
        if cols.len() == d {
            break;
        }
        let mut v = CVec::zeros(d);
        v[i] = Complex::new(T::one(), T::zero());
        for c in &cols {
            let p = c.dotc(&v);
            v -= c * p;
        }
        let n = v.norm();
        if n > lit::<T>(1e-6) {
            cols.push(v / Complex::new(n, T::zero()));
        }
    }
    CMat::from_columns(&cols)
}

/// Vacuum amplitude `⟨e^0, W(h)e^0⟩` against `exp(−‖h‖²/4)`.
#[derive(Debug, Clone, Serialize)]
pub struct VacuumReport {
    pub amplitude_re: f64,
    pub amplitude_im: f64,
    pub expected: f64,
    pub defect: f64,
    pub tail_bound: f64,
    pub tolerance: f64,
}

pub fn vacuum_amplitude<T: Real>(fock: &TruncatedFock, h: &[Complex<T>]) -> Result<VacuumReport> {
    let w = weyl(fock, h)?;
    let amp = w.matrix[(0, 0)];
    let r = to_f64(norm(h));
    let expected = (-r * r / 4.0).exp();
    let defect = ((to_f64(amp.re) - expected).powi(2) + to_f64(amp.im).powi(2)).sqrt();
    let tail = tail_bound(fock.cutoff(), r);
    Ok(VacuumReport {
        amplitude_re: to_f64(amp.re),
        amplitude_im: to_f64(amp.im),
        expected,
        defect,
        tail_bound: tail,
        // a single coherent tail, not the tenfold margin used for products
        tolerance: tail + fock.rounding_floor::<T>(1, 1.0),
    })
}

/// Distance between `W(h)e^0` and `e^{−‖h‖²/4}·e^{ih/√2}`.
pub fn weyl_vacuum_is_coherent<T: Real>(fock: &TruncatedFock, h: &[Complex<T>]) -> Result<f64> {
    let w = weyl(fock, h)?;
    let r = to_f64(norm(h));
    let rotated: Vec<Complex<T>> = h
        .iter()
        .map(|z| *z * Complex::new(T::zero(), lit::<T>(std::f64::consts::FRAC_1_SQRT_2)))
        .collect();
    let c = coherent(fock, &rotated)?;
    let scale = Complex::new(lit::<T>((-r * r / 4.0).exp()), T::zero());
    let diff = w.matrix.column(0) - c.coefficients * scale;
    Ok(to_f64(diff.norm()))
}

/// Result of a CCR phase-relation measurement.
#[derive(Debug, Clone, Serialize)]
pub struct CcrReport {
    /// `‖P(W(h)W(k) − e^{−(i/2)Im⟨h,k⟩}W(h+k))P‖` with `P` the projection
    /// onto `|n| ≤ N/2`.
    pub defect: f64,
    /// The same difference applied to low-sector inputs but with every output
    /// sector kept. Amplitude that reaches the cutoff shows up here, so this is
    /// a direct measure of truncation leakage.
    pub leakage_defect: f64,
    /// The same quantity on the whole truncated space, for reference. Only
    /// computed when the Fock dimension is at most 256.
    pub full_space_defect: Option<f64>,
    pub low_cutoff: usize,
    pub symplectic: f64,
    pub tolerance: f64,
}

pub fn ccr_defect<T: Real>(fock: &TruncatedFock, h: &[Complex<T>], k: &[Complex<T>]) -> Result<CcrReport> {
    fock.check_dim(h)?;
    fock.check_dim(k)?;
    let r = to_f64(norm(h)) + to_f64(norm(k));
    if r > fock.radius() * (1.0 + 1e-12) {
        return Err(Error::RadiusExceeded { norm: r, radius: fock.radius() });
    }
    let omega = inner(h, k).im;
    if norm(h) == T::zero() || norm(k) == T::zero() {
        return Ok(CcrReport {
            defect: 0.0,
            leakage_defect: 0.0,
            full_space_defect: Some(0.0),
            low_cutoff: fock.low_cutoff(),
            symplectic: to_f64(omega),
            tolerance: fock.calibrated_tolerance::<T>(r, 3, 1.0),
        });
    }
    let sum: Vec<Complex<T>> = h.iter().zip(k).map(|(a, b)| *a + *b).collect();
    let wh = weyl(fock, h)?.matrix;
    let wk = weyl(fock, k)?.matrix;
    let whk = weyl(fock, &sum)?.matrix;
    let half = omega * lit::<T>(-0.5);
    let phase = Complex::new(half.cos(), half.sin());
    let low = fock.low_sector_len();
    let compressed = compressed_product(&wh, &wk, low) - low_block(&whk, low) * phase;
    let leak = &wh * wk.columns(0, low) - whk.columns(0, low) * phase;
    let full_space_defect = (fock.dim() <= FULL_SPACE_MAX_DIM)
        .then(|| sector_norm(&(&wh * &wk - &whk * phase), fock.dim()));
    Ok(CcrReport {
        defect: sector_norm(&compressed, low),
        leakage_defect: sector_norm(&leak, low),
        full_space_defect,
        low_cutoff: fock.low_cutoff(),
        symplectic: to_f64(omega),
        tolerance: fock.calibrated_tolerance::<T>(r, 3, 1.0),
    })
}

/// Second quantisation `Γ(A) = ⊕ A^{⊗n}` of a complex-linear one-particle
/// operator. It preserves particle number, so the truncation is exact.
///
/// Columns are built recursively: with `i` the first occupied mode of `n`,
/// `|n⟩ = a†(e_i)|n − e_i⟩/√n_i` and therefore
/// `Γ(A)|n⟩ = a†(Ae_i) Γ(A)|n − e_i⟩/√n_i`.
pub fn gamma<T: Real>(fock: &TruncatedFock, a: &CMat<T>) -> Result<FockOperator<T>> {
    let d = fock.one_particle_dim();
    if a.nrows() != d || a.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: a.nrows().max(a.ncols()) });
    }
    let images: Vec<Vec<Complex<T>>> = (0..d).map(|i| a.column(i).iter().copied().collect()).collect();
    let dim = fock.dim();
    let mut out = CMat::zeros(dim, dim);
    out[(0, 0)] = Complex::new(T::one(), T::zero());
    for (pos, n) in fock.basis().iter().enumerate().skip(1) {
        let i = n.iter().position(|&x| x > 0).expect("non-vacuum state has a particle");
        let mut lower = n.clone();
        lower[i] -= 1;
        let prev = out.column(fock.index[&lower]).into_owned();
        let scale = Complex::new(lit::<T>(1.0 / (n[i] as f64).sqrt()), T::zero());
        let col = fock.apply_creation(&images[i], &prev) * scale;
        out.set_column(pos, &col);
    }
    let unitary = (a.adjoint() * a - CMat::identity(d, d)).camax() <= lit::<T>(1e-9);
    let unitarity_defect = unitary.then(|| low_unitarity_defect(fock, &out));
    Ok(FockOperator { matrix: out, unitarity_defect })
}

/// Conjugate-linear operator `v ↦ M·conj(v)` on Fock space.
#[derive(Debug, Clone)]
pub struct AntilinearFockOperator<T: Real> {
    pub matrix: CMat<T>,
}

impl<T: Real> AntilinearFockOperator<T> {
    pub fn apply(&self, v: &CVec<T>) -> CVec<T> {
        &self.matrix * v.map(|z| z.conj())
    }
}

/// Second quantisation of a conjugate-linear one-particle operator
/// `z ↦ M·conj(z)`. Since every basis vector has real coefficients, `Γ` of the
/// antilinear map is `Γ(M)` followed by coefficient conjugation.
pub fn gamma_antilinear<T: Real>(fock: &TruncatedFock, m: &CMat<T>) -> Result<AntilinearFockOperator<T>> {
    Ok(AntilinearFockOperator { matrix: gamma(fock, m)?.matrix })
}

/// Complex matrix of a complex-linear operator given on the realification.
pub fn complexify<T: Real>(space: ComplexSpace, real: &DMatrix<T>) -> CMat<T> {
    let d = space.complex_dim();
    CMat::from_fn(d, d, |a, b| Complex::new(real[(2 * a, 2 * b)], real[(2 * a + 1, 2 * b)]))
}

/// Complex matrix `M` of a conjugate-linear operator `z ↦ M·conj(z)` given on
/// the realification.
pub fn complexify_antilinear<T: Real>(space: ComplexSpace, real: &DMatrix<T>) -> CMat<T> {
    let mut r = real.clone();
    for c in 0..space.complex_dim() {
        let mut col = r.column_mut(2 * c + 1);
        col.neg_mut();
    }
    complexify(space, &r)
}

/// Series oracle check `⟨e^f, Γ(A)e^g⟩ = exp⟨f, Ag⟩`.
#[derive(Debug, Clone, Serialize)]
pub struct GammaReport {
    pub defect: f64,
    pub tolerance: f64,
}

pub fn gamma_matrix_element<T: Real>(
    fock: &TruncatedFock,
    a: &CMat<T>,
    f: &[Complex<T>],
    g: &[Complex<T>],
) -> Result<GammaReport> {
    let ga = gamma(fock, a)?;
    let ef = coherent(fock, f)?;
    let eg = coherent(fock, g)?;
    let got = ef.coefficients.dotc(&(&ga.matrix * &eg.coefficients));
    let ag: Vec<Complex<T>> = (a * CVec::from_column_slice(g)).iter().copied().collect();
    let expect = nalgebra::ComplexField::exp(inner(f, &ag));
    let rf = to_f64(norm(f));
    let rg = to_f64(norm(g));
    let opnorm = to_f64(crate::linalg::spectral_norm(&crate::hilbert::ComplexSpace::new(fock.one_particle_dim())?
        .realify(a)));
    // Cauchy–Schwarz on the dropped sectors: Σ_{n>N} (rf·rg·‖A‖)^n/n!.
    let r = (rf * rg * opnorm).sqrt();
    Ok(GammaReport {
        defect: to_f64(nalgebra::ComplexField::modulus(got - expect)),
        tolerance: fock.calibrated_tolerance::<T>(r, 2, (rf * rg * opnorm).exp()),
    })
}

/// Symplectic commutation check for `K` against its complement `K′`.
#[derive(Debug, Clone, Serialize)]
pub struct CommutantReport {
    /// Largest compressed low-sector norm of `[W(h), W(k)]` over sampled
    /// `h∈K`, `k∈K′`.
    pub defect: f64,
    /// Largest `|Im⟨h,k⟩|` over the sampled pairs; zero up to rounding.
    pub max_symplectic: f64,
    pub tolerance: f64,
    /// Commutator norm for a pair with `Im⟨h,k⟩ ≠ 0`.
    pub control: f64,
    /// `|2 sin(Im⟨h,k⟩/2)|`, the commutator norm predicted for the control pair.
    pub control_predicted: f64,
    /// `"K×K"` when the control pair was found inside `K`, `"K×iK"` when `K` is
    /// isotropic and the second vector had to be rotated out of it.
    pub control_source: String,
    pub samples: usize,
    pub low_cutoff: usize,
}

fn commutator_norm<T: Real>(fock: &TruncatedFock, h: &[Complex<T>], k: &[Complex<T>]) -> Result<f64> {
    let wh = weyl(fock, h)?.matrix;
    let wk = weyl(fock, k)?.matrix;
    let low = fock.low_sector_len();
    let c = compressed_product(&wh, &wk, low) - compressed_product(&wk, &wh, low);
    Ok(sector_norm(&c, low))
}

fn sample_in<T: Real>(frame: &DMatrix<T>, len: T, rng: &mut ChaCha8Rng) -> DVector<T> {
    let coeffs = DVector::from_fn(frame.ncols(), |_, _| gaussian::<T>(rng));
    let v = frame * coeffs;
    let n = v.norm();
    if n == T::zero() {
        v
    } else {
        v * (len / n)
    }
}

pub fn commutant_defect<T: Real>(
    fock: &TruncatedFock,
    k: &RealSubspace<T>,
    samples: usize,
    seed: u64,
) -> Result<CommutantReport> {
    let space = k.space();
    if space.complex_dim() != fock.one_particle_dim() {
        return Err(Error::DimensionMismatch {
            expected: fock.one_particle_dim(),
            got: space.complex_dim(),
        });
    }
    let kp = k.complement();
    let len: T = lit(fock.radius() / 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut defect = 0.0f64;
    let mut max_symplectic = 0.0f64;
    if k.dim() > 0 && kp.dim() > 0 {
        for _ in 0..samples {
            let x = sample_in(k.frame(), len, &mut rng);
            let y = sample_in(kp.frame(), len, &mut rng);
            max_symplectic = max_symplectic.max(to_f64(space.omega(&x, &y)).abs());
            let c = commutator_norm(fock, &space.to_complex(&x), &space.to_complex(&y))?;
            defect = defect.max(c);
        }
    }

    // Control: the pair in K×K with the largest |ω| among a few draws, or
    // (x, i·x) when ω vanishes on K.
    let mut best: Option<(DVector<T>, DVector<T>, f64)> = None;
    if k.dim() > 0 {
        for _ in 0..samples.max(4) {
            let x = sample_in(k.frame(), len, &mut rng);
            let y = sample_in(k.frame(), len, &mut rng);
            let w = to_f64(space.omega(&x, &y)).abs();
            if best.as_ref().is_none_or(|b| w > b.2) {
                best = Some((x, y, w));
            }
        }
    }
    let isotropic = best.as_ref().is_none_or(|b| b.2 < 1e-3);
    let (cx, cy, source) = if isotropic {
        let x = if k.dim() > 0 {
            sample_in(k.frame(), len, &mut rng)
        } else {
            let mut e = DVector::zeros(space.real_dim());
            e[0] = len;
            e
        };
        let jc = space.jc::<T>();
        let y = &jc * &x;
        (x, y, "K×iK")
    } else {
        let (x, y, _) = best.expect("non-isotropic control found");
        (x, y, "K×K")
    };
    let w = to_f64(space.omega(&cx, &cy));
    let control = commutator_norm(fock, &space.to_complex(&cx), &space.to_complex(&cy))?;

    let r = fock.radius();
    Ok(CommutantReport {
        defect,
        max_symplectic,
        tolerance: fock.calibrated_tolerance::<T>(r, 4, 1.0),
        control,
        control_predicted: (2.0 * (w / 2.0).sin()).abs(),
        control_source: source.into(),
        samples,
        low_cutoff: fock.low_cutoff(),
    })
}

/// Second quantisation of modular data, checked through its action on Weyl
/// operators: `Γ(δ^{it}) W(h) Γ(δ^{it})* = W(δ^{it}h)` and, for the
/// antilinear `Γ(j)`, `Γ(j) W(h) Γ(j) = W(−jh)` (the sign comes from `Γ(j)`
/// conjugating the `i` in `exp(iΦ)`).
#[derive(Debug, Clone, Serialize)]
pub struct CovarianceReport {
    pub delta_it_defect: f64,
    pub j_defect: f64,
    pub tolerance: f64,
    pub samples: usize,
}

pub fn modular_covariance<T: Real>(
    fock: &TruncatedFock,
    md: &crate::modular::ModularData<T>,
    t: T,
    samples: usize,
    seed: u64,
) -> Result<CovarianceReport> {
    let space = md.space();
    if space.complex_dim() != fock.one_particle_dim() {
        return Err(Error::DimensionMismatch { expected: fock.one_particle_dim(), got: space.complex_dim() });
    }
    let u_real = md.delta_it(t);
    let u = complexify(space, u_real.matrix());
    let gu = gamma(fock, &u)?.matrix;
    let gj = gamma_antilinear(fock, &complexify_antilinear(space, md.j.matrix()))?.matrix;
    let low = fock.low_sector_len();
    let len: T = lit(fock.radius() / 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut dd, mut dj) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let h = random_vector(space.complex_dim(), len, &mut rng);
        let hr = space.from_complex(&h);
        let w = weyl(fock, &h)?.matrix;
        let uh = space.to_complex(&u_real.apply(&hr));
        // Γ(·) preserves particle number, so the compression of Γ W Γ* only
        // involves the low blocks of each factor.
        let gl = low_block(&gu, low);
        let lhs = &gl * low_block(&w, low) * gl.adjoint();
        dd = dd.max(sector_norm(&(lhs - low_block(&weyl(fock, &uh)?.matrix, low)), low));
        let jh: Vec<Complex<T>> = space.to_complex(&md.j.apply(&hr)).into_iter().map(|z| -z).collect();
        // With Γ(j) = G∘conj: v ↦ G·conj(W·G·conj(v)) = G·conj(W)·conj(G)·v.
        let jl = low_block(&gj, low);
        let lhs_j = &jl * low_block(&w, low).map(|z| z.conj()) * jl.map(|z| z.conj());
        dj = dj.max(sector_norm(&(lhs_j - low_block(&weyl(fock, &jh)?.matrix, low)), low));
    }
    Ok(CovarianceReport {
        delta_it_defect: dd,
        j_defect: dj,
        tolerance: fock.calibrated_tolerance::<T>(to_f64(len), 4, 1.0),
        samples,
    })
}

/// Random one-particle vector of norm `len`.
pub fn random_vector<T: Real>(d: usize, len: T, rng: &mut ChaCha8Rng) -> Vec<Complex<T>> {
    let v: Vec<Complex<T>> = (0..d).map(|_| Complex::new(gaussian::<T>(rng), gaussian::<T>(rng))).collect();
    let n = norm(&v);
    v.into_iter().map(|z| z * (len / n)).collect()
}

/// Defect of `Γ(e^{iφ}I)` acting as `e^{inφ}` on the `n`-particle sector.
pub fn grading_defect<T: Real>(fock: &TruncatedFock, phi: T) -> Result<f64> {
    let d = fock.one_particle_dim();
    let u = CMat::identity(d, d) * Complex::new(phi.cos(), phi.sin());
    let g = gamma(fock, &u)?.matrix;
    let mut worst = T::zero();
    for (pos, n) in fock.basis().iter().enumerate() {
        let np: T = lit(total(n) as f64);
        let expect = Complex::new((np * phi).cos(), (np * phi).sin());
        for row in 0..fock.dim() {
            let target = if row == pos { expect } else { Complex::new(T::zero(), T::zero()) };
            worst = worst.max(nalgebra::ComplexField::modulus(g[(row, pos)] - target));
        }
    }
    Ok(to_f64(worst))
}
