//! Dense linear-algebra helpers shared by the numerical modules.
//!
//! All rank decisions use the relative singular-value cutoff
//! [`Real::rank_tol`]. Orthonormal frames are produced by SVD followed by a
//! sign convention (largest-magnitude entry of each column positive), so equal
//! inputs always give bit-identical frames.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::scalar::{ExactField, Real};

/// Thin SVD `a = U diag(σ) Vᵀ`, unsorted, by one-sided Jacobi rotations.
///
/// `U` is `m × min(m,n)` and `Vᵀ` is `min(m,n) × n`. Columns of `U` belonging to
/// zero singular values are zero. Jacobi is used instead of the library's
/// bidiagonal QR because the latter returned factors with reconstruction errors
/// of order 1e-1 on block-structured inputs (direct sums of angle fibers),
/// while Jacobi reaches full relative accuracy on every singular value.
pub fn svd<T: Real>(a: &DMatrix<T>) -> (DMatrix<T>, DVector<T>, DMatrix<T>) {
    if a.nrows() >= a.ncols() {
        let (u, s, v) = jacobi_tall(a.clone());
        (u, s, v.transpose())
    } else {
        let (u, s, v) = jacobi_tall(a.transpose());
        (v, s, u.transpose())
    }
}

/// One-sided Jacobi on a tall matrix: orthogonalise the columns of `w = a·V`
/// by plane rotations, then `σ_j = ‖w_j‖` and `U_j = w_j / σ_j`.
fn jacobi_tall<T: Real>(mut w: DMatrix<T>) -> (DMatrix<T>, DVector<T>, DMatrix<T>) {
    let (m, n) = w.shape();
    let mut v = DMatrix::<T>::identity(n, n);
    let eps = T::default_epsilon();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..m {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let two = T::one() + T::one();
                let zeta = (beta - alpha) / (two * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = c * x - s * y;
                    w[(i, q)] = s * x + c * y;
                }
                for i in 0..n {
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * x - s * y;
                    v[(i, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigma = DVector::zeros(n);
    for j in 0..n {
        let norm = w.column(j).norm();
        sigma[j] = norm;
        if norm > T::zero() {
            let mut col = w.column_mut(j);
            col /= norm;
        }
    }
    (w, sigma, v)
}

pub(crate) fn svd_sorted<T: Real>(a: &DMatrix<T>) -> (DMatrix<T>, Vec<T>, DMatrix<T>) {
    let (u, s, vt) = svd(a);
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].partial_cmp(&s[i]).unwrap_or(std::cmp::Ordering::Equal));
    let u = DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let vt = DMatrix::from_fn(order.len(), vt.ncols(), |r, c| vt[(order[r], c)]);
    let s = order.iter().map(|&i| s[i]).collect();
    (u, s, vt)
}

/// Numerical rank under the relative cutoff.
pub fn rank<T: Real>(a: &DMatrix<T>) -> usize {
    if a.is_empty() {
        return 0;
    }
    let (_, s, _) = svd(a);
    let max = s.iter().fold(T::zero(), |m, &x| m.max(x));
    if max == T::zero() {
        return 0;
    }
    s.iter().filter(|&&x| x >= T::rank_tol() * max).count()
}

pub(crate) fn normalize_signs<T: Real>(m: &mut DMatrix<T>) {
    for mut col in m.column_iter_mut() {
        let mut best = 0;
        for i in 0..col.len() {
            if col[i].abs() > col[best].abs() + T::default_epsilon() {
                best = i;
            }
        }
        if !col.is_empty() && col[best] < T::zero() {
            col.neg_mut();
        }
    }
}

/// Orthonormal basis for the column span of `a`.
pub fn orthonormal_span<T: Real>(a: &DMatrix<T>) -> DMatrix<T> {
    let n = a.nrows();
    if a.ncols() == 0 || n == 0 {
        return DMatrix::zeros(n, 0);
    }
    let (u, s, _) = svd_sorted(a);
    let max = s.first().copied().unwrap_or(T::zero());
    if max == T::zero() {
        return DMatrix::zeros(n, 0);
    }
    let r = s.iter().filter(|&&x| x >= T::rank_tol() * max).count();
    let mut f = u.columns(0, r).into_owned();
    normalize_signs(&mut f);
    f
}

/// Orthonormal basis for the orthogonal complement of an orthonormal frame.
pub fn complement<T: Real>(frame: &DMatrix<T>) -> DMatrix<T> {
    let n = frame.nrows();
    if frame.ncols() == 0 {
        return DMatrix::identity(n, n);
    }
    let p = DMatrix::identity(n, n) - frame * frame.transpose();
    let (vals, vecs) = sym_eigen_sorted(&p);
    let half: T = T::one() / (T::one() + T::one());
    let cols: Vec<usize> = (0..n).filter(|&i| vals[i] > half).collect();
    let mut out = DMatrix::from_fn(n, cols.len(), |r, c| vecs[(r, cols[c])]);
    normalize_signs(&mut out);
    out
}

/// Orthonormal basis of `{x : a x = 0}`.
pub fn null_space<T: Real>(a: &DMatrix<T>) -> DMatrix<T> {
    let rows = orthonormal_span(&a.transpose());
    complement(&rows)
}

/// Symmetric eigendecomposition with eigenvalues ascending.
pub fn sym_eigen_sorted<T: Real>(m: &DMatrix<T>) -> (DVector<T>, DMatrix<T>) {
    let n = m.nrows();
    if n == 0 {
        return (DVector::zeros(0), DMatrix::zeros(0, 0));
    }
    let sym = (m + m.transpose()) * (T::one() / (T::one() + T::one()));
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Largest singular value.
pub fn spectral_norm<T: Real>(m: &DMatrix<T>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    svd(m).1.iter().fold(T::zero(), |acc, &x| acc.max(x))
}

pub fn projector<T: Real>(frame: &DMatrix<T>) -> DMatrix<T> {
    frame * frame.transpose()
}

/// Apply a real function to a symmetric matrix through its eigendecomposition.
pub fn sym_function<T: Real>(
    vals: &DVector<T>,
    vecs: &DMatrix<T>,
    f: impl Fn(T) -> T,
) -> DMatrix<T> {
    let d = DMatrix::from_diagonal(&vals.map(f));
    vecs * d * vecs.transpose()
}

/// Row reduction over an [`ExactField`]; returns the reduced matrix and its
/// pivot columns.
pub fn row_reduce<F: ExactField>(mut m: Vec<Vec<F>>, ncols: usize) -> (Vec<Vec<F>>, Vec<usize>) {
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        // largest magnitude pivot; for rationals any nonzero would do
        let mut best: Option<usize> = None;
        for r in row..nrows {
            if !m[r][col].is_negligible() {
                match best {
                    None => best = Some(r),
                    Some(b) if m[r][col].abs() > m[b][col].abs() => best = Some(r),
                    _ => {}
                }
            }
        }
        let Some(p) = best else { continue };
        m.swap(row, p);
        let inv = F::one() / m[row][col].clone();
        for x in &mut m[row][col..] {
            *x = x.clone() * inv.clone();
        }
        let pivot_row = m[row].clone();
        for (r, target) in m.iter_mut().enumerate() {
            if r != row && !target[col].is_zero() {
                let factor = target[col].clone();
                for (x, p) in target[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x = x.clone() - factor.clone() * p.clone();
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (m, pivots)
}

pub fn exact_rank<F: ExactField>(m: &[Vec<F>], ncols: usize) -> usize {
    row_reduce(m.to_vec(), ncols).1.len()
}

/// Basis of the right null space `{x : m x = 0}`, one vector per free column.
pub fn exact_null_space<F: ExactField>(m: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let (r, pivots) = row_reduce(m.to_vec(), ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![F::zero(); ncols];
            x[f] = F::one();
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = -r[i][f].clone();
            }
            x
        })
        .collect()
}

/// Column spans of `a` and `b` (given as lists of vectors) coincide.
pub fn exact_same_span<F: ExactField>(a: &[Vec<F>], b: &[Vec<F>], dim: usize) -> bool {
    let ra = exact_rank(a, dim);
    let rb = exact_rank(b, dim);
    let mut both = a.to_vec();
    both.extend(b.iter().cloned());
    ra == rb && exact_rank(&both, dim) == ra
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn jacobi_svd_reconstructs() {
        let a = DMatrix::from_fn(7, 4, |i, j| ((i * 3 + j * 5) % 7) as f64 - 2.5 + (i == j) as u8 as f64);
        for m in [a.clone(), a.transpose()] {
            let (u, s, vt) = svd(&m);
            let rec = &u * DMatrix::from_diagonal(&s) * &vt;
            assert!((rec - &m).amax() < 1e-13);
            assert!((u.transpose() * &u - DMatrix::identity(u.ncols(), u.ncols())).amax() < 1e-13);
        }
    }

    #[test]
    fn span_drops_dependent_columns() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 0.0, 0.0, 0.0, 0.0]);
        let f = orthonormal_span(&a);
        assert_eq!(f.ncols(), 1);
        assert!((f[(0, 0)] - 1.0f64).abs() < 1e-15);
    }

    #[test]
    fn complement_and_null_space() {
        let a = DMatrix::from_row_slice(1, 3, &[1.0f64, 1.0, 0.0]);
        let n = null_space(&a);
        assert_eq!(n.ncols(), 2);
        assert!((a * &n).norm() < 1e-14);
        let c = complement(&n);
        assert_eq!(c.ncols(), 1);
    }

    #[test]
    fn exact_rank_over_rationals() {
        let q = |v: i64| <BigRational as ExactField>::from_i64(v);
        let m = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)], vec![q(0), q(1), q(1)]];
        assert_eq!(exact_rank(&m, 3), 2);
        let ns = exact_null_space(&m, 3);
        assert_eq!(ns.len(), 1);
        for row in &m {
            let dot = row
                .iter()
                .zip(&ns[0])
                .fold(q(0), |acc, (a, b)| acc + a.clone() * b.clone());
            assert!(num_traits::Zero::is_zero(&dot));
        }
    }
}
