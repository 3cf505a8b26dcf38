//! Small dense linear algebra: Moore-Penrose pseudoinverse, spectral norm,
//! Hadamard product, and partial-diagonal-matrix structure detection.
//!
//! Matrices are dense, row-major `f64` and sized for desk-scale problems
//! (dimensions up to a few hundred). The pseudoinverse is computed from a
//! one-sided Jacobi SVD; singular values below `max(rows, cols) * eps * σ_max`
//! are truncated to zero when inverting.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Dense row-major matrix with at least one row and one column.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// All-zero matrix. Panics if either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Diagonal matrix from the entries of `v`.
    pub fn from_diag(v: &[f64]) -> Self {
        let mut m = Matrix::zeros(v.len(), v.len());
        for (i, &x) in v.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    /// Build from row-major data. Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        assert_eq!(data.len(), rows * cols, "data length must match shape");
        Matrix { rows, cols, data }
    }

    /// Build from a slice of rows. Panics on ragged input.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        assert!(!rows.is_empty());
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "all rows must have equal length");
            data.extend_from_slice(r);
        }
        Matrix::from_vec(rows.len(), cols, data)
    }

    /// Build from column vectors. Panics on ragged input.
    pub fn from_columns(cols: &[Vec<f64>]) -> Self {
        assert!(!cols.is_empty());
        let rows = cols[0].len();
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "all columns must have equal length");
            for i in 0..rows {
                m[(i, j)] = c[i];
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Copy of column `j`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Copy of row `i`.
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Matrix product `self * rhs`. Panics on shape mismatch.
    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product. Panics on shape mismatch.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "vector length must match columns");
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn scale(&self, a: f64) -> Matrix {
        let data = self.data.iter().map(|x| a * x).collect();
        Matrix::from_vec(self.rows, self.cols, data)
    }

    /// Entrywise negation (exact under IEEE 754).
    pub fn neg(&self) -> Matrix {
        let data = self.data.iter().map(|x| -x).collect();
        Matrix::from_vec(self.rows, self.cols, data)
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        Matrix::from_vec(self.rows, self.cols, data)
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Matrix::from_vec(self.rows, self.cols, data)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest Euclidean column norm.
    pub fn max_col_norm(&self) -> f64 {
        (0..self.cols)
            .map(|j| norm2(&self.column(j)))
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Euclidean norm of a slice.
pub fn norm2(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

/// Dot product of two slices of equal length.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// ---------------------------------------------------------------------------
// Singular value decomposition (one-sided Jacobi)
// ---------------------------------------------------------------------------

/// Thin SVD of the worked matrix: `a = u * diag(sigma) * v^T` where the
/// worked matrix has at least as many rows as columns.
pub(crate) struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
    /// True when the input was transposed before factoring.
    pub transposed: bool,
}

const MAX_JACOBI_SWEEPS: usize = 64;

/// One-sided Jacobi SVD. Column pairs are rotated until mutually orthogonal;
/// convergence is quadratic and small singular values retain high relative
/// accuracy, which keeps Penrose residuals near machine precision.
pub(crate) fn svd(a: &Matrix) -> Svd {
    let transposed = a.nrows() < a.ncols();
    let mut u = if transposed { a.transpose() } else { a.clone() };
    let (m, n) = (u.nrows(), u.ncols());
    let mut v = Matrix::identity(n);

    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for i in 0..m {
                    let up = u[(i, p)];
                    let uq = u[(i, q)];
                    alpha += up * up;
                    beta += uq * uq;
                    gamma += up * uq;
                }
                if gamma.abs() <= 1e-15 * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + libm::sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + libm::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..m {
                    let up = u[(i, p)];
                    let uq = u[(i, q)];
                    u[(i, p)] = c * up - s * uq;
                    u[(i, q)] = s * up + c * uq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; normalize the left vectors.
    let mut sigma = vec![0.0; n];
    for j in 0..n {
        let norm = norm2(&u.column(j));
        sigma[j] = norm;
        if norm > 0.0 {
            for i in 0..m {
                u[(i, j)] /= norm;
            }
        } else {
            for i in 0..m {
                u[(i, j)] = 0.0;
            }
        }
    }

    // Sort descending by singular value (stable on ties).
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap());
    let mut us = Matrix::zeros(m, n);
    let mut vs = Matrix::zeros(n, n);
    let mut ss = vec![0.0; n];
    for (dst, &src) in order.iter().enumerate() {
        ss[dst] = sigma[src];
        for i in 0..m {
            us[(i, dst)] = u[(i, src)];
        }
        for i in 0..n {
            vs[(i, dst)] = v[(i, src)];
        }
    }

    Svd {
        u: us,
        sigma: ss,
        v: vs,
        transposed,
    }
}

fn rank_threshold(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

/// Moore-Penrose pseudoinverse.
///
/// The returned matrix satisfies the four Penrose equations to numerical
/// tolerance; for full column rank it agrees with `(AᵀA)⁻¹Aᵀ`, for full row
/// rank with `Aᵀ(AAᵀ)⁻¹`.
pub fn pinv(a: &Matrix) -> Result<Matrix> {
    if !a.is_finite() {
        return Err(Error::NonFiniteInput);
    }
    let f = svd(a);
    let n = f.sigma.len();
    let thresh = rank_threshold(a.nrows(), a.ncols(), f.sigma[0]);
    let mut sig_inv = Matrix::zeros(n, n);
    for j in 0..n {
        if f.sigma[j] > thresh {
            sig_inv[(j, j)] = 1.0 / f.sigma[j];
        }
    }
    // worked = U Σ Vᵀ, so pinv(worked) = V Σ⁺ Uᵀ; transpose back if needed.
    let p = f.v.matmul(&sig_inv).matmul(&f.u.transpose());
    Ok(if f.transposed { p.transpose() } else { p })
}

/// Induced 2-norm (largest singular value).
pub fn spectral_norm(a: &Matrix) -> f64 {
    svd(a).sigma[0]
}

/// Numerical rank: singular values above `max(rows, cols) * eps * σ_max`.
pub fn rank(a: &Matrix) -> usize {
    let f = svd(a);
    let thresh = rank_threshold(a.nrows(), a.ncols(), f.sigma[0]);
    f.sigma.iter().filter(|&&s| s > thresh).count()
}

/// Component-wise (Hadamard) product. Errors on shape mismatch.
pub fn hadamard(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if (a.nrows(), a.ncols()) != (b.nrows(), b.ncols()) {
        return Err(Error::ShapeMismatch {
            expected: (a.nrows(), a.ncols()),
            got: (b.nrows(), b.ncols()),
        });
    }
    let data = a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect();
    Ok(Matrix::from_vec(a.nrows(), a.ncols(), data))
}

// ---------------------------------------------------------------------------
// Partial diagonal matrices
// ---------------------------------------------------------------------------

/// Classification of a matrix as a partial diagonal matrix: every column is a
/// column of one diagonal matrix, i.e. has at most one nonzero entry, and the
/// nonzero rows are pairwise distinct across columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialDiagonalInfo {
    pub is_partial_diagonal: bool,
    /// For column `j`, the (0-based) row index of its permitted nonzero entry.
    /// Zero columns are assigned the smallest unused row index. Only present
    /// when `is_partial_diagonal` holds.
    pub nonzero_row_index_per_column: Option<Vec<usize>>,
    /// True iff partial diagonal with no zero column.
    pub full_column_rank: bool,
}

/// Classify `m` per the partial-diagonal definition. Detection uses exact
/// zero comparison on entries; direction matrices are user-constructed, and a
/// tolerance here would silently reinterpret near-zero data.
pub fn partial_diagonal_info(m: &Matrix) -> PartialDiagonalInfo {
    let not = PartialDiagonalInfo {
        is_partial_diagonal: false,
        nonzero_row_index_per_column: None,
        full_column_rank: false,
    };
    if m.ncols() > m.nrows() {
        return not;
    }
    let mut used = vec![false; m.nrows()];
    let mut indices = vec![usize::MAX; m.ncols()];
    let mut zero_cols = Vec::new();
    for j in 0..m.ncols() {
        let mut nz = None;
        for i in 0..m.nrows() {
            if m[(i, j)] != 0.0 {
                if nz.is_some() {
                    return not; // two nonzeros in one column
                }
                nz = Some(i);
            }
        }
        match nz {
            Some(i) => {
                if used[i] {
                    return not; // two columns share a nonzero row
                }
                used[i] = true;
                indices[j] = i;
            }
            None => zero_cols.push(j),
        }
    }
    // Zero columns take the smallest row indices left over.
    let full_column_rank = zero_cols.is_empty();
    let mut free = (0..m.nrows()).filter(|&i| !used[i]);
    for j in zero_cols {
        indices[j] = free.next().expect("cols <= rows leaves a free index");
    }
    PartialDiagonalInfo {
        is_partial_diagonal: true,
        nonzero_row_index_per_column: Some(indices),
        full_column_rank,
    }
}

/// Pseudoinverse of a partial diagonal matrix with full column rank: the
/// stack of single-column pseudoinverses, row `j` equal to
/// `(1/s^j_{u_j}) (e^{u_j})ᵀ`. Agrees with [`pinv`] to rounding.
pub fn pinv_partial_diagonal(s: &Matrix) -> Result<Matrix> {
    let info = partial_diagonal_info(s);
    if !(info.is_partial_diagonal && info.full_column_rank) {
        return Err(Error::NotPartialDiagonal);
    }
    let indices = info.nonzero_row_index_per_column.unwrap();
    let mut out = Matrix::zeros(s.ncols(), s.nrows());
    for (j, &u) in indices.iter().enumerate() {
        out[(j, u)] = 1.0 / s[(u, j)];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Residuals of the four Penrose equations; the independent oracle for
    /// pseudoinverse correctness.
    fn penrose_residuals(a: &Matrix, p: &Matrix) -> [f64; 4] {
        let apa = a.matmul(p).matmul(a);
        let pap = p.matmul(a).matmul(p);
        let ap = a.matmul(p);
        let pa = p.matmul(a);
        [
            apa.sub(a).max_abs(),
            pap.sub(p).max_abs(),
            ap.transpose().sub(&ap).max_abs(),
            pa.transpose().sub(&pa).max_abs(),
        ]
    }

    #[test]
    fn pinv_identity() {
        let p = pinv(&Matrix::identity(3)).unwrap();
        assert_eq!(p, Matrix::identity(3));
    }

    #[test]
    fn pinv_single_column() {
        let a = Matrix::from_columns(&[alloc::vec![0.1, 0.0]]);
        let p = pinv(&a).unwrap();
        assert_eq!((p.nrows(), p.ncols()), (1, 2));
        assert!((p[(0, 0)] - 10.0).abs() < 1e-12);
        assert!(p[(0, 1)].abs() < 1e-15);
    }

    #[test]
    fn pinv_rank_deficient_penrose() {
        // 3x2 with linearly independent columns but embedded in 3 dims.
        let s = Matrix::from_rows(&[&[0.1, 0.1], &[0.0, 0.1], &[0.0, 0.0]]);
        let p = pinv(&s).unwrap();
        for r in penrose_residuals(&s, &p) {
            assert!(r <= 1e-10 * spectral_norm(&s).max(1.0), "residual {r}");
        }
        // Also its transpose (full row rank 2x3).
        let st = s.transpose();
        let pt = pinv(&st).unwrap();
        for r in penrose_residuals(&st, &pt) {
            assert!(r <= 1e-10 * spectral_norm(&st).max(1.0), "residual {r}");
        }
    }

    #[test]
    fn pinv_zero_matrix() {
        let z = Matrix::zeros(2, 3);
        let p = pinv(&z).unwrap();
        assert_eq!(p, Matrix::zeros(3, 2));
    }

    #[test]
    fn pinv_rejects_non_finite() {
        let mut a = Matrix::identity(2);
        a[(0, 1)] = f64::NAN;
        assert_eq!(pinv(&a), Err(Error::NonFiniteInput));
    }

    #[test]
    fn spectral_norm_identity_and_diag() {
        assert!((spectral_norm(&Matrix::identity(5)) - 1.0).abs() < 1e-14);
        let d = Matrix::from_diag(&[3.0, -4.0]);
        assert!((spectral_norm(&d) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn hadamard_examples() {
        let a = Matrix::from_rows(&[&[1.0, -2.0], &[0.5, 3.0]]);
        let ones = Matrix::from_vec(2, 2, alloc::vec![1.0; 4]);
        assert_eq!(hadamard(&a, &ones).unwrap(), a);

        let s1 = Matrix::from_columns(&[alloc::vec![0.1, 0.0, 0.0]]);
        let sq = hadamard(&s1, &s1).unwrap();
        assert_eq!(sq[(0, 0)], 0.1 * 0.1);
        assert!((sq[(0, 0)] - 0.01).abs() < 1e-17);
        assert_eq!(sq[(1, 0)], 0.0);

        let x = Matrix::from_columns(&[alloc::vec![1.0, 2.0]]);
        let y = Matrix::from_columns(&[alloc::vec![3.0, 4.0]]);
        let xy = hadamard(&x, &y).unwrap();
        assert_eq!(xy.column(0), alloc::vec![3.0, 8.0]);

        let bad = hadamard(&a, &s1);
        assert!(matches!(bad, Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn partial_diagonal_classification() {
        // Columns of one diagonal matrix, distinct rows.
        let m = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.0], &[0.0, 2.0]]);
        let info = partial_diagonal_info(&m);
        assert!(info.is_partial_diagonal);
        assert!(info.full_column_rank);
        assert_eq!(info.nonzero_row_index_per_column, Some(alloc::vec![0, 2]));

        // Unordered columns still qualify.
        let m2 = Matrix::from_rows(&[&[0.0, 1.0], &[0.0, 0.0], &[2.0, 0.0]]);
        assert!(partial_diagonal_info(&m2).is_partial_diagonal);

        // Two nonzeros in a column disqualify.
        let m3 = Matrix::from_rows(&[&[1.0, 0.0, 3.0], &[0.0, 0.0, 0.0], &[0.0, 2.0, 0.0]]);
        assert!(!partial_diagonal_info(&m3).is_partial_diagonal);

        // Shared nonzero row disqualifies.
        let m4 = Matrix::from_rows(&[&[1.0, 1.0], &[0.0, 0.0], &[0.0, 0.0]]);
        assert!(!partial_diagonal_info(&m4).is_partial_diagonal);

        // Zero column: still partial diagonal, but rank deficient.
        let m5 = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0]]);
        let info5 = partial_diagonal_info(&m5);
        assert!(info5.is_partial_diagonal);
        assert!(!info5.full_column_rank);
        assert_eq!(info5.nonzero_row_index_per_column, Some(alloc::vec![0, 1]));

        // More columns than rows can never qualify.
        let wide = Matrix::zeros(2, 3);
        assert!(!partial_diagonal_info(&wide).is_partial_diagonal);
    }

    #[test]
    fn pinv_partial_diagonal_matches_general() {
        let s = Matrix::from_diag(&[0.1, 0.1]);
        let fast = pinv_partial_diagonal(&s).unwrap();
        let general = pinv(&s).unwrap();
        assert!(fast.sub(&general).max_abs() < 1e-12);
        assert!((fast[(0, 0)] - 10.0).abs() < 1e-12);

        let s2 = Matrix::from_rows(&[&[0.1, 0.0], &[0.0, 0.0], &[0.0, 0.2]]);
        let fast2 = pinv_partial_diagonal(&s2).unwrap();
        assert_eq!(fast2.row(0), alloc::vec![10.0, 0.0, 0.0]);
        assert_eq!(fast2.row(1), alloc::vec![0.0, 0.0, 5.0]);
        let general2 = pinv(&s2).unwrap();
        assert!(fast2.sub(&general2).max_abs() < 1e-12 * general2.max_abs().max(1.0));

        // Single column h e^i.
        let h = 0.25;
        let mut col = alloc::vec![0.0; 4];
        col[2] = h;
        let s3 = Matrix::from_columns(&[col]);
        let fast3 = pinv_partial_diagonal(&s3).unwrap();
        assert_eq!(fast3.row(0), alloc::vec![0.0, 0.0, 1.0 / h, 0.0]);

        // Precondition violations.
        let bad = Matrix::from_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(pinv_partial_diagonal(&bad), Err(Error::NotPartialDiagonal));
        let zero_col = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(
            pinv_partial_diagonal(&zero_col),
            Err(Error::NotPartialDiagonal)
        );
    }

    #[test]
    fn rank_detects_deficiency() {
        assert_eq!(rank(&Matrix::identity(4)), 4);
        let m = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert_eq!(rank(&m), 1);
        assert_eq!(rank(&Matrix::zeros(3, 2)), 0);
    }
}
