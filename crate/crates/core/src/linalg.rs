//! Dense real linear algebra used by the reduction methods.
//!
//! Only what the rest of the crate needs: a row-major [`Matrix`], cyclic
//! Jacobi for symmetric eigenproblems, one-sided Jacobi SVD and a Cholesky
//! factorization for the small SPD solves in LDA and the Gram PSD check.
//! Eigen- and singular vectors are sign-normalized so that the
//! largest-magnitude entry is positive, which makes every decomposition
//! reproducible bit for bit.

use std::fmt;

use thiserror::Error;

/// Default convergence tolerance on the relative off-diagonal norm.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Maximum number of Jacobi sweeps before giving up.
pub const MAX_SWEEPS: usize = 100;

const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix data length {len} does not match {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric: |a[{row},{col}] - a[{col},{row}]| = {deviation:e}")]
    NotSymmetric { row: usize, col: usize, deviation: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("matrix is not positive definite (pivot {index} = {pivot:e})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix must have at least one row and one column")]
    Empty,
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Row-major dense matrix of finite reals.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Build from row-major data, checking shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(LinalgError::ShapeMismatch { rows, cols, len: data.len() });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite { row: pos / cols.max(1), col: pos % cols.max(1) });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch { expected: cols, got: row.len() });
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols);
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(LinalgError::DimensionMismatch { expected: rows, got: col.len() });
            }
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m.check_finite()?;
        Ok(m)
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact panics on zero, and a 0-column matrix has no data anyway
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    /// Rows selected by index, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self { rows: indices.len(), cols: self.cols, data }
    }

    /// Columns selected by index, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * indices.len());
        for row in self.row_iter() {
            data.extend(indices.iter().map(|&j| row[j]));
        }
        Self { rows: self.rows, cols: indices.len(), data }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let a_row = self.row(i);
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in a_row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        Ok(self.row_iter().map(|row| dot(row, v)).collect())
    }

    /// `selfᵀ · self`, computed on the upper triangle and mirrored so the
    /// result is exactly symmetric.
    pub fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut g = Matrix::zeros(n, n);
        for row in self.row_iter() {
            for i in 0..n {
                let ri = row[i];
                if ri == 0.0 {
                    continue;
                }
                for j in i..n {
                    g.data[i * n + j] += ri * row[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g.data[i * n + j] = g.data[j * n + i];
            }
        }
        g
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        if self.shape() != other.shape() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(pos) => Err(LinalgError::NonFinite { row: pos / self.cols, col: pos % self.cols }),
            None => Ok(()),
        }
    }

    /// Returns the first symmetry violation above `tol` (scaled by the
    /// largest entry), if any.
    pub fn check_symmetric(&self, tol: f64) -> Result<()> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let scale = self.max_abs().max(1.0);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let deviation = (self[(i, j)] - self[(j, i)]).abs();
                if deviation > tol * scale {
                    return Err(LinalgError::NotSymmetric { row: i, col: j, deviation });
                }
            }
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for row in self.row_iter() {
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Flip `v` so that its largest-magnitude entry is positive. Returns true
/// when the sign was flipped. Ties go to the lowest index.
pub fn normalize_sign(v: &mut [f64]) -> bool {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
        true
    } else {
        false
    }
}

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Sorted non-increasing.
    pub eigenvalues: Vec<f64>,
    /// Column `k` pairs with `eigenvalues[k]`.
    pub eigenvectors: Matrix,
    pub sweeps: usize,
}

impl EigenDecomposition {
    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        self.eigenvectors.column(k)
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Iterates until the off-diagonal Frobenius norm drops below
/// `tol · ‖A‖_F` or [`MAX_SWEEPS`] is reached.
pub fn eig_symmetric(a: &Matrix, tol: f64) -> Result<EigenDecomposition> {
    a.check_finite()?;
    a.check_symmetric(SYMMETRY_TOL)?;
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm();
    let threshold = if scale > 0.0 { tol * scale } else { 0.0 };

    let off_norm = |m: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * m[(i, j)] * m[(i, j)];
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    let mut off = off_norm(&m);
    while off > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(LinalgError::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                // Rutishauser's stable rotation angle
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate_symmetric(&mut m, p, q, c, s);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        off = off_norm(&m);
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps ties in original diagonal order
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));
    let eigenvalues = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut col = v.column(i);
        normalize_sign(&mut col);
        for (r, x) in col.into_iter().enumerate() {
            vectors[(r, k)] = x;
        }
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors: vectors, sweeps })
}

// Applies Jᵀ·M·J for the rotation in the (p, q) plane.
fn rotate_symmetric(m: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = m.rows();
    let app = m[(p, p)];
    let aqq = m[(q, q)];
    let apq = m[(p, q)];
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        m[(k, p)] = new_kp;
        m[(p, k)] = new_kp;
        m[(k, q)] = new_kq;
        m[(q, k)] = new_kq;
    }
    m[(p, p)] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
    m[(q, q)] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
}

#[derive(Debug, Clone)]
pub struct SvdDecomposition {
    /// rows × k, orthonormal columns.
    pub u: Matrix,
    /// Non-negative, non-increasing, length k = min(rows, cols).
    pub singular_values: Vec<f64>,
    /// k × cols, orthonormal rows.
    pub vt: Matrix,
    pub sweeps: usize,
}

impl SvdDecomposition {
    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for (j, s) in self.singular_values.iter().enumerate() {
                us[(i, j)] *= s;
            }
        }
        us.matmul(&self.vt).expect("thin SVD factors are conformable")
    }

    /// Number of singular values strictly above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.singular_values.iter().filter(|&&s| s > tol).count()
    }
}

/// Thin SVD by one-sided (Hestenes) Jacobi.
///
/// Wide inputs are handled through the transpose. Left singular vectors
/// belonging to zero singular values are completed to an orthonormal set.
pub fn svd(a: &Matrix, tol: f64) -> Result<SvdDecomposition> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(LinalgError::Empty);
    }
    a.check_finite()?;
    if a.rows() < a.cols() {
        let t = svd(&a.transpose(), tol)?;
        return Ok(SvdDecomposition {
            u: t.vt.transpose(),
            singular_values: t.singular_values,
            vt: t.u.transpose(),
            sweeps: t.sweeps,
        });
    }

    let (m, n) = a.shape();
    // Work on columns: store Aᵀ so each column is a contiguous row.
    let mut w = a.transpose();
    let mut v = Matrix::identity(n);
    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta, gamma) = {
                    let wp = w.row(p);
                    let wq = w.row(q);
                    (dot(wp, wp), dot(wq, wq), dot(wp, wq))
                };
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..m {
                    let xp = w[(p, k)];
                    let xq = w[(q, k)];
                    w[(p, k)] = c * xp - s * xq;
                    w[(q, k)] = s * xp + c * xq;
                }
                for k in 0..n {
                    let xp = v[(p, k)];
                    let xq = v[(q, k)];
                    v[(p, k)] = c * xp - s * xq;
                    v[(q, k)] = s * xp + c * xq;
                }
            }
        }
        if !rotated {
            break;
        }
        sweeps += 1;
        if sweeps == MAX_SWEEPS {
            let mut worst = 0.0_f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    let (wp, wq) = (w.row(p), w.row(q));
                    let denom = (dot(wp, wp) * dot(wq, wq)).sqrt();
                    if denom > 0.0 {
                        worst = worst.max(dot(wp, wq).abs() / denom);
                    }
                }
            }
            return Err(LinalgError::NoConvergence { sweeps, off_norm: worst });
        }
    }

    // w rows are now U·Σ columns, v rows are V columns.
    let norms: Vec<f64> = (0..n).map(|j| norm(w.row(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let smax = norms.iter().cloned().fold(0.0, f64::max);
    let zero_cut = smax * (m.max(n) as f64) * f64::EPSILON;
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut v_rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut singular_values = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        let mut vrow = v.row(j).to_vec();
        let flipped = normalize_sign(&mut vrow);
        if s > zero_cut {
            let sign = if flipped { -1.0 } else { 1.0 };
            u_cols.push(w.row(j).iter().map(|x| sign * x / s).collect());
            singular_values.push(s);
        } else {
            u_cols.push(vec![0.0; m]);
            singular_values.push(0.0);
            missing.push(k);
        }
        v_rows.push(vrow);
    }
    for k in missing {
        u_cols[k] = orthonormal_complement_vector(&u_cols, k, m);
    }

    Ok(SvdDecomposition {
        u: Matrix::from_columns(&u_cols)?,
        singular_values,
        vt: Matrix::from_rows(&v_rows)?,
        sweeps,
    })
}

// A unit vector orthogonal to every column in `cols` except `skip`
// (which is a placeholder), found by Gram-Schmidt over the standard basis.
fn orthonormal_complement_vector(cols: &[Vec<f64>], skip: usize, dim: usize) -> Vec<f64> {
    let others: Vec<&Vec<f64>> = cols
        .iter()
        .enumerate()
        .filter(|&(i, c)| i != skip && norm(c) > 0.5)
        .map(|(_, c)| c)
        .collect();
    let mut best: Option<Vec<f64>> = None;
    let mut best_norm = 0.0;
    for e in 0..dim {
        let mut cand = vec![0.0; dim];
        cand[e] = 1.0;
        // two passes of classical Gram-Schmidt for stability
        for _ in 0..2 {
            for o in &others {
                let proj = dot(&cand, o);
                cand.iter_mut().zip(o.iter()).for_each(|(c, x)| *c -= proj * x);
            }
        }
        let nrm = norm(&cand);
        if nrm > best_norm {
            best_norm = nrm;
            best = Some(cand);
        }
        if nrm > 0.5 {
            break;
        }
    }
    let mut v = best.unwrap_or_else(|| vec![0.0; dim]);
    v.iter_mut().for_each(|x| *x /= best_norm.max(f64::MIN_POSITIVE));
    normalize_sign(&mut v);
    v
}

/// Extend a set of orthonormal vectors (each of length `dim`) by
/// `extra` further unit vectors orthogonal to all of them.
pub fn complete_orthonormal(basis: &[Vec<f64>], extra: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut all: Vec<Vec<f64>> = basis.to_vec();
    for _ in 0..extra {
        all.push(vec![0.0; dim]);
        let k = all.len() - 1;
        all[k] = orthonormal_complement_vector(&all, k, dim);
    }
    all.split_off(basis.len())
}

/// Lower-triangular Cholesky factor `L` with `A = L·Lᵀ`.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    a.check_symmetric(SYMMETRY_TOL)?;
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(LinalgError::NotPositiveDefinite { index: j, pivot: d });
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Solve `A·x = b` for symmetric positive definite `A`.
pub fn solve_spd(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.rows() {
        return Err(LinalgError::DimensionMismatch { expected: a.rows(), got: b.len() });
    }
    let l = cholesky(a)?;
    let n = b.len();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[(i, k)] * y[k]).sum();
        y[i] = (b[i] - s) / l[(i, i)];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|k| l[(k, i)] * x[k]).sum();
        x[i] = (y[i] - s) / l[(i, i)];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
        let data = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Matrix::new(rows, cols, data).unwrap()
    }

    fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        let b = random_matrix(rng, n, n);
        let mut s = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] = b[(i, j)] + b[(j, i)];
            }
        }
        s
    }

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(matches!(Matrix::new(2, 2, vec![1.0; 3]), Err(LinalgError::ShapeMismatch { .. })));
        assert!(matches!(
            Matrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(LinalgError::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn identity_eigenvalues() {
        let e = eig_symmetric(&Matrix::identity(2), DEFAULT_TOL).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = eig_symmetric(&a, DEFAULT_TOL).unwrap();
        assert!((e.eigenvalues[0] - 3.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = e.eigenvector(0);
        let v1 = e.eigenvector(1);
        assert!((v0[0] - h).abs() < 1e-14 && (v0[1] - h).abs() < 1e-14);
        // (1,-1)/√2 up to sign; the sign convention picks the first of a tie
        assert!((v1[0].abs() - h).abs() < 1e-14 && (v1[0] + v1[1]).abs() < 1e-14);
    }

    #[test]
    fn eigen_residuals_on_random_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_symmetric(&mut rng, 6);
        let e = eig_symmetric(&a, DEFAULT_TOL).unwrap();
        let scale = a.frobenius_norm();
        for k in 0..6 {
            let v = e.eigenvector(k);
            let av = a.matvec(&v).unwrap();
            let res: f64 = av.iter().zip(&v).map(|(x, y)| (x - e.eigenvalues[k] * y).powi(2)).sum();
            assert!(res.sqrt() < 1e-9 * scale.max(1.0));
            assert!((norm(&v) - 1.0).abs() < 1e-10);
        }
        assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn eig_errors() {
        let rect = Matrix::zeros(2, 3);
        assert!(matches!(eig_symmetric(&rect, DEFAULT_TOL), Err(LinalgError::NotSquare { .. })));
        let asym = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(eig_symmetric(&asym, DEFAULT_TOL), Err(LinalgError::NotSymmetric { .. })));
    }

    #[test]
    fn psd_eigenvalues_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b = random_matrix(&mut rng, 4, 7);
        let e = eig_symmetric(&b.gram(), DEFAULT_TOL).unwrap();
        assert!(e.eigenvalues.iter().all(|&l| l >= -1e-10));
    }

    #[test]
    fn svd_of_diagonal() {
        let s = svd(&Matrix::diag(&[3.0, 2.0]), DEFAULT_TOL).unwrap();
        assert_eq!(s.singular_values, vec![3.0, 2.0]);
        assert_eq!(s.u, Matrix::identity(2));
        assert_eq!(s.vt, Matrix::identity(2));
    }

    #[test]
    fn svd_rank_one() {
        let u = [1.0, -2.0, 0.5, 3.0];
        let v = [0.3, 0.1, -0.7];
        let rows: Vec<Vec<f64>> = u.iter().map(|a| v.iter().map(|b| a * b).collect()).collect();
        let a = Matrix::from_rows(&rows).unwrap();
        let s = svd(&a, DEFAULT_TOL).unwrap();
        assert_eq!(s.rank(1e-10), 1);
        // completed left vectors stay orthonormal
        let utu = s.u.transpose().matmul(&s.u).unwrap();
        assert!(utu.sub(&Matrix::identity(3)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn svd_reconstruction_tall_and_wide() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (r, c) in [(8, 3), (3, 8), (1, 4), (5, 1)] {
            let a = random_matrix(&mut rng, r, c);
            let s = svd(&a, DEFAULT_TOL).unwrap();
            let err = a.sub(&s.reconstruct()).unwrap().frobenius_norm();
            assert!(err < 1e-8 * a.frobenius_norm(), "{r}x{c}: {err}");
            assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn svd_rejects_empty() {
        assert_eq!(svd(&Matrix::zeros(0, 3), DEFAULT_TOL).unwrap_err(), LinalgError::Empty);
    }

    #[test]
    fn cholesky_solve() {
        let a = Matrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let x = solve_spd(&a, &[1.0, 2.0]).unwrap();
        let back = a.matvec(&x).unwrap();
        assert!((back[0] - 1.0).abs() < 1e-14 && (back[1] - 2.0).abs() < 1e-14);
        let indefinite = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(cholesky(&indefinite), Err(LinalgError::NotPositiveDefinite { index: 1, .. })));
    }

    #[test]
    fn complement_is_orthonormal() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let basis = vec![vec![h, h, 0.0]];
        let extra = complete_orthonormal(&basis, 2, 3);
        let all: Vec<_> = basis.iter().chain(&extra).collect();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot(all[i], all[j]) - expect).abs() < 1e-12);
            }
        }
    }

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn singular_values_are_sqrt_of_gram_eigenvalues(seed in any::<u64>(), rows in 1usize..9, cols in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, rows, cols);
            let s = svd(&a, DEFAULT_TOL).unwrap();
            let e = eig_symmetric(&a.gram(), DEFAULT_TOL).unwrap();
            for (k, sv) in s.singular_values.iter().enumerate() {
                prop_assert!((sv - e.eigenvalues[k].max(0.0).sqrt()).abs() < 1e-8);
            }
        }

        #[test]
        fn decompositions_are_pure(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_symmetric(&mut rng, 5);
            let e1 = eig_symmetric(&a, DEFAULT_TOL).unwrap();
            let e2 = eig_symmetric(&a, DEFAULT_TOL).unwrap();
            prop_assert_eq!(e1.eigenvalues, e2.eigenvalues);
            prop_assert_eq!(e1.eigenvectors, e2.eigenvectors);
        }
    }
}
