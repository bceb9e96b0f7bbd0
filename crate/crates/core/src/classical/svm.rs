//! Soft-margin support vector machine trained by SMO.
//!
//! The dual
//!
//! ```text
//! max  W(α) = Σ αᵢ − ½ Σᵢⱼ αᵢ αⱼ yᵢ yⱼ K(xᵢ, xⱼ)
//! s.t. 0 ≤ αᵢ ≤ C,  Σ αᵢ yᵢ = 0
//! ```
//!
//! is solved with second-order working-set selection (the pair that
//! maximizes the guaranteed objective decrease) and no shrinking. The run
//! stops when the maximal KKT violation `m(α) − M(α)` drops below `tol`.

use std::borrow::Cow;

use rayon::prelude::*;

use super::{check_dim, require_both_classes, Classifier, ModelError, Result};
use crate::data::DataTable;
use crate::linalg::{cholesky, Matrix};

const TAU: f64 = 1e-12;
/// Above this many samples kernel rows are recomputed on demand instead of
/// caching the full Gram matrix.
const DENSE_CACHE_LIMIT: usize = 3000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SvmKernel {
    Linear,
    Rbf { gamma: f64 },
    /// The caller supplies Gram entries; predictions take kernel rows.
    Precomputed,
}

impl SvmKernel {
    fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            SvmKernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            SvmKernel::Rbf { gamma } => (-gamma * a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()).exp(),
            SvmKernel::Precomputed => unreachable!("precomputed kernels are never evaluated"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmParams {
    pub c: f64,
    pub kernel: SvmKernel,
    /// KKT violation tolerance.
    pub tol: f64,
    /// `None` means `max(100_000, 100·n)`.
    pub max_iter: Option<usize>,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self { c: 1.0, kernel: SvmKernel::Rbf { gamma: 1.0 }, tol: 1e-3, max_iter: None }
    }
}

/// Raw output of the dual solver.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    /// `W(α)` at the returned point.
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct SvmModel {
    pub kernel: SvmKernel,
    pub support_indices: Vec<usize>,
    /// Empty for precomputed kernels.
    pub support_vectors: Vec<Vec<f64>>,
    /// `αᵢ yᵢ` per support vector, with `y ∈ {−1, +1}`.
    pub dual_coef: Vec<f64>,
    pub bias: f64,
    pub dual: DualSolution,
    n_inputs: usize,
}

/// `1 / (d · Var(X))` over all entries of `x`, or 1 when the variance is zero.
pub fn scale_gamma(x: &Matrix) -> f64 {
    let n = x.data().len();
    if n == 0 {
        return 1.0;
    }
    let mean = x.data().iter().sum::<f64>() / n as f64;
    let var = x.data().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    if var > 0.0 && var.is_finite() {
        1.0 / (x.cols() as f64 * var)
    } else {
        1.0
    }
}

enum KernelSource<'a> {
    Dense(Cow<'a, Matrix>),
    Lazy { x: &'a Matrix, kernel: SvmKernel },
}

impl KernelSource<'_> {
    fn row(&self, i: usize) -> Cow<'_, [f64]> {
        match self {
            KernelSource::Dense(k) => Cow::Borrowed(k.row(i)),
            KernelSource::Lazy { x, kernel } => {
                let xi = x.row(i);
                Cow::Owned((0..x.rows()).into_par_iter().map(|j| kernel.eval(xi, x.row(j))).collect())
            }
        }
    }

    fn diagonal(&self, n: usize) -> Vec<f64> {
        match self {
            KernelSource::Dense(k) => (0..n).map(|i| k[(i, i)]).collect(),
            KernelSource::Lazy { x, kernel } => (0..n).map(|i| kernel.eval(x.row(i), x.row(i))).collect(),
        }
    }
}

fn signed(labels: &[u8]) -> Vec<f64> {
    labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect()
}

fn solve_dual(k: &KernelSource, y: &[f64], c: f64, tol: f64, max_iter: usize) -> Result<DualSolution> {
    let n = y.len();
    let qd = k.diagonal(n);
    let mut alpha = vec![0.0; n];
    // gradient of ½αᵀQα − Σα, Qᵢⱼ = yᵢyⱼKᵢⱼ
    let mut grad = vec![-1.0; n];
    let upper = |a: f64| a >= c;
    let lower = |a: f64| a <= 0.0;
    let mut iterations = 0;
    loop {
        // first index: maximal violation among I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            let v = -y[t] * grad[t];
            let in_up = if y[t] > 0.0 { !upper(alpha[t]) } else { !lower(alpha[t]) };
            if in_up && v >= gmax {
                gmax = v;
                i = t;
            }
        }
        if i == usize::MAX {
            break;
        }
        let ki = k.row(i);
        // second index: best second-order decrease among I_low
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..n {
            let in_low = if y[t] > 0.0 { !lower(alpha[t]) } else { !upper(alpha[t]) };
            if !in_low {
                continue;
            }
            let v = y[t] * grad[t];
            gmax2 = gmax2.max(v);
            let diff = gmax + v;
            if diff > 0.0 {
                let quad = qd[i] + qd[t] - 2.0 * ki[t];
                let obj = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                if obj <= best {
                    best = obj;
                    j = t;
                }
            }
        }
        if gmax + gmax2 < tol || j == usize::MAX {
            break;
        }
        if iterations >= max_iter {
            return Err(ModelError::SvmNotConverged { iterations, gap: gmax + gmax2 });
        }
        iterations += 1;

        let kj = k.row(j);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let qij = y[i] * y[j] * ki[j];
        if y[i] != y[j] {
            let quad = (qd[i] + qd[j] + 2.0 * qij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (qd[i] + qd[j] - 2.0 * qij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * ki[t] * di + y[j] * kj[t] * dj);
        }
    }

    // bias: average over free vectors, else midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if upper(alpha[t]) {
            if y[t] < 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else if lower(alpha[t]) {
            if y[t] > 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 { sum_free / n_free as f64 } else { (ub + lb) / 2.0 };
    let objective = -0.5 * alpha.iter().zip(&grad).map(|(a, g)| a * (g - 1.0)).sum::<f64>();
    Ok(DualSolution { alpha, bias: -rho, iterations, objective })
}

fn default_max_iter(n: usize) -> usize {
    100_000.max(100 * n)
}

fn build_model(kernel: SvmKernel, x: Option<&Matrix>, y: &[f64], dual: DualSolution, n_inputs: usize) -> SvmModel {
    let support_indices: Vec<usize> = (0..y.len()).filter(|&i| dual.alpha[i] > 0.0).collect();
    let dual_coef = support_indices.iter().map(|&i| dual.alpha[i] * y[i]).collect();
    let support_vectors = match x {
        Some(x) => support_indices.iter().map(|&i| x.row(i).to_vec()).collect(),
        None => Vec::new(),
    };
    SvmModel { kernel, support_indices, support_vectors, dual_coef, bias: dual.bias, dual, n_inputs }
}

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(ModelError::InvalidParameter(format!("C must be positive and finite, got {c}")));
    }
    Ok(())
}

pub fn train_svm(train: &DataTable, params: &SvmParams) -> Result<SvmModel> {
    if params.kernel == SvmKernel::Precomputed {
        return Err(ModelError::InvalidParameter("use train_svm_precomputed for precomputed kernels".into()));
    }
    if let SvmKernel::Rbf { gamma } = params.kernel {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(ModelError::InvalidParameter(format!("gamma must be positive, got {gamma}")));
        }
    }
    check_c(params.c)?;
    require_both_classes(train.labels())?;
    let x = train.features();
    let n = x.rows();
    let y = signed(train.labels());
    let source = if n <= DENSE_CACHE_LIMIT {
        let rows: Vec<Vec<f64>> =
            (0..n).into_par_iter().map(|i| (0..n).map(|j| params.kernel.eval(x.row(i), x.row(j))).collect()).collect();
        KernelSource::Dense(Cow::Owned(Matrix::from_rows(&rows)?))
    } else {
        KernelSource::Lazy { x, kernel: params.kernel }
    };
    let max_iter = params.max_iter.unwrap_or_else(|| default_max_iter(n));
    let dual = solve_dual(&source, &y, params.c, params.tol, max_iter)?;
    Ok(build_model(params.kernel, Some(x), &y, dual, x.cols()))
}

/// Trains on a user-supplied Gram matrix. The matrix must be symmetric and
/// positive semidefinite; the latter is checked by a Cholesky factorization
/// of `K + τI` with `τ = 1e-7 · mean(diag K)`.
pub fn train_svm_precomputed(gram: &Matrix, labels: &[u8], c: f64) -> Result<SvmModel> {
    train_svm_precomputed_with(gram, labels, &SvmParams { c, kernel: SvmKernel::Precomputed, ..SvmParams::default() })
}

pub fn train_svm_precomputed_with(gram: &Matrix, labels: &[u8], params: &SvmParams) -> Result<SvmModel> {
    let n = labels.len();
    if gram.rows() != n || gram.cols() != n {
        return Err(ModelError::KernelShape { rows: gram.rows(), cols: gram.cols(), n });
    }
    check_c(params.c)?;
    require_both_classes(labels)?;
    gram.check_finite()?;
    gram.check_symmetric(1e-9)?;
    let mean_diag = gram.trace() / n as f64;
    let tau = 1e-7 * mean_diag.abs().max(f64::MIN_POSITIVE);
    let mut jittered = gram.clone();
    for i in 0..n {
        jittered[(i, i)] += tau;
    }
    if let Err(crate::linalg::LinalgError::NotPositiveDefinite { index, pivot }) = cholesky(&jittered) {
        return Err(ModelError::NotPsd { index, pivot });
    }
    let y = signed(labels);
    let max_iter = params.max_iter.unwrap_or_else(|| default_max_iter(n));
    let dual = solve_dual(&KernelSource::Dense(Cow::Borrowed(gram)), &y, params.c, params.tol, max_iter)?;
    Ok(build_model(SvmKernel::Precomputed, None, &y, dual, n))
}

impl SvmModel {
    /// Decision value `Σ αᵢyᵢ K(xᵢ, x) + b` for a feature vector.
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        if self.kernel == SvmKernel::Precomputed {
            return self.decision_from_kernel_row(x);
        }
        check_dim(self.n_inputs, x)?;
        Ok(self.support_vectors.iter().zip(&self.dual_coef).map(|(sv, a)| a * self.kernel.eval(sv, x)).sum::<f64>()
            + self.bias)
    }

    /// Decision value from `K(xᵢ, x)` against every training sample, in
    /// training order.
    pub fn decision_from_kernel_row(&self, row: &[f64]) -> Result<f64> {
        if self.kernel == SvmKernel::Precomputed {
            check_dim(self.n_inputs, row)?;
        } else if row.len() <= self.support_indices.last().copied().unwrap_or(0) {
            return Err(ModelError::DimensionMismatch {
                expected: self.support_indices.last().map_or(0, |i| i + 1),
                got: row.len(),
            });
        }
        Ok(self.support_indices.iter().zip(&self.dual_coef).map(|(&i, a)| a * row[i]).sum::<f64>() + self.bias)
    }

    /// Primal weight vector, available for linear kernels.
    pub fn linear_weights(&self) -> Option<Vec<f64>> {
        if self.kernel != SvmKernel::Linear {
            return None;
        }
        let mut w = vec![0.0; self.n_inputs];
        for (sv, a) in self.support_vectors.iter().zip(&self.dual_coef) {
            w.iter_mut().zip(sv).for_each(|(wi, v)| *wi += a * v);
        }
        Some(w)
    }
}

impl Classifier for SvmModel {
    /// For precomputed kernels this is the training-set size: inputs are
    /// kernel rows.
    fn n_features(&self) -> usize {
        self.n_inputs
    }

    fn predict_row(&self, x: &[f64]) -> Result<u8> {
        Ok(u8::from(self.decision(x)? > 0.0))
    }
}
