//! Supervised kurtosis projection pursuit.
//!
//! The projection index is the class-size weighted mean of the per-class
//! kurtosis of the projected (class-centered) data. Directions that drive
//! it toward its lower bound of 1 make each class look bimodal or flat
//! along the projection. Components are found one at a time by projected
//! gradient descent on the unit sphere, each restricted to the orthogonal
//! complement of the earlier ones.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{center, check_components, column_means, ReduceError, ReductionMethod, Reducer, Result};
use crate::data::DataTable;
use crate::linalg::{dot, norm, normalize_sign, Matrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkppOptions {
    pub restarts: usize,
    pub max_iter: usize,
    /// Stop when the tangent gradient norm falls below this.
    pub grad_tol: f64,
    pub seed: u64,
}

impl Default for SkppOptions {
    fn default() -> Self {
        Self { restarts: 5, max_iter: 300, grad_tol: 1e-9, seed: 0 }
    }
}

struct ClassBlock {
    centered: Matrix,
    weight: f64,
}

struct Objective {
    blocks: Vec<ClassBlock>,
}

impl Objective {
    fn new(train: &DataTable) -> Objective {
        let n = train.n_samples() as f64;
        let blocks = (0..2u8)
            .filter_map(|c| {
                let idx: Vec<usize> =
                    train.labels().iter().enumerate().filter(|(_, &l)| l == c).map(|(i, _)| i).collect();
                if idx.len() < 2 {
                    return None;
                }
                let x = train.features().select_rows(&idx);
                let mean = column_means(&x);
                Some(ClassBlock { centered: center(&x, &mean), weight: idx.len() as f64 / n })
            })
            .collect();
        Objective { blocks }
    }

    /// Weighted per-class kurtosis and its gradient; `None` if every class
    /// has (numerically) zero variance along `w`.
    fn eval(&self, w: &[f64]) -> Option<(f64, Vec<f64>)> {
        let d = w.len();
        let mut value = 0.0;
        let mut grad = vec![0.0; d];
        let mut used_weight = 0.0;
        for block in &self.blocks {
            let y = &block.centered;
            let n = y.rows() as f64;
            let z: Vec<f64> = y.row_iter().map(|r| dot(r, w)).collect();
            let m2 = z.iter().map(|v| v * v).sum::<f64>() / n;
            let m4 = z.iter().map(|v| v.powi(4)).sum::<f64>() / n;
            let scale = y.max_abs() * norm(w);
            if m2 <= (1e-12 * scale).powi(2) || !m2.is_finite() {
                continue;
            }
            let k = m4 / (m2 * m2);
            let ratio = m4 / m2;
            let coef = 4.0 / (n * m2 * m2);
            for (row, zi) in y.row_iter().zip(&z) {
                let s = coef * (zi.powi(3) - ratio * zi) * block.weight;
                grad.iter_mut().zip(row).for_each(|(g, x)| *g += s * x);
            }
            value += block.weight * k;
            used_weight += block.weight;
        }
        if used_weight == 0.0 {
            return None;
        }
        // renormalize when a class dropped out so values stay comparable
        grad.iter_mut().for_each(|g| *g /= used_weight);
        Some((value / used_weight, grad))
    }
}

/// Pooled within-class kurtosis of `train` projected on `w` (any norm).
pub fn pooled_class_kurtosis(train: &DataTable, w: &[f64]) -> Option<f64> {
    Objective::new(train).eval(w).map(|(v, _)| v)
}

fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let p = dot(v, b);
        v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
    }
}

fn unit(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let n = norm(&v);
    if n <= 1e-300 || !n.is_finite() {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= n);
    Some(v)
}

// Armijo-backtracked descent on the sphere within span(basis)⊥.
fn descend(obj: &Objective, start: Vec<f64>, basis: &[Vec<f64>], opts: &SkppOptions) -> Option<(Vec<f64>, f64)> {
    let mut w = start;
    let (mut f, mut g) = obj.eval(&w)?;
    let mut step = 1.0;
    for _ in 0..opts.max_iter {
        project_out(&mut g, basis);
        let radial = dot(&g, &w);
        g.iter_mut().zip(&w).for_each(|(gi, wi)| *gi -= radial * wi);
        let gnorm2 = dot(&g, &g);
        if gnorm2.sqrt() < opts.grad_tol {
            break;
        }
        let mut accepted = false;
        while step > 1e-14 {
            let mut trial: Vec<f64> = w.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            project_out(&mut trial, basis);
            if let Some(trial) = unit(trial) {
                if let Some((ft, gt)) = obj.eval(&trial) {
                    if ft <= f - 1e-4 * step * gnorm2 {
                        w = trial;
                        f = ft;
                        g = gt;
                        accepted = true;
                        step *= 2.0;
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Some((w, f))
}

/// Fit `n_components` directions minimizing the pooled within-class
/// kurtosis, each the best of `options.restarts` random starts.
pub fn fit_skpp(train: &DataTable, n_components: usize, options: SkppOptions) -> Result<Reducer> {
    check_components(train, n_components)?;
    let d = train.n_features();
    let obj = Objective::new(train);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let restarts = options.restarts.max(1);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n_components);
    let mut metadata = BTreeMap::new();
    let mut flags = Vec::new();

    for k in 0..n_components {
        let mut best: Option<(Vec<f64>, f64)> = None;
        let mut baseline = f64::INFINITY;
        for _ in 0..restarts {
            let mut start: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            project_out(&mut start, &basis);
            let Some(start) = unit(start) else { continue };
            if let Some((f0, _)) = obj.eval(&start) {
                baseline = baseline.min(f0);
            }
            if let Some((w, f)) = descend(&obj, start, &basis, &options) {
                if best.as_ref().is_none_or(|(_, bf)| f < *bf) {
                    best = Some((w, f));
                }
            }
        }
        let (mut w, f) = match best {
            Some(b) => b,
            None if obj.blocks.is_empty() || k == 0 => return Err(ReduceError::SkppFailed { restarts }),
            None => {
                // the remaining complement carries no within-class variance
                flags.push(format!("flat_component_{k}"));
                let filler = crate::linalg::complete_orthonormal(&basis, 1, d).remove(0);
                (filler, f64::NAN)
            }
        };
        // re-orthogonalize against rounding drift
        project_out(&mut w, &basis);
        let mut w = unit(w).ok_or(ReduceError::SkppFailed { restarts })?;
        normalize_sign(&mut w);
        metadata.insert(format!("index_{k}"), f);
        metadata.insert(format!("random_baseline_{k}"), baseline);
        basis.push(w);
    }

    let mean = column_means(train.features());
    Ok(Reducer {
        method: ReductionMethod::Skpp,
        mean,
        projection: Matrix::from_columns(&basis)?,
        metadata,
        flags,
    })
}
