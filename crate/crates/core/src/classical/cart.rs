//! Greedy binary decision tree (CART).

use super::{check_dim, Classifier, ModelError, Result};
use crate::data::DataTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Criterion {
    #[default]
    Gini,
    Entropy,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CartParams {
    pub criterion: Criterion,
    /// `None` grows until leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf {
        /// Fraction of class-1 training samples reaching this leaf.
        p_positive: f64,
        samples: usize,
    },
    Split {
        feature: usize,
        /// Samples with `x[feature] <= threshold` go left.
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
pub struct CartModel {
    /// Arena; node 0 is the root.
    pub nodes: Vec<TreeNode>,
    n_features: usize,
}

pub fn gini(p: &[f64]) -> f64 {
    1.0 - p.iter().map(|q| q * q).sum::<f64>()
}

/// Shannon entropy in bits, `-Σ p log₂ p` with `0 log 0 = 0`.
pub fn binary_entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&q| q > 0.0).map(|q| q * q.log2()).sum::<f64>()
}

fn impurity(criterion: Criterion, pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    match criterion {
        Criterion::Gini => gini(&[p, 1.0 - p]),
        Criterion::Entropy => binary_entropy(&[p, 1.0 - p]),
    }
}

struct Builder<'a> {
    table: &'a DataTable,
    params: &'a CartParams,
    nodes: Vec<TreeNode>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl Builder<'_> {
    fn build(&mut self, indices: Vec<usize>, depth: usize) -> usize {
        let labels = self.table.labels();
        let n = indices.len();
        let pos = indices.iter().filter(|&&i| labels[i] == 1).count();
        let id = self.nodes.len();
        self.nodes.push(TreeNode::Leaf { p_positive: pos as f64 / n as f64, samples: n });
        let pure = pos == 0 || pos == n;
        if pure || self.params.max_depth.is_some_and(|m| depth >= m) {
            return id;
        }
        let Some(split) = self.best_split(&indices, pos) else {
            return id;
        };
        let x = self.table.features();
        let (left, right): (Vec<usize>, Vec<usize>) =
            indices.into_iter().partition(|&i| x[(i, split.feature)] <= split.threshold);
        let l = self.build(left, depth + 1);
        let r = self.build(right, depth + 1);
        self.nodes[id] = TreeNode::Split { feature: split.feature, threshold: split.threshold, left: l, right: r };
        id
    }

    // Best impurity decrease over all features and midpoints between
    // distinct sorted values. Zero-gain splits are allowed (an impure node
    // is split whenever any feature varies), which lets the tree solve
    // XOR-like layouts where no single split helps.
    fn best_split(&self, indices: &[usize], pos: usize) -> Option<BestSplit> {
        let x = self.table.features();
        let labels = self.table.labels();
        let n = indices.len();
        let parent = impurity(self.params.criterion, pos, n);
        let mut best: Option<BestSplit> = None;
        let mut order = indices.to_vec();
        for f in 0..x.cols() {
            order.sort_by(|&a, &b| x[(a, f)].total_cmp(&x[(b, f)]).then(a.cmp(&b)));
            let mut left_pos = 0;
            for s in 1..n {
                left_pos += usize::from(labels[order[s - 1]] == 1);
                let lo = x[(order[s - 1], f)];
                let hi = x[(order[s], f)];
                if lo == hi {
                    continue;
                }
                let (nl, nr) = (s, n - s);
                let child = (nl as f64 * impurity(self.params.criterion, left_pos, nl)
                    + nr as f64 * impurity(self.params.criterion, pos - left_pos, nr))
                    / n as f64;
                let gain = parent - child;
                if best.as_ref().is_none_or(|b| gain > b.gain + 1e-15) {
                    let mut threshold = lo + (hi - lo) / 2.0;
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some(BestSplit { feature: f, threshold, gain });
                }
            }
        }
        best
    }
}

pub fn train_cart(train: &DataTable, params: &CartParams) -> Result<CartModel> {
    if train.n_samples() == 0 {
        return Err(ModelError::Empty);
    }
    let mut b = Builder { table: train, params, nodes: Vec::new() };
    b.build((0..train.n_samples()).collect(), 0);
    Ok(CartModel { nodes: b.nodes, n_features: train.n_features() })
}

impl CartModel {
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], id: usize) -> usize {
            match nodes[id] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaf_probability(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.n_features, x)?;
        let mut id = 0;
        loop {
            match self.nodes[id] {
                TreeNode::Leaf { p_positive, .. } => return Ok(p_positive),
                TreeNode::Split { feature, threshold, left, right } => {
                    id = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }
}

impl Classifier for CartModel {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_row(&self, x: &[f64]) -> Result<u8> {
        Ok(u8::from(self.leaf_probability(x)? > 0.5))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn xor() -> DataTable {
        let f = Matrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        DataTable::unnamed(f, vec![0, 0, 1, 1]).unwrap()
    }

    #[test]
    fn solves_xor_at_depth_two() {
        let t = xor();
        for criterion in [Criterion::Gini, Criterion::Entropy] {
            let m = train_cart(&t, &CartParams { criterion, max_depth: Some(2) }).unwrap();
            assert_eq!(m.predict(t.features()).unwrap(), t.labels());
        }
    }

    #[test]
    fn pure_input_is_single_leaf() {
        let f = Matrix::from_rows(&[vec![0.0], vec![3.0]]).unwrap();
        let m = train_cart(&DataTable::unnamed(f, vec![1, 1]).unwrap(), &CartParams::default()).unwrap();
        assert_eq!(m.nodes.len(), 1);
        assert_eq!(m.nodes[0], TreeNode::Leaf { p_positive: 1.0, samples: 2 });
    }

    #[test]
    fn entropy_of_fair_coin_is_one_bit() {
        assert_eq!(binary_entropy(&[0.5, 0.5]), 1.0);
        assert_eq!(gini(&[0.5, 0.5]), 0.5);
        assert_eq!(binary_entropy(&[1.0, 0.0]), 0.0);
    }

    #[test]
    fn depth_cap_respected() {
        let m = train_cart(&xor(), &CartParams { max_depth: Some(1), ..Default::default() }).unwrap();
        assert_eq!(m.depth(), 1);
        let m = train_cart(&xor(), &CartParams { max_depth: Some(0), ..Default::default() }).unwrap();
        assert_eq!(m.nodes.len(), 1);
    }

    #[test]
    fn identical_points_with_both_labels_stay_a_leaf() {
        let f = Matrix::from_rows(&[vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        let m = train_cart(&DataTable::unnamed(f, vec![0, 1, 1]).unwrap(), &CartParams::default()).unwrap();
        assert_eq!(m.nodes.len(), 1);
        assert_eq!(m.predict_row(&[1.0]).unwrap(), 1);
    }
}
