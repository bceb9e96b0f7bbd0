mod oracles;

use qbench_core::classical::{
    train_cart, train_knn, train_logistic, train_nb, train_svm, CartParams, Classifier, LogisticParams, SvmKernel,
    SvmParams,
};
use qbench_core::data::DataTable;
use qbench_core::linalg::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn blobs(seed: u64, n: usize, sep: f64) -> (Vec<Vec<f64>>, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let l = (i % 2) as u8;
        let c = if l == 1 { sep } else { -sep };
        rows.push(vec![c + rng.sample::<f64, _>(StandardNormal), 0.5 * c + rng.sample::<f64, _>(StandardNormal)]);
        labels.push(l);
    }
    (rows, labels)
}

fn table(rows: &[Vec<f64>], labels: &[u8]) -> DataTable {
    DataTable::unnamed(Matrix::from_rows(rows).unwrap(), labels.to_vec()).unwrap()
}

#[test]
fn knn_matches_exhaustive_sort() {
    let (rows, labels) = blobs(5, 120, 0.8);
    let m = train_knn(&table(&rows, &labels), 7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let q = vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        assert_eq!(m.predict_row(&q).unwrap(), oracles::knn_predict(&rows, &labels, 7, &q));
    }
}

#[test]
fn naive_bayes_matches_direct_posterior() {
    let (rows, labels) = blobs(11, 80, 0.6);
    let m = train_nb(&table(&rows, &labels)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let q = vec![rng.gen_range(-2.5..2.5), rng.gen_range(-2.5..2.5)];
        let expect = oracles::gaussian_nb_posterior(&rows, &labels, &q);
        let got = m.posterior(&q).unwrap();
        assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
    }
}

#[test]
fn svm_dual_matches_projected_gradient_qp() {
    let (rows, labels) = blobs(21, 40, 0.7);
    let gamma = 0.5;
    let c = 1.0;
    let m = train_svm(&table(&rows, &labels), &SvmParams { c, kernel: SvmKernel::Rbf { gamma }, ..Default::default() })
        .unwrap();
    let k: Vec<Vec<f64>> = rows
        .iter()
        .map(|a| rows.iter().map(|b| (-gamma * a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>()).exp()).collect())
        .collect();
    let y: Vec<f64> = labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
    let oracle = oracles::svm_dual_qp(&k, &y, c, 20_000);
    assert!((m.dual.objective - oracle).abs() < 1e-3, "smo {} vs qp {}", m.dual.objective, oracle);
    assert!(m.dual.alpha.iter().all(|&a| (0.0..=c).contains(&a)));
    let eq: f64 = m.dual.alpha.iter().zip(&y).map(|(a, b)| a * b).sum();
    assert!(eq.abs() < 1e-6);
}

#[test]
fn linear_svm_dual_matches_qp() {
    let (rows, labels) = blobs(22, 40, 0.4);
    let m = train_svm(&table(&rows, &labels), &SvmParams { c: 0.5, kernel: SvmKernel::Linear, ..Default::default() })
        .unwrap();
    let k: Vec<Vec<f64>> =
        rows.iter().map(|a| rows.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum()).collect()).collect();
    let y: Vec<f64> = labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
    let oracle = oracles::svm_dual_qp(&k, &y, 0.5, 20_000);
    assert!((m.dual.objective - oracle).abs() < 1e-3, "smo {} vs qp {}", m.dual.objective, oracle);
}

#[test]
fn cart_accuracy_grows_with_depth() {
    let (rows, labels) = blobs(31, 150, 0.3);
    let t = table(&rows, &labels);
    let mut last = 0.0;
    for depth in 0..10 {
        let m = train_cart(&t, &CartParams { max_depth: Some(depth), ..Default::default() }).unwrap();
        let pred = m.predict(t.features()).unwrap();
        let acc = pred.iter().zip(&labels).filter(|(a, b)| a == b).count() as f64 / labels.len() as f64;
        assert!(acc >= last, "depth {depth}: {acc} < {last}");
        last = acc;
    }
    let full = train_cart(&t, &CartParams::default()).unwrap();
    assert_eq!(full.predict(t.features()).unwrap(), labels);
}

#[test]
fn logistic_gradient_vanishes_at_optimum() {
    let (rows, labels) = blobs(41, 200, 0.4);
    let t = table(&rows, &labels);
    let m = train_logistic(&t, &LogisticParams { max_iter: 50_000, learning_rate: 1.0, ..Default::default() }).unwrap();
    assert!(m.converged);
    // gradient from the closed form of the mean log-loss derivative
    let mut g = [0.0; 3];
    for (r, &l) in rows.iter().zip(&labels) {
        let z = m.coefficients[0] + m.coefficients[1] * r[0] + m.coefficients[2] * r[1];
        let e = 1.0 / (1.0 + (-z).exp()) - f64::from(l);
        g[0] += e;
        g[1] += e * r[0];
        g[2] += e * r[1];
    }
    let norm = g.iter().map(|v| (v / rows.len() as f64).powi(2)).sum::<f64>().sqrt();
    assert!(norm < 1e-4, "{norm}");
}
