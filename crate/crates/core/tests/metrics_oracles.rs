mod oracles;

use qbench_core::metrics::{aggregate, confusion, evaluate, metrics, ConfusionCounts, MetricSet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn confusion_matches_tally() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let n = rng.gen_range(1..200);
        let t: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let p: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let c = confusion(&t, &p).unwrap();
        let mut tally = [[0u64; 2]; 2];
        for (a, b) in t.iter().zip(&p) {
            tally[*a as usize][*b as usize] += 1;
        }
        assert_eq!((c.tn, c.fp, c.fn_, c.tp), (tally[0][0], tally[0][1], tally[1][0], tally[1][1]));
    }
}

#[test]
fn metrics_match_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let c = ConfusionCounts {
            tp: rng.gen_range(0..50),
            fp: rng.gen_range(0..50),
            tn: rng.gen_range(0..50),
            fn_: rng.gen_range(0..50),
        };
        if c.total() == 0 {
            continue;
        }
        let got = metrics(&c).unwrap().values();
        let expect = oracles::metric_formulas(c.tp as f64, c.fp as f64, c.tn as f64, c.fn_ as f64);
        for (g, e) in got.iter().zip(&expect) {
            assert!((g - e).abs() < 1e-12);
        }
    }
}

#[test]
fn aggregate_matches_two_pass_statistics() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let folds: Vec<MetricSet> =
        (0..10).map(|_| MetricSet::from_values(std::array::from_fn(|_| rng.gen_range(0.0..1.0)))).collect();
    let r = aggregate("m", "r", 3, folds.clone()).unwrap();
    for k in 0..5 {
        let col: Vec<f64> = folds.iter().map(|f| f.values()[k]).collect();
        assert!((r.mean.values()[k] - oracles::mean(&col)).abs() < 1e-12);
        assert!((r.std.values()[k] - oracles::population_std(&col)).abs() < 1e-12);
    }
}

#[test]
fn relabeling_keeps_mcc_and_swaps_precision() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let t: Vec<u8> = (0..60).map(|_| rng.gen_range(0..2)).collect();
        let p: Vec<u8> = (0..60).map(|_| rng.gen_range(0..2)).collect();
        let flip = |v: &[u8]| v.iter().map(|x| 1 - x).collect::<Vec<u8>>();
        let a = evaluate(&t, &p).unwrap();
        let b = evaluate(&flip(&t), &flip(&p)).unwrap();
        assert!((a.mcc - b.mcc).abs() < 1e-12);
        let c = confusion(&t, &p).unwrap();
        let npv = if c.tn + c.fn_ == 0 { 0.0 } else { c.tn as f64 / (c.tn + c.fn_) as f64 };
        assert!((b.precision - npv).abs() < 1e-12);
    }
}

#[test]
fn balanced_accuracy_is_accuracy_on_balanced_truth() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let mut t: Vec<u8> = [vec![0u8; 30], vec![1u8; 30]].concat();
        t.shuffle(&mut rng);
        let p: Vec<u8> = (0..60).map(|_| rng.gen_range(0..2)).collect();
        let acc = t.iter().zip(&p).filter(|(a, b)| a == b).count() as f64 / 60.0;
        assert!((evaluate(&t, &p).unwrap().balanced_accuracy - acc).abs() < 1e-12);
    }
}

#[test]
fn metrics_ignore_sample_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let t: Vec<u8> = (0..80).map(|_| rng.gen_range(0..2)).collect();
    let p: Vec<u8> = (0..80).map(|_| rng.gen_range(0..2)).collect();
    let base = evaluate(&t, &p).unwrap();
    let mut idx: Vec<usize> = (0..80).collect();
    idx.shuffle(&mut rng);
    let t2: Vec<u8> = idx.iter().map(|&i| t[i]).collect();
    let p2: Vec<u8> = idx.iter().map(|&i| p[i]).collect();
    assert_eq!(evaluate(&t2, &p2).unwrap(), base);
}
