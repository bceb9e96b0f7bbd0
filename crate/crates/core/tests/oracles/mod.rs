//! Reference computations used as test oracles. Nothing here calls into the
//! library: each routine recomputes its quantity from first principles.
#![allow(dead_code)]

use num_complex::Complex64;

pub type CMatrix = Vec<Vec<Complex64>>;

// ---------------------------------------------------------------- circuits

#[derive(Debug, Clone, Copy)]
pub enum OracleGate {
    Rx(usize, f64),
    Ry(usize, f64),
    Rz(usize, f64),
    H(usize),
    P(usize, f64),
    Rot(usize, f64, f64, f64),
    Cnot(usize, usize),
    Cz(usize, usize),
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn identity(d: usize) -> CMatrix {
    (0..d).map(|i| (0..d).map(|j| cx(f64::from(u8::from(i == j)), 0.0)).collect()).collect()
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n).map(|i| (0..m).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect()).collect()
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![cx(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn single(u: [[Complex64; 2]; 2]) -> CMatrix {
    u.iter().map(|r| r.to_vec()).collect()
}

/// Closed-form `RZ(ω) RY(θ) RZ(φ)`.
fn rot_closed_form(phi: f64, theta: f64, omega: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    let e = |a: f64| Complex64::from_polar(1.0, a);
    [
        [e(-(phi + omega) / 2.0) * c, -e((phi - omega) / 2.0) * s],
        [e(-(phi - omega) / 2.0) * s, e((phi + omega) / 2.0) * c],
    ]
}

fn one_qubit_matrix(g: &OracleGate) -> Option<(usize, [[Complex64; 2]; 2])> {
    let z = cx(0.0, 0.0);
    Some(match *g {
        OracleGate::Rx(q, t) => (q, [[cx((t / 2.0).cos(), 0.0), cx(0.0, -(t / 2.0).sin())], [cx(0.0, -(t / 2.0).sin()), cx((t / 2.0).cos(), 0.0)]]),
        OracleGate::Ry(q, t) => (q, [[cx((t / 2.0).cos(), 0.0), cx(-(t / 2.0).sin(), 0.0)], [cx((t / 2.0).sin(), 0.0), cx((t / 2.0).cos(), 0.0)]]),
        OracleGate::Rz(q, t) => (q, [[Complex64::from_polar(1.0, -t / 2.0), z], [z, Complex64::from_polar(1.0, t / 2.0)]]),
        OracleGate::H(q) => {
            let h = cx(1.0 / 2f64.sqrt(), 0.0);
            (q, [[h, h], [h, -h]])
        }
        OracleGate::P(q, p) => (q, [[cx(1.0, 0.0), z], [z, Complex64::from_polar(1.0, p)]]),
        OracleGate::Rot(q, a, b, c) => (q, rot_closed_form(a, b, c)),
        _ => return None,
    })
}

/// Full `2ⁿ × 2ⁿ` unitary with qubit 0 as the most significant bit.
pub fn full_unitary(g: &OracleGate, n: usize) -> CMatrix {
    if let Some((q, u)) = one_qubit_matrix(g) {
        let mut m = identity(1);
        for k in 0..n {
            m = kron(&m, &if k == q { single(u) } else { identity(2) });
        }
        return m;
    }
    let d = 1 << n;
    let bit = |b: usize, q: usize| (b >> (n - 1 - q)) & 1;
    let mut m = vec![vec![cx(0.0, 0.0); d]; d];
    for col in 0..d {
        match *g {
            OracleGate::Cnot(c, t) => {
                let row = if bit(col, c) == 1 { col ^ (1 << (n - 1 - t)) } else { col };
                m[row][col] = cx(1.0, 0.0);
            }
            OracleGate::Cz(c, t) => {
                m[col][col] = cx(if bit(col, c) == 1 && bit(col, t) == 1 { -1.0 } else { 1.0 }, 0.0);
            }
            _ => unreachable!(),
        }
    }
    m
}

/// Applies the product `U_k ⋯ U_1` to `|0…0⟩`.
pub fn run_dense(gates: &[OracleGate], n: usize) -> Vec<Complex64> {
    let mut u = identity(1 << n);
    for g in gates {
        u = matmul(&full_unitary(g, n), &u);
    }
    u.iter().map(|r| r[0]).collect()
}

pub fn zz_gates(x: &[f64], reps: usize) -> Vec<OracleGate> {
    let n = x.len();
    let pi = std::f64::consts::PI;
    let mut g = Vec::new();
    for _ in 0..reps {
        g.extend((0..n).map(OracleGate::H));
        g.extend((0..n).map(|i| OracleGate::P(i, 2.0 * x[i])));
        for i in 0..n {
            for j in i + 1..n {
                g.push(OracleGate::Cnot(i, j));
                g.push(OracleGate::P(j, 2.0 * (pi - x[i]) * (pi - x[j])));
                g.push(OracleGate::Cnot(i, j));
            }
        }
    }
    g
}

/// RY encoding then `layers` blocks of per-qubit rotations and a CNOT ring
/// with range `layer mod (n-1) + 1`. `w` is indexed `[layer][qubit][k]`.
pub fn vqc_gates(x: &[f64], w: &[f64], layers: usize, entangle: bool) -> Vec<OracleGate> {
    let n = x.len();
    let mut g: Vec<OracleGate> = x.iter().enumerate().map(|(q, &v)| OracleGate::Ry(q, v)).collect();
    for l in 0..layers {
        for q in 0..n {
            let b = (l * n + q) * 3;
            g.push(OracleGate::Rot(q, w[b], w[b + 1], w[b + 2]));
        }
        if entangle && n > 1 {
            let r = l % (n - 1) + 1;
            for q in 0..n {
                g.push(OracleGate::Cnot(q, (q + r) % n));
            }
        }
    }
    g
}

pub fn z0_expectation(amps: &[Complex64]) -> f64 {
    let half = amps.len() / 2;
    amps[..half].iter().map(|a| a.norm_sqr()).sum::<f64>() - amps[half..].iter().map(|a| a.norm_sqr()).sum::<f64>()
}

/// Central difference of `f` along coordinate `k`.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, at: &[f64], k: usize, h: f64) -> f64 {
    let mut p = at.to_vec();
    p[k] = at[k] + h;
    let fp = f(&p);
    p[k] = at[k] - h;
    let fm = f(&p);
    (fp - fm) / (2.0 * h)
}

// ---------------------------------------------------------------- statistics

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Two-pass population standard deviation.
pub fn population_std(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64).sqrt()
}

/// `m4 / m2²` with biased central moments.
pub fn kurtosis(v: &[f64]) -> f64 {
    let m = mean(v);
    let m2 = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64;
    let m4 = v.iter().map(|x| (x - m).powi(4)).sum::<f64>() / v.len() as f64;
    m4 / (m2 * m2)
}

/// Class-size weighted mean kurtosis of the 1D projection `rows · w`.
pub fn pooled_kurtosis(rows: &[Vec<f64>], labels: &[u8], w: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut weight = 0.0;
    for c in [0u8, 1] {
        let proj: Vec<f64> = rows
            .iter()
            .zip(labels)
            .filter(|(_, &l)| l == c)
            .map(|(r, _)| r.iter().zip(w).map(|(a, b)| a * b).sum())
            .collect();
        if proj.len() >= 2 {
            total += proj.len() as f64 * kurtosis(&proj);
            weight += proj.len() as f64;
        }
    }
    total / weight
}

/// `(wᵀ(μ₁−μ₀))² / (wᵀ S_W w)` with `S_W` the pooled within-class scatter
/// divided by the sample count.
pub fn fisher_ratio(rows: &[Vec<f64>], labels: &[u8], w: &[f64]) -> f64 {
    let proj: Vec<f64> = rows.iter().map(|r| r.iter().zip(w).map(|(a, b)| a * b).sum()).collect();
    let pick = |c: u8| -> Vec<f64> { proj.iter().zip(labels).filter(|(_, &l)| l == c).map(|(p, _)| *p).collect() };
    let (p0, p1) = (pick(0), pick(1));
    let (m0, m1) = (mean(&p0), mean(&p1));
    let within = p0.iter().map(|p| (p - m0).powi(2)).sum::<f64>() + p1.iter().map(|p| (p - m1).powi(2)).sum::<f64>();
    (m1 - m0).powi(2) / (within / proj.len() as f64)
}

/// Unit vectors at 1° steps over a half circle.
pub fn half_circle_grid() -> Vec<[f64; 2]> {
    (0..180).map(|deg| (deg as f64).to_radians()).map(|a| [a.cos(), a.sin()]).collect()
}

/// Unit vectors at 1° steps in polar and azimuthal angle over a hemisphere.
pub fn hemisphere_grid() -> Vec<[f64; 3]> {
    let mut out = Vec::new();
    for p in 0..=90 {
        let polar = (p as f64).to_radians();
        for a in 0..360 {
            let az = (a as f64).to_radians();
            out.push([polar.sin() * az.cos(), polar.sin() * az.sin(), polar.cos()]);
        }
    }
    out
}

// ---------------------------------------------------------------- classifiers

/// Stable full sort by distance then majority vote with ties to class 0.
pub fn knn_predict(train: &[Vec<f64>], labels: &[u8], k: usize, x: &[f64]) -> u8 {
    let mut d: Vec<(f64, usize)> = train
        .iter()
        .enumerate()
        .map(|(i, r)| (r.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), i))
        .collect();
    d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let ones = d[..k].iter().filter(|(_, i)| labels[*i] == 1).count();
    u8::from(ones * 2 > k)
}

/// `P(1 | x)` from per-class normal densities multiplied across features.
pub fn gaussian_nb_posterior(train: &[Vec<f64>], labels: &[u8], x: &[f64]) -> f64 {
    let d = x.len();
    let mut joint = [0.0; 2];
    for c in [0u8, 1] {
        let rows: Vec<&Vec<f64>> = train.iter().zip(labels).filter(|(_, &l)| l == c).map(|(r, _)| r).collect();
        let prior = rows.len() as f64 / train.len() as f64;
        let mut like = 1.0;
        for j in 0..d {
            let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            let m = mean(&col);
            let var = (col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / col.len() as f64).max(1e-9);
            like *= (-(x[j] - m).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
        }
        joint[usize::from(c)] = prior * like;
    }
    joint[1] / (joint[0] + joint[1])
}

/// Euclidean projection onto `{0 ≤ α ≤ C, yᵀα = 0}` by bisection on the
/// multiplier of the equality constraint.
fn project_box_hyperplane(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let at = |nu: f64| -> Vec<f64> { v.iter().zip(y).map(|(vi, yi)| (vi - nu * yi).clamp(0.0, c)).collect() };
    let g = |nu: f64| -> f64 { at(nu).iter().zip(y).map(|(a, yi)| a * yi).sum() };
    let (mut lo, mut hi) = (-1e6, 1e6);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

/// Maximizes `Σα − ½ αᵀ(yyᵀ∘K)α` over the SVM feasible set by projected
/// gradient ascent with step `1/L`. Returns the objective value.
pub fn svm_dual_qp(k: &[Vec<f64>], y: &[f64], c: f64, iterations: usize) -> f64 {
    let n = y.len();
    let q: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| y[i] * y[j] * k[i][j]).collect()).collect();
    // Lipschitz bound from the Frobenius norm
    let l = q.iter().flatten().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
    let objective = |a: &[f64]| -> f64 {
        let quad: f64 = (0..n).map(|i| a[i] * (0..n).map(|j| q[i][j] * a[j]).sum::<f64>()).sum();
        a.iter().sum::<f64>() - 0.5 * quad
    };
    let mut a = vec![0.0; n];
    let mut prev = a.clone();
    for it in 0..iterations {
        // accelerated step on an extrapolated point
        let beta = it as f64 / (it as f64 + 3.0);
        let z: Vec<f64> = a.iter().zip(&prev).map(|(x, p)| x + beta * (x - p)).collect();
        let grad: Vec<f64> = (0..n).map(|i| 1.0 - (0..n).map(|j| q[i][j] * z[j]).sum::<f64>()).collect();
        let step: Vec<f64> = z.iter().zip(&grad).map(|(zi, gi)| zi + gi / l).collect();
        prev = std::mem::replace(&mut a, project_box_hyperplane(&step, y, c));
    }
    objective(&a)
}

// ---------------------------------------------------------------- metrics

/// Direct evaluation of the confusion-matrix metric formulas with 0/0 → 0.
/// Returns `[precision, recall, f1, mcc, balanced_accuracy]`.
pub fn metric_formulas(tp: f64, fp: f64, tn: f64, fnn: f64) -> [f64; 5] {
    let div = |a: f64, b: f64| if b == 0.0 { 0.0 } else { a / b };
    let precision = div(tp, tp + fp);
    let recall = div(tp, tp + fnn);
    let f1 = div(2.0 * precision * recall, precision + recall);
    let mcc = div(tp * tn - fp * fnn, ((tp + fp) * (tp + fnn) * (tn + fp) * (tn + fnn)).sqrt());
    let tnr = div(tn, tn + fp);
    [precision, recall, f1, mcc, (recall + tnr) / 2.0]
}
