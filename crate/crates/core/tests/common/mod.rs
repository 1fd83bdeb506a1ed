//! Independent reference implementations shared by the oracle tests and the
//! acceptance suite. Nothing here calls the code under test except to obtain
//! the value being checked.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use ozone_core::instance::{fit_knn, fit_svr, Kernel, SvrConfig, SvrModel};
use ozone_core::linear::{fit_elastic_net, fit_ols, lambda_max, ElasticNetConfig, LinearModel};
use ozone_core::neural::{gradient_check, init_mlp, Activation};
use ozone_core::stats::{spearman, summary_stats};
use ozone_core::trees::best_split;
use ozone_core::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut ChaCha8Rng, n: usize, p: usize, lo: f64, hi: f64) -> Matrix {
    Matrix::from_vec(n, p, (0..n * p).map(|_| rng.random_range(lo..hi)).collect()).unwrap()
}

/// Largest gap between fitted OLS coefficients (intercept first) and the
/// solution of the normal equations `[1 X]ᵀ[1 X] β = [1 X]ᵀ y`.
pub fn ols_normal_equation_gap(seed: u64) -> f64 {
    let mut r = rng(seed);
    let n = r.random_range(12..=30);
    let p = r.random_range(1..=5);
    let x = uniform_matrix(&mut r, n, p, -2.0, 2.0);
    let y: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..5.0)).collect();
    let model = fit_ols(&x, &y).unwrap();

    let design = DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { x.get(i, j - 1) });
    let gram = design.transpose() * &design;
    let rhs = design.transpose() * DVector::from_vec(y);
    let beta = gram.cholesky().expect("full-rank design").solve(&rhs);

    let mut gap = (model.intercept - beta[0]).abs();
    for j in 0..p {
        gap = gap.max((model.weights[j] - beta[j + 1]).abs());
    }
    gap
}

/// Mean of the `k` nearest targets found by sorting every distance, ties
/// broken by row index.
fn knn_brute(x: &Matrix, y: &[f64], k: usize, q: &[f64]) -> f64 {
    let mut d: Vec<(f64, usize)> = (0..x.rows())
        .map(|i| {
            let dist: f64 = x.row(i).iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
            (dist, i)
        })
        .collect();
    d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    d[..k].iter().map(|&(_, i)| y[i]).sum::<f64>() / k as f64
}

/// KNN predictions equal brute force exactly. Integer-valued features make
/// distance ties common; integer targets keep the neighbour sums exact in
/// any order.
pub fn knn_matches_brute_force(seed: u64) -> bool {
    let mut r = rng(seed);
    let n = r.random_range(5..=30);
    let p = r.random_range(1..=4);
    let k = r.random_range(1..=n.min(7));
    let x = Matrix::from_vec(n, p, (0..n * p).map(|_| r.random_range(0..4) as f64).collect()).unwrap();
    let y: Vec<f64> = (0..n).map(|_| r.random_range(-20..20) as f64).collect();
    let queries = Matrix::from_vec(10, p, (0..10 * p).map(|_| r.random_range(0..4) as f64).collect()).unwrap();
    let model = fit_knn(&x, &y, k).unwrap();
    let got = model.predict(&queries).unwrap();
    (0..10).all(|i| got[i] == knn_brute(&x, &y, k, queries.row(i)))
}

fn sse(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|a| (a - m) * (a - m)).sum()
}

/// Exhaustive search over every (feature, midpoint) pair scoring the SSE
/// reduction directly; first best wins, so ties go to the lower feature and
/// then the lower threshold.
pub fn exhaustive_split(x: &Matrix, y: &[f64]) -> Option<(usize, f64, f64)> {
    let parent = sse(y);
    let mut best: Option<(usize, f64, f64)> = None;
    for f in 0..x.cols() {
        let mut values = x.column(f);
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values.dedup();
        for w in values.windows(2) {
            let t = w[0] + 0.5 * (w[1] - w[0]);
            let (mut left, mut right) = (Vec::new(), Vec::new());
            for (i, &yi) in y.iter().enumerate() {
                if x.get(i, f) <= t {
                    left.push(yi);
                } else {
                    right.push(yi);
                }
            }
            let gain = parent - sse(&left) - sse(&right);
            if best.is_none_or(|b| gain > b.2 + 1e-9 * parent.max(1.0)) {
                best = Some((f, t, gain));
            }
        }
    }
    best.filter(|b| b.2 > 1e-9 * parent.max(1.0))
}

/// The single-tree split search agrees with [`exhaustive_split`] on feature
/// and threshold, and on the gain to 1e-9 relative.
pub fn split_matches_exhaustive(seed: u64) -> bool {
    let mut r = rng(seed);
    let n = r.random_range(4..=30);
    let p = r.random_range(1..=4);
    // Coarse grid values so repeated feature values occur.
    let x = Matrix::from_vec(n, p, (0..n * p).map(|_| r.random_range(0..12) as f64 * 0.5).collect()).unwrap();
    let y: Vec<f64> = (0..n).map(|_| r.random_range(-10.0..10.0)).collect();
    let rows: Vec<usize> = (0..n).collect();
    match (best_split(&x, &rows, &y, 1), exhaustive_split(&x, &y)) {
        (None, None) => true,
        (Some(got), Some((f, t, gain))) => {
            got.feature == f && got.threshold == t && (got.gain - gain).abs() <= 1e-9 * gain.abs().max(1.0)
        }
        _ => false,
    }
}

/// Elastic-net problem with correlated columns and a sparse truth.
pub fn enet_problem(seed: u64) -> (Matrix, Vec<f64>, f64) {
    let mut r = rng(seed);
    let n = r.random_range(30..=80);
    let p = r.random_range(3..=10);
    let mut x = uniform_matrix(&mut r, n, p, -1.0, 1.0);
    for i in 0..n {
        let v = x.get(i, 0) * 0.7 + x.get(i, p - 1) * 0.3;
        x.set(i, p - 1, v);
    }
    let y: Vec<f64> = (0..n)
        .map(|i| 3.0 * x.get(i, 0) - 2.0 * x.get(i, 1) + 1.0 + r.random_range(-0.5..0.5))
        .collect();
    let alpha = [0.1, 0.5, 0.9, 1.0][r.random_range(0..4)];
    (x, y, alpha)
}

/// Largest violation of the elastic-net optimality conditions under the
/// loss `(1/2n)‖y − b − Xw‖² + λ(α‖w‖₁ + (1−α)/2‖w‖²)`:
/// `∂/∂b = 0`, and for each coordinate `|∇ⱼ + λα sign wⱼ| = 0` when
/// `wⱼ ≠ 0`, `|∇ⱼ| ≤ λα` when `wⱼ = 0`, with `∇ⱼ` the smooth part.
pub fn enet_kkt_residual(x: &Matrix, y: &[f64], model: &LinearModel, lambda: f64, alpha: f64) -> f64 {
    let n = x.rows();
    let resid: Vec<f64> = (0..n)
        .map(|i| {
            let fit: f64 = x.row(i).iter().zip(&model.weights).map(|(a, w)| a * w).sum();
            y[i] - model.intercept - fit
        })
        .collect();
    let mut worst = (resid.iter().sum::<f64>() / n as f64).abs();
    for j in 0..x.cols() {
        let w = model.weights[j];
        let grad = -(0..n).map(|i| x.get(i, j) * resid[i]).sum::<f64>() / n as f64 + lambda * (1.0 - alpha) * w;
        let v = if w != 0.0 {
            (grad + lambda * alpha * w.signum()).abs()
        } else {
            (grad.abs() - lambda * alpha).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}

/// KKT residual at λ = λ_max/4 and whether every weight is zero at λ_max.
pub fn enet_check(seed: u64) -> (f64, bool) {
    let (x, y, alpha) = enet_problem(seed);
    let lmax = lambda_max(&x, &y, alpha);
    let cfg = ElasticNetConfig {
        lambda: lmax / 4.0,
        l1_ratio: alpha,
        tol: 1e-12,
        max_iter: 100_000,
        trace: false,
    };
    let model = fit_elastic_net(&x, &y, &cfg).unwrap();
    let residual = enet_kkt_residual(&x, &y, &model, cfg.lambda, alpha);
    let shut = [1.0, 1.5]
        .iter()
        .all(|m| {
            let cfg = ElasticNetConfig { lambda: lmax * m, ..cfg.clone() };
            fit_elastic_net(&x, &y, &cfg).unwrap().weights.iter().all(|&w| w == 0.0)
        });
    (residual, shut)
}

/// Largest violation of the ε-SVR optimality conditions for dual
/// coefficients `βᵢ = αᵢ − αᵢ*`, with `rᵢ = yᵢ − f(xᵢ)` recomputed from the
/// kernel: `|rᵢ| ≤ ε` at `β = 0`, `rᵢ = ε sign βᵢ` for `0 < |β| < C`,
/// `rᵢ sign βᵢ ≥ ε` at `|β| = C`; also `Σβ = 0` and `|β| ≤ C`.
pub fn svr_kkt_residual(x: &Matrix, y: &[f64], m: &SvrModel) -> f64 {
    let n = x.rows();
    let c = m.c;
    let bound = 1e-9 * c;
    let mut worst = m.dual.iter().sum::<f64>().abs();
    for i in 0..n {
        let f: f64 = (0..n).map(|j| m.dual[j] * m.kernel.eval(x.row(i), x.row(j))).sum::<f64>() + m.bias;
        let r = y[i] - f;
        let b = m.dual[i];
        worst = worst.max((b.abs() - c).max(0.0));
        let v = if b.abs() <= bound {
            (r.abs() - m.epsilon).max(0.0)
        } else if b.abs() >= c - bound {
            (m.epsilon - r * b.signum()).max(0.0)
        } else {
            (r - m.epsilon * b.signum()).abs()
        };
        worst = worst.max(v);
    }
    worst
}

pub fn svr_check(seed: u64) -> (f64, f64) {
    let mut r = rng(seed);
    let n = r.random_range(20..=60);
    let p = r.random_range(1..=4);
    let x = uniform_matrix(&mut r, n, p, -2.0, 2.0);
    let y: Vec<f64> = (0..n)
        .map(|i| x.get(i, 0).sin() * 2.0 + x.row(i).iter().sum::<f64>() * 0.3 + r.random_range(-0.3..0.3))
        .collect();
    let kernel = if seed.is_multiple_of(2) {
        Some(Kernel::Linear)
    } else {
        Some(Kernel::Rbf { gamma: r.random_range(0.1..1.0) })
    };
    let cfg = SvrConfig {
        c: [0.5, 1.0, 10.0][r.random_range(0..3)],
        epsilon: r.random_range(0.05..0.3),
        kernel,
        tol: 1e-3,
        max_passes: 10_000,
    };
    let m = fit_svr(&x, &y, &cfg).unwrap();
    assert!(m.warning.is_none(), "SVR hit its iteration budget on seed {seed}");
    (svr_kkt_residual(&x, &y, &m), cfg.tol)
}

/// Smallest eigenvalue of an RBF Gram matrix.
pub fn rbf_gram_min_eigenvalue(seed: u64) -> f64 {
    let mut r = rng(seed);
    let n = 40;
    let x = uniform_matrix(&mut r, n, 3, -1.0, 1.0);
    let k = Kernel::Rbf { gamma: r.random_range(0.1..5.0) };
    let gram = DMatrix::from_fn(n, n, |i, j| k.eval(x.row(i), x.row(j)));
    gram.symmetric_eigenvalues().min()
}

/// Gradient-check error for one seeded MLP. For ReLU the batch keeps only
/// rows whose hidden preactivations all lie at least 1e-3 from the kink.
pub fn mlp_gradient_error(hidden: usize, activation: Activation, seed: u64) -> f64 {
    let p = 11;
    let model = init_mlp(p, hidden, activation, seed).unwrap();
    let mut r = rng(seed ^ 0xA5A5);
    let w1 = DMatrix::from_row_slice(hidden, p, &model.params[..hidden * p]);
    let mut rows = Vec::new();
    let mut attempts = 0;
    while rows.len() < 8 * p && attempts < 10_000 {
        attempts += 1;
        let row: Vec<f64> = (0..p).map(|_| r.random_range(-2.0..2.0)).collect();
        let z = &w1 * DVector::from_column_slice(&row);
        if activation == Activation::Tanh || z.iter().all(|v| v.abs() > 1e-3) {
            rows.extend(row);
        }
    }
    let b = rows.len() / p;
    assert!(b >= 8, "could not build a batch away from the ReLU kink");
    let x = Matrix::from_vec(b, p, rows).unwrap();
    let y: Vec<f64> = (0..b).map(|_| r.random_range(-1.0..1.0)).collect();
    gradient_check(&model, &x, &y).unwrap()
}

/// Skewness and excess kurtosis from the definitions, one pass per moment.
pub fn moments_brute(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let m = |k: i32| v.iter().map(|a| (a - mean).powi(k)).sum::<f64>() / n;
    (m(3) / m(2).powf(1.5), m(4) / m(2).powi(2) - 3.0)
}

/// Mid-rank of each value by counting: 1 + #smaller + (#equal − 1)/2.
pub fn ranks_brute(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&a| {
            let less = v.iter().filter(|&&b| b < a).count() as f64;
            let eq = v.iter().filter(|&&b| b == a).count() as f64;
            1.0 + less + (eq - 1.0) / 2.0
        })
        .collect()
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// Largest gap between the library statistics and the brute-force oracles
/// for skewness, kurtosis and Spearman on one seeded sample (with ties).
pub fn statistics_gap(seed: u64) -> f64 {
    let mut r = rng(seed);
    let n = r.random_range(10..=200);
    let a: Vec<f64> = (0..n).map(|_| (r.random_range(0.0..5.0_f64)).exp().round()).collect();
    let b: Vec<f64> = a.iter().map(|v| (v + r.random_range(-20.0..20.0_f64)).round()).collect();
    let s = summary_stats(&a).unwrap();
    let (skew, kurt) = moments_brute(&a);
    let rho = pearson(&ranks_brute(&a), &ranks_brute(&b));
    (s.skewness - skew)
        .abs()
        .max((s.kurtosis - kurt).abs())
        .max((spearman(&a, &b).unwrap() - rho).abs())
}

/// Shapiro-Wilk fixtures: (label, sample, reference W, reference p).
pub fn shapiro_fixtures(dir: &std::path::Path) -> Vec<(String, Vec<f64>, f64, f64)> {
    let samples = std::fs::read_to_string(dir.join("shapiro_samples.csv")).unwrap();
    let mut by_case: Vec<Vec<f64>> = Vec::new();
    for line in samples.lines().skip(1) {
        let (case, v) = line.split_once(',').unwrap();
        let case: usize = case.parse().unwrap();
        if by_case.len() <= case {
            by_case.resize(case + 1, Vec::new());
        }
        by_case[case].push(v.parse().unwrap());
    }
    let refs = std::fs::read_to_string(dir.join("shapiro_reference.csv")).unwrap();
    refs.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let case: usize = f[0].parse().unwrap();
            (
                format!("{}-{}", f[1], f[2]),
                by_case[case].clone(),
                f[3].parse().unwrap(),
                f[4].parse().unwrap(),
            )
        })
        .collect()
}
