//! Instance-based regressors: k-nearest neighbours and ε-support vector
//! regression.

use rayon::prelude::*;

use crate::error::{ConvergenceWarning, Error, Result};
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    x: Matrix,
    y: Vec<f64>,
    k: usize,
}

/// Stores the training set for Euclidean k-NN.
pub fn fit_knn(x: &Matrix, y: &[f64], k: usize) -> Result<KnnModel> {
    if x.rows() == 0 {
        return Err(Error::Fit("k-NN needs at least one training row".into()));
    }
    if x.rows() != y.len() {
        return Err(Error::Fit("row/target count mismatch".into()));
    }
    if k == 0 || k > x.rows() {
        return Err(Error::Fit(format!(
            "k = {k} must lie in 1..={}",
            x.rows()
        )));
    }
    Ok(KnnModel {
        x: x.clone(),
        y: y.to_vec(),
        k,
    })
}

impl KnnModel {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Unweighted mean of the k nearest targets; ties in distance go to the
    /// lower training row.
    pub fn predict_one(&self, query: &[f64]) -> Result<f64> {
        if query.len() != self.x.cols() {
            return Err(Error::Predict {
                expected: self.x.cols(),
                got: query.len(),
            });
        }
        let mut d: Vec<(f64, usize)> = self
            .x
            .iter_rows()
            .enumerate()
            .map(|(i, r)| (linalg::squared_distance(r, query), i))
            .collect();
        let k = self.k;
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < d.len() {
            d.select_nth_unstable_by(k - 1, cmp);
        }
        Ok(d[..k].iter().map(|&(_, i)| self.y[i]).sum::<f64>() / k as f64)
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() != self.x.cols() {
            return Err(Error::Predict {
                expected: self.x.cols(),
                got: x.cols(),
            });
        }
        (0..x.rows())
            .into_par_iter()
            .map(|i| self.predict_one(x.row(i)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

impl Kernel {
    #[inline]
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => linalg::dot(a, b),
            Kernel::Rbf { gamma } => (-gamma * linalg::squared_distance(a, b)).exp(),
        }
    }
}

/// `1 / (p · Var(X))` over all entries of `X`.
pub fn default_gamma(x: &Matrix) -> f64 {
    let v = x.as_slice();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
    if var > 0.0 {
        1.0 / (x.cols() as f64 * var)
    } else {
        1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvrConfig {
    pub c: f64,
    pub epsilon: f64,
    /// `None` selects an RBF kernel with [`default_gamma`].
    pub kernel: Option<Kernel>,
    /// Stopping tolerance on the maximal KKT violation.
    pub tol: f64,
    /// Iteration budget, in multiples of the training-set size.
    pub max_passes: usize,
}

impl Default for SvrConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            epsilon: 0.1,
            kernel: None,
            tol: 1e-3,
            max_passes: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvrModel {
    pub kernel: Kernel,
    pub c: f64,
    pub epsilon: f64,
    /// Support vectors with their coefficients α − α*.
    support: Matrix,
    coef: Vec<f64>,
    /// Dual coefficient for every training row (zero for non-support rows).
    pub dual: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub warning: Option<ConvergenceWarning>,
}

/// Solves the ε-insensitive dual by SMO.
///
/// The dual is written over `2n` variables: `α` (label +1, linear term
/// `ε − yᵢ`) and `α*` (label −1, linear term `ε + yᵢ`), subject to
/// `Σ zₜβₜ = 0` and `0 ≤ βₜ ≤ C`. Each step updates the maximal violating
/// pair: the index with the largest `−zₜ∇ₜ` among those that can move up
/// paired with the one with the smallest among those that can move down.
pub fn fit_svr(x: &Matrix, y: &[f64], cfg: &SvrConfig) -> Result<SvrModel> {
    let n = x.rows();
    if n == 0 || n != y.len() {
        return Err(Error::Fit("SVR needs matching, nonempty X and y".into()));
    }
    if !(cfg.c > 0.0) {
        return Err(Error::Fit(format!("C must be > 0, got {}", cfg.c)));
    }
    if !(cfg.epsilon >= 0.0) {
        return Err(Error::Fit(format!("epsilon must be >= 0, got {}", cfg.epsilon)));
    }
    let kernel = cfg.kernel.unwrap_or(Kernel::Rbf {
        gamma: default_gamma(x),
    });
    let c = cfg.c;

    // Full Gram matrix; n is a few thousand at most.
    let gram: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| kernel.eval(x.row(i), x.row(j))).collect())
        .collect();

    let m = 2 * n;
    let z = |t: usize| if t < n { 1.0 } else { -1.0 };
    let q = |s: usize, t: usize| z(s) * z(t) * gram[s % n][t % n];
    let mut beta = vec![0.0; m];
    let mut grad: Vec<f64> = (0..m)
        .map(|t| if t < n { cfg.epsilon - y[t] } else { cfg.epsilon + y[t - n] })
        .collect();

    let in_up = |t: usize, b: f64| (z(t) > 0.0 && b < c) || (z(t) < 0.0 && b > 0.0);
    let in_low = |t: usize, b: f64| (z(t) > 0.0 && b > 0.0) || (z(t) < 0.0 && b < c);

    let budget = cfg.max_passes.saturating_mul(n).max(1);
    let mut iterations = 0;
    let mut gap: f64;
    loop {
        let (mut i, mut up_max) = (usize::MAX, f64::NEG_INFINITY);
        let (mut j, mut low_min) = (usize::MAX, f64::INFINITY);
        for t in 0..m {
            let v = -z(t) * grad[t];
            if in_up(t, beta[t]) && v > up_max {
                up_max = v;
                i = t;
            }
            if in_low(t, beta[t]) && v < low_min {
                low_min = v;
                j = t;
            }
        }
        gap = up_max - low_min;
        if i == usize::MAX || j == usize::MAX || gap <= cfg.tol {
            break;
        }
        if iterations >= budget {
            break;
        }
        iterations += 1;

        // Two-variable subproblem along the feasible direction.
        let (zi, zj) = (z(i), z(j));
        let quad = (q(i, i) + q(j, j) - 2.0 * zi * zj * q(i, j)).max(1e-12);
        let (old_i, old_j) = (beta[i], beta[j]);
        // Move βᵢ by zᵢ·δ and βⱼ by −zⱼ·δ, δ > 0.
        let mut delta = gap / quad;
        let room = |b: f64, dir: f64| if dir > 0.0 { c - b } else { b };
        delta = delta.min(room(old_i, zi)).min(room(old_j, -zj));
        beta[i] = (old_i + zi * delta).clamp(0.0, c);
        beta[j] = (old_j - zj * delta).clamp(0.0, c);
        let (di, dj) = (beta[i] - old_i, beta[j] - old_j);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(t, i) * di + q(t, j) * dj;
        }
    }

    let warning = (gap > cfg.tol && iterations >= budget).then_some(ConvergenceWarning {
        iterations,
        residual: gap,
    });

    // Bias from free variables, else the midpoint of the feasible interval.
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    for t in 0..m {
        let v = -z(t) * grad[t];
        if beta[t] > 0.0 && beta[t] < c {
            sum_free += v;
            n_free += 1;
        } else if in_up(t, beta[t]) {
            // can still move up: b ≤ v for the optimum
            lb = lb.max(v);
        } else {
            ub = ub.min(v);
        }
    }
    let mut bias = if n_free > 0 {
        sum_free / n_free as f64
    } else if lb.is_finite() && ub.is_finite() {
        0.5 * (lb + ub)
    } else if lb.is_finite() {
        lb
    } else {
        ub
    };
    if !bias.is_finite() {
        bias = 0.0;
    }

    let dual: Vec<f64> = (0..n).map(|i| beta[i] - beta[i + n]).collect();
    let sv: Vec<usize> = (0..n).filter(|&i| dual[i] != 0.0).collect();
    Ok(SvrModel {
        kernel,
        c,
        epsilon: cfg.epsilon,
        support: x.select_rows(&sv),
        coef: sv.iter().map(|&i| dual[i]).collect(),
        dual,
        bias,
        iterations,
        warning,
    })
}

impl SvrModel {
    pub fn n_support(&self) -> usize {
        self.coef.len()
    }

    /// Σ (αᵢ − αᵢ*) K(xᵢ, x) + b over support vectors.
    pub fn predict_one(&self, x: &[f64]) -> Result<f64> {
        if self.support.rows() > 0 && x.len() != self.support.cols() {
            return Err(Error::Predict {
                expected: self.support.cols(),
                got: x.len(),
            });
        }
        Ok(self
            .support
            .iter_rows()
            .zip(&self.coef)
            .map(|(s, a)| a * self.kernel.eval(s, x))
            .sum::<f64>()
            + self.bias)
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        (0..x.rows())
            .into_par_iter()
            .map(|i| self.predict_one(x.row(i)))
            .collect()
    }
}
