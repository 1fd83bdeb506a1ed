//! Ordinary least squares and ElasticNet by cyclic coordinate descent.

use log::warn;

use crate::error::{ConvergenceWarning, Error, Result};
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearKind {
    Ols,
    ElasticNet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElasticNetConfig {
    /// Overall penalty strength λ.
    pub lambda: f64,
    /// Mixing α: 1 is the lasso, 0 is ridge.
    pub l1_ratio: f64,
    /// Stop when the largest coefficient change in a sweep falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Record the objective after every sweep.
    pub trace: bool,
}

impl Default for ElasticNetConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            l1_ratio: 0.5,
            tol: 1e-6,
            max_iter: 10_000,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub kind: LinearKind,
    pub weights: Vec<f64>,
    pub intercept: f64,
    /// Numerical rank of the centered design (OLS only).
    pub rank: Option<usize>,
    pub sweeps: usize,
    pub warning: Option<ConvergenceWarning>,
    /// Objective after each sweep when tracing was requested.
    pub objective_trace: Vec<f64>,
}

impl LinearModel {
    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() != self.weights.len() {
            return Err(Error::Predict {
                expected: self.weights.len(),
                got: x.cols(),
            });
        }
        Ok(x.iter_rows()
            .map(|r| linalg::dot(r, &self.weights) + self.intercept)
            .collect())
    }
}

fn column_means(x: &Matrix) -> Vec<f64> {
    let n = x.rows() as f64;
    let mut m = vec![0.0; x.cols()];
    for r in x.iter_rows() {
        for (mj, v) in m.iter_mut().zip(r) {
            *mj += v;
        }
    }
    m.iter_mut().for_each(|v| *v /= n);
    m
}

fn check_shapes(x: &Matrix, y: &[f64]) -> Result<()> {
    if x.rows() == 0 || x.cols() == 0 {
        return Err(Error::Fit("empty design matrix".into()));
    }
    if x.rows() != y.len() {
        return Err(Error::Fit(format!(
            "{} rows but {} targets",
            x.rows(),
            y.len()
        )));
    }
    if x.rows() < 2 {
        return Err(Error::Fit("need at least 2 rows".into()));
    }
    Ok(())
}

/// Least squares with an unpenalized intercept; rank-deficient designs get
/// the minimum-norm weight vector.
pub fn fit_ols(x: &Matrix, y: &[f64]) -> Result<LinearModel> {
    check_shapes(x, y)?;
    let means = column_means(x);
    let y_mean = y.iter().sum::<f64>() / y.len() as f64;
    let mut centered = x.clone();
    for i in 0..centered.rows() {
        for (v, m) in centered.row_mut(i).iter_mut().zip(&means) {
            *v -= m;
        }
    }
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let ls = linalg::lstsq(&centered, &yc)?;
    let intercept = y_mean - linalg::dot(&means, &ls.solution);
    Ok(LinearModel {
        kind: LinearKind::Ols,
        weights: ls.solution,
        intercept,
        rank: Some(ls.rank),
        sweeps: 0,
        warning: None,
        objective_trace: Vec::new(),
    })
}

/// Smallest λ at which every ElasticNet coefficient is zero.
pub fn lambda_max(x: &Matrix, y: &[f64], l1_ratio: f64) -> f64 {
    let n = x.rows() as f64;
    let y_mean = y.iter().sum::<f64>() / n;
    let means = column_means(x);
    (0..x.cols())
        .map(|j| {
            x.iter_rows()
                .zip(y)
                .map(|(r, yi)| (r[j] - means[j]) * (yi - y_mean))
                .sum::<f64>()
                .abs()
        })
        .fold(0.0, f64::max)
        / (n * l1_ratio)
}

/// Objective (1/2n)‖y − Xw − b‖² + λ(α‖w‖₁ + (1−α)/2 ‖w‖²).
pub fn elastic_net_objective(x: &Matrix, y: &[f64], model: &LinearModel, cfg: &ElasticNetConfig) -> f64 {
    let pred = model.predict(x).expect("shape checked by caller");
    let n = y.len() as f64;
    let loss = y.iter().zip(&pred).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / (2.0 * n);
    let l1: f64 = model.weights.iter().map(|w| w.abs()).sum();
    let l2: f64 = model.weights.iter().map(|w| w * w).sum();
    loss + cfg.lambda * (cfg.l1_ratio * l1 + 0.5 * (1.0 - cfg.l1_ratio) * l2)
}

fn soft_threshold(z: f64, gamma: f64) -> f64 {
    // Absorb rounding in n·λ·α so that λ = λ_max lands exactly on zero.
    let gamma = gamma * (1.0 + 8.0 * f64::EPSILON);
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

fn looks_standardized(x: &Matrix, means: &[f64]) -> bool {
    let n = x.rows() as f64;
    (0..x.cols()).all(|j| {
        let var = x.iter_rows().map(|r| (r[j] - means[j]).powi(2)).sum::<f64>() / n;
        means[j].abs() < 1e-3 && (var == 0.0 || (var - 1.0).abs() < 0.1)
    })
}

/// Cyclic coordinate descent over coordinates `0..p` with an unpenalized
/// intercept. Exhausting `max_iter` sweeps attaches a warning to the model.
pub fn fit_elastic_net(x: &Matrix, y: &[f64], cfg: &ElasticNetConfig) -> Result<LinearModel> {
    check_shapes(x, y)?;
    if cfg.lambda < 0.0 || !cfg.lambda.is_finite() {
        return Err(Error::Fit(format!("lambda must be >= 0, got {}", cfg.lambda)));
    }
    if !(0.0..=1.0).contains(&cfg.l1_ratio) {
        return Err(Error::Fit(format!("l1_ratio must lie in [0, 1], got {}", cfg.l1_ratio)));
    }
    let (n, p) = (x.rows(), x.cols());
    let nf = n as f64;
    let means = column_means(x);
    if !looks_standardized(x, &means) {
        warn!("elastic net fitted on unstandardized features");
    }
    let y_mean = y.iter().sum::<f64>() / nf;

    // Column-major centered copy for contiguous coordinate updates.
    let cols: Vec<Vec<f64>> = (0..p)
        .map(|j| x.iter_rows().map(|r| r[j] - means[j]).collect())
        .collect();
    let sq_norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|v| v * v).sum()).collect();
    let mut resid: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let mut w = vec![0.0; p];
    let l1 = nf * cfg.lambda * cfg.l1_ratio;
    let l2 = nf * cfg.lambda * (1.0 - cfg.l1_ratio);

    let mut model = LinearModel {
        kind: LinearKind::ElasticNet,
        weights: vec![0.0; p],
        intercept: y_mean,
        rank: None,
        sweeps: 0,
        warning: None,
        objective_trace: Vec::new(),
    };
    let objective = |w: &[f64], resid: &[f64]| {
        let loss = resid.iter().map(|r| r * r).sum::<f64>() / (2.0 * nf);
        let a: f64 = w.iter().map(|v| v.abs()).sum();
        let b: f64 = w.iter().map(|v| v * v).sum();
        loss + cfg.lambda * (cfg.l1_ratio * a + 0.5 * (1.0 - cfg.l1_ratio) * b)
    };
    if cfg.trace {
        model.objective_trace.push(objective(&w, &resid));
    }

    let mut converged = false;
    let mut last_change = f64::INFINITY;
    for sweep in 1..=cfg.max_iter {
        let mut max_change: f64 = 0.0;
        for j in 0..p {
            let denom = sq_norms[j] + l2;
            if denom == 0.0 {
                continue;
            }
            let col = &cols[j];
            let old = w[j];
            let rho = linalg::dot(col, &resid) + sq_norms[j] * old;
            let new = soft_threshold(rho, l1) / denom;
            if new != old {
                let delta = new - old;
                for (r, c) in resid.iter_mut().zip(col) {
                    *r -= delta * c;
                }
                w[j] = new;
                max_change = max_change.max(delta.abs());
            }
        }
        model.sweeps = sweep;
        if cfg.trace {
            model.objective_trace.push(objective(&w, &resid));
        }
        last_change = max_change;
        if max_change < cfg.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        model.warning = Some(ConvergenceWarning {
            iterations: cfg.max_iter,
            residual: last_change,
        });
    }
    model.intercept = y_mean - linalg::dot(&means, &w);
    model.weights = w;
    Ok(model)
}
