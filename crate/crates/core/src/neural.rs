//! Single-hidden-layer perceptron regressor trained with Adam.

use log::warn;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Relu,
}

impl Activation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(0.0),
        }
    }

    /// Derivative expressed through the pre-activation.
    #[inline]
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            batch_size: 32,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Flat parameter vector layout: `W1` (h×p, row-major), `b1` (h), `w2` (h), `b2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub inputs: usize,
    pub hidden: usize,
    pub activation: Activation,
    pub params: Vec<f64>,
    /// Adam first and second moment accumulators and step count.
    m: Vec<f64>,
    v: Vec<f64>,
    step: u64,
    seed: u64,
}

/// Glorot-uniform weights, zero biases.
pub fn init_mlp(inputs: usize, hidden: usize, activation: Activation, seed: u64) -> Result<MlpModel> {
    if inputs == 0 || hidden == 0 {
        return Err(Error::Fit("MLP needs at least one input and one hidden unit".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_params = hidden * inputs + 2 * hidden + 1;
    let mut params = vec![0.0; n_params];
    let limit1 = (6.0 / (inputs + hidden) as f64).sqrt();
    for w in params[..hidden * inputs].iter_mut() {
        *w = rng.random_range(-limit1..limit1);
    }
    let limit2 = (6.0 / (hidden + 1) as f64).sqrt();
    let w2_start = hidden * inputs + hidden;
    for w in params[w2_start..w2_start + hidden].iter_mut() {
        *w = rng.random_range(-limit2..limit2);
    }
    Ok(MlpModel {
        inputs,
        hidden,
        activation,
        params,
        m: vec![0.0; n_params],
        v: vec![0.0; n_params],
        step: 0,
        seed,
    })
}

impl MlpModel {
    fn w1(&self) -> &[f64] {
        &self.params[..self.hidden * self.inputs]
    }

    fn b1(&self) -> &[f64] {
        let s = self.hidden * self.inputs;
        &self.params[s..s + self.hidden]
    }

    fn w2(&self) -> &[f64] {
        let s = self.hidden * self.inputs + self.hidden;
        &self.params[s..s + self.hidden]
    }

    fn b2(&self) -> f64 {
        self.params[self.params.len() - 1]
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    fn forward_row(&self, x: &[f64], z: &mut [f64], a: &mut [f64]) -> f64 {
        let (w1, b1, w2) = (self.w1(), self.b1(), self.w2());
        let p = self.inputs;
        for j in 0..self.hidden {
            z[j] = linalg::dot(&w1[j * p..(j + 1) * p], x) + b1[j];
            a[j] = self.activation.apply(z[j]);
        }
        linalg::dot(w2, a) + self.b2()
    }

    pub fn predict_one(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.inputs {
            return Err(Error::Predict {
                expected: self.inputs,
                got: x.len(),
            });
        }
        let mut z = vec![0.0; self.hidden];
        let mut a = vec![0.0; self.hidden];
        Ok(self.forward_row(x, &mut z, &mut a))
    }

    /// `w2ᵀ act(W1 x + b1) + b2` for every row.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() != self.inputs {
            return Err(Error::Predict {
                expected: self.inputs,
                got: x.cols(),
            });
        }
        let mut z = vec![0.0; self.hidden];
        let mut a = vec![0.0; self.hidden];
        Ok(x.iter_rows().map(|r| self.forward_row(r, &mut z, &mut a)).collect())
    }

    /// Loss `(1/2B) Σ (ŷ − y)²` over `rows`, accumulating its gradient into `grad`.
    fn loss_and_grad(&self, x: &Matrix, y: &[f64], rows: &[usize], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let (p, h) = (self.inputs, self.hidden);
        let b = rows.len() as f64;
        let mut z = vec![0.0; h];
        let mut a = vec![0.0; h];
        let mut loss = 0.0;
        let (gw1, rest) = grad.split_at_mut(h * p);
        let (gb1, rest) = rest.split_at_mut(h);
        let (gw2, gb2) = rest.split_at_mut(h);
        let w2 = self.w2();
        for &r in rows {
            let xr = x.row(r);
            let out = self.forward_row(xr, &mut z, &mut a);
            let err = out - y[r];
            loss += err * err;
            let d_out = err / b;
            gb2[0] += d_out;
            for j in 0..h {
                gw2[j] += d_out * a[j];
                let dz = d_out * w2[j] * self.activation.derivative(z[j], a[j]);
                if dz != 0.0 {
                    gb1[j] += dz;
                    for (g, xi) in gw1[j * p..(j + 1) * p].iter_mut().zip(xr) {
                        *g += dz * xi;
                    }
                }
            }
        }
        loss / (2.0 * b)
    }

    /// Mean of `½(ŷ − y)²` over a batch, with its analytic gradient.
    pub fn batch_loss_gradient(&self, x: &Matrix, y: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_data(x, y)?;
        let rows: Vec<usize> = (0..x.rows()).collect();
        let mut grad = vec![0.0; self.params.len()];
        let loss = self.loss_and_grad(x, y, &rows, &mut grad);
        Ok((loss, grad))
    }

    fn check_data(&self, x: &Matrix, y: &[f64]) -> Result<()> {
        if x.cols() != self.inputs {
            return Err(Error::Predict {
                expected: self.inputs,
                got: x.cols(),
            });
        }
        if x.rows() != y.len() || x.rows() == 0 {
            return Err(Error::Fit("MLP needs matching, nonempty X and y".into()));
        }
        Ok(())
    }

    fn adam_step(&mut self, grad: &[f64], cfg: &TrainConfig) {
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - cfg.beta1.powi(t);
        let c2 = 1.0 - cfg.beta2.powi(t);
        for (((w, m), v), g) in self
            .params
            .iter_mut()
            .zip(self.m.iter_mut())
            .zip(self.v.iter_mut())
            .zip(grad)
        {
            *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
            *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
            *w -= cfg.learning_rate * (*m / c1) / ((*v / c2).sqrt() + cfg.eps);
        }
    }
}

fn looks_standardized(x: &Matrix) -> bool {
    let n = x.rows() as f64;
    (0..x.cols()).all(|j| {
        let c = x.column(j);
        let mean = c.iter().sum::<f64>() / n;
        let var = c.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        mean.abs() < 0.5 && var < 4.0
    })
}

/// Mini-batch Adam on squared error with per-epoch seeded shuffling.
/// Returns the mean squared error seen during each epoch.
pub fn train_mlp(model: &mut MlpModel, x: &Matrix, y: &[f64], cfg: &TrainConfig) -> Result<Vec<f64>> {
    model.check_data(x, y)?;
    if cfg.batch_size == 0 {
        return Err(Error::Fit("batch size must be at least 1".into()));
    }
    if !looks_standardized(x) {
        warn!("MLP trained on unstandardized features");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed ^ 0x9E37_79B9_7F4A_7C15);
    let mut order: Vec<usize> = (0..x.rows()).collect();
    let mut grad = vec![0.0; model.params.len()];
    let mut trace = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut sse = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let loss = model.loss_and_grad(x, y, batch, &mut grad);
            sse += 2.0 * loss * batch.len() as f64;
            if cfg.learning_rate != 0.0 {
                model.adam_step(&grad, cfg);
            }
        }
        let epoch_mse = sse / x.rows() as f64;
        if !epoch_mse.is_finite() || model.params.iter().any(|w| !w.is_finite()) {
            return Err(Error::Divergence { epoch });
        }
        trace.push(epoch_mse);
    }
    Ok(trace)
}

/// Largest relative disagreement between the analytic gradient and central
/// finite differences (step 1e-5) over every parameter:
/// `max |g_a − g_n| / max(|g_a|, |g_n|, 1e-8)`.
pub fn gradient_check(model: &MlpModel, x: &Matrix, y: &[f64]) -> Result<f64> {
    const STEP: f64 = 1e-5;
    let (_, analytic) = model.batch_loss_gradient(x, y)?;
    let rows: Vec<usize> = (0..x.rows()).collect();
    let mut probe = model.clone();
    let mut scratch = vec![0.0; model.params.len()];
    let mut worst: f64 = 0.0;
    for k in 0..model.params.len() {
        let w = model.params[k];
        probe.params[k] = w + STEP;
        let up = probe.loss_and_grad(x, y, &rows, &mut scratch);
        probe.params[k] = w - STEP;
        let down = probe.loss_and_grad(x, y, &rows, &mut scratch);
        probe.params[k] = w;
        let numeric = (up - down) / (2.0 * STEP);
        let denom = analytic[k].abs().max(numeric.abs()).max(1e-8);
        worst = worst.max((analytic[k] - numeric).abs() / denom);
    }
    Ok(worst)
}
