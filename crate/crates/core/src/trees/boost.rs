use super::{grow_with, BinnedData, Growth, RegressionTree, Splitter, TreeConfig};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoostVariant {
    /// Trees fitted to residuals by variance reduction; leaf = mean residual.
    Classic,
    /// Gradient/hessian statistics with L2-regularized leaves `−G/(H+λ)`
    /// and gain `½[G_L²/(H_L+λ) + G_R²/(H_R+λ) − G²/(H+λ)]`.
    SecondOrder,
    /// Second-order statistics over quantile-binned features, grown
    /// leaf-wise up to a leaf budget.
    Histogram,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostConfig {
    pub variant: BoostVariant,
    pub n_rounds: usize,
    pub learning_rate: f64,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub lambda: f64,
    pub n_bins: usize,
    /// Leaf budget for the histogram variant.
    pub max_leaves: usize,
}

impl BoostConfig {
    pub fn classic() -> Self {
        Self {
            variant: BoostVariant::Classic,
            n_rounds: 300,
            learning_rate: 0.1,
            max_depth: Some(3),
            min_samples_leaf: 1,
            lambda: 0.0,
            n_bins: 64,
            max_leaves: 31,
        }
    }

    pub fn second_order() -> Self {
        Self {
            variant: BoostVariant::SecondOrder,
            lambda: 1.0,
            ..Self::classic()
        }
    }

    pub fn histogram() -> Self {
        Self {
            variant: BoostVariant::Histogram,
            max_depth: None,
            min_samples_leaf: 20,
            lambda: 1.0,
            ..Self::classic()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostedModel {
    pub variant: BoostVariant,
    pub base_score: f64,
    pub learning_rate: f64,
    pub trees: Vec<RegressionTree>,
    /// Training MSE before the first round and after each round.
    pub train_mse: Vec<f64>,
    n_features: usize,
}

fn mse(y: &[f64], pred: &[f64]) -> f64 {
    y.iter().zip(pred).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / y.len() as f64
}

/// Squared-error gradient boosting.
pub fn fit_boosted(x: &Matrix, y: &[f64], cfg: &BoostConfig) -> Result<BoostedModel> {
    let n = x.rows();
    if n == 0 || n != y.len() {
        return Err(Error::Fit("boosting needs matching, nonempty X and y".into()));
    }
    if cfg.n_rounds == 0 {
        return Err(Error::Fit("n_rounds must be at least 1".into()));
    }
    if !(cfg.learning_rate > 0.0 && cfg.learning_rate <= 1.0) {
        return Err(Error::Fit(format!(
            "learning rate {} outside (0, 1]",
            cfg.learning_rate
        )));
    }
    let base_score = y.iter().sum::<f64>() / n as f64;
    let mut pred = vec![base_score; n];
    let binned = (cfg.variant == BoostVariant::Histogram).then(|| BinnedData::new(x, cfg.n_bins));
    let tree_cfg = TreeConfig {
        max_depth: cfg.max_depth,
        min_samples_leaf: cfg.min_samples_leaf,
        max_features: None,
        lambda: match cfg.variant {
            BoostVariant::Classic => 0.0,
            _ => cfg.lambda,
        },
        growth: match cfg.variant {
            BoostVariant::Histogram => Growth::LeafWise {
                max_leaves: cfg.max_leaves,
            },
            _ => Growth::DepthFirst,
        },
    };
    let splitter = match &binned {
        Some(b) => Splitter::Histogram(b),
        None => Splitter::Exact,
    };
    let hess = vec![1.0; n];
    let mut grad = vec![0.0; n];
    let mut trees = Vec::with_capacity(cfg.n_rounds);
    let mut train_mse = vec![mse(y, &pred)];
    for _ in 0..cfg.n_rounds {
        // d/dpred of ½(pred − y)²; the classic residual fit is the same
        // statistics with λ = 0.
        for ((g, p), t) in grad.iter_mut().zip(&pred).zip(y) {
            *g = p - t;
        }
        let mut tree = grow_with::<rand_chacha::ChaCha8Rng>(
            x,
            (0..n).collect(),
            &grad,
            &hess,
            &tree_cfg,
            splitter,
            None,
        );
        if cfg.variant != BoostVariant::Classic {
            tree.halve_gains();
        }
        for (i, p) in pred.iter_mut().enumerate() {
            *p += cfg.learning_rate * tree.predict_one(x.row(i));
        }
        train_mse.push(mse(y, &pred));
        trees.push(tree);
    }
    Ok(BoostedModel {
        variant: cfg.variant,
        base_score,
        learning_rate: cfg.learning_rate,
        trees,
        train_mse,
        n_features: x.cols(),
    })
}

impl RegressionTree {
    fn halve_gains(&mut self) {
        for n in self.nodes.iter_mut() {
            if let super::Node::Split { gain, .. } = n {
                *gain *= 0.5;
            }
        }
    }
}

impl BoostedModel {
    /// A model that predicts `base_score` everywhere.
    pub fn constant(base_score: f64, n_features: usize) -> Self {
        Self {
            variant: BoostVariant::Classic,
            base_score,
            learning_rate: 0.1,
            trees: Vec::new(),
            train_mse: Vec::new(),
            n_features,
        }
    }

    /// `base_score + lr · Σ tree(x)`.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() != self.n_features {
            return Err(Error::Predict {
                expected: self.n_features,
                got: x.cols(),
            });
        }
        Ok(x.iter_rows()
            .map(|r| {
                self.base_score
                    + self.learning_rate * self.trees.iter().map(|t| t.predict_one(r)).sum::<f64>()
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn data() -> (Matrix, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let rows: Vec<[f64; 2]> = (0..150)
            .map(|_| [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
            .collect();
        let y = rows.iter().map(|r| r[0] * r[1] + r[0].sin() + 0.1 * rng.random_range(-1.0..1.0)).collect();
        (Matrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn base_score_is_the_mean() {
        let (x, y) = data();
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        for cfg in [BoostConfig::classic(), BoostConfig::second_order(), BoostConfig::histogram()] {
            let m = fit_boosted(&x, &y, &BoostConfig { n_rounds: 3, ..cfg }).unwrap();
            assert_eq!(m.base_score, mean);
            assert_eq!(m.train_mse.len(), 4);
        }
    }

    #[test]
    fn depth_zero_round_leaves_predictions_at_mean() {
        let (x, y) = data();
        let cfg = BoostConfig {
            n_rounds: 1,
            learning_rate: 1.0,
            max_depth: Some(0),
            ..BoostConfig::classic()
        };
        let m = fit_boosted(&x, &y, &cfg).unwrap();
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        for p in m.predict(&x).unwrap() {
            assert!((p - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn every_variant_reduces_training_error() {
        let (x, y) = data();
        for cfg in [BoostConfig::classic(), BoostConfig::second_order(), BoostConfig::histogram()] {
            let m = fit_boosted(&x, &y, &BoostConfig { n_rounds: 50, min_samples_leaf: 5, ..cfg }).unwrap();
            assert!(m.train_mse.last().unwrap() < &(0.2 * m.train_mse[0]), "{:?}", m.variant);
        }
    }

    #[test]
    fn empty_model_predicts_base() {
        let m = BoostedModel::constant(4.5, 2);
        assert_eq!(m.predict(&Matrix::zeros(3, 2)).unwrap(), vec![4.5; 3]);
        assert!(m.predict(&Matrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn rejects_bad_learning_rate() {
        let (x, y) = data();
        assert!(fit_boosted(&x, &y, &BoostConfig { learning_rate: 1.5, ..BoostConfig::classic() }).is_err());
    }
}
