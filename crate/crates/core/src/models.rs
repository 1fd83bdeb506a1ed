//! Uniform fit/predict over the regression roster, and stacking.

use rand::{RngCore, SeedableRng};
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{fit_knn, fit_svr, Kernel, KnnModel, SvrConfig, SvrModel};
use crate::linalg::Matrix;
use crate::linear::{fit_elastic_net, fit_ols, ElasticNetConfig, LinearModel};
use crate::neural::{init_mlp, train_mlp, Activation, MlpModel, TrainConfig};
use crate::trees::{fit_bagging, fit_boosted, fit_random_forest, BoostConfig, BoostedModel, ForestConfig, ForestModel};

/// The twelve roster entries in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Ols,
    RandomForest,
    GradientBoosting,
    Svr,
    Knn,
    ElasticNet,
    SecondOrderBoost,
    HistogramBoost,
    Bagging,
    Stacking,
    MlpTanh,
    MlpRelu,
}

pub const ROSTER: [ModelKind; 12] = [
    ModelKind::Ols,
    ModelKind::RandomForest,
    ModelKind::GradientBoosting,
    ModelKind::Svr,
    ModelKind::Knn,
    ModelKind::ElasticNet,
    ModelKind::SecondOrderBoost,
    ModelKind::HistogramBoost,
    ModelKind::Bagging,
    ModelKind::Stacking,
    ModelKind::MlpTanh,
    ModelKind::MlpRelu,
];

impl ModelKind {
    pub fn key(self) -> &'static str {
        match self {
            ModelKind::Ols => "ols",
            ModelKind::RandomForest => "rf",
            ModelKind::GradientBoosting => "gb",
            ModelKind::Svr => "svr",
            ModelKind::Knn => "knn",
            ModelKind::ElasticNet => "enet",
            ModelKind::SecondOrderBoost => "xgb",
            ModelKind::HistogramBoost => "lgbm",
            ModelKind::Bagging => "bagging",
            ModelKind::Stacking => "stacking",
            ModelKind::MlpTanh => "mlp",
            ModelKind::MlpRelu => "mlp1",
        }
    }

    /// Row label used in reports.
    pub fn display(self) -> &'static str {
        match self {
            ModelKind::Ols => "Linear Regression",
            ModelKind::RandomForest => "Random Forest",
            ModelKind::GradientBoosting => "Gradient Boosting",
            ModelKind::Svr => "Support Vector Regression",
            ModelKind::Knn => "K-Nearest Neighbors",
            ModelKind::ElasticNet => "ElasticNet",
            ModelKind::SecondOrderBoost => "XGBoost",
            ModelKind::HistogramBoost => "LightGBM",
            ModelKind::Bagging => "Bagging",
            ModelKind::Stacking => "Stacking",
            ModelKind::MlpTanh => "MLPRegressor",
            ModelKind::MlpRelu => "MLPRegressor_1",
        }
    }

    pub fn from_key(key: &str) -> Result<Self> {
        ROSTER
            .iter()
            .copied()
            .find(|k| k.key() == key)
            .ok_or_else(|| Error::Config(format!("unknown model '{key}'")))
    }

    /// Position in [`ROSTER`]; also the stream used to derive its seed.
    pub fn index(self) -> usize {
        ROSTER.iter().position(|&k| k == self).unwrap()
    }
}

/// Independent per-entry seed: ChaCha8 keyed by `seed` on stream `stream`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.next_u64()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StackingConfig {
    pub bases: Vec<ModelSpec>,
    pub folds: usize,
}

impl Default for StackingConfig {
    fn default() -> Self {
        Self {
            bases: [ModelKind::Ols, ModelKind::RandomForest, ModelKind::GradientBoosting, ModelKind::Knn]
                .into_iter()
                .map(ModelSpec::default_for)
                .collect(),
            folds: 5,
        }
    }
}

/// A model configuration that can be fitted.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Ols,
    ElasticNet(ElasticNetConfig),
    Knn { k: usize },
    Svr(SvrConfig),
    Forest(ForestConfig),
    Bagging(ForestConfig),
    Boost(BoostConfig),
    Stacking(StackingConfig),
    Mlp { hidden: usize, activation: Activation, train: TrainConfig },
    /// Predicts the training mean; a baseline and test double.
    Mean,
}

fn parse<T: std::str::FromStr>(param: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for {param}")))
}

fn parse_opt(param: &str, value: &str) -> Result<Option<usize>> {
    match value.trim() {
        "none" | "None" | "" => Ok(None),
        v => parse(param, v).map(Some),
    }
}

impl ModelSpec {
    pub fn default_for(kind: ModelKind) -> Self {
        let mlp = |hidden, activation| ModelSpec::Mlp {
            hidden,
            activation,
            train: TrainConfig::default(),
        };
        match kind {
            ModelKind::Ols => ModelSpec::Ols,
            ModelKind::RandomForest => ModelSpec::Forest(ForestConfig::default()),
            ModelKind::GradientBoosting => ModelSpec::Boost(BoostConfig::classic()),
            ModelKind::Svr => ModelSpec::Svr(SvrConfig::default()),
            ModelKind::Knn => ModelSpec::Knn { k: 5 },
            ModelKind::ElasticNet => ModelSpec::ElasticNet(ElasticNetConfig::default()),
            ModelKind::SecondOrderBoost => ModelSpec::Boost(BoostConfig::second_order()),
            ModelKind::HistogramBoost => ModelSpec::Boost(BoostConfig::histogram()),
            ModelKind::Bagging => ModelSpec::Bagging(ForestConfig::bagging(10)),
            ModelKind::Stacking => ModelSpec::Stacking(StackingConfig::default()),
            ModelKind::MlpTanh => mlp(150, Activation::Tanh),
            ModelKind::MlpRelu => mlp(100, Activation::Relu),
        }
    }

    /// Applies one `param=value` override.
    pub fn set(&mut self, param: &str, value: &str) -> Result<()> {
        let unknown = || Error::Config(format!("unknown parameter '{param}'"));
        match self {
            ModelSpec::Ols | ModelSpec::Mean => return Err(unknown()),
            ModelSpec::ElasticNet(c) => match param {
                "lambda" | "alpha" => c.lambda = parse(param, value)?,
                "l1_ratio" => c.l1_ratio = parse(param, value)?,
                "tol" => c.tol = parse(param, value)?,
                "max_iter" => c.max_iter = parse(param, value)?,
                _ => return Err(unknown()),
            },
            ModelSpec::Knn { k } => match param {
                "k" | "n_neighbors" => *k = parse(param, value)?,
                _ => return Err(unknown()),
            },
            ModelSpec::Svr(c) => match param {
                "c" | "C" => c.c = parse(param, value)?,
                "epsilon" => c.epsilon = parse(param, value)?,
                "tol" => c.tol = parse(param, value)?,
                "max_passes" => c.max_passes = parse(param, value)?,
                "gamma" => c.kernel = Some(Kernel::Rbf { gamma: parse(param, value)? }),
                "kernel" => {
                    c.kernel = match value.trim() {
                        "linear" => Some(Kernel::Linear),
                        "rbf" => None,
                        _ => return Err(Error::Config(format!("unknown kernel '{value}'"))),
                    }
                }
                _ => return Err(unknown()),
            },
            ModelSpec::Forest(c) | ModelSpec::Bagging(c) => match param {
                "n_trees" | "n_estimators" => c.n_trees = parse(param, value)?,
                "max_features" => c.max_features = parse_opt(param, value)?,
                "max_depth" => c.max_depth = parse_opt(param, value)?,
                "min_samples_leaf" => c.min_samples_leaf = parse(param, value)?,
                "bootstrap" => c.bootstrap = parse(param, value)?,
                _ => return Err(unknown()),
            },
            ModelSpec::Boost(c) => match param {
                "n_rounds" | "n_estimators" => c.n_rounds = parse(param, value)?,
                "learning_rate" => c.learning_rate = parse(param, value)?,
                "max_depth" => c.max_depth = parse_opt(param, value)?,
                "min_samples_leaf" => c.min_samples_leaf = parse(param, value)?,
                "lambda" => c.lambda = parse(param, value)?,
                "n_bins" => c.n_bins = parse(param, value)?,
                "max_leaves" => c.max_leaves = parse(param, value)?,
                _ => return Err(unknown()),
            },
            ModelSpec::Stacking(c) => match param {
                "folds" => c.folds = parse(param, value)?,
                "bases" => {
                    c.bases = value
                        .split('+')
                        .map(|k| ModelKind::from_key(k.trim()).map(ModelSpec::default_for))
                        .collect::<Result<_>>()?
                }
                _ => return Err(unknown()),
            },
            ModelSpec::Mlp { hidden, activation, train } => match param {
                "hidden" => *hidden = parse(param, value)?,
                "activation" => {
                    *activation = match value.trim() {
                        "tanh" => Activation::Tanh,
                        "relu" => Activation::Relu,
                        _ => return Err(Error::Config(format!("unknown activation '{value}'"))),
                    }
                }
                "epochs" => train.epochs = parse(param, value)?,
                "batch_size" => train.batch_size = parse(param, value)?,
                "learning_rate" => train.learning_rate = parse(param, value)?,
                _ => return Err(unknown()),
            },
        }
        Ok(())
    }

    pub fn fit(&self, x: &Matrix, y: &[f64], seed: u64) -> Result<TrainedModel> {
        Ok(match self {
            ModelSpec::Ols => TrainedModel::Linear(fit_ols(x, y)?),
            ModelSpec::ElasticNet(c) => TrainedModel::Linear(fit_elastic_net(x, y, c)?),
            ModelSpec::Knn { k } => TrainedModel::Knn(fit_knn(x, y, *k)?),
            ModelSpec::Svr(c) => TrainedModel::Svr(fit_svr(x, y, c)?),
            ModelSpec::Forest(c) => TrainedModel::Forest(fit_random_forest(x, y, c, seed)?),
            ModelSpec::Bagging(c) => TrainedModel::Forest(fit_bagging(x, y, c.n_trees, c, seed)?),
            ModelSpec::Boost(c) => TrainedModel::Boosted(fit_boosted(x, y, c)?),
            ModelSpec::Stacking(c) => TrainedModel::Stacking(Box::new(fit_stacking(x, y, c, seed)?)),
            ModelSpec::Mlp { hidden, activation, train } => {
                let mut m = init_mlp(x.cols(), *hidden, *activation, seed)?;
                train_mlp(&mut m, x, y, train)?;
                TrainedModel::Mlp(m)
            }
            ModelSpec::Mean => {
                if y.is_empty() || x.rows() != y.len() {
                    return Err(Error::Fit("mean model needs matching, nonempty X and y".into()));
                }
                TrainedModel::Mean {
                    value: y.iter().sum::<f64>() / y.len() as f64,
                    n_features: x.cols(),
                }
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Linear(LinearModel),
    Knn(KnnModel),
    Svr(SvrModel),
    Forest(ForestModel),
    Boosted(BoostedModel),
    Stacking(Box<StackingModel>),
    Mlp(MlpModel),
    Mean { value: f64, n_features: usize },
}

impl TrainedModel {
    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        match self {
            TrainedModel::Linear(m) => m.predict(x),
            TrainedModel::Knn(m) => m.predict(x),
            TrainedModel::Svr(m) => m.predict(x),
            TrainedModel::Forest(m) => m.predict(x),
            TrainedModel::Boosted(m) => m.predict(x),
            TrainedModel::Stacking(m) => m.predict(x),
            TrainedModel::Mlp(m) => m.predict(x),
            TrainedModel::Mean { value, n_features } => {
                if x.cols() != *n_features {
                    return Err(Error::Predict {
                        expected: *n_features,
                        got: x.cols(),
                    });
                }
                Ok(vec![*value; x.rows()])
            }
        }
    }
}

/// Base models combined by an OLS meta-regressor on out-of-fold predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct StackingModel {
    /// Base models refitted on all training rows.
    pub bases: Vec<TrainedModel>,
    pub meta: LinearModel,
    pub folds: usize,
    /// Fold of each training row.
    pub fold_of_row: Vec<usize>,
    /// `n × m` out-of-fold predictions the meta model was fitted on.
    pub out_of_fold: Matrix,
    /// Rows each fold model was trained on, indexed by fold.
    pub fold_train_rows: Vec<Vec<usize>>,
}

/// Seeded K-fold assignment: a shuffled row order dealt round-robin.
pub fn fold_assignment(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold = vec![0; n];
    for (pos, &row) in order.iter().enumerate() {
        fold[row] = pos % k;
    }
    fold
}

pub fn fit_stacking(x: &Matrix, y: &[f64], cfg: &StackingConfig, seed: u64) -> Result<StackingModel> {
    let n = x.rows();
    let (k, m) = (cfg.folds, cfg.bases.len());
    if k < 2 || m < 2 {
        return Err(Error::Fit(format!("stacking needs ≥ 2 folds and ≥ 2 bases, got {k} and {m}")));
    }
    if n != y.len() || n < k {
        return Err(Error::Fit(format!("stacking needs at least {k} rows matching y")));
    }
    let fold_of_row = fold_assignment(n, k, derive_seed(seed, 0));
    let base_seeds: Vec<u64> = (0..m).map(|b| derive_seed(seed, 1 + b as u64)).collect();
    let mut out_of_fold = Matrix::zeros(n, m);
    let mut fold_train_rows = Vec::with_capacity(k);
    for f in 0..k {
        let (train, held): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| fold_of_row[i] != f);
        let xt = x.select_rows(&train);
        let yt: Vec<f64> = train.iter().map(|&i| y[i]).collect();
        let xh = x.select_rows(&held);
        for (b, spec) in cfg.bases.iter().enumerate() {
            let pred = spec.fit(&xt, &yt, base_seeds[b])?.predict(&xh)?;
            for (&i, p) in held.iter().zip(pred) {
                out_of_fold.set(i, b, p);
            }
        }
        fold_train_rows.push(train);
    }
    let meta = fit_ols(&out_of_fold, y)?;
    let bases = cfg
        .bases
        .iter()
        .zip(&base_seeds)
        .map(|(spec, &s)| spec.fit(x, y, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(StackingModel {
        bases,
        meta,
        folds: k,
        fold_of_row,
        out_of_fold,
        fold_train_rows,
    })
}

impl StackingModel {
    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        let cols = self.bases.iter().map(|b| b.predict(x)).collect::<Result<Vec<_>>>()?;
        self.meta.predict(&Matrix::from_columns(&cols)?)
    }
}
