use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{grow_with, Growth, RegressionTree, Splitter, TreeConfig};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Features tried per split; `None` means `⌈p/3⌉`.
    pub max_features: Option<usize>,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Draw `n` rows with replacement per tree.
    pub bootstrap: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 200,
            max_features: None,
            max_depth: None,
            min_samples_leaf: 2,
            bootstrap: true,
        }
    }
}

impl ForestConfig {
    /// Bagged trees: every feature is considered at each split.
    pub fn bagging(n_estimators: usize) -> Self {
        Self {
            n_trees: n_estimators,
            max_features: Some(usize::MAX),
            ..Self::default()
        }
    }

    pub fn mtry(&self, p: usize) -> usize {
        self.max_features.unwrap_or(p.div_ceil(3)).clamp(1, p.max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<RegressionTree>,
    pub seeds: Vec<u64>,
    pub mtry: usize,
    /// Mean-decrease-in-impurity importances, normalized to sum 1
    /// (all zero when no tree split).
    pub importances: Vec<f64>,
}

/// Random forest of CART trees.
///
/// Per-tree seeds are drawn from the master seed before any tree is grown,
/// so the result does not depend on how trees are scheduled across threads.
pub fn fit_random_forest(x: &Matrix, y: &[f64], cfg: &ForestConfig, seed: u64) -> Result<ForestModel> {
    let (n, p) = (x.rows(), x.cols());
    if cfg.n_trees == 0 {
        return Err(Error::Fit("forest needs at least one tree".into()));
    }
    if n == 0 || n != y.len() {
        return Err(Error::Fit("forest needs matching, nonempty X and y".into()));
    }
    let mtry = cfg.mtry(p);
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..cfg.n_trees).map(|_| master.next_u64()).collect();
    let tree_cfg = TreeConfig {
        max_depth: cfg.max_depth,
        min_samples_leaf: cfg.min_samples_leaf,
        max_features: Some(mtry),
        lambda: 0.0,
        growth: Growth::DepthFirst,
    };
    let grad: Vec<f64> = y.iter().map(|v| -v).collect();
    let hess = vec![1.0; n];

    let trees: Vec<RegressionTree> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let rows: Vec<usize> = if cfg.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grow_with(x, rows, &grad, &hess, &tree_cfg, Splitter::Exact, Some(&mut rng))
        })
        .collect();

    let mut importances = vec![0.0; p];
    for t in &trees {
        let g = t.gain_by_feature();
        let total: f64 = g.iter().sum();
        if total > 0.0 {
            for (acc, v) in importances.iter_mut().zip(&g) {
                *acc += v / total;
            }
        }
    }
    let total: f64 = importances.iter().sum();
    if total > 0.0 {
        importances.iter_mut().for_each(|v| *v /= total);
    }
    Ok(ForestModel {
        trees,
        seeds,
        mtry,
        importances,
    })
}

/// Bootstrap-aggregated CART trees (a forest without feature subsampling).
pub fn fit_bagging(
    x: &Matrix,
    y: &[f64],
    n_estimators: usize,
    base: &ForestConfig,
    seed: u64,
) -> Result<ForestModel> {
    let cfg = ForestConfig {
        n_trees: n_estimators,
        max_features: Some(x.cols()),
        ..base.clone()
    };
    fit_random_forest(x, y, &cfg, seed)
}

impl ForestModel {
    /// Mean of the member trees.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        let p = self.trees.first().map_or(0, RegressionTree::n_features);
        if x.cols() != p {
            return Err(Error::Predict {
                expected: p,
                got: x.cols(),
            });
        }
        let k = self.trees.len() as f64;
        Ok((0..x.rows())
            .into_par_iter()
            .map(|i| {
                let r = x.row(i);
                self.trees.iter().map(|t| t.predict_one(r)).sum::<f64>() / k
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::super::grow_tree;
    use super::*;

    fn data(seed: u64) -> (Matrix, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<[f64; 3]> = (0..80)
            .map(|_| [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)])
            .collect();
        let y = rows.iter().map(|r| 3.0 * r[0] + 0.2 * rng.random_range(-1.0..1.0)).collect();
        (Matrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn degenerate_forest_is_a_tree() {
        let (x, y) = data(1);
        let cfg = ForestConfig {
            n_trees: 1,
            max_features: Some(3),
            bootstrap: false,
            min_samples_leaf: 2,
            ..Default::default()
        };
        let f = fit_random_forest(&x, &y, &cfg, 5).unwrap();
        let t = grow_tree(&x, &y, &TreeConfig { min_samples_leaf: 2, ..Default::default() });
        assert_eq!(f.trees[0], t);
    }

    #[test]
    fn same_seed_same_forest() {
        let (x, y) = data(2);
        let cfg = ForestConfig { n_trees: 20, ..Default::default() };
        assert_eq!(
            fit_random_forest(&x, &y, &cfg, 9).unwrap(),
            fit_random_forest(&x, &y, &cfg, 9).unwrap()
        );
    }

    #[test]
    fn importances_are_normalized() {
        let (x, y) = data(3);
        let f = fit_random_forest(&x, &y, &ForestConfig { n_trees: 30, ..Default::default() }, 1).unwrap();
        assert!((f.importances.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(f.importances.iter().all(|&v| v >= 0.0));
        assert!(f.importances[0] > f.importances[1] && f.importances[0] > f.importances[2]);
    }

    #[test]
    fn constant_target_has_zero_importances() {
        let (x, _) = data(4);
        let f = fit_random_forest(&x, &vec![1.0; 80], &ForestConfig { n_trees: 5, ..Default::default() }, 1).unwrap();
        assert!(f.importances.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bagging_equals_full_mtry_forest() {
        let (x, y) = data(5);
        let base = ForestConfig::default();
        let b = fit_bagging(&x, &y, 7, &base, 3).unwrap();
        let f = fit_random_forest(&x, &y, &ForestConfig { n_trees: 7, max_features: Some(3), ..base }, 3).unwrap();
        assert_eq!(b, f);
        let pred = b.predict(&x).unwrap();
        let manual: Vec<f64> = (0..x.rows())
            .map(|i| b.trees.iter().map(|t| t.predict_one(x.row(i))).sum::<f64>() / 7.0)
            .collect();
        assert_eq!(pred, manual);
    }
}
