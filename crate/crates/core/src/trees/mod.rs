//! Regression trees and the tree ensembles built on them.
//!
//! A single growth engine scores splits on per-row gradient/hessian sums.
//! Plain CART is the special case `g = −y`, `h = 1`, `λ = 0`, where the
//! score reduces to variance (SSE) reduction and leaf values to means.

mod boost;
mod forest;
mod split;

pub use boost::{fit_boosted, BoostConfig, BoostVariant, BoostedModel};
pub use forest::{fit_bagging, fit_random_forest, ForestConfig, ForestModel};
pub use split::{BinnedData, SplitCandidate};

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use split::Stats;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Growth {
    /// Recursive depth-first growth bounded by `max_depth`.
    DepthFirst,
    /// Repeatedly split the leaf with the largest gain until `max_leaves`.
    LeafWise { max_leaves: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeConfig {
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Features sampled per split; `None` uses all.
    pub max_features: Option<usize>,
    /// L2 regularization on leaf weights.
    pub lambda: f64,
    pub growth: Growth,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_samples_leaf: 1,
            max_features: None,
            lambda: 0.0,
            growth: Growth::DepthFirst,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        gain: f64,
        n_samples: usize,
    },
    Leaf {
        value: f64,
        n_samples: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    nodes: Vec<Node>,
    n_features: usize,
    depth: usize,
}

impl RegressionTree {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    /// Index of the leaf reached by `x`.
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn predict_one(&self, x: &[f64]) -> f64 {
        match self.nodes[self.leaf_index(x)] {
            Node::Leaf { value, .. } => value,
            Node::Split { .. } => unreachable!(),
        }
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() != self.n_features {
            return Err(Error::Predict {
                expected: self.n_features,
                got: x.cols(),
            });
        }
        Ok(x.iter_rows().map(|r| self.predict_one(r)).collect())
    }

    /// Per-feature sum of split gains.
    pub fn gain_by_feature(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_features];
        for n in &self.nodes {
            if let Node::Split { feature, gain, .. } = n {
                out[*feature] += gain;
            }
        }
        out
    }
}

/// Exact CART split for `targets` over all features (variance reduction).
pub fn best_split(
    x: &Matrix,
    rows: &[usize],
    targets: &[f64],
    min_samples_leaf: usize,
) -> Option<SplitCandidate> {
    let grad: Vec<f64> = targets.iter().map(|v| -v).collect();
    let hess = vec![1.0; targets.len()];
    let stats = Stats {
        grad: &grad,
        hess: &hess,
        lambda: 0.0,
    };
    let features: Vec<usize> = (0..x.cols()).collect();
    split::exact_split(x, rows, &stats, min_samples_leaf, &features)
}

/// Where candidate splits come from.
#[derive(Clone, Copy)]
pub(crate) enum Splitter<'a> {
    Exact,
    Histogram(&'a BinnedData),
}

struct Grower<'a, R: Rng> {
    x: &'a Matrix,
    stats: Stats<'a>,
    cfg: &'a TreeConfig,
    splitter: Splitter<'a>,
    rng: Option<&'a mut R>,
    nodes: Vec<Node>,
    depth: usize,
}

impl<R: Rng> Grower<'_, R> {
    fn features(&mut self) -> Vec<usize> {
        let p = self.x.cols();
        match (self.cfg.max_features, self.rng.as_deref_mut()) {
            (Some(m), Some(rng)) if m < p => {
                let mut f = index::sample(rng, p, m.max(1)).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..p).collect(),
        }
    }

    fn find(&mut self, rows: &[usize], depth: usize) -> Option<SplitCandidate> {
        if self.cfg.max_depth.is_some_and(|d| depth >= d) {
            return None;
        }
        let features = self.features();
        match self.splitter {
            Splitter::Exact => {
                split::exact_split(self.x, rows, &self.stats, self.cfg.min_samples_leaf, &features)
            }
            Splitter::Histogram(b) => {
                split::histogram_split(b, rows, &self.stats, self.cfg.min_samples_leaf, &features)
            }
        }
    }

    fn leaf(&self, rows: &[usize]) -> Node {
        Node::Leaf {
            value: self.stats.leaf_value(rows),
            n_samples: rows.len(),
        }
    }

    fn partition(&self, rows: &[usize], s: &SplitCandidate) -> (Vec<usize>, Vec<usize>) {
        rows.iter()
            .partition(|&&r| self.x.get(r, s.feature) <= s.threshold)
    }

    fn grow_depth_first(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        self.depth = self.depth.max(depth);
        let leaf = self.leaf(&rows);
        self.nodes.push(leaf);
        if let Some(s) = self.find(&rows, depth) {
            let n_samples = rows.len();
            let (l, r) = self.partition(&rows, &s);
            drop(rows);
            let left = self.grow_depth_first(l, depth + 1);
            let right = self.grow_depth_first(r, depth + 1);
            self.nodes[id] = Node::Split {
                feature: s.feature,
                threshold: s.threshold,
                left,
                right,
                gain: s.gain,
                n_samples,
            };
        }
        id
    }

    fn grow_leaf_wise(&mut self, rows: Vec<usize>, max_leaves: usize) {
        struct Open {
            node: usize,
            rows: Vec<usize>,
            depth: usize,
            split: Option<SplitCandidate>,
        }
        let leaf = self.leaf(&rows);
        self.nodes.push(leaf);
        let split = self.find(&rows, 0);
        let mut open = vec![Open {
            node: 0,
            rows,
            depth: 0,
            split,
        }];
        let mut n_leaves = 1;
        while n_leaves < max_leaves.max(1) {
            // Largest gain first; ties go to the earliest-created node.
            let pick = open
                .iter()
                .enumerate()
                .filter_map(|(k, o)| o.split.map(|s| (k, o.node, s.gain)))
                .max_by(|a, b| a.2.total_cmp(&b.2).then(b.1.cmp(&a.1)));
            let Some((k, _, _)) = pick else { break };
            let o = open.swap_remove(k);
            let s = o.split.expect("filtered above");
            let (l, r) = self.partition(&o.rows, &s);
            let depth = o.depth + 1;
            self.depth = self.depth.max(depth);
            let (left, right) = (self.nodes.len(), self.nodes.len() + 1);
            let (ll, rl) = (self.leaf(&l), self.leaf(&r));
            self.nodes.push(ll);
            self.nodes.push(rl);
            self.nodes[o.node] = Node::Split {
                feature: s.feature,
                threshold: s.threshold,
                left,
                right,
                gain: s.gain,
                n_samples: o.rows.len(),
            };
            n_leaves += 1;
            for (node, rows) in [(left, l), (right, r)] {
                let split = self.find(&rows, depth);
                open.push(Open {
                    node,
                    rows,
                    depth,
                    split,
                });
            }
        }
    }
}

pub(crate) fn grow_with<R: Rng>(
    x: &Matrix,
    rows: Vec<usize>,
    grad: &[f64],
    hess: &[f64],
    cfg: &TreeConfig,
    splitter: Splitter,
    rng: Option<&mut R>,
) -> RegressionTree {
    let mut g = Grower {
        x,
        stats: Stats {
            grad,
            hess,
            lambda: cfg.lambda,
        },
        cfg,
        splitter,
        rng,
        nodes: Vec::new(),
        depth: 0,
    };
    match cfg.growth {
        Growth::DepthFirst => {
            g.grow_depth_first(rows, 0);
        }
        Growth::LeafWise { max_leaves } => g.grow_leaf_wise(rows, max_leaves),
    }
    RegressionTree {
        nodes: g.nodes,
        n_features: x.cols(),
        depth: g.depth,
    }
}

/// CART tree on `targets` using every feature at each split.
pub fn grow_tree(x: &Matrix, targets: &[f64], cfg: &TreeConfig) -> RegressionTree {
    let grad: Vec<f64> = targets.iter().map(|v| -v).collect();
    let hess = vec![1.0; targets.len()];
    let cfg = TreeConfig {
        lambda: 0.0,
        ..cfg.clone()
    };
    grow_with::<rand_chacha::ChaCha8Rng>(
        x,
        (0..x.rows()).collect(),
        &grad,
        &hess,
        &cfg,
        Splitter::Exact,
        None,
    )
}

/// Tree on gradient/hessian statistics; leaves take `−G/(H+λ)`.
pub fn grow_tree_second_order(x: &Matrix, grad: &[f64], hess: &[f64], cfg: &TreeConfig) -> RegressionTree {
    grow_with::<rand_chacha::ChaCha8Rng>(
        x,
        (0..x.rows()).collect(),
        grad,
        hess,
        cfg,
        Splitter::Exact,
        None,
    )
}
