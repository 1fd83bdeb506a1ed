use crate::linalg::Matrix;

/// A candidate split: rows with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    /// `G_L²/(H_L+λ) + G_R²/(H_R+λ) − G²/(H+λ)`; with `g = −y`, `h = 1`,
    /// `λ = 0` this is the parent SSE minus the children's SSE.
    pub gain: f64,
}

#[inline]
pub(crate) fn midpoint(a: f64, b: f64) -> f64 {
    a + 0.5 * (b - a)
}

/// Per-row first/second order statistics a split is scored on.
pub(crate) struct Stats<'a> {
    pub grad: &'a [f64],
    pub hess: &'a [f64],
    pub lambda: f64,
}

impl Stats<'_> {
    pub fn totals(&self, rows: &[usize]) -> (f64, f64) {
        rows.iter()
            .fold((0.0, 0.0), |(g, h), &r| (g + self.grad[r], h + self.hess[r]))
    }

    #[inline]
    pub fn score(&self, g: f64, h: f64) -> f64 {
        let d = h + self.lambda;
        if d > 0.0 {
            g * g / d
        } else {
            0.0
        }
    }

    /// Smallest gain treated as real rather than rounding noise.
    pub fn gain_floor(&self, rows: &[usize]) -> f64 {
        let scale: f64 = rows
            .iter()
            .map(|&r| {
                let h = self.hess[r].max(f64::MIN_POSITIVE);
                self.grad[r] * self.grad[r] / h
            })
            .sum();
        1e-12 * scale.max(f64::MIN_POSITIVE)
    }

    pub fn leaf_value(&self, rows: &[usize]) -> f64 {
        let (g, h) = self.totals(rows);
        let d = h + self.lambda;
        if d > 0.0 {
            -g / d
        } else {
            0.0
        }
    }
}

/// Exact search: every midpoint between consecutive distinct values of each
/// listed feature. Features are scanned in the order given and thresholds in
/// ascending order; only a strictly larger gain replaces the incumbent.
pub(crate) fn exact_split(
    x: &Matrix,
    rows: &[usize],
    stats: &Stats,
    min_samples_leaf: usize,
    features: &[usize],
) -> Option<SplitCandidate> {
    let n = rows.len();
    let min_leaf = min_samples_leaf.max(1);
    if n < 2 * min_leaf {
        return None;
    }
    let (g_tot, h_tot) = stats.totals(rows);
    let parent = stats.score(g_tot, h_tot);
    let floor = stats.gain_floor(rows);
    let mut best: Option<SplitCandidate> = None;
    let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(n);
    for &f in features {
        sorted.clear();
        sorted.extend(rows.iter().map(|&r| (x.get(r, f), r)));
        sorted.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let (mut gl, mut hl) = (0.0, 0.0);
        for k in 0..n - 1 {
            let (v, r) = sorted[k];
            gl += stats.grad[r];
            hl += stats.hess[r];
            let left = k + 1;
            if left < min_leaf || n - left < min_leaf {
                continue;
            }
            let next = sorted[k + 1].0;
            if next == v {
                continue;
            }
            let gain = stats.score(gl, hl) + stats.score(g_tot - gl, h_tot - hl) - parent;
            if gain > floor && best.is_none_or(|b| gain > b.gain) {
                best = Some(SplitCandidate {
                    feature: f,
                    threshold: midpoint(v, next),
                    gain,
                });
            }
        }
    }
    best
}

/// Features quantized into at most `n_bins` bins per column.
#[derive(Debug, Clone)]
pub struct BinnedData {
    /// Ascending bin boundaries per feature; bin `b` holds values in
    /// `(edges[b-1], edges[b]]`.
    edges: Vec<Vec<f64>>,
    /// Row-major bin indices.
    bins: Vec<u16>,
    n_features: usize,
}

impl BinnedData {
    /// Quantile binning. A feature with at most `n_bins` distinct values gets
    /// one bin per value, so its boundaries coincide with the exact midpoints.
    pub fn new(x: &Matrix, n_bins: usize) -> Self {
        let n_bins = n_bins.clamp(2, u16::MAX as usize);
        let (n, p) = (x.rows(), x.cols());
        let mut edges = Vec::with_capacity(p);
        for f in 0..p {
            let mut v = x.column(f);
            v.sort_unstable_by(f64::total_cmp);
            let mut distinct: Vec<(f64, usize)> = Vec::new();
            for &a in &v {
                match distinct.last_mut() {
                    Some((b, c)) if *b == a => *c += 1,
                    _ => distinct.push((a, 1)),
                }
            }
            let mut e = Vec::new();
            if distinct.len() <= n_bins {
                e.extend(distinct.windows(2).map(|w| midpoint(w[0].0, w[1].0)));
            } else {
                let mut cum = 0usize;
                let mut k = 1;
                for i in 0..distinct.len() - 1 {
                    cum += distinct[i].1;
                    // Cut after the distinct value where the k-th quantile is reached.
                    if k < n_bins && cum * n_bins >= k * n {
                        e.push(midpoint(distinct[i].0, distinct[i + 1].0));
                        while k < n_bins && cum * n_bins >= k * n {
                            k += 1;
                        }
                    }
                }
            }
            edges.push(e);
        }
        let mut bins = vec![0u16; n * p];
        for i in 0..n {
            for (f, e) in edges.iter().enumerate() {
                bins[i * p + f] = Self::bin_of(e, x.get(i, f));
            }
        }
        Self {
            edges,
            bins,
            n_features: p,
        }
    }

    #[inline]
    fn bin_of(edges: &[f64], v: f64) -> u16 {
        edges.partition_point(|&e| e < v) as u16
    }

    pub fn edges(&self, feature: usize) -> &[f64] {
        &self.edges[feature]
    }

    #[inline]
    pub fn bin(&self, row: usize, feature: usize) -> usize {
        self.bins[row * self.n_features + feature] as usize
    }
}

/// Histogram search: candidates are the bin boundaries only.
pub(crate) fn histogram_split(
    binned: &BinnedData,
    rows: &[usize],
    stats: &Stats,
    min_samples_leaf: usize,
    features: &[usize],
) -> Option<SplitCandidate> {
    let n = rows.len();
    let min_leaf = min_samples_leaf.max(1);
    if n < 2 * min_leaf {
        return None;
    }
    let (g_tot, h_tot) = stats.totals(rows);
    let parent = stats.score(g_tot, h_tot);
    let floor = stats.gain_floor(rows);
    let mut best: Option<SplitCandidate> = None;
    for &f in features {
        let edges = binned.edges(f);
        let nb = edges.len() + 1;
        if nb < 2 {
            continue;
        }
        let mut hg = vec![0.0; nb];
        let mut hh = vec![0.0; nb];
        let mut hc = vec![0usize; nb];
        for &r in rows {
            let b = binned.bin(r, f);
            hg[b] += stats.grad[r];
            hh[b] += stats.hess[r];
            hc[b] += 1;
        }
        let (mut gl, mut hl, mut cl) = (0.0, 0.0, 0usize);
        for b in 0..nb - 1 {
            gl += hg[b];
            hl += hh[b];
            cl += hc[b];
            if hc[b] == 0 && b > 0 {
                // Same partition as the previous boundary; keep the lower one.
                continue;
            }
            if cl < min_leaf || n - cl < min_leaf {
                continue;
            }
            let gain = stats.score(gl, hl) + stats.score(g_tot - gl, h_tot - hl) - parent;
            if gain > floor && best.is_none_or(|c| gain > c.gain) {
                best = Some(SplitCandidate {
                    feature: f,
                    threshold: edges[b],
                    gain,
                });
            }
        }
    }
    best
}
