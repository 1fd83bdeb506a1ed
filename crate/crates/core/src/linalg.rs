//! Dense row-major matrix and a least-squares solver built on
//! column-pivoted Householder QR.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Schema(format!(
                "matrix data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Schema(format!(
                    "row {i} has {} values, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix from equal-length columns.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, |c| c.as_ref().len());
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            let c = c.as_ref();
            if c.len() != rows {
                return Err(Error::Schema(format!(
                    "column {j} has {} values, expected {rows}",
                    c.len()
                )));
            }
            for (i, &v) in c.iter().enumerate() {
                m.data[i * cols + j] = v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            let src = self.row(i);
            for (k, &j) in idx.iter().enumerate() {
                m.data[i * idx.len() + k] = src[j];
            }
        }
        m
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::Schema(format!(
                "cannot stack {} rows beside {} rows",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(Matrix {
            rows: self.rows,
            cols,
            data,
        })
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        self.iter_rows().map(|r| dot(r, v)).collect()
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Householder reflectors stored column-wise, `R` in the upper triangle.
struct HouseholderQr {
    /// Column-major working copy; column `k` holds `v_k` below the diagonal.
    cols: Vec<Vec<f64>>,
    /// Reflector vectors `v_k` (full length `m - k`).
    reflectors: Vec<(Vec<f64>, f64)>,
    diag: Vec<f64>,
    perm: Vec<usize>,
}

fn householder_qr(mut cols: Vec<Vec<f64>>, pivot: bool) -> HouseholderQr {
    let n = cols.len();
    let m = cols.first().map_or(0, Vec::len);
    let steps = m.min(n);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut reflectors = Vec::with_capacity(steps);
    let mut diag = Vec::with_capacity(steps);

    for k in 0..steps {
        if pivot {
            // Exact partial norms each step: O(mn) per step, same order as the update.
            let mut best = k;
            let mut best_norm = -1.0;
            for (j, c) in cols.iter().enumerate().skip(k) {
                let s: f64 = c[k..].iter().map(|v| v * v).sum();
                if s > best_norm {
                    best_norm = s;
                    best = j;
                }
            }
            cols.swap(k, best);
            perm.swap(k, best);
        }

        let x = &cols[k][k..];
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            reflectors.push((vec![0.0; m - k], 0.0));
            diag.push(0.0);
            continue;
        }
        let alpha = if x[0] >= 0.0 { -norm } else { norm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|a| a * a).sum();
        let beta = if vtv > 0.0 { 2.0 / vtv } else { 0.0 };

        for c in cols.iter_mut().skip(k + 1) {
            let s = beta * dot(&v, &c[k..]);
            for (ci, vi) in c[k..].iter_mut().zip(&v) {
                *ci -= s * vi;
            }
        }
        cols[k][k] = alpha;
        for ci in cols[k][k + 1..].iter_mut() {
            *ci = 0.0;
        }
        diag.push(alpha);
        reflectors.push((v, beta));
    }

    HouseholderQr {
        cols,
        reflectors,
        diag,
        perm,
    }
}

impl HouseholderQr {
    /// Applies `Qᵀ` to `b` in place.
    fn apply_qt(&self, b: &mut [f64]) {
        for (k, (v, beta)) in self.reflectors.iter().enumerate() {
            if *beta == 0.0 {
                continue;
            }
            let s = beta * dot(v, &b[k..]);
            for (bi, vi) in b[k..].iter_mut().zip(v) {
                *bi -= s * vi;
            }
        }
    }

    /// Applies `Q` to `b` in place.
    fn apply_q(&self, b: &mut [f64]) {
        for (k, (v, beta)) in self.reflectors.iter().enumerate().rev() {
            if *beta == 0.0 {
                continue;
            }
            let s = beta * dot(v, &b[k..]);
            for (bi, vi) in b[k..].iter_mut().zip(v) {
                *bi -= s * vi;
            }
        }
    }

    fn r(&self, i: usize, j: usize) -> f64 {
        self.cols[j][i]
    }

    fn rank(&self, rows: usize) -> usize {
        let top = self.diag.first().map_or(0.0, |d| d.abs());
        if top == 0.0 {
            return 0;
        }
        let tol = rows.max(self.cols.len()) as f64 * f64::EPSILON * top;
        self.diag.iter().take_while(|d| d.abs() > tol).count()
    }
}

/// Result of [`lstsq`].
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub solution: Vec<f64>,
    pub rank: usize,
}

/// Minimum-norm least-squares solution of `A x ≈ b`.
///
/// Column-pivoted QR determines the numerical rank `r`; when `r < n` the
/// trapezoidal factor `[R11 R12]` is reduced by a second QR of its transpose
/// (complete orthogonal decomposition), which yields the minimum-norm solution.
pub fn lstsq(a: &Matrix, b: &[f64]) -> Result<LeastSquares> {
    let (m, n) = (a.rows(), a.cols());
    if m == 0 || n == 0 {
        return Err(Error::Fit("empty design matrix".into()));
    }
    if b.len() != m {
        return Err(Error::Fit(format!(
            "right-hand side has {} entries, expected {m}",
            b.len()
        )));
    }
    let cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let qr = householder_qr(cols, true);
    let rank = qr.rank(m);
    let mut c = b.to_vec();
    qr.apply_qt(&mut c);

    let mut z = vec![0.0; n];
    if rank == n {
        back_substitute(|i, j| qr.r(i, j), &c[..n], &mut z);
    } else if rank > 0 {
        // T = R[0..r, 0..n]; factor Tᵀ (n×r) = Q2 R2, then T z = c  <=>  R2ᵀ u = c.
        let t_cols: Vec<Vec<f64>> = (0..rank)
            .map(|i| (0..n).map(|j| if j >= i { qr.r(i, j) } else { 0.0 }).collect())
            .collect();
        let qr2 = householder_qr(t_cols, false);
        let mut u = vec![0.0; n];
        for i in 0..rank {
            let mut s = c[i];
            for (k, uk) in u.iter().enumerate().take(i) {
                s -= qr2.r(k, i) * uk;
            }
            u[i] = s / qr2.r(i, i);
        }
        qr2.apply_q(&mut u);
        z = u;
    }

    let mut solution = vec![0.0; n];
    for (k, &p) in qr.perm.iter().enumerate() {
        solution[p] = z[k];
    }
    Ok(LeastSquares { solution, rank })
}

fn back_substitute(r: impl Fn(usize, usize) -> f64, c: &[f64], out: &mut [f64]) {
    let n = c.len();
    for i in (0..n).rev() {
        let mut s = c[i];
        for j in i + 1..n {
            s -= r(i, j) * out[j];
        }
        out[i] = s / r(i, i);
    }
}
