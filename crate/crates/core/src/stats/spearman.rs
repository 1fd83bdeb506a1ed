use crate::dataset::TimeSeriesTable;
use crate::error::{Error, Result};

/// 1-based ranks with ties assigned the average of the positions they span.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // Positions i..j (0-based) share rank ((i+1) + j) / 2.
        let r = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rho: Pearson correlation of mid-ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Stat(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Stat("need at least 2 observations".into()));
    }
    pearson(&mid_ranks(x), &mid_ranks(y)).ok_or_else(|| Error::Stat("zero rank variance".into()))
}

/// Symmetric matrix of pairwise Spearman coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    /// Row-major `labels.len()²` entries.
    pub values: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.labels.len() + j]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("variable");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(l);
            for j in 0..self.labels.len() {
                out.push_str(&format!(",{:.6}", self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }
}

/// Spearman matrix over the given columns of plain vectors.
pub fn correlation_matrix_of(labels: &[String], columns: &[Vec<f64>]) -> Result<CorrelationMatrix> {
    let k = columns.len();
    if k < 2 {
        return Err(Error::Stat("need at least 2 columns".into()));
    }
    let ranks: Vec<Vec<f64>> = columns.iter().map(|c| mid_ranks(c)).collect();
    let mut values = vec![0.0; k * k];
    for i in 0..k {
        values[i * k + i] = 1.0;
        for j in i + 1..k {
            if columns[i].len() != columns[j].len() {
                return Err(Error::Stat("columns differ in length".into()));
            }
            let r = pearson(&ranks[i], &ranks[j]).ok_or_else(|| {
                Error::Stat(format!("zero rank variance in {} or {}", labels[i], labels[j]))
            })?;
            values[i * k + j] = r;
            values[j * k + i] = r;
        }
    }
    Ok(CorrelationMatrix {
        labels: labels.to_vec(),
        values,
    })
}

/// Spearman matrix over named columns of a gap-free table.
pub fn correlation_matrix(table: &TimeSeriesTable, columns: &[&str]) -> Result<CorrelationMatrix> {
    let labels: Vec<String> = columns.iter().map(|s| s.to_string()).collect();
    let data = columns
        .iter()
        .map(|c| table.values(c))
        .collect::<Result<Vec<_>>>()?;
    correlation_matrix_of(&labels, &data)
}
