//! Descriptive statistics, the Shapiro-Wilk normality test and Spearman
//! rank correlation.

mod shapiro;
mod spearman;

pub use shapiro::{shapiro_wilk, ShapiroWilk};
pub use spearman::{correlation_matrix, correlation_matrix_of, mid_ranks, spearman, CorrelationMatrix};

use crate::error::{Error, Result};

/// One row of the descriptive-statistics table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    /// Sample standard deviation (n − 1 denominator).
    pub sd: f64,
    /// g₁ = m₃ / m₂^{3/2}
    pub skewness: f64,
    /// Excess kurtosis g₂ = m₄ / m₂² − 3
    pub kurtosis: f64,
    pub shapiro: Option<ShapiroWilk>,
}

/// Moments of a sample; the biased central moments feed skewness and
/// kurtosis. Both are `NaN` for a constant sample.
pub fn summary_stats(values: &[f64]) -> Result<SummaryRow> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Stat(format!("need at least 2 values, got {n}")));
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let sd = (m2 / (nf - 1.0)).sqrt();
    let (m2, m3, m4) = (m2 / nf, m3 / nf, m4 / nf);
    let (skewness, kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (f64::NAN, f64::NAN)
    };
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SummaryRow {
        min,
        mean: mean.clamp(min, max),
        max,
        sd,
        skewness,
        kurtosis,
        shapiro: None,
    })
}

/// Summary statistics plus the Shapiro-Wilk test.
pub fn describe(values: &[f64]) -> Result<SummaryRow> {
    let mut row = summary_stats(values)?;
    row.shapiro = Some(shapiro_wilk(values)?);
    Ok(row)
}
