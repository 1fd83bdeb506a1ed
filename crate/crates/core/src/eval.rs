//! Metrics, the benchmark runner and its report.

use std::fmt::Write as _;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::dataset::{Split, TimeSeriesTable};
use crate::error::{Error, Result};
use crate::features::{build_approach, Approach, ApproachSpec};
use crate::models::{derive_seed, ModelKind, ModelSpec};

fn check_lengths(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.len() != predicted.len() || actual.is_empty() {
        return Err(Error::Metric(format!(
            "need equal nonzero lengths, got {} and {}",
            actual.len(),
            predicted.len()
        )));
    }
    Ok(())
}

/// Mean squared error.
pub fn mse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(actual, predicted)?;
    Ok(actual.iter().zip(predicted).map(|(a, p)| (a - p).powi(2)).sum::<f64>() / actual.len() as f64)
}

/// Coefficient of determination `1 − SS_res / SS_tot`.
pub fn r2(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(actual, predicted)?;
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let ss_tot: f64 = actual.iter().map(|a| (a - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::Metric("actual values have zero variance".into()));
    }
    let ss_res: f64 = actual.iter().zip(predicted).map(|(a, p)| (a - p).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowOutcome {
    Scored { mse: f64, r2: f64 },
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub kind: ModelKind,
    pub outcome: RowOutcome,
}

impl ReportRow {
    pub fn name(&self) -> &'static str {
        self.kind.display()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub approach: u8,
    pub seed: u64,
    /// SHA-256 of the canonical run configuration, hex.
    pub fingerprint: String,
    pub n_train: usize,
    pub n_test: usize,
    pub n_features: usize,
    pub rows: Vec<ReportRow>,
}

impl BenchmarkReport {
    pub fn failures(&self) -> impl Iterator<Item = (&ReportRow, &str)> {
        self.rows.iter().filter_map(|r| match &r.outcome {
            RowOutcome::Failed(msg) => Some((r, msg.as_str())),
            RowOutcome::Scored { .. } => None,
        })
    }

    pub fn get(&self, kind: ModelKind) -> Option<&RowOutcome> {
        self.rows.iter().find(|r| r.kind == kind).map(|r| &r.outcome)
    }

    /// Test MSE of a scored row.
    pub fn mse_of(&self, kind: ModelKind) -> Option<f64> {
        match self.get(kind)? {
            RowOutcome::Scored { mse, .. } => Some(*mse),
            RowOutcome::Failed(_) => None,
        }
    }

    /// `model,mse,r2`; failed rows leave both metrics empty.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("model,mse,r2\n");
        for r in &self.rows {
            match &r.outcome {
                RowOutcome::Scored { mse, r2 } => writeln!(s, "{},{mse:.6},{r2:.6}", r.name()),
                RowOutcome::Failed(_) => writeln!(s, "{},,", r.name()),
            }
            .unwrap();
        }
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        writeln!(s, "## Approach {}\n", self.approach).unwrap();
        writeln!(
            s,
            "seed {} · {} train / {} test rows · {} features · config {}\n",
            self.seed,
            self.n_train,
            self.n_test,
            self.n_features,
            &self.fingerprint[..16]
        )
        .unwrap();
        s.push_str("| Model | MSE | R² |\n|---|---:|---:|\n");
        for r in &self.rows {
            match &r.outcome {
                RowOutcome::Scored { mse, r2 } => writeln!(s, "| {} | {mse:.6} | {r2:.6} |", r.name()),
                RowOutcome::Failed(msg) => writeln!(s, "| {} | failed: {} | |", r.name(), msg.replace('|', "/")),
            }
            .unwrap();
        }
        s
    }
}

/// Test-set predictions of one roster entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPredictions {
    pub kind: ModelKind,
    pub predicted: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRun {
    pub report: BenchmarkReport,
    pub approach: Approach,
    /// Successful entries only, in roster order.
    pub predictions: Vec<ModelPredictions>,
}

fn fingerprint(table: &TimeSeriesTable, spec: &ApproachSpec, roster: &[(ModelKind, ModelSpec)], split: &Split, seed: u64) -> String {
    let mut h = Sha256::new();
    let canonical = format!(
        "rows={} first={:?} last={:?}\nspec={spec:?}\nsplit_train={:?}\nseed={seed}\nroster={roster:?}\n",
        table.n_rows(),
        table.dates().first(),
        table.dates().last(),
        split.train,
    );
    h.update(canonical.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Builds the approach's features and evaluates every requested model on
/// the test rows. Entries train concurrently, each on a seed derived from
/// its roster position; the report follows roster order.
pub fn run_benchmark(
    table: &TimeSeriesTable,
    spec: &ApproachSpec,
    roster: &[(ModelKind, ModelSpec)],
    split: &Split,
    seed: u64,
) -> Result<BenchmarkRun> {
    let approach = build_approach(table, spec, split, seed)?;
    let mut entries = roster.to_vec();
    entries.sort_by_key(|(k, _)| k.index());
    entries.dedup_by_key(|(k, _)| *k);

    let (train, test) = (&approach.train, &approach.test);
    let results: Vec<(ModelKind, Result<Vec<f64>>)> = entries
        .par_iter()
        .map(|(kind, model)| {
            let out = model
                .fit(&train.x, &train.y, derive_seed(seed, kind.index() as u64))
                .and_then(|m| m.predict(&test.x));
            (*kind, out)
        })
        .collect();

    let mut rows = Vec::with_capacity(results.len());
    let mut predictions = Vec::new();
    for (kind, out) in results {
        let outcome = match out.and_then(|p| Ok((mse(&test.y, &p)?, r2(&test.y, &p)?, p))) {
            Ok((m, r, p)) if m.is_finite() => {
                predictions.push(ModelPredictions { kind, predicted: p });
                RowOutcome::Scored { mse: m, r2: r }
            }
            Ok(_) => RowOutcome::Failed("non-finite predictions".into()),
            Err(e) => RowOutcome::Failed(e.to_string()),
        };
        rows.push(ReportRow { kind, outcome });
    }
    let report = BenchmarkReport {
        approach: spec.id,
        seed,
        fingerprint: fingerprint(table, spec, &entries, split, seed),
        n_train: train.n_rows(),
        n_test: test.n_rows(),
        n_features: train.n_features(),
        rows,
    };
    Ok(BenchmarkRun {
        report,
        approach,
        predictions,
    })
}

/// Actual/predicted pairs with identity-line endpoints spanning both ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct Scatter {
    pub model: String,
    pub points: Vec<(f64, f64)>,
    pub identity: [(f64, f64); 2],
}

pub fn export_scatter(actual: &[f64], predicted: &[f64], model: &str) -> Result<Scatter> {
    check_lengths(actual, predicted)?;
    let points: Vec<(f64, f64)> = actual.iter().copied().zip(predicted.iter().copied()).collect();
    let lo = points.iter().map(|(a, p)| a.min(*p)).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|(a, p)| a.max(*p)).fold(f64::NEG_INFINITY, f64::max);
    Ok(Scatter {
        model: model.to_string(),
        points,
        identity: [(lo, lo), (hi, hi)],
    })
}

impl Scatter {
    /// `actual,predicted` rows in shortest round-trip notation.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("actual,predicted\n");
        for (a, p) in &self.points {
            writeln!(s, "{a:?},{p:?}").unwrap();
        }
        s
    }

    pub fn from_csv(model: &str, text: &str) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let mut actual = Vec::new();
        let mut predicted = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse {
                line: i as u64 + 2,
                message: e.to_string(),
            })?;
            let field = |k: usize| -> Result<f64> {
                rec.get(k).and_then(|v| v.parse().ok()).ok_or_else(|| Error::Parse {
                    line: i as u64 + 2,
                    message: "expected two numeric fields".into(),
                })
            };
            actual.push(field(0)?);
            predicted.push(field(1)?);
        }
        export_scatter(&actual, &predicted, model)
    }
}
