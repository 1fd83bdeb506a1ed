//! Commands behind the `ozone` binary.

pub mod config;
pub mod svg;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use ozone_core::dataset::{fill_gaps, parse_csv, split, TimeSeriesTable, DEFAULT_MAX_GAP_FRACTION, DEFAULT_MAX_GAP_RUN, VARIABLES};
use ozone_core::eval::{export_scatter, run_benchmark, BenchmarkReport};
use ozone_core::features::{build_approach, temporal_features, ApproachSpec, TEMPORAL};
use ozone_core::stats::{correlation_matrix, correlation_matrix_of, describe, summary_stats, SummaryRow};
use ozone_core::synth::{generate, SynthConfig};
use ozone_core::Error;

pub use config::{ApproachSel, Override, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Input, output, data or configuration problem (exit code 2).
    #[error(transparent)]
    Input(#[from] Error),
    /// One or more models failed (exit code 1).
    #[error("{0}")]
    Model(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(e) if is_model_error(e) => 1,
            CliError::Input(_) => 2,
            CliError::Model(_) => 1,
        }
    }
}

fn is_model_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Fit(_) | Error::Predict { .. } | Error::Divergence { .. } | Error::Metric(_)
    )
}

fn write(path: &Path, contents: &str) -> Result<(), Error> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn ensure_dir(path: &Path) -> Result<(), Error> {
    fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads and gap-repairs the configured CSV.
pub fn load_table(cfg: &RunConfig) -> Result<TimeSeriesTable, Error> {
    let path = cfg
        .data
        .as_ref()
        .ok_or_else(|| Error::Config("--data is required".into()))?;
    let raw = parse_csv(path, &VARIABLES)?;
    let gaps = raw.gap_count();
    let table = fill_gaps(&raw, DEFAULT_MAX_GAP_RUN, DEFAULT_MAX_GAP_FRACTION)?;
    info!("{}: {} rows, {} gap cells repaired", path.display(), table.n_rows(), gaps);
    Ok(table)
}

fn fmt_stat(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else {
        "NA".into()
    }
}

fn summary_rows(table: &TimeSeriesTable) -> Result<Vec<(String, SummaryRow)>, Error> {
    VARIABLES
        .iter()
        .map(|name| {
            let values = table.values(name)?;
            let row = describe(&values).or_else(|e| {
                warn!("{name}: Shapiro-Wilk unavailable ({e})");
                summary_stats(&values)
            })?;
            Ok((name.to_string(), row))
        })
        .collect()
}

/// Writes `summary.csv`, `summary.md`, `spearman.csv` and
/// `spearman_temporal.csv` into the output directory.
pub fn cmd_stats(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let table = load_table(cfg)?;
    ensure_dir(&cfg.out)?;
    let rows = summary_rows(&table)?;

    let mut csv = String::from("variable,min,mean,max,sd,skewness,kurtosis,shapiro_w,shapiro_p\n");
    let mut md = String::from(
        "| Variable | Min | Mean | Max | SD | Skewness | Kurtosis | Shapiro-Wilk |\n|---|---:|---:|---:|---:|---:|---:|---:|\n",
    );
    for (name, r) in &rows {
        let (w, p) = r.shapiro.as_ref().map_or((f64::NAN, f64::NAN), |s| (s.w, s.p_value));
        let stats = [r.min, r.mean, r.max, r.sd, r.skewness, r.kurtosis, w, p];
        let cells: Vec<String> = stats.iter().map(|&v| fmt_stat(v)).collect();
        writeln!(csv, "{name},{}", cells.join(",")).unwrap();
        let sw = if w.is_finite() { format!("{w:.3}({p:.2})") } else { "NA".into() };
        writeln!(
            md,
            "| {name} | {:.3} | {:.3} | {:.3} | {:.3} | {:.3} | {:.3} | {sw} |",
            r.min, r.mean, r.max, r.sd, r.skewness, r.kurtosis
        )
        .unwrap();
    }

    let spearman = correlation_matrix(&table, &VARIABLES)?;
    let mut labels: Vec<String> = VARIABLES.iter().map(|s| s.to_string()).collect();
    let mut columns = VARIABLES.iter().map(|v| table.values(v)).collect::<Result<Vec<_>, _>>()?;
    let temporal = temporal_features(table.dates());
    for (j, name) in TEMPORAL.iter().enumerate() {
        let c = temporal.column(j);
        if c.iter().all(|&v| v == c[0]) {
            warn!("{name} is constant over the data; left out of the temporal correlation matrix");
            continue;
        }
        labels.push(name.to_string());
        columns.push(c);
    }
    let spearman_temporal = correlation_matrix_of(&labels, &columns)?;

    let outputs = [
        ("summary.csv", csv),
        ("summary.md", md),
        ("spearman.csv", spearman.to_csv()),
        ("spearman_temporal.csv", spearman_temporal.to_csv()),
    ];
    let mut written = Vec::new();
    for (name, body) in outputs {
        let path = cfg.out.join(name);
        write(&path, &body)?;
        written.push(path);
    }
    Ok(written)
}

/// Writes each approach's standardized train and test matrices, plus the
/// importance ranking for approaches 3 and 4.
pub fn cmd_featurize(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let table = load_table(cfg)?;
    ensure_dir(&cfg.out)?;
    let rows = split(&table, &cfg.split_spec())?;
    let mut written = Vec::new();
    for id in cfg.approach.ids() {
        let a = build_approach(&table, &ApproachSpec::new(id), &rows, cfg.seed)?;
        for (side, set) in [("train", &a.train), ("test", &a.test)] {
            let path = cfg.out.join(format!("{side}_approach{id}.csv"));
            set.write_csv(&path)?;
            written.push(path);
        }
        if let Some(ranking) = &a.ranking {
            let mut s = String::from("feature,importance\n");
            for (name, v) in ranking {
                writeln!(s, "{name},{v:.6}").unwrap();
            }
            let path = cfg.out.join(format!("importance_approach{id}.csv"));
            write(&path, &s)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Runs the roster on each selected approach and writes
/// `report_approach{N}.csv`, `report_approach{N}.md` and one
/// `scatter_a{N}_{model}.svg` per scored model.
pub fn cmd_benchmark(cfg: &RunConfig) -> Result<Vec<BenchmarkReport>, CliError> {
    let table = load_table(cfg)?;
    ensure_dir(&cfg.out)?;
    let roster = cfg.roster()?;
    let rows = split(&table, &cfg.split_spec())?;
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for id in cfg.approach.ids() {
        let run = run_benchmark(&table, &ApproachSpec::new(id), &roster, &rows, cfg.seed)?;
        let report = run.report;
        write(&cfg.out.join(format!("report_approach{id}.csv")), &report.to_csv())?;
        write(&cfg.out.join(format!("report_approach{id}.md")), &report.to_markdown())?;
        for p in &run.predictions {
            let scatter = export_scatter(&run.approach.test.y, &p.predicted, p.kind.display())?;
            write(
                &cfg.out.join(format!("scatter_a{id}_{}.svg", p.kind.key())),
                &svg::render(&scatter),
            )?;
        }
        for (row, msg) in report.failures() {
            failures.push(format!("approach {id}: {}: {msg}", row.name()));
        }
        info!("approach {id}: {} models, {} features", report.rows.len(), report.n_features);
        reports.push(report);
    }
    if failures.is_empty() {
        Ok(reports)
    } else {
        Err(CliError::Model(failures.join("\n")))
    }
}

/// Writes `synthetic.csv` into the output directory.
pub fn cmd_synth(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    ensure_dir(&cfg.out)?;
    let table = generate(&SynthConfig {
        n_rows: cfg.rows,
        seed: cfg.seed,
        autocorrelation: cfg.autocorrelation,
        ..SynthConfig::default()
    })?;
    let path = cfg.out.join("synthetic.csv");
    table.write_csv(&path)?;
    Ok(path)
}
