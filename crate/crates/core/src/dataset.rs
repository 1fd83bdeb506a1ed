//! Daily pollutant/meteorology table: ingestion, gap repair, splitting and
//! standardization.

use std::collections::HashSet;
use std::path::Path;

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Column order of the monitoring-network export.
pub const VARIABLES: [&str; 12] = [
    "CO", "NO", "NO2", "NOX", "O3", "PM10", "PM2.5", "SO2", "RH", "TMP", "WDR", "WSP",
];

pub const TARGET: &str = "O3";

/// Maximum tolerated consecutive gaps per column.
pub const DEFAULT_MAX_GAP_RUN: usize = 12;
/// Maximum tolerated gap fraction per column.
pub const DEFAULT_MAX_GAP_FRACTION: f64 = 0.005;

const GAP_SENTINEL: f64 = -99.0;

/// Dated rows of named numeric columns. `None` marks a gap.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesTable {
    dates: Vec<NaiveDate>,
    names: Vec<String>,
    columns: Vec<Vec<Option<f64>>>,
}

impl TimeSeriesTable {
    /// Builds a table, sorting rows by date.
    pub fn new(
        dates: Vec<NaiveDate>,
        names: Vec<String>,
        columns: Vec<Vec<Option<f64>>>,
    ) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::Schema(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::Schema(format!("duplicate column {name}")));
            }
        }
        for (name, col) in names.iter().zip(&columns) {
            if col.len() != dates.len() {
                return Err(Error::Schema(format!(
                    "column {name} has {} values for {} dates",
                    col.len(),
                    dates.len()
                )));
            }
        }
        let mut order: Vec<usize> = (0..dates.len()).collect();
        order.sort_by_key(|&i| dates[i]);
        for w in order.windows(2) {
            if dates[w[0]] == dates[w[1]] {
                return Err(Error::DuplicateDate {
                    date: dates[w[1]].to_string(),
                    line: w[1] as u64 + 2,
                });
            }
        }
        let dates = order.iter().map(|&i| dates[i]).collect();
        let columns = columns
            .into_iter()
            .map(|c| order.iter().map(|&i| c[i]).collect())
            .collect();
        Ok(Self {
            dates,
            names,
            columns,
        })
    }

    /// Builds a gap-free table from plain columns.
    pub fn from_complete(
        dates: Vec<NaiveDate>,
        names: Vec<String>,
        columns: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let columns = columns
            .into_iter()
            .map(|c| c.into_iter().map(Some).collect())
            .collect();
        Self::new(dates, names, columns)
    }

    pub fn n_rows(&self) -> usize {
        self.dates.len()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Schema(format!("unknown column {name}")))
    }

    pub fn raw_column(&self, name: &str) -> Result<&[Option<f64>]> {
        Ok(&self.columns[self.column_index(name)?])
    }

    /// Values of a gap-free column.
    pub fn values(&self, name: &str) -> Result<Vec<f64>> {
        self.raw_column(name)?
            .iter()
            .enumerate()
            .map(|(row, v)| {
                v.ok_or_else(|| Error::Schema(format!("column {name} has a gap at row {row}")))
            })
            .collect()
    }

    pub fn gap_count(&self) -> usize {
        self.columns.iter().flatten().filter(|v| v.is_none()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.gap_count() == 0
    }

    /// Replaces a column's values; used by tests and the synthetic generator.
    pub fn with_column(mut self, name: &str, values: Vec<Option<f64>>) -> Result<Self> {
        let j = self.column_index(name)?;
        if values.len() != self.n_rows() {
            return Err(Error::Schema(format!(
                "replacement for {name} has {} values, expected {}",
                values.len(),
                self.n_rows()
            )));
        }
        self.columns[j] = values;
        Ok(self)
    }

    /// Writes the table as CSV with a `date` first column; gaps are empty cells.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let csv_err = |source| Error::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        let mut header = vec!["date".to_string()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header).map_err(csv_err)?;
        for (i, d) in self.dates.iter().enumerate() {
            let mut rec = vec![d.format("%Y-%m-%d").to_string()];
            rec.extend(self.columns.iter().map(|c| match c[i] {
                Some(v) => format!("{v}"),
                None => String::new(),
            }));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn parse_cell(raw: &str, line: u64, column: &str) -> Result<Option<f64>> {
    let s = raw.trim();
    if s.is_empty() || s.eq_ignore_ascii_case("nan") {
        return Ok(None);
    }
    let v: f64 = s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("column {column}: cannot parse {s:?} as a number"),
    })?;
    if v == GAP_SENTINEL || !v.is_finite() {
        return Ok(None);
    }
    Ok(Some(v))
}

/// Reads a daily CSV with an ISO date in the first column.
///
/// Columns are returned in `schema` order; extra columns are ignored.
/// Empty, `NaN` and `-99` cells become gaps.
pub fn parse_csv(path: &Path, schema: &[&str]) -> Result<TimeSeriesTable> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let header = reader.headers().map_err(csv_err)?.clone();
    if header.is_empty() {
        return Err(Error::Schema("missing header row".into()));
    }
    let positions = schema
        .iter()
        .map(|name| {
            header
                .iter()
                .skip(1)
                .position(|h| h == *name)
                .map(|p| p + 1)
                .ok_or_else(|| Error::Schema(format!("missing column {name}")))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut dates = Vec::new();
    let mut seen = HashSet::new();
    let mut columns: Vec<Vec<Option<f64>>> = vec![Vec::new(); schema.len()];
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        let raw_date = record.get(0).unwrap_or("");
        let date = NaiveDate::parse_from_str(raw_date, "%Y-%m-%d").map_err(|e| Error::Parse {
            line,
            message: format!("invalid date {raw_date:?}: {e}"),
        })?;
        if !seen.insert(date) {
            return Err(Error::DuplicateDate {
                date: raw_date.to_string(),
                line,
            });
        }
        dates.push(date);
        for ((col, &pos), name) in columns.iter_mut().zip(&positions).zip(schema) {
            col.push(parse_cell(record.get(pos).unwrap_or(""), line, name)?);
        }
    }
    TimeSeriesTable::new(
        dates,
        schema.iter().map(|s| s.to_string()).collect(),
        columns,
    )
}

/// Maximal runs of gaps as `(start, length)`.
fn gap_runs(col: &[Option<f64>]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut i = 0;
    while i < col.len() {
        if col[i].is_none() {
            let start = i;
            while i < col.len() && col[i].is_none() {
                i += 1;
            }
            runs.push((start, i - start));
        } else {
            i += 1;
        }
    }
    runs
}

/// Repairs gaps after validating run length and gap fraction per column.
///
/// Interior runs are linearly interpolated by row position between the
/// flanking observations; leading and trailing runs take the nearest
/// observed value. Observed cells are never modified.
pub fn fill_gaps(table: &TimeSeriesTable, max_run: usize, max_fraction: f64) -> Result<TimeSeriesTable> {
    if max_run < 1 {
        return Err(Error::Config("max_run must be at least 1".into()));
    }
    if !(max_fraction > 0.0 && max_fraction <= 1.0) {
        return Err(Error::Config("max_fraction must lie in (0, 1]".into()));
    }
    let n = table.n_rows();
    let mut out = table.clone();
    for (name, col) in table.names.iter().zip(&table.columns) {
        let runs = gap_runs(col);
        if let Some(&(start, length)) = runs.iter().find(|r| r.1 > max_run) {
            return Err(Error::GapRun {
                column: name.clone(),
                start,
                length,
            });
        }
        let gaps: usize = runs.iter().map(|r| r.1).sum();
        let fraction = if n == 0 { 0.0 } else { gaps as f64 / n as f64 };
        if fraction > max_fraction || (n > 0 && gaps == n) {
            return Err(Error::GapBudget {
                column: name.clone(),
                fraction,
                limit: max_fraction,
            });
        }
    }
    for col in out.columns.iter_mut() {
        for (start, length) in gap_runs(col) {
            let end = start + length;
            let left = start.checked_sub(1).and_then(|i| col[i]);
            let right = col.get(end).copied().flatten();
            for i in start..end {
                col[i] = Some(match (left, right) {
                    (Some(a), Some(b)) => {
                        let t = (i + 1 - start) as f64 / (length + 1) as f64;
                        a + t * (b - a)
                    }
                    (Some(a), None) => a,
                    (None, Some(b)) => b,
                    (None, None) => unreachable!("fully missing columns rejected above"),
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitMode {
    Chronological,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub mode: SplitMode,
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            mode: SplitMode::Chronological,
            train_fraction: 0.8,
            seed: 0,
        }
    }
}

/// Disjoint, ascending train and test row indices covering `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Splits `n` rows: the first `⌈f·n⌉` rows (chronological) or a seeded
/// permutation's first `⌈f·n⌉` entries (random) form the training set.
pub fn split_rows(n: usize, spec: &SplitSpec) -> Result<Split> {
    let f = spec.train_fraction;
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::Split(format!("train fraction {f} outside (0, 1)")));
    }
    let n_train = (f * n as f64).ceil() as usize;
    if n_train < 2 || n.saturating_sub(n_train) < 2 {
        return Err(Error::Split(format!(
            "{n} rows with fraction {f} leave {n_train} train and {} test rows; need at least 2 each",
            n.saturating_sub(n_train)
        )));
    }
    match spec.mode {
        SplitMode::Chronological => Ok(Split {
            train: (0..n_train).collect(),
            test: (n_train..n).collect(),
        }),
        SplitMode::Random => {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
            let mut train = perm[..n_train].to_vec();
            let mut test = perm[n_train..].to_vec();
            train.sort_unstable();
            test.sort_unstable();
            Ok(Split { train, test })
        }
    }
}

/// Splits a gap-free table.
pub fn split(table: &TimeSeriesTable, spec: &SplitSpec) -> Result<Split> {
    if !table.is_complete() {
        return Err(Error::Split("table still contains gaps".into()));
    }
    split_rows(table.n_rows(), spec)
}

/// Per-column mean and sample standard deviation fitted on training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    names: Vec<String>,
    means: Vec<f64>,
    sds: Vec<f64>,
}

impl Scaler {
    /// Fits on the given rows of each column.
    pub fn fit<C: AsRef<[f64]>>(names: &[String], columns: &[C], rows: &[usize]) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::Fit("scaler needs at least 2 training rows".into()));
        }
        if names.len() != columns.len() {
            return Err(Error::Schema("scaler names/columns length mismatch".into()));
        }
        let k = rows.len() as f64;
        let mut means = Vec::with_capacity(columns.len());
        let mut sds = Vec::with_capacity(columns.len());
        for c in columns {
            let c = c.as_ref();
            let mean = rows.iter().map(|&i| c[i]).sum::<f64>() / k;
            let ss: f64 = rows.iter().map(|&i| (c[i] - mean).powi(2)).sum();
            means.push(mean);
            sds.push((ss / (k - 1.0)).sqrt());
        }
        Ok(Self {
            names: names.to_vec(),
            means,
            sds,
        })
    }

    /// Fits on the given rows of a matrix whose columns are `names`.
    pub fn fit_matrix(names: &[String], x: &Matrix, rows: &[usize]) -> Result<Self> {
        let cols: Vec<Vec<f64>> = (0..x.cols()).map(|j| x.column(j)).collect();
        Self::fit(names, &cols, rows)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn sds(&self) -> &[f64] {
        &self.sds
    }

    /// Columns whose training SD is zero; these standardize to 0.
    pub fn degenerate(&self) -> Vec<&str> {
        self.names
            .iter()
            .zip(&self.sds)
            .filter(|(_, &sd)| sd == 0.0)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    fn positions(&self, names: &[String]) -> Result<Vec<usize>> {
        self.names
            .iter()
            .map(|n| {
                names
                    .iter()
                    .position(|m| m == n)
                    .ok_or_else(|| Error::Schema(format!("scaler column {n} not in input")))
            })
            .collect()
    }

    #[inline]
    fn z(&self, k: usize, v: f64) -> f64 {
        if self.sds[k] == 0.0 {
            0.0
        } else {
            (v - self.means[k]) / self.sds[k]
        }
    }

    /// Standardizes the scaled columns of `x` (columns named by `names`);
    /// other columns pass through.
    pub fn transform(&self, names: &[String], x: &Matrix) -> Result<Matrix> {
        if names.len() != x.cols() {
            return Err(Error::Schema("names do not match matrix width".into()));
        }
        let pos = self.positions(names)?;
        let mut out = x.clone();
        for i in 0..out.rows() {
            let row = out.row_mut(i);
            for (k, &j) in pos.iter().enumerate() {
                row[j] = self.z(k, row[j]);
            }
        }
        Ok(out)
    }

    pub fn inverse_transform(&self, names: &[String], z: &Matrix) -> Result<Matrix> {
        let pos = self.positions(names)?;
        let mut out = z.clone();
        for i in 0..out.rows() {
            let row = out.row_mut(i);
            for (k, &j) in pos.iter().enumerate() {
                row[j] = row[j] * self.sds[k] + self.means[k];
            }
        }
        Ok(out)
    }

    /// Standardized copy of the scaler's columns from a gap-free table.
    pub fn transform_table(&self, table: &TimeSeriesTable) -> Result<Vec<Vec<f64>>> {
        self.names
            .iter()
            .enumerate()
            .map(|(k, n)| Ok(table.values(n)?.into_iter().map(|v| self.z(k, v)).collect()))
            .collect()
    }
}

/// Fits a scaler on the training rows of the named table columns.
pub fn fit_scaler(table: &TimeSeriesTable, train: &[usize], columns: &[&str]) -> Result<Scaler> {
    let names: Vec<String> = columns.iter().map(|s| s.to_string()).collect();
    let values = columns
        .iter()
        .map(|c| table.values(c))
        .collect::<Result<Vec<_>>>()?;
    Scaler::fit(&names, &values, train)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn daily(n: usize) -> Vec<NaiveDate> {
        let start = date("2015-01-01");
        (0..n).map(|i| start + chrono::Days::new(i as u64)).collect()
    }

    fn one_column(values: Vec<Option<f64>>) -> TimeSeriesTable {
        TimeSeriesTable::new(daily(values.len()), vec!["O3".into()], vec![values]).unwrap()
    }

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    const HEADER: &str = "date,CO,NO,NO2,NOX,O3,PM10,PM2.5,SO2,RH,TMP,WDR,WSP\n";

    #[test]
    fn parse_clean_rows() {
        let f = write_tmp(&format!(
            "{HEADER}2015-01-01,1,2,3,4,5,6,7,8,9,10,11,12\n2015-01-02,1,2,3,4,5,6,7,8,9,10,11,12\n2015-01-03,1,2,3,4,5,6,7,8,9,10,11,12\n"
        ));
        let t = parse_csv(f.path(), &VARIABLES).unwrap();
        assert_eq!(t.n_rows(), 3);
        assert_eq!(t.names().len(), 12);
        assert_eq!(t.gap_count(), 0);
        assert_eq!(t.values("O3").unwrap(), vec![5.0; 3]);
    }

    #[test]
    fn parse_records_gaps_and_sentinels() {
        let f = write_tmp(&format!(
            "{HEADER}2015-01-01,1,2,3,4,,6,7,8,9,10,11,12\n2015-01-02,NaN,2,3,4,5,6,7,8,-99,10,11,12\n"
        ));
        let t = parse_csv(f.path(), &VARIABLES).unwrap();
        assert_eq!(t.raw_column("O3").unwrap()[0], None);
        assert_eq!(t.raw_column("CO").unwrap()[1], None);
        assert_eq!(t.raw_column("RH").unwrap()[1], None);
        assert_eq!(t.gap_count(), 3);
    }

    #[test]
    fn parse_rejects_bad_month() {
        let f = write_tmp(&format!(
            "{HEADER}2015-01-01,1,2,3,4,5,6,7,8,9,10,11,12\n2015-13-01,1,2,3,4,5,6,7,8,9,10,11,12\n"
        ));
        match parse_csv(f.path(), &VARIABLES) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_missing_column_and_duplicates() {
        let f = write_tmp("date,CO\n2015-01-01,1\n");
        assert!(matches!(parse_csv(f.path(), &VARIABLES), Err(Error::Schema(_))));
        let f = write_tmp("date,O3\n2015-01-01,1\n2015-01-01,2\n");
        assert!(matches!(
            parse_csv(f.path(), &["O3"]),
            Err(Error::DuplicateDate { .. })
        ));
    }

    #[test]
    fn interior_gap_is_interpolated() {
        let t = one_column(vec![Some(1.0), None, Some(3.0)]);
        let f = fill_gaps(&t, 12, 1.0).unwrap();
        assert_eq!(f.values("O3").unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn edge_gap_takes_nearest_value() {
        let t = one_column(vec![None, Some(5.0), Some(6.0)]);
        let f = fill_gaps(&t, 12, 1.0).unwrap();
        assert_eq!(f.values("O3").unwrap(), vec![5.0, 5.0, 6.0]);
        let t = one_column(vec![Some(5.0), Some(6.0), None, None]);
        assert_eq!(
            fill_gaps(&t, 12, 1.0).unwrap().values("O3").unwrap(),
            vec![5.0, 6.0, 6.0, 6.0]
        );
    }

    #[test]
    fn long_gap_run_is_rejected() {
        let mut v: Vec<Option<f64>> = (0..5000).map(|i| Some(i as f64)).collect();
        for c in v.iter_mut().skip(100).take(13) {
            *c = None;
        }
        let t = one_column(v.clone());
        match fill_gaps(&t, DEFAULT_MAX_GAP_RUN, DEFAULT_MAX_GAP_FRACTION) {
            Err(Error::GapRun { start, length, .. }) => assert_eq!((start, length), (100, 13)),
            other => panic!("expected gap run error, got {other:?}"),
        }
        v[112] = Some(0.0);
        assert!(fill_gaps(&one_column(v), 12, 0.005).is_ok());
    }

    #[test]
    fn gap_budget_is_enforced() {
        let mut v: Vec<Option<f64>> = (0..100).map(|i| Some(i as f64)).collect();
        v[10] = None;
        assert!(matches!(
            fill_gaps(&one_column(v), 12, 0.005),
            Err(Error::GapBudget { .. })
        ));
    }

    #[test]
    fn chronological_split_uses_ceiling() {
        let s = split_rows(10, &SplitSpec::default()).unwrap();
        assert_eq!(s.train, (0..8).collect::<Vec<_>>());
        assert_eq!(s.test, vec![8, 9]);
    }

    #[test]
    fn random_split_is_deterministic() {
        let spec = SplitSpec {
            mode: SplitMode::Random,
            train_fraction: 0.8,
            seed: 7,
        };
        assert_eq!(split_rows(10, &spec).unwrap(), split_rows(10, &spec).unwrap());
    }

    #[test]
    fn split_rejects_empty_test() {
        let spec = SplitSpec {
            train_fraction: 0.999,
            ..SplitSpec::default()
        };
        assert!(matches!(split_rows(10, &spec), Err(Error::Split(_))));
    }

    #[test]
    fn scaler_basics() {
        let names = vec!["a".to_string(), "b".to_string()];
        let s = Scaler::fit(&names, &[vec![1.0, 2.0, 3.0], vec![5.0, 5.0, 5.0]], &[0, 1, 2]).unwrap();
        assert_eq!(s.means(), &[2.0, 5.0]);
        assert_eq!(s.sds(), &[1.0, 0.0]);
        assert_eq!(s.degenerate(), vec!["b"]);

        let x = Matrix::from_rows(&[[2.0, 5.0], [3.5, 7.0]]).unwrap();
        let z = s.transform(&names, &x).unwrap();
        assert_eq!(z.row(0), &[0.0, 0.0]);
        assert_eq!(z.row(1), &[1.5, 0.0]);
    }

    #[test]
    fn scaler_rejects_unknown_column() {
        let names = vec!["a".to_string()];
        let s = Scaler::fit(&names, &[vec![1.0, 2.0]], &[0, 1]).unwrap();
        let x = Matrix::from_rows(&[[1.0]]).unwrap();
        assert!(matches!(
            s.transform(&["b".to_string()], &x),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn scaler_uses_training_rows_only() {
        let names = vec!["a".to_string()];
        let s = Scaler::fit(&names, &[vec![1.0, 3.0, 1000.0]], &[0, 1]).unwrap();
        assert_eq!(s.means(), &[2.0]);
    }

    #[test]
    fn scaler_mean_matches_two_pass_oracle() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v: Vec<f64> = (0..50).map(|_| rng.random_range(-100.0..100.0)).collect();
        let rows: Vec<usize> = (0..50).collect();
        let s = Scaler::fit(&["v".to_string()], &[v.clone()], &rows).unwrap();
        // Two-pass oracle with a Kahan-free direct sum, then corrected pass.
        let mean0 = v.iter().sum::<f64>() / 50.0;
        let corr = v.iter().map(|x| x - mean0).sum::<f64>() / 50.0;
        let mean = mean0 + corr;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 49.0;
        assert!((s.means()[0] - mean).abs() <= 1e-12);
        assert!((s.sds()[0] - var.sqrt()).abs() <= 1e-12);
    }
}
