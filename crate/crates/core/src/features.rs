//! Feature regimes built on a gap-repaired table.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use chrono::{Datelike, NaiveDate};

use crate::dataset::{Scaler, Split, TimeSeriesTable, TARGET, VARIABLES};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::trees::{fit_random_forest, ForestConfig};

pub const TEMPORAL: [&str; 4] = ["year", "month", "day", "day_of_week"];

/// The eleven non-target variables in schema order.
pub fn predictors() -> Vec<&'static str> {
    VARIABLES.iter().copied().filter(|v| *v != TARGET).collect()
}

/// A feature matrix with its target and dates, rows aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    pub names: Vec<String>,
    pub x: Matrix,
    pub y: Vec<f64>,
    pub dates: Vec<NaiveDate>,
}

impl FeatureSet {
    pub fn n_rows(&self) -> usize {
        self.y.len()
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    /// CSV with a `date,<features...>,O3` header.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let io = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
        let mut header = vec!["date".to_string()];
        header.extend(self.names.iter().cloned());
        header.push(TARGET.to_string());
        writeln!(out, "{}", header.join(",")).map_err(io)?;
        for (i, row) in self.x.iter_rows().enumerate() {
            let mut line = self.dates[i].format("%Y-%m-%d").to_string();
            for v in row.iter().chain(std::iter::once(&self.y[i])) {
                line.push(',');
                line.push_str(&v.to_string());
            }
            writeln!(out, "{line}").map_err(io)?;
        }
        out.flush().map_err(io)
    }
}

/// Year, month, day and day of week (Monday = 0) as an `n×4` matrix.
pub fn temporal_features(dates: &[NaiveDate]) -> Matrix {
    let mut m = Matrix::zeros(dates.len(), 4);
    for (i, d) in dates.iter().enumerate() {
        let r = m.row_mut(i);
        r[0] = d.year() as f64;
        r[1] = d.month() as f64;
        r[2] = d.day() as f64;
        r[3] = d.weekday().num_days_from_monday() as f64;
    }
    m
}

/// Appends `xᵢ·xⱼ` for every pair `i < j`, named `A*B`.
pub fn interaction_features(x: &Matrix, names: &[String]) -> Result<(Matrix, Vec<String>)> {
    let p = x.cols();
    if p < 2 || names.len() != p {
        return Err(Error::Feature(format!(
            "interactions need at least 2 named columns, got {p} columns and {} names",
            names.len()
        )));
    }
    let mut out_names = names.to_vec();
    for i in 0..p {
        for j in i + 1..p {
            out_names.push(format!("{}*{}", names[i], names[j]));
        }
    }
    let width = out_names.len();
    let mut data = Vec::with_capacity(x.rows() * width);
    for row in x.iter_rows() {
        data.extend_from_slice(row);
        for i in 0..p {
            for j in i + 1..p {
                data.push(row[i] * row[j]);
            }
        }
    }
    Ok((Matrix::from_vec(x.rows(), width, data)?, out_names))
}

/// Lagged copies of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct LagColumns {
    pub names: Vec<String>,
    /// One column per lag, each of length `n − dropped`.
    pub columns: Vec<Vec<f64>>,
    /// Leading rows without a full lag history.
    pub dropped: usize,
}

/// `O3_lag_k[t] = y[t − k]` for `t ≥ max(lags)`.
pub fn lag_features(y: &[f64], lags: &[usize]) -> Result<LagColumns> {
    let set: BTreeSet<usize> = lags.iter().copied().collect();
    let Some(&max) = set.last() else {
        return Err(Error::Feature("lag set is empty".into()));
    };
    if set.contains(&0) {
        return Err(Error::Feature("lags must be at least 1".into()));
    }
    if max >= y.len() {
        return Err(Error::Feature(format!("lag {max} needs more than {} rows", y.len())));
    }
    Ok(LagColumns {
        names: set.iter().map(|k| format!("{TARGET}_lag_{k}")).collect(),
        columns: set.iter().map(|&k| y[max - k..y.len() - k].to_vec()).collect(),
        dropped: max,
    })
}

/// Forest importances of the named columns, fitted on `rows` only,
/// sorted descending (ties keep column order).
pub fn rank_features(
    table: &TimeSeriesTable,
    columns: &[&str],
    rows: &[usize],
    cfg: &ForestConfig,
    seed: u64,
) -> Result<Vec<(String, f64)>> {
    let cols = columns.iter().map(|c| table.values(c)).collect::<Result<Vec<_>>>()?;
    let target = table.values(TARGET)?;
    let x = Matrix::from_columns(&cols.iter().map(|c| rows.iter().map(|&i| c[i]).collect()).collect::<Vec<Vec<f64>>>())?;
    let y: Vec<f64> = rows.iter().map(|&i| target[i]).collect();
    rank_matrix(&x, &y, columns, cfg, seed)
}

/// As [`rank_features`] for an already assembled training matrix.
pub fn rank_matrix<S: AsRef<str>>(
    x: &Matrix,
    y: &[f64],
    names: &[S],
    cfg: &ForestConfig,
    seed: u64,
) -> Result<Vec<(String, f64)>> {
    let forest = fit_random_forest(x, y, cfg, seed)?;
    let mut ranked: Vec<(String, f64)> = names
        .iter()
        .map(|n| n.as_ref().to_string())
        .zip(forest.importances)
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(ranked)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproachSpec {
    pub id: u8,
    /// Fixed selection for approaches 3 and 4; ranked by forest importance when absent.
    pub selected_features: Option<Vec<String>>,
    pub lags: Vec<usize>,
    pub top_k: usize,
    /// Keep the calendar columns in approach 3.
    pub include_temporal: bool,
    pub ranking: ForestConfig,
}

impl ApproachSpec {
    pub fn new(id: u8) -> Self {
        Self {
            id,
            selected_features: None,
            lags: vec![1, 3],
            top_k: 4,
            include_temporal: true,
            ranking: ForestConfig::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.id) {
            return Err(Error::Feature(format!("unknown approach {}", self.id)));
        }
        if self.id == 4 && self.lags.is_empty() {
            return Err(Error::Feature("approach 4 needs at least one lag".into()));
        }
        if self.selected_features.as_ref().is_some_and(|l| l.is_empty()) {
            return Err(Error::Feature("selected feature list is empty".into()));
        }
        if self.selected_features.is_none() && (self.id >= 3) && self.top_k == 0 {
            return Err(Error::Feature("top_k must be at least 1".into()));
        }
        Ok(())
    }
}

/// Everything `build_approach` produces.
#[derive(Debug, Clone, PartialEq)]
pub struct Approach {
    pub train: FeatureSet,
    pub test: FeatureSet,
    pub scaler: Scaler,
    /// Importance ranking used for selection (approaches 3 and 4 without a fixed list).
    pub ranking: Option<Vec<(String, f64)>>,
}

/// Builds the unscaled features and target for every table row, plus the
/// number of leading rows a lag transform removed.
fn raw_features(
    table: &TimeSeriesTable,
    spec: &ApproachSpec,
    selected: &[String],
) -> Result<(Vec<String>, Matrix, Vec<f64>, usize)> {
    let base: Vec<String> = match spec.id {
        1 | 2 => predictors().iter().map(|s| s.to_string()).collect(),
        _ => selected.to_vec(),
    };
    let cols = base.iter().map(|c| table.values(c)).collect::<Result<Vec<_>>>()?;
    let mut x = Matrix::from_columns(&cols)?;
    let mut names = base.clone();
    let y = table.values(TARGET)?;

    let temporal = spec.id == 2 || spec.id == 4 || (spec.id == 3 && spec.include_temporal);
    if temporal {
        x = x.hstack(&temporal_features(table.dates()))?;
        names.extend(TEMPORAL.iter().map(|s| s.to_string()));
    }
    if spec.id == 2 {
        let p = base.len();
        let (inter, inter_names) = interaction_features(&x.select_columns(&(0..p).collect::<Vec<_>>()), &base)?;
        let extra: Vec<usize> = (p..inter.cols()).collect();
        x = x.hstack(&inter.select_columns(&extra))?;
        names.extend(inter_names.into_iter().skip(p));
    }
    if spec.id == 4 {
        let lags = lag_features(&y, &spec.lags)?;
        let keep: Vec<usize> = (lags.dropped..table.n_rows()).collect();
        x = x.select_rows(&keep).hstack(&Matrix::from_columns(&lags.columns)?)?;
        names.extend(lags.names);
        return Ok((names, x, y[lags.dropped..].to_vec(), lags.dropped));
    }
    Ok((names, x, y, 0))
}

/// Builds standardized train/test feature sets for one approach.
///
/// `split` indexes table rows. Rows removed by the lag transform leave
/// both sides; the scaler is fitted on the remaining training rows.
pub fn build_approach(table: &TimeSeriesTable, spec: &ApproachSpec, split: &Split, seed: u64) -> Result<Approach> {
    spec.validate()?;
    if !table.is_complete() {
        return Err(Error::Feature("table contains gaps; repair it first".into()));
    }
    let n = table.n_rows();
    if split.train.iter().chain(&split.test).any(|&i| i >= n) {
        return Err(Error::Feature("split references rows outside the table".into()));
    }

    let mut ranking = None;
    let selected: Vec<String> = match (&spec.selected_features, spec.id) {
        (_, 1 | 2) => Vec::new(),
        (Some(list), _) => {
            for name in list {
                if name == TARGET || !predictors().contains(&name.as_str()) {
                    return Err(Error::Feature(format!("{name} is not a predictor")));
                }
            }
            list.clone()
        }
        (None, _) => {
            let ranked = rank_features(table, &predictors(), &split.train, &spec.ranking, seed)?;
            let top = ranked.iter().take(spec.top_k).map(|(n, _)| n.clone()).collect();
            ranking = Some(ranked);
            top
        }
    };

    let (names, x, y, dropped) = raw_features(table, spec, &selected)?;
    let shift = |rows: &[usize]| -> Vec<usize> { rows.iter().filter(|&&i| i >= dropped).map(|&i| i - dropped).collect() };
    let (train_rows, test_rows) = (shift(&split.train), shift(&split.test));
    if train_rows.len() < 2 || test_rows.is_empty() {
        return Err(Error::Feature(format!(
            "after dropping {dropped} lag rows, {} train and {} test rows remain",
            train_rows.len(),
            test_rows.len()
        )));
    }
    let scaler = Scaler::fit_matrix(&names, &x, &train_rows)?;
    let dates = &table.dates()[dropped..];
    let side = |rows: &[usize]| -> Result<FeatureSet> {
        Ok(FeatureSet {
            names: names.clone(),
            x: scaler.transform(&names, &x.select_rows(rows))?,
            y: rows.iter().map(|&i| y[i]).collect(),
            dates: rows.iter().map(|&i| dates[i]).collect(),
        })
    };
    Ok(Approach {
        train: side(&train_rows)?,
        test: side(&test_rows)?,
        scaler,
        ranking,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{split_rows, SplitSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    /// Zeller's congruence, shifted so Monday = 0.
    fn zeller(y: i32, m: u32, d: u32) -> u32 {
        let (y, m) = if m < 3 { (y - 1, m + 12) } else { (y, m) };
        let k = y.rem_euclid(100);
        let j = y.div_euclid(100);
        let h = (d as i32 + (13 * (m as i32 + 1)) / 5 + k + k / 4 + j / 4 + 5 * j).rem_euclid(7);
        // h: 0 = Saturday, 1 = Sunday, 2 = Monday, ...
        ((h + 5) % 7) as u32
    }

    pub(crate) fn table(n: usize, seed: u64) -> TimeSeriesTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = date(2015, 1, 1);
        let dates: Vec<NaiveDate> = (0..n).map(|i| start + chrono::Days::new(i as u64)).collect();
        let names: Vec<String> = VARIABLES.iter().map(|s| s.to_string()).collect();
        let mut cols: Vec<Vec<f64>> = (0..12).map(|_| (0..n).map(|_| rng.random_range(0.0..10.0)).collect()).collect();
        let o3 = VARIABLES.iter().position(|v| *v == TARGET).unwrap();
        let tmp = VARIABLES.iter().position(|v| *v == "TMP").unwrap();
        cols[o3] = (0..n).map(|i| 3.0 * cols[tmp][i] + rng.random_range(0.0..1.0)).collect();
        TimeSeriesTable::from_complete(dates, names, cols).unwrap()
    }

    #[test]
    fn first_of_january_2015_is_a_thursday() {
        let t = temporal_features(&[date(2015, 1, 1)]);
        assert_eq!(t.row(0), &[2015.0, 1.0, 1.0, 3.0]);
        assert_eq!(zeller(2015, 1, 1), 3);
    }

    #[test]
    fn weekday_matches_zeller_and_steps_by_one() {
        let start = date(1999, 12, 25);
        let dates: Vec<NaiveDate> = (0..800).map(|i| start + chrono::Days::new(i)).collect();
        let t = temporal_features(&dates);
        for (i, d) in dates.iter().enumerate() {
            assert_eq!(t.get(i, 3) as u32, zeller(d.year(), d.month(), d.day()));
            if i > 0 {
                assert_eq!((t.get(i - 1, 3) as u32 + 1) % 7, t.get(i, 3) as u32);
            }
        }
    }

    #[test]
    fn eleven_columns_give_fifty_five_interactions() {
        let names: Vec<String> = predictors().iter().map(|s| s.to_string()).collect();
        let x = Matrix::from_vec(2, 11, (0..22).map(|v| v as f64).collect()).unwrap();
        let (out, out_names) = interaction_features(&x, &names).unwrap();
        assert_eq!(out.cols(), 66);
        for name in &out_names[11..] {
            let (a, b) = name.split_once('*').unwrap();
            assert_ne!(a, b);
        }
        let x = Matrix::from_rows(&[[2.0, 3.0]]).unwrap();
        let (out, n) = interaction_features(&x, &["a".into(), "b".into()]).unwrap();
        assert_eq!(out.row(0), &[2.0, 3.0, 6.0]);
        assert_eq!(n[2], "a*b");
    }

    #[test]
    fn lag_shift_and_drop() {
        let l = lag_features(&[10.0, 20.0, 30.0, 40.0], &[1]).unwrap();
        assert_eq!(l.columns[0], vec![10.0, 20.0, 30.0]);
        assert_eq!(l.dropped, 1);
        let y: Vec<f64> = (0..100).map(|v| v as f64).collect();
        let l = lag_features(&y, &[3, 1]).unwrap();
        assert_eq!(l.names, vec!["O3_lag_1", "O3_lag_3"]);
        assert_eq!(l.columns[0].len(), 97);
        assert_eq!(l.columns[0][0], 2.0);
        assert_eq!(l.columns[1][0], 0.0);
        assert!(matches!(lag_features(&y, &[0]), Err(Error::Feature(_))));
        assert!(matches!(lag_features(&y, &[100]), Err(Error::Feature(_))));
    }

    #[test]
    fn approach_widths() {
        let t = table(120, 1);
        let split = split_rows(120, &SplitSpec::default()).unwrap();
        let widths: Vec<usize> = (1..=4)
            .map(|id| build_approach(&t, &ApproachSpec { ranking: ForestConfig { n_trees: 20, ..Default::default() }, ..ApproachSpec::new(id) }, &split, 3).unwrap().train.n_features())
            .collect();
        assert_eq!(widths, vec![11, 70, 8, 10]);
        let a4 = build_approach(&t, &ApproachSpec { selected_features: Some(vec!["TMP".into(), "RH".into(), "NO".into(), "CO".into()]), ..ApproachSpec::new(4) }, &split, 3).unwrap();
        assert_eq!(a4.train.n_rows() + a4.test.n_rows(), 117);
        assert_eq!(a4.train.dates[0], t.dates()[3]);
        assert!(a4.train.names.iter().all(|n| n != TARGET));
    }

    #[test]
    fn approach_two_extends_approach_one() {
        let t = table(60, 2);
        let split = split_rows(60, &SplitSpec::default()).unwrap();
        let a1 = build_approach(&t, &ApproachSpec::new(1), &split, 0).unwrap();
        let a2 = build_approach(&t, &ApproachSpec::new(2), &split, 0).unwrap();
        assert!(a1.train.names.iter().all(|n| a2.train.names.contains(n)));
        // Interaction columns are products of their (unscaled) parents.
        let raw = |name: &str| t.values(name).unwrap();
        let j = a2.train.names.iter().position(|n| n == "CO*NO").unwrap();
        let expect: Vec<f64> = raw("CO").iter().zip(raw("NO")).map(|(a, b)| a * b).collect();
        let got = a2.scaler.inverse_transform(&a2.train.names, &a2.train.x).unwrap().column(j);
        for (g, e) in got.iter().zip(&expect) {
            assert!((g - e).abs() < 1e-9 * e.abs().max(1.0));
        }
    }

    #[test]
    fn scaler_sees_training_rows_only() {
        let t = table(50, 3);
        let split = split_rows(50, &SplitSpec::default()).unwrap();
        let a = build_approach(&t, &ApproachSpec::new(1), &split, 0).unwrap();
        for j in 0..11 {
            let c = a.train.x.column(j);
            let mean = c.iter().sum::<f64>() / c.len() as f64;
            assert!(mean.abs() < 1e-12);
        }
    }

    #[test]
    fn ranking_finds_the_signal_column() {
        let t = table(200, 4);
        let rows: Vec<usize> = (0..160).collect();
        let r = rank_features(&t, &predictors(), &rows, &ForestConfig { n_trees: 50, ..Default::default() }, 1).unwrap();
        assert_eq!(r[0].0, "TMP");
        assert!((r.iter().map(|x| x.1).sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(r.windows(2).all(|w| w[0].1 >= w[1].1));
    }

    #[test]
    fn deterministic_and_validated() {
        let t = table(80, 5);
        let split = split_rows(80, &SplitSpec::default()).unwrap();
        let spec = ApproachSpec { ranking: ForestConfig { n_trees: 10, ..Default::default() }, ..ApproachSpec::new(3) };
        assert_eq!(build_approach(&t, &spec, &split, 7).unwrap(), build_approach(&t, &spec, &split, 7).unwrap());
        assert!(build_approach(&t, &ApproachSpec::new(5), &split, 7).is_err());
        assert!(build_approach(&t, &ApproachSpec { lags: vec![], ..ApproachSpec::new(4) }, &split, 7).is_err());
    }
}
