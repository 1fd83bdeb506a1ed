use ozone_core::dataset::{split, SplitMode, SplitSpec, TimeSeriesTable};
use ozone_core::eval::{run_benchmark, RowOutcome};
use ozone_core::features::{build_approach, ApproachSpec};
use ozone_core::models::{ModelKind, ModelSpec, ROSTER};
use ozone_core::synth::{generate, lag1_autocorrelation, SynthConfig};
use ozone_core::trees::{fit_random_forest, ForestConfig};
use ozone_core::Matrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn table(rows: usize, seed: u64) -> TimeSeriesTable {
    generate(&SynthConfig { n_rows: rows, seed, ..SynthConfig::default() }).unwrap()
}

fn chrono_spec() -> SplitSpec {
    SplitSpec { mode: SplitMode::Chronological, train_fraction: 0.8, seed: 0 }
}

fn small_ranking(id: u8) -> ApproachSpec {
    ApproachSpec {
        ranking: ForestConfig { n_trees: 30, ..ForestConfig::default() },
        ..ApproachSpec::new(id)
    }
}

#[test]
fn test_targets_never_reach_training_artifacts() {
    let clean = table(400, 3);
    let rows = split(&clean, &chrono_spec()).unwrap();
    let o3 = clean.values("O3").unwrap();
    let poisoned: Vec<Option<f64>> = o3
        .iter()
        .enumerate()
        .map(|(i, &v)| Some(if rows.test.contains(&i) { f64::NAN } else { v }))
        .collect();
    let dirty = clean.clone().with_column("O3", poisoned).unwrap();
    for id in 1..=4 {
        let spec = small_ranking(id);
        let a = build_approach(&clean, &spec, &rows, 11).unwrap();
        let b = build_approach(&dirty, &spec, &rows, 11).unwrap();
        assert_eq!(a.train, b.train, "approach {id}");
        assert_eq!(a.scaler, b.scaler, "approach {id}");
        assert_eq!(a.ranking, b.ranking, "approach {id}");
        assert_eq!(a.test.x.rows(), b.test.x.rows());
    }
}

#[test]
fn build_approach_is_deterministic() {
    let t = table(300, 5);
    let rows = split(&t, &chrono_spec()).unwrap();
    for id in 1..=4 {
        let spec = small_ranking(id);
        assert_eq!(build_approach(&t, &spec, &rows, 2).unwrap(), build_approach(&t, &spec, &rows, 2).unwrap());
    }
}

fn cheap_roster() -> Vec<(ModelKind, ModelSpec)> {
    ROSTER
        .iter()
        .map(|&k| {
            let mut spec = ModelSpec::default_for(k);
            match k {
                ModelKind::RandomForest => spec.set("n_trees", "20").unwrap(),
                ModelKind::GradientBoosting | ModelKind::SecondOrderBoost | ModelKind::HistogramBoost => {
                    spec.set("n_rounds", "40").unwrap()
                }
                ModelKind::MlpTanh | ModelKind::MlpRelu => spec.set("epochs", "20").unwrap(),
                _ => {}
            }
            (k, spec)
        })
        .collect()
}

#[test]
fn benchmark_is_deterministic_across_thread_counts() {
    let t = table(300, 8);
    let rows = split(&t, &chrono_spec()).unwrap();
    let spec = ApproachSpec::new(1);
    let roster = cheap_roster();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_benchmark(&t, &spec, &roster, &rows, 42).unwrap())
    };
    let one = run(1);
    let report = &one.report;
    assert_eq!(report.rows.len(), 12);
    let kinds: Vec<ModelKind> = report.rows.iter().map(|r| r.kind).collect();
    assert_eq!(kinds, ROSTER.to_vec());

    // Scores follow their definitions.
    let y = &one.approach.test.y;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / y.len() as f64;
    for row in &report.rows {
        let RowOutcome::Scored { mse, r2 } = row.outcome else { panic!("{} failed", row.name()) };
        assert!(mse >= 0.0 && r2 <= 1.0);
        assert!((r2 - (1.0 - mse / var)).abs() < 1e-12);
    }

    let again = run(1);
    let four = run(4);
    assert_eq!(report.to_csv(), again.report.to_csv());
    assert_eq!(report.to_csv(), four.report.to_csv());
    assert_eq!(report.to_markdown(), four.report.to_markdown());
}

#[test]
fn permuting_an_irrelevant_feature_moves_its_importance_less_than_any_signal() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let n = 300;
    let cols: Vec<Vec<f64>> = (0..6)
        .map(|j| (0..n).map(|i| ((i * (j + 3) * 2654435761usize) % 1000) as f64 / 1000.0).collect())
        .collect();
    let y: Vec<f64> = (0..n).map(|i| 3.0 * cols[0][i] + 2.0 * cols[1][i] - 2.0 * cols[2][i]).collect();
    let x = Matrix::from_columns(&cols).unwrap();
    let cfg = ForestConfig { n_trees: 50, ..ForestConfig::default() };
    let before = fit_random_forest(&x, &y, &cfg, 1).unwrap().importances;
    let mut shuffled = cols.clone();
    shuffled[4].shuffle(&mut rng);
    let after = fit_random_forest(&Matrix::from_columns(&shuffled).unwrap(), &y, &cfg, 1).unwrap().importances;
    let weakest_signal = before[..3].iter().copied().fold(f64::INFINITY, f64::min);
    assert!((before[4] - after[4]).abs() < weakest_signal);
}

#[test]
fn synthetic_autocorrelation_matches_an_independent_estimate() {
    for rho in [0.6, 0.7, 0.8] {
        let t = generate(&SynthConfig { autocorrelation: rho, seed: 17, ..SynthConfig::default() }).unwrap();
        let y = t.values("O3").unwrap();
        // Correlation of the series with itself shifted by one day.
        let (a, b) = (&y[..y.len() - 1], &y[1..]);
        let n = a.len() as f64;
        let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
        let cov: f64 = a.iter().zip(b).map(|(u, v)| (u - ma) * (v - mb)).sum();
        let sa: f64 = a.iter().map(|u| (u - ma).powi(2)).sum::<f64>().sqrt();
        let sb: f64 = b.iter().map(|v| (v - mb).powi(2)).sum::<f64>().sqrt();
        let r = cov / (sa * sb);
        assert!((r - rho).abs() < 0.05, "{r} vs {rho}");
        assert!((lag1_autocorrelation(&y) - rho).abs() < 1e-6);
    }
}
