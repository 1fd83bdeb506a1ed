//! Seeded synthetic daily dataset with the real schema.
//!
//! Four predictors (TMP, PM2.5, RH, NO) drive O3 together with an annual
//! cycle, a weekday effect and a TMP×RH interaction; the other seven are
//! independent of the target. An AR(1) component is scaled so the sample
//! lag-1 autocorrelation of O3 equals the configured coefficient.

use std::f64::consts::TAU;

use chrono::{Datelike, Days, NaiveDate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::{TimeSeriesTable, VARIABLES};
use crate::error::{Error, Result};

pub const SIGNAL: [&str; 4] = ["TMP", "PM2.5", "RH", "NO"];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_rows: usize,
    pub start: NaiveDate,
    pub seed: u64,
    /// Target lag-1 autocorrelation, in `[0, 0.9]`.
    pub autocorrelation: f64,
    /// Standard deviation of the white noise added to O3.
    pub noise_sd: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_rows: 1200,
            start: NaiveDate::from_ymd_opt(2015, 1, 1).unwrap(),
            seed: 0,
            autocorrelation: 0.7,
            noise_sd: 2.0,
        }
    }
}

/// Location, scale and AR coefficient of each generated variable.
fn profile(name: &str) -> (f64, f64, f64) {
    match name {
        "CO" => (0.48, 0.2, 0.5),
        "NO" => (14.7, 8.0, 0.7),
        "NO2" => (23.0, 6.7, 0.5),
        "NOX" => (38.0, 14.8, 0.5),
        "PM10" => (41.9, 16.0, 0.5),
        "PM2.5" => (21.3, 8.0, 0.7),
        "SO2" => (3.7, 3.0, 0.5),
        "RH" => (55.0, 12.0, 0.7),
        "TMP" => (16.7, 1.5, 0.7),
        "WDR" => (181.0, 21.7, 0.3),
        "WSP" => (2.1, 0.4, 0.3),
        _ => (30.0, 9.0, 0.0),
    }
}

/// Unit-variance AR(1) path driven by the given standard normal innovations.
fn ar1_from(innov: &[f64], phi: f64) -> Vec<f64> {
    let scale = (1.0 - phi * phi).sqrt();
    let mut out = Vec::with_capacity(innov.len());
    let mut prev = innov[0];
    out.push(prev);
    for z in &innov[1..] {
        prev = phi * prev + scale * z;
        out.push(prev);
    }
    out
}

fn ar1(n: usize, phi: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let innov: Vec<f64> = Normal::new(0.0, 1.0).unwrap().sample_iter(rng).take(n).collect();
    ar1_from(&innov, phi)
}

/// `Σ (yₜ − ȳ)(yₜ₊₁ − ȳ) / Σ (yₜ − ȳ)²`.
pub fn lag1_autocorrelation(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let den: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let num: f64 = y.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
    num / den
}

/// Bisection for a root of `f` on `[lo, hi]`; `None` without a sign change.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let sign = f(lo).signum();
    if f(hi).signum() == sign {
        return None;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Standard deviation of the persistent O3 component.
const PERSISTENT_SD: f64 = 4.0;

/// Adds a persistent component to `base` so the sum has lag-1
/// autocorrelation `rho`. The component keeps a fixed scale and its AR
/// coefficient is solved for; when no coefficient in `[0, 0.98]` works,
/// the scale is solved for instead.
fn add_persistence(base: &[f64], innov: &[f64], rho: f64) -> Option<Vec<f64>> {
    let with = |phi: f64, a: f64| -> Vec<f64> {
        base.iter().zip(ar1_from(innov, phi)).map(|(s, e)| s + a * e).collect()
    };
    if let Some(phi) = bisect(|phi| lag1_autocorrelation(&with(phi, PERSISTENT_SD)) - rho, 0.0, 0.98) {
        return Some(with(phi, PERSISTENT_SD));
    }
    let phi = if lag1_autocorrelation(base) < rho { 0.98 } else { 0.0 };
    let a = bisect(|a| lag1_autocorrelation(&with(phi, a)) - rho, 0.0, 1e4)?;
    Some(with(phi, a))
}

pub fn generate(cfg: &SynthConfig) -> Result<TimeSeriesTable> {
    let n = cfg.n_rows;
    if n < 10 {
        return Err(Error::Config(format!("synthetic data needs at least 10 rows, got {n}")));
    }
    if !(0.0..=0.9).contains(&cfg.autocorrelation) {
        return Err(Error::Config(format!("autocorrelation {} outside [0, 0.9]", cfg.autocorrelation)));
    }
    if !(cfg.noise_sd >= 0.0) {
        return Err(Error::Config("noise_sd must be non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let dates: Vec<NaiveDate> = (0..n)
        .map(|i| cfg.start.checked_add_days(Days::new(i as u64)))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Config("date range overflows".into()))?;
    let phase: Vec<f64> = dates.iter().map(|d| TAU * d.ordinal0() as f64 / 365.25).collect();

    // Standardized drivers, then physical columns.
    let mut z: Vec<Vec<f64>> = Vec::with_capacity(12);
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(12);
    for name in VARIABLES {
        let (loc, scale, phi) = profile(name);
        let mut zi = ar1(n, phi, &mut rng);
        match name {
            "TMP" => zi.iter_mut().zip(&phase).for_each(|(v, p)| *v = 0.8 * *v - 1.2 * p.cos()),
            "RH" => zi.iter_mut().zip(&phase).for_each(|(v, p)| *v = 0.9 * *v + 0.6 * (p - 1.0).sin()),
            _ => {}
        }
        let col = zi.iter().map(|v| (loc + scale * v).max(0.01 * loc)).collect();
        z.push(zi);
        columns.push(col);
    }
    let at = |name: &str| VARIABLES.iter().position(|v| *v == name).unwrap();
    let (tmp, pm, rh, no) = (&z[at("TMP")], &z[at("PM2.5")], &z[at("RH")], &z[at("NO")]);

    let weekday = [-2.5, -1.5, -1.0, 0.0, 1.0, 2.0, 3.5];
    let white = Normal::new(0.0, cfg.noise_sd.max(f64::MIN_POSITIVE)).unwrap();
    let base: Vec<f64> = (0..n)
        .map(|t| {
            let noise = if cfg.noise_sd > 0.0 { white.sample(&mut rng) } else { 0.0 };
            30.0 + 4.0 * tmp[t] + 3.0 * pm[t] - 3.0 * rh[t] - 2.5 * no[t]
                + 3.5 * tmp[t] * rh[t]
                + 5.0 * phase[t].sin()
                + weekday[dates[t].weekday().num_days_from_monday() as usize]
                + noise
        })
        .collect();

    let innov: Vec<f64> = Normal::new(0.0, 1.0).unwrap().sample_iter(&mut rng).take(n).collect();
    columns[at("O3")] = add_persistence(&base, &innov, cfg.autocorrelation)
        .ok_or_else(|| Error::Config(format!("cannot reach autocorrelation {}", cfg.autocorrelation)))?;

    let names = VARIABLES.iter().map(|s| s.to_string()).collect();
    TimeSeriesTable::from_complete(dates, names, columns)
}
