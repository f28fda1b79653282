//! Trimmed-mean timing statistics.

use std::time::Duration;

use serde::Serialize;

/// Mean and spread of one timing cell after dropping the extremes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub mean_ms: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single sample.
    pub stddev_ms: f64,
    /// `stddev_ms` as a percentage of `mean_ms`; 0 when the mean is 0.
    pub rsd_pct: f64,
    pub reps: usize,
    pub retained: usize,
}

/// Drops one minimum and one maximum when there are at least three samples,
/// then summarizes the rest.
pub fn trimmed(samples: &[Duration]) -> Summary {
    let mut ms: Vec<f64> = samples.iter().map(|d| d.as_secs_f64() * 1e3).collect();
    ms.sort_by(f64::total_cmp);
    let kept = if ms.len() >= 3 { &ms[1..ms.len() - 1] } else { &ms[..] };
    let n = kept.len();
    let mean = if n == 0 { 0.0 } else { kept.iter().sum::<f64>() / n as f64 };
    let stddev = if n < 2 {
        0.0
    } else {
        (kept.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    let rsd = if mean > 0.0 { 100.0 * stddev / mean } else { 0.0 };
    Summary {
        mean_ms: mean,
        stddev_ms: stddev,
        rsd_pct: rsd,
        reps: samples.len(),
        retained: n,
    }
}
