// SPDX-License-Identifier: MIT OR Apache-2.0

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::metrics::{hausdorff, max_location_error};
use super::signals::{gen_signal, Noise, Signal};
use super::rng_for;
use crate::detect::{detect, DetectSpec};
use crate::error::{param, Error, Result};
use crate::par;
use crate::variance::median;

pub const REPORT_SCHEMA: &str = "cpmean.accuracy/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimScenario {
    pub signal: Signal,
    pub noise: Noise,
    pub seed: u64,
    pub reps: usize,
}

/// One replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepRecord {
    pub rep: usize,
    pub n_hat: usize,
    pub n_error: i64,
    pub hausdorff: f64,
    /// Defined only when the estimated count is right.
    pub max_location_error: Option<f64>,
    pub fit_mse: f64,
    pub sigma: f64,
    pub change_points: Vec<usize>,
}

/// Aggregate over replications. Everything except `runtime_secs` is a
/// deterministic function of the scenario and method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub schema: String,
    pub scenario: SimScenario,
    pub method: DetectSpec,
    pub n: usize,
    pub n_true: usize,
    /// `N̂ - N₀` to count.
    pub n_error_histogram: BTreeMap<i64, usize>,
    pub mean_n_hat: f64,
    pub hausdorff_mean: f64,
    pub hausdorff_median: f64,
    pub max_location_error_mean: Option<f64>,
    pub max_location_error_median: Option<f64>,
    pub fit_mse_mean: f64,
    pub runtime_secs: f64,
    pub records: Vec<RepRecord>,
}

impl AccuracyReport {
    /// Share of replications with the right number of changes.
    pub fn correct_rate(&self) -> f64 {
        *self.n_error_histogram.get(&0).unwrap_or(&0) as f64 / self.records.len() as f64
    }

    /// Share of replications with at least one detection.
    pub fn detection_rate(&self) -> f64 {
        self.records.iter().filter(|r| r.n_hat > 0).count() as f64 / self.records.len() as f64
    }

    /// Same report with the wall-clock field zeroed, for comparisons.
    pub fn without_runtime(&self) -> Self {
        Self {
            runtime_secs: 0.0,
            ..self.clone()
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn one_rep(
    sc: &SimScenario,
    spec: &DetectSpec,
    signal: &[f64],
    truth: &[usize],
    rep: usize,
) -> Result<RepRecord> {
    let mut x = signal.to_vec();
    sc.noise.add_to(&mut x, &mut rng_for(sc.seed, rep as u64))?;
    let det = detect(&x, spec)?;
    let n = x.len();
    let est = det.segmentation.change_points();
    let fit_mse = det
        .fitted
        .iter()
        .zip(signal)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n as f64;
    Ok(RepRecord {
        rep,
        n_hat: est.len(),
        n_error: est.len() as i64 - truth.len() as i64,
        hausdorff: hausdorff(truth, est, n),
        max_location_error: max_location_error(truth, est).ok(),
        fit_mse,
        sigma: det.sigma,
        change_points: est.to_vec(),
    })
}

/// Runs `spec` on `scenario.reps` noisy copies of the scenario's signal.
pub fn run_scenario(scenario: &SimScenario, spec: &DetectSpec) -> Result<AccuracyReport> {
    if scenario.reps == 0 {
        return param("scenario needs at least one replication");
    }
    spec.validate()?;
    let start = Instant::now();
    let (signal, truth) = gen_signal(&scenario.signal)?;
    let truth = truth.change_points().to_vec();
    let records = par::map_range(scenario.reps, |r| {
        one_rep(scenario, spec, &signal, &truth, r).map_err(|e| Error::Replication {
            rep: r,
            source: Box::new(e),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut hist = BTreeMap::new();
    for r in &records {
        *hist.entry(r.n_error).or_insert(0) += 1;
    }
    let haus: Vec<f64> = records.iter().map(|r| r.hausdorff).collect();
    let mle: Vec<f64> = records.iter().filter_map(|r| r.max_location_error).collect();
    let n_hat: Vec<f64> = records.iter().map(|r| r.n_hat as f64).collect();
    let mse: Vec<f64> = records.iter().map(|r| r.fit_mse).collect();
    Ok(AccuracyReport {
        schema: REPORT_SCHEMA.to_string(),
        scenario: scenario.clone(),
        method: spec.clone(),
        n: signal.len(),
        n_true: truth.len(),
        n_error_histogram: hist,
        mean_n_hat: mean(&n_hat),
        hausdorff_mean: mean(&haus),
        hausdorff_median: median(&haus),
        max_location_error_mean: (!mle.is_empty()).then(|| mean(&mle)),
        max_location_error_median: (!mle.is_empty()).then(|| median(&mle)),
        fit_mse_mean: mean(&mse),
        runtime_secs: start.elapsed().as_secs_f64(),
        records,
    })
}
