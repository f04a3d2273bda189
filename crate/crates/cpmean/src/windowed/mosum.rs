// SPDX-License-Identifier: MIT OR Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::par;
use crate::series::{Segmentation, TimeSeries};
use crate::variance::{mad, sigma_mad};

pub const DEFAULT_ETA: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MosumThreshold {
    /// Critical value on the `|M| / σ̂` scale.
    Explicit(f64),
    /// Asymptotic Gumbel critical value at level `alpha`.
    Asymptotic { alpha: f64 },
    /// `sqrt(4 log n) + eps`.
    NonAsymptotic { eps: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceMode {
    GlobalMad,
    /// MAD of the differenced data in `[τ-b+1, τ+b]`, recomputed per `τ`.
    LocalWindow,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MosumConfig {
    pub bandwidth: usize,
    pub eta: f64,
    pub threshold: MosumThreshold,
    pub variance: VarianceMode,
}

impl MosumConfig {
    pub fn new(bandwidth: usize) -> Self {
        Self {
            bandwidth,
            eta: DEFAULT_ETA,
            threshold: MosumThreshold::Asymptotic { alpha: 0.05 },
            variance: VarianceMode::GlobalMad,
        }
    }
}

/// Detection result with the pieces needed to audit it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MosumOutcome {
    pub segmentation: Segmentation,
    /// Merged exceedance runs `[first, last]` in `τ`.
    pub runs: Vec<(usize, usize)>,
    pub critical_value: f64,
    pub sigma: Option<f64>,
}

/// Gumbel-based critical value `(q_α + β(n/b)) / α(n/b)` as a multiple of σ.
pub fn mosum_threshold(n: usize, b: usize, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return param(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    if b == 0 {
        return param("bandwidth must be positive");
    }
    let x = n as f64 / b as f64;
    if x.ln() <= 1.0 {
        return param(format!("n/b = {x:.3} is too small for the asymptotic threshold"));
    }
    let lx = x.ln();
    let a = (2.0 * lx).sqrt();
    let beta = 2.0 * lx + 0.5 * lx.ln() + 1.5f64.ln() - 0.5 * std::f64::consts::PI.ln();
    let q = -(-(1.0 - alpha).ln() / 2.0).ln();
    Ok((q + beta) / a)
}

/// `sqrt(4 log n) + eps`.
pub fn nonasymptotic_threshold(n: usize, eps: f64) -> f64 {
    (4.0 * (n as f64).ln()).sqrt() + eps
}

/// `M_{τ,b}` for `τ = 1..n-1` (index 0 holds `τ = 1`).
pub fn mosum_profile(ts: &TimeSeries, b: usize) -> Result<Vec<f64>> {
    let n = ts.len();
    if b < 1 || 2 * b > n {
        return param(format!("bandwidth {b} outside [1, {}]", n / 2));
    }
    Ok(par::map_range(n - 1, |i| ts.mosum_unchecked(i + 1, b)))
}

fn local_sigma(x: &[f64], tau: usize, b: usize) -> f64 {
    let n = x.len();
    let lo = tau.saturating_sub(b); // 0-based start of [τ-b+1, ...]
    let hi = (tau + b).min(n);
    let d: Vec<f64> = x[lo..hi].windows(2).map(|w| w[1] - w[0]).collect();
    if d.is_empty() {
        0.0
    } else {
        mad(&d) / std::f64::consts::SQRT_2
    }
}

pub fn mosum_detect(ts: &TimeSeries, cfg: &MosumConfig) -> Result<MosumOutcome> {
    let n = ts.len();
    let b = cfg.bandwidth;
    if !(cfg.eta > 0.0 && cfg.eta < 0.5) {
        return param(format!("eta must lie in (0, 0.5), got {}", cfg.eta));
    }
    let profile = mosum_profile(ts, b)?;
    let critical_value = match cfg.threshold {
        MosumThreshold::Explicit(v) if v >= 0.0 => v,
        MosumThreshold::Explicit(v) => return param(format!("negative threshold {v}")),
        MosumThreshold::Asymptotic { alpha } => mosum_threshold(n, b, alpha)?,
        MosumThreshold::NonAsymptotic { eps } => nonasymptotic_threshold(n, eps),
    };
    let (scale, sigma): (Vec<f64>, Option<f64>) = match cfg.variance {
        VarianceMode::GlobalMad => {
            let s = sigma_mad(ts.values())?.sigma;
            (vec![s; n - 1], Some(s))
        }
        VarianceMode::Fixed(s) if s > 0.0 => (vec![s; n - 1], Some(s)),
        VarianceMode::Fixed(s) => return param(format!("fixed sigma must be positive, got {s}")),
        VarianceMode::LocalWindow => {
            let x = ts.values();
            (par::map_range(n - 1, |i| local_sigma(x, i + 1, b)), None)
        }
    };
    // Zero scale with a non-zero contrast counts as an exceedance.
    let stat: Vec<f64> = profile
        .iter()
        .zip(&scale)
        .map(|(m, s)| {
            if *s > 0.0 {
                m.abs() / s
            } else if *m != 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .collect();

    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < stat.len() {
        if stat[i] > critical_value {
            let start = i;
            while i + 1 < stat.len() && stat[i + 1] > critical_value {
                i += 1;
            }
            runs.push((start + 1, i + 1));
        }
        i += 1;
    }
    let min_gap = cfg.eta * b as f64;
    let mut merged: Vec<(usize, usize)> = Vec::with_capacity(runs.len());
    for r in runs {
        match merged.last_mut() {
            Some(last) if ((r.0 - last.1 - 1) as f64) < min_gap => last.1 = r.1,
            _ => merged.push(r),
        }
    }
    // Locate by raw |M| unless the scale varies with τ.
    let key: &[f64] = if cfg.variance == VarianceMode::LocalWindow {
        &stat
    } else {
        &profile
    };
    let pts = merged
        .iter()
        .map(|&(s, e)| {
            let mut best = s;
            for t in s..=e {
                if key[t - 1].abs() > key[best - 1].abs() {
                    best = t;
                }
            }
            best
        })
        .collect();
    Ok(MosumOutcome {
        segmentation: Segmentation::new(pts, n)?,
        runs: merged,
        critical_value,
        sigma,
    })
}

/// Bottom-up merge across bandwidths: detections from smaller bandwidths
/// are accepted first, and a detection at bandwidth `b` is dropped when an
/// accepted change lies within distance `< b`.
pub fn mosum_multiscale(
    ts: &TimeSeries,
    bandwidths: &[usize],
    template: &MosumConfig,
) -> Result<Segmentation> {
    if bandwidths.is_empty() {
        return param("at least one bandwidth is required");
    }
    let mut bws = bandwidths.to_vec();
    bws.sort_unstable();
    bws.dedup();
    let mut accepted: Vec<usize> = Vec::new();
    for b in bws {
        let cfg = MosumConfig {
            bandwidth: b,
            ..*template
        };
        let found = mosum_detect(ts, &cfg)?.segmentation;
        let fresh: Vec<usize> = found
            .change_points()
            .iter()
            .copied()
            .filter(|&c| accepted.iter().all(|&a| a.abs_diff(c) >= b))
            .collect();
        accepted.extend(fresh);
    }
    Segmentation::from_unsorted(accepted, ts.len())
}
