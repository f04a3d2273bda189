// SPDX-License-Identifier: MIT OR Apache-2.0

//! Outlier cleaning and the analysis battery for nuclear-response well-log
//! style data.
//!
//! Cleaning fits a moving median, drops points whose residual reaches the
//! cutoff, and keeps the original residuals of the survivors for the noise
//! diagnostics. All reported change-points index the cleaned series.

use serde::{Deserialize, Serialize};

use crate::detect::{detect, DetectSpec, Method, Params};
use crate::dp::{crops, pelt};
use crate::error::{param, Error, Result};
use crate::hierarchical::{make_grid, wbs, GridKind, DEFAULT_INTERVALS};
use crate::select::{select_by_ic, Candidates, PenaltyKind, PenaltySpec, DEFAULT_N_MAX};
use crate::series::TimeSeries;
use crate::variance::{
    long_run_factor, moving_median, sample_acf, sigma_mad, DEFAULT_ACF_LAGS,
    DEFAULT_MEDIAN_HALF_WIDTH,
};

pub const DEFAULT_CUTOFF: f64 = 7500.0;
/// Lags reported in the residual autocorrelation.
pub const REPORT_ACF_LAGS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CleaningSpec {
    pub h: usize,
    pub cutoff: f64,
}

impl Default for CleaningSpec {
    fn default() -> Self {
        Self {
            h: DEFAULT_MEDIAN_HALF_WIDTH,
            cutoff: DEFAULT_CUTOFF,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanedSeries {
    pub values: Vec<f64>,
    /// 1-based positions of the kept points in the raw data.
    pub kept: Vec<usize>,
    /// Moving-median residuals of the kept points.
    pub residuals: Vec<f64>,
    pub removed: usize,
}

/// Whitespace-separated numbers, the layout of the classic well-log file.
pub fn parse_whitespace(text: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .enumerate()
        .map(|(i, tok)| {
            tok.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or(Error::NonFinite { index: i + 1 })
        })
        .collect()
}

pub fn clean_series(x: &[f64], spec: &CleaningSpec) -> Result<CleanedSeries> {
    if spec.h < 1 || !(spec.cutoff > 0.0) {
        return param("cleaning needs h >= 1 and a positive cutoff");
    }
    if x.is_empty() {
        return Err(Error::EmptySeries);
    }
    let med = moving_median(x, spec.h)?;
    let mut out = CleanedSeries {
        values: Vec::new(),
        kept: Vec::new(),
        residuals: Vec::new(),
        removed: 0,
    };
    for (i, (&v, &m)) in x.iter().zip(&med).enumerate() {
        let r = v - m;
        if r.abs() < spec.cutoff {
            out.values.push(v);
            out.kept.push(i + 1);
            out.residuals.push(r);
        } else {
            out.removed += 1;
        }
    }
    if out.values.len() < 2 {
        return Err(Error::Degenerate("fewer than two points survive cleaning".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSummary {
    pub n_raw: usize,
    pub n_clean: usize,
    pub removed: usize,
    pub sigma_mad: f64,
    pub sigma_residual: f64,
    /// Lags `1..=REPORT_ACF_LAGS` (fewer for short series).
    pub residual_acf: Vec<f64>,
    pub long_run_factor: f64,
}

pub fn noise_summary(n_raw: usize, c: &CleanedSeries) -> Result<NoiseSummary> {
    let r = &c.residuals;
    let sigma_residual = (r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64).sqrt();
    let lags = REPORT_ACF_LAGS.min(r.len() - 1);
    let acf = sample_acf(r, lags)?;
    Ok(NoiseSummary {
        n_raw,
        n_clean: c.values.len(),
        removed: c.removed,
        sigma_mad: sigma_mad(&c.values)?.sigma,
        sigma_residual,
        residual_acf: acf[1..].to_vec(),
        long_run_factor: long_run_factor(r, DEFAULT_ACF_LAGS.min(r.len() - 1))?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryConfig {
    pub mosum_bandwidths: Vec<usize>,
    /// CROPS range as multiples of `2 σ̂² log n`.
    pub crops_multipliers: (f64, f64),
    pub top_k: usize,
    pub wbs_intervals: usize,
    pub seed: u64,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self {
            mosum_bandwidths: vec![25, 50, 100, 200],
            crops_multipliers: (1.0, 20.0),
            top_k: 10,
            wbs_intervals: DEFAULT_INTERVALS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub penalty: Option<f64>,
    pub n_changes: usize,
    pub change_points: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CropsRow {
    pub n_changes: usize,
    /// RSS in units of `σ̂²`.
    pub rss_scaled: f64,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub change_points: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellLogReport {
    pub cleaning: CleaningSpec,
    pub noise: NoiseSummary,
    pub pelt: RunSummary,
    pub pelt_inflated: RunSummary,
    pub wbs_sic: RunSummary,
    /// First `top_k` WBS path locations, sorted ascending.
    pub wbs_top: Vec<usize>,
    pub mosum: Vec<RunSummary>,
    pub crops: Vec<CropsRow>,
}

fn summary(label: impl Into<String>, penalty: Option<f64>, cps: &[usize]) -> RunSummary {
    RunSummary {
        label: label.into(),
        penalty,
        n_changes: cps.len(),
        change_points: cps.to_vec(),
    }
}

/// Cleans `raw` and runs the full battery on the cleaned series.
pub fn run_welllog(raw: &[f64], cleaning: &CleaningSpec, cfg: &BatteryConfig) -> Result<WellLogReport> {
    let cleaned = clean_series(raw, cleaning)?;
    let noise = noise_summary(raw.len(), &cleaned)?;
    let x = &cleaned.values;
    let n = x.len();
    let ts = TimeSeries::new(x.clone(), true)?;
    let s2 = noise.sigma_residual * noise.sigma_residual;
    let base = 2.0 * s2 * (n as f64).ln();

    let lam = base;
    let p = pelt(&ts, lam, 1)?;
    let pelt_run = summary("pelt", Some(lam), p.change_points());
    let lam_c = base * noise.long_run_factor;
    let p = pelt(&ts, lam_c, 1)?;
    let pelt_inflated = summary("pelt-inflated", Some(lam_c), p.change_points());

    let grid = make_grid(
        n,
        GridKind::Random {
            seed: cfg.seed,
            m: cfg.wbs_intervals,
        },
    )?;
    let path = wbs(&ts, &grid, 0.0)?;
    let sic = select_by_ic(
        Candidates::Path(&path),
        &PenaltySpec::new(PenaltyKind::Sic),
        &ts,
        DEFAULT_N_MAX,
    )?;
    let wbs_sic = summary("wbs-sic", None, sic.change_points());
    let mut wbs_top: Vec<usize> = path.entries.iter().take(cfg.top_k).map(|e| e.b).collect();
    wbs_top.sort_unstable();

    let mosum = cfg
        .mosum_bandwidths
        .iter()
        .filter(|&&b| 2 * b <= n)
        .map(|&b| {
            let spec = DetectSpec::new(Method::Mosum).with_params(Params {
                bandwidth: Some(b),
                ..Params::default()
            });
            let d = detect(x, &spec)?;
            Ok(summary(format!("mosum-b{b}"), None, d.segmentation.change_points()))
        })
        .collect::<Result<Vec<_>>>()?;

    let (lo, hi) = cfg.crops_multipliers;
    let cr = crops(&ts, base * lo, base * hi, 1)?;
    let crops_rows = cr
        .entries
        .iter()
        .map(|e| CropsRow {
            n_changes: e.fit.n_changes(),
            rss_scaled: e.fit.rss / s2,
            lambda_lo: e.lambda_lo,
            lambda_hi: e.lambda_hi,
            change_points: e.fit.change_points().to_vec(),
        })
        .collect();

    Ok(WellLogReport {
        cleaning: *cleaning,
        noise,
        pelt: pelt_run,
        pelt_inflated,
        wbs_sic,
        wbs_top,
        mosum,
        crops: crops_rows,
    })
}
