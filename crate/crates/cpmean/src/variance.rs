// SPDX-License-Identifier: MIT OR Apache-2.0

//! Noise-scale estimators and the long-run variance factor.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// Gaussian consistency constant for the MAD.
pub const MAD_CONSTANT: f64 = 1.483;
/// Interquartile range of a standard normal.
pub const IQR_CONSTANT: f64 = 1.349;
/// Default half-width of the moving-median filter.
pub const DEFAULT_MEDIAN_HALF_WIDTH: usize = 50;
/// Default number of autocorrelation lags summed in [`long_run_factor`].
pub const DEFAULT_ACF_LAGS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceMethod {
    MadDiff,
    IqrDiff,
    MovingMedianResidual,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceEstimate {
    pub sigma: f64,
    pub method: VarianceMethod,
    pub long_run_factor: Option<f64>,
}

impl VarianceEstimate {
    fn new(sigma: f64, method: VarianceMethod) -> Self {
        Self {
            sigma,
            method,
            long_run_factor: None,
        }
    }
}

/// Median with the even-length midpoint rule. Reorders `xs`.
pub fn median_in_place(xs: &mut [f64]) -> f64 {
    let n = xs.len();
    assert!(n > 0, "median of an empty slice");
    let mid = n / 2;
    let (_, &mut upper, _) = xs.select_nth_unstable_by(mid, f64::total_cmp);
    if n % 2 == 1 {
        upper
    } else {
        // the lower middle is the max of the left partition
        let lower = xs[..mid]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

pub fn median(xs: &[f64]) -> f64 {
    median_in_place(&mut xs.to_vec())
}

/// Linear-interpolation quantile (the common "type 7" rule) of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    assert!(n > 0, "quantile of an empty slice");
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn diffs(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Raw MAD (times the Gaussian constant) of a sample.
pub fn mad(x: &[f64]) -> f64 {
    let mut v = x.to_vec();
    let m = median_in_place(&mut v);
    v.iter_mut().for_each(|y| *y = (*y - m).abs());
    MAD_CONSTANT * median_in_place(&mut v)
}

/// `σ̂ = MAD(ΔX) / √2`.
pub fn sigma_mad(x: &[f64]) -> Result<VarianceEstimate> {
    if x.len() < 2 {
        return param("sigma_mad needs at least 2 observations");
    }
    let sigma = mad(&diffs(x)) / std::f64::consts::SQRT_2;
    Ok(VarianceEstimate::new(sigma, VarianceMethod::MadDiff))
}

/// `σ̂ = IQR(ΔX / √2) / 1.349`.
pub fn sigma_iqr(x: &[f64]) -> Result<VarianceEstimate> {
    if x.len() < 5 {
        return param("sigma_iqr needs at least 5 observations");
    }
    let mut d: Vec<f64> = diffs(x)
        .into_iter()
        .map(|v| v / std::f64::consts::SQRT_2)
        .collect();
    d.sort_unstable_by(f64::total_cmp);
    let iqr = quantile_sorted(&d, 0.75) - quantile_sorted(&d, 0.25);
    Ok(VarianceEstimate::new(iqr / IQR_CONSTANT, VarianceMethod::IqrDiff))
}

/// Running median over `[t-h, t+h]`, truncated at the ends.
pub fn moving_median(x: &[f64], h: usize) -> Result<Vec<f64>> {
    if h < 1 {
        return param("moving median half-width must be at least 1");
    }
    let n = x.len();
    let mut buf = Vec::with_capacity(2 * h + 1);
    Ok((0..n)
        .map(|t| {
            let lo = t.saturating_sub(h);
            let hi = (t + h).min(n - 1);
            buf.clear();
            buf.extend_from_slice(&x[lo..=hi]);
            median_in_place(&mut buf)
        })
        .collect())
}

/// Root mean square of the residuals from [`moving_median`].
pub fn sigma_from_residuals(x: &[f64], h: usize) -> Result<VarianceEstimate> {
    if x.is_empty() {
        return Err(Error::EmptySeries);
    }
    let est = moving_median(x, h)?;
    let ms = x
        .iter()
        .zip(&est)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / x.len() as f64;
    Ok(VarianceEstimate::new(
        ms.sqrt(),
        VarianceMethod::MovingMedianResidual,
    ))
}

/// Sample autocorrelations `ρ̂_0..ρ̂_max_lag`.
pub fn sample_acf(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if max_lag >= n {
        return param(format!("max_lag {max_lag} must be below n = {n}"));
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let c: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let denom: f64 = c.iter().map(|v| v * v).sum();
    if denom <= 0.0 {
        return Err(Error::Degenerate(
            "autocorrelation of a constant sequence".into(),
        ));
    }
    Ok((0..=max_lag)
        .map(|t| c.iter().zip(&c[t..]).map(|(a, b)| a * b).sum::<f64>() / denom)
        .collect())
}

/// `c = max(1 + 2 Σ_{t=1..max_lag} ρ̂_t, 0.01)`.
pub fn long_run_factor(residuals: &[f64], max_lag: usize) -> Result<f64> {
    let acf = sample_acf(residuals, max_lag)?;
    let c = 1.0 + 2.0 * acf[1..].iter().sum::<f64>();
    Ok(c.max(0.01))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_median_averages_middle_pair() {
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median(&[5.0, 1.0, 3.0]), 3.0);
    }

    #[test]
    fn type7_quantiles() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_sorted(&s, 0.25), 2.0);
        assert_eq!(quantile_sorted(&s, 0.1), 1.4);
    }
}
