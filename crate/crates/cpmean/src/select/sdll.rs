// SPDX-License-Identifier: MIT OR Apache-2.0

//! Steepest drop to low levels.

use super::calibrate::CalibrationTable;
use crate::error::{param, Result};
use crate::hierarchical::SolutionPath;
use crate::series::Segmentation;

/// Where the first-stage constant comes from. All forms are in units of
/// `σ̂ sqrt(log n)`.
#[derive(Debug, Clone, PartialEq)]
pub enum C1Spec {
    Value(f64),
    /// Looked up in the bundled calibration table.
    Alpha(f64),
    Calibrated { alpha: f64, table: CalibrationTable },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdllConfig {
    pub c1: C1Spec,
    /// Low-level bound constant in data units; `None` means `0.3 √2 σ̂`.
    pub c2: Option<f64>,
    /// Noise scale, normally the MAD estimate.
    pub sigma: f64,
}

impl SdllConfig {
    pub fn new(alpha: f64, sigma: f64) -> Self {
        Self {
            c1: C1Spec::Alpha(alpha),
            c2: None,
            sigma,
        }
    }

    /// `(c1, c2)` both in data units.
    pub fn resolve(&self, n: usize) -> Result<(f64, f64)> {
        if !(self.sigma > 0.0) {
            return param("SDLL needs a positive noise scale");
        }
        let c1 = match &self.c1 {
            C1Spec::Value(v) => *v,
            C1Spec::Alpha(a) => CalibrationTable::builtin().lookup(n, *a)?,
            C1Spec::Calibrated { alpha, table } => table.lookup(n, *alpha)?,
        };
        let c2 = self
            .c2
            .unwrap_or(0.3 * std::f64::consts::SQRT_2 * self.sigma);
        if !(c1 > 0.0) || !(c2 > 0.0) {
            return param("SDLL constants must be positive");
        }
        Ok((c1 * self.sigma, c2))
    }
}

/// Model size chosen from CUSUMs sorted in non-increasing order.
///
/// `c1` and `c2` are in data units. Falls back to counting the CUSUMs at or
/// above `c1 sqrt(log n)` when no drop reaches a low level.
pub fn sdll_count(cusums: &[f64], c1: f64, c2: f64, n: usize) -> usize {
    let sl = (n as f64).ln().max(0.0).sqrt();
    let lambda1 = c1 * sl;
    if cusums.first().map_or(true, |&c| c < lambda1) {
        return 0;
    }
    let low = c2 * sl;
    let k = cusums.iter().take_while(|&&c| c >= low && c > 0.0).count();
    // drop i sits between C_(i) and C_(i+1), both 1-based
    let mut drops: Vec<(usize, f64)> = (1..k)
        .map(|i| (i, cusums[i - 1].ln() - cusums[i].ln()))
        .collect();
    drops.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    drops
        .iter()
        .find(|&&(i, _)| cusums[i] <= lambda1)
        .map(|&(i, _)| i)
        .unwrap_or_else(|| cusums.iter().take_while(|&&c| c >= lambda1).count())
}

pub fn select_by_sdll(path: &SolutionPath, cfg: &SdllConfig) -> Result<Segmentation> {
    let (c1, c2) = cfg.resolve(path.n)?;
    let cusums = path.cusums();
    if cusums.windows(2).any(|w| w[0] < w[1]) {
        return param("SDLL needs a path sorted by decreasing CUSUM");
    }
    Ok(path.prefix(sdll_count(&cusums, c1, c2, path.n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_rejects_weak_paths() {
        assert_eq!(sdll_count(&[1.0, 0.5], 1.0, 0.1, 100), 0);
        assert_eq!(sdll_count(&[], 1.0, 0.1, 100), 0);
    }

    #[test]
    fn steepest_drop_needs_a_low_level_after_it() {
        let n = 1000usize;
        let sl = (n as f64).ln().sqrt();
        let big = 20.0 * (n as f64).sqrt();
        let mid = 10.0 * (n as f64).sqrt();
        // drop 1→2 is log 2, drop 2→3 is far steeper and lands low
        let c = [big, mid, 0.8 * sl, 0.7 * sl, 0.65 * sl];
        assert_eq!(sdll_count(&c, 1.0, 0.5, n), 2);
        // with a high third CUSUM the steep drop after it wins
        let c = [big, mid, 0.5 * mid, 0.9 * sl, 0.8 * sl];
        assert_eq!(sdll_count(&c, 1.0, 0.5, n), 3);
    }
}
