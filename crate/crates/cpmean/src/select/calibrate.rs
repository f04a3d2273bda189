// SPDX-License-Identifier: MIT OR Apache-2.0

//! Monte Carlo calibration of the SDLL first-stage constant.
//!
//! Table format, one row per `(n, alpha)`:
//!
//! ```text
//! # sdll-c1-table v1
//! # n alpha c1
//! 1000 0.1 1.2345
//! ```
//!
//! Lines starting with `#` other than the version line are comments.

use std::fmt::Write as _;
use std::sync::OnceLock;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{param, Error, Result};
use crate::hierarchical::{wbs2, DEFAULT_WBS2_INTERVALS};
use crate::par;
use crate::series::TimeSeries;
use crate::sim::rng_for;
use crate::variance::{quantile_sorted, sigma_mad};

pub const TABLE_FORMAT_VERSION: u32 = 1;
const HEADER: &str = "# sdll-c1-table v1";
const BUILTIN: &str = include_str!("../../data/sdll_c1.txt");

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationRow {
    pub n: usize,
    pub alpha: f64,
    pub c1: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CalibrationTable {
    pub rows: Vec<CalibrationRow>,
}

impl CalibrationTable {
    /// The table shipped with the crate.
    pub fn builtin() -> &'static CalibrationTable {
        static TABLE: OnceLock<CalibrationTable> = OnceLock::new();
        TABLE.get_or_init(|| CalibrationTable::parse(BUILTIN).expect("bundled table is valid"))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next() != Some(HEADER) {
            return param(format!("calibration table must start with '{HEADER}'"));
        }
        let mut rows = Vec::new();
        for line in lines.filter(|l| !l.starts_with('#')) {
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parameter(format!("malformed calibration row '{line}'"));
            if f.len() != 3 {
                return Err(bad());
            }
            rows.push(CalibrationRow {
                n: f[0].parse().map_err(|_| bad())?,
                alpha: f[1].parse().map_err(|_| bad())?,
                c1: f[2].parse().map_err(|_| bad())?,
            });
        }
        rows.sort_by(|a, b| a.alpha.total_cmp(&b.alpha).then(a.n.cmp(&b.n)));
        Ok(Self { rows })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{HEADER}\n# n alpha c1\n");
        for r in &self.rows {
            writeln!(s, "{} {} {:.6}", r.n, r.alpha, r.c1).unwrap();
        }
        s
    }

    /// `c1` for `(n, alpha)`, linear in `log n` between grid points and
    /// clamped outside the grid. `alpha` must be one of the tabulated levels.
    pub fn lookup(&self, n: usize, alpha: f64) -> Result<f64> {
        let rows: Vec<&CalibrationRow> = self
            .rows
            .iter()
            .filter(|r| (r.alpha - alpha).abs() < 1e-12)
            .collect();
        let (first, last) = match (rows.first(), rows.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return param(format!("no calibration for alpha = {alpha}")),
        };
        if n <= first.n {
            return Ok(first.c1);
        }
        if n >= last.n {
            return Ok(last.c1);
        }
        let hi = rows.iter().position(|r| r.n >= n).unwrap();
        let (a, b) = (rows[hi - 1], rows[hi]);
        let t = ((n as f64).ln() - (a.n as f64).ln()) / ((b.n as f64).ln() - (a.n as f64).ln());
        Ok(a.c1 + t * (b.c1 - a.c1))
    }
}

/// Largest CUSUM on the WBS2 path of pure noise, over `σ̂_MAD sqrt(log n)`.
///
/// The whole path is needed: deeper stages scan intervals the first grid
/// misses and often beat its maximum.
fn null_statistic(n: usize, seed: u64, rep: u64) -> Result<f64> {
    let mut rng = rng_for(seed, rep);
    let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let sigma = sigma_mad(&x)?.sigma;
    let ts = TimeSeries::new(x, false)?;
    let path = wbs2(&ts, DEFAULT_WBS2_INTERVALS)?;
    let top = path.entries.first().map_or(0.0, |e| e.cusum);
    Ok(top / (sigma * (n as f64).ln().sqrt()))
}

/// Empirical `(1 - alpha)` quantiles of the null statistic on each `n`.
pub fn calibrate_sdll_c1(
    n_grid: &[usize],
    alphas: &[f64],
    reps: usize,
    seed: u64,
) -> Result<CalibrationTable> {
    if reps < 100 {
        return param("calibration needs at least 100 replications");
    }
    if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
        return param(format!("alpha must lie in (0, 1), got {a}"));
    }
    if let Some(n) = n_grid.iter().find(|&&n| n < 4) {
        return param(format!("calibration grid point n = {n} is too small"));
    }
    let mut rows = Vec::new();
    for &n in n_grid {
        let stream = seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let mut stats = par::map_range(reps, |r| null_statistic(n, stream, r as u64))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        stats.sort_unstable_by(f64::total_cmp);
        for &alpha in alphas {
            rows.push(CalibrationRow {
                n,
                alpha,
                c1: quantile_sorted(&stats, 1.0 - alpha),
            });
        }
    }
    rows.sort_by(|a, b| a.alpha.total_cmp(&b.alpha).then(a.n.cmp(&b.n)));
    Ok(CalibrationTable { rows })
}
