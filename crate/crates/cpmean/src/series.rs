// SPDX-License-Identifier: MIT OR Apache-2.0

//! Core series type, prefix-sum costs and the CUSUM / MOSUM contrasts.
//!
//! Indexing follows the usual change-point convention: observations are
//! `X_1..X_n`, and a change-point `τ` is the last index of the left segment.
//! Prefix sums are stored with a leading zero so that `sum(k, l)` is
//! `X_{k+1} + ... + X_l`.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Observed series with cached prefix sums. Immutable after construction.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    values: Vec<f64>,
    prefix_sum: Vec<f64>,
    prefix_sq: Vec<f64>,
    center_offset: f64,
}

/// Builds a [`TimeSeries`], optionally subtracting the global mean first.
pub fn load_series(values: &[f64], center: bool) -> Result<TimeSeries> {
    TimeSeries::new(values.to_vec(), center)
}

impl TimeSeries {
    pub fn new(mut values: Vec<f64>, center: bool) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: i + 1 });
        }
        let mut center_offset = 0.0;
        if center {
            let mut acc = Compensated::default();
            values.iter().for_each(|&v| acc.add(v));
            center_offset = acc.value() / values.len() as f64;
            values.iter_mut().for_each(|v| *v -= center_offset);
        }
        let n = values.len();
        let mut prefix_sum = Vec::with_capacity(n + 1);
        let mut prefix_sq = Vec::with_capacity(n + 1);
        prefix_sum.push(0.0);
        prefix_sq.push(0.0);
        let (mut s, mut q) = (Compensated::default(), Compensated::default());
        for &v in &values {
            s.add(v);
            q.add(v * v);
            prefix_sum.push(s.value());
            prefix_sq.push(q.value());
        }
        Ok(Self {
            values,
            prefix_sum,
            prefix_sq,
            center_offset,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Stored values (centered if the series was built with centering).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Values on the original scale.
    pub fn original_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v + self.center_offset).collect()
    }

    pub fn prefix_sum(&self) -> &[f64] {
        &self.prefix_sum
    }

    pub fn prefix_sq(&self) -> &[f64] {
        &self.prefix_sq
    }

    pub fn center_offset(&self) -> f64 {
        self.center_offset
    }

    /// `X_{k+1} + ... + X_l`.
    #[inline]
    pub fn sum(&self, k: usize, l: usize) -> f64 {
        self.prefix_sum[l] - self.prefix_sum[k]
    }

    /// Mean of `X_{k+1..l}` on the stored scale.
    #[inline]
    pub fn mean(&self, k: usize, l: usize) -> f64 {
        self.sum(k, l) / (l - k) as f64
    }

    /// Residual sum of squares of `X_{k+1..l}` about its mean.
    pub fn segment_cost(&self, k: usize, l: usize) -> Result<f64> {
        if k >= l || l > self.len() {
            return Err(Error::Index(format!(
                "segment ({k}, {l}] on a series of length {}",
                self.len()
            )));
        }
        Ok(self.cost(k, l))
    }

    /// Unchecked variant of [`segment_cost`](Self::segment_cost) for inner loops.
    #[inline]
    pub(crate) fn cost(&self, k: usize, l: usize) -> f64 {
        if l == k + 1 {
            return 0.0;
        }
        let s = self.prefix_sum[l] - self.prefix_sum[k];
        let q = self.prefix_sq[l] - self.prefix_sq[k];
        let c = q - s * s / (l - k) as f64;
        if c > 0.0 {
            c
        } else {
            0.0
        }
    }

    /// Total RSS of a segmentation.
    pub fn total_cost(&self, change_points: &[usize]) -> f64 {
        let mut prev = 0;
        let mut acc = 0.0;
        for &t in change_points.iter().chain(std::iter::once(&self.len())) {
            acc += self.cost(prev, t);
            prev = t;
        }
        acc
    }

    /// Signed CUSUM contrast of `X_{s..b}` against `X_{b+1..e}` (1-based).
    pub fn cusum(&self, s: usize, b: usize, e: usize) -> Result<CusumValue> {
        if !(1 <= s && s <= b && b < e && e <= self.len()) {
            return Err(Error::Index(format!(
                "cusum needs 1 <= s <= b < e <= n, got ({s}, {b}, {e}) with n = {}",
                self.len()
            )));
        }
        let signed = self.cusum_signed(s, b, e);
        Ok(CusumValue {
            s,
            b,
            e,
            signed,
            abs: signed.abs(),
        })
    }

    #[inline]
    pub(crate) fn cusum_signed(&self, s: usize, b: usize, e: usize) -> f64 {
        let nl = (b - s + 1) as f64;
        let nr = (e - b) as f64;
        let left = self.sum(s - 1, b) / nl;
        let right = self.sum(b, e) / nr;
        (nl * nr / (nl + nr)).sqrt() * (left - right)
    }

    /// Maximiser of `|C_{s,b,e}|` over `b ∈ [s, e-1]`; ties go to the smallest `b`.
    pub(crate) fn best_split(&self, s: usize, e: usize) -> (usize, f64) {
        let mut best_b = s;
        let mut best = -1.0;
        for b in s..e {
            let c = self.cusum_signed(s, b, e).abs();
            if c > best {
                best = c;
                best_b = b;
            }
        }
        (best_b, best)
    }

    /// MOSUM statistic at `tau` with bandwidth `b`.
    ///
    /// For `τ < b` and `τ > n - b` the window is clamped to the first or last
    /// `2b` points and the CUSUM on that window is returned, so the sign
    /// convention (left mean minus right mean) is the same everywhere.
    pub fn mosum_stat(&self, tau: usize, b: usize) -> Result<f64> {
        let n = self.len();
        if b < 1 || 2 * b > n {
            return param(format!("bandwidth {b} outside [1, {}]", n / 2));
        }
        if tau < 1 || tau >= n {
            return Err(Error::Index(format!("tau {tau} outside [1, {}]", n - 1)));
        }
        Ok(self.mosum_unchecked(tau, b))
    }

    #[inline]
    pub(crate) fn mosum_unchecked(&self, tau: usize, b: usize) -> f64 {
        let n = self.len();
        if tau < b {
            self.cusum_signed(1, tau, 2 * b)
        } else if tau > n - b {
            self.cusum_signed(n - 2 * b + 1, tau, n)
        } else {
            (self.sum(tau - b, tau) - self.sum(tau, tau + b)) / ((2 * b) as f64).sqrt()
        }
    }
}

/// A CUSUM evaluation with its indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CusumValue {
    pub s: usize,
    pub b: usize,
    pub e: usize,
    pub signed: f64,
    pub abs: f64,
}

/// `j`-th vector of the orthonormal step basis of `R^n`.
///
/// `j = 0` is the constant vector; for `j ≥ 1` the vector is a step down
/// after position `j`, scaled to zero sum and unit norm.
pub fn basis_vector(n: usize, j: usize) -> Result<Vec<f64>> {
    if n == 0 || j >= n {
        return Err(Error::Index(format!("basis index {j} for n = {n}")));
    }
    if j == 0 {
        return Ok(vec![1.0 / (n as f64).sqrt(); n]);
    }
    let (nf, jf) = (n as f64, j as f64);
    let hi = ((nf - jf) / (nf * jf)).sqrt();
    let lo = -(jf / (nf * (nf - jf))).sqrt();
    Ok((0..n).map(|i| if i < j { hi } else { lo }).collect())
}

/// Ordered change-points of a series of length `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segmentation {
    change_points: Vec<usize>,
    n: usize,
}

impl Segmentation {
    /// Validates that the points are strictly increasing and inside `[1, n-1]`.
    pub fn new(change_points: Vec<usize>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySeries);
        }
        let mut prev = 0;
        for &t in &change_points {
            if t <= prev || t >= n {
                return Err(Error::Index(format!(
                    "change-points must be strictly increasing in [1, {}], got {change_points:?}",
                    n - 1
                )));
            }
            prev = t;
        }
        Ok(Self { change_points, n })
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(mut change_points: Vec<usize>, n: usize) -> Result<Self> {
        change_points.sort_unstable();
        change_points.dedup();
        Self::new(change_points, n)
    }

    pub fn empty(n: usize) -> Self {
        Self {
            change_points: Vec::new(),
            n,
        }
    }

    pub fn change_points(&self) -> &[usize] {
        &self.change_points
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.change_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.change_points.is_empty()
    }

    /// `τ_j / n`.
    pub fn rescaled(&self) -> Vec<f64> {
        self.change_points
            .iter()
            .map(|&t| t as f64 / self.n as f64)
            .collect()
    }

    /// Segment boundaries `(start, end]` in prefix-sum coordinates.
    pub fn segments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let starts = std::iter::once(0).chain(self.change_points.iter().copied());
        let ends = self
            .change_points
            .iter()
            .copied()
            .chain(std::iter::once(self.n));
        starts.zip(ends)
    }
}

/// Piecewise-constant least-squares fit for a given segmentation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseFit {
    pub segmentation: Segmentation,
    pub levels: Vec<f64>,
    pub rss: f64,
}

impl PiecewiseFit {
    pub fn new(ts: &TimeSeries, segmentation: Segmentation) -> Result<Self> {
        if segmentation.n() != ts.len() {
            return param(format!(
                "segmentation is for n = {}, series has n = {}",
                segmentation.n(),
                ts.len()
            ));
        }
        let mut levels = Vec::with_capacity(segmentation.len() + 1);
        let mut rss = 0.0;
        for (k, l) in segmentation.segments() {
            levels.push(ts.mean(k, l));
            rss += ts.cost(k, l);
        }
        Ok(Self {
            segmentation,
            levels,
            rss,
        })
    }

    pub(crate) fn from_points(ts: &TimeSeries, change_points: Vec<usize>) -> Self {
        let seg = Segmentation {
            change_points,
            n: ts.len(),
        };
        debug_assert!(Segmentation::new(seg.change_points.clone(), seg.n).is_ok());
        Self::new(ts, seg).expect("segmentation built for this series")
    }

    pub fn n_changes(&self) -> usize {
        self.segmentation.len()
    }

    pub fn change_points(&self) -> &[usize] {
        self.segmentation.change_points()
    }

    /// Fitted signal on the stored scale.
    pub fn fitted(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.segmentation.n());
        for ((k, l), &m) in self.segmentation.segments().zip(&self.levels) {
            out.extend(std::iter::repeat(m).take(l - k));
        }
        out
    }

    /// Segment means with a centering offset added back.
    pub fn levels_with_offset(&self, offset: f64) -> Vec<f64> {
        self.levels.iter().map(|m| m + offset).collect()
    }
}
