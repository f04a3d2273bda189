// SPDX-License-Identifier: MIT OR Apache-2.0

//! Tail-greedy unbalanced Haar transform.
//!
//! Starts from singletons and, stage by stage, merges the adjacent region
//! pairs whose scaled difference is smallest. Each merge is a 2x2 rotation of
//! the two regions' smooth coefficients, so the transform is orthonormal
//! given the merge order, and each detail equals the signed CUSUM of the
//! merged region split at the merge boundary.

use serde::{Deserialize, Serialize};

use super::{PathEntry, SolutionPath};
use crate::error::{param, Error, Result};
use crate::series::{Segmentation, TimeSeries};
use crate::variance::sigma_mad;

pub const DEFAULT_RHO: f64 = 0.01;

/// Detail from merging `[p, q]` with `[q+1, r]` (1-based, inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TguhDetail {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub stage: usize,
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TguhDecomposition {
    pub n: usize,
    pub rho: f64,
    /// In merge order; the merge tree is implied by `(p, q, r)`.
    pub details: Vec<TguhDetail>,
    pub smooth: f64,
    pub stages: usize,
}

#[derive(Clone, Copy)]
struct Region {
    start: usize,
    end: usize,
    smooth: f64,
}

impl Region {
    fn len(&self) -> f64 {
        (self.end - self.start + 1) as f64
    }
}

/// Rotation coefficients `(a, b, c, d)` with `detail = a·sL + b·sR` and
/// `smooth = c·sL + d·sR`.
#[inline]
fn weights(ll: f64, lr: f64) -> (f64, f64, f64, f64) {
    let l = ll + lr;
    let a = (lr / l).sqrt();
    let c = (ll / l).sqrt();
    (a, -c, c, a)
}

pub fn tguh_transform(ts: &TimeSeries, rho: f64) -> Result<TguhDecomposition> {
    if !(rho > 0.0 && rho < 1.0) {
        return param(format!("rho must lie in (0, 1), got {rho}"));
    }
    let n = ts.len();
    if n < 2 {
        return param("the transform needs n >= 2");
    }
    let mut regions: Vec<Region> = ts
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| Region {
            start: i + 1,
            end: i + 1,
            smooth: v,
        })
        .collect();
    let mut details = Vec::with_capacity(n - 1);
    let mut stage = 0;
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut diffs: Vec<f64> = Vec::with_capacity(n);
    while regions.len() > 1 {
        stage += 1;
        let alpha = regions.len();
        diffs.clear();
        diffs.extend(regions.windows(2).map(|w| {
            let (a, b, _, _) = weights(w[0].len(), w[1].len());
            a * w[0].smooth + b * w[1].smooth
        }));
        order.clear();
        order.extend(0..alpha - 1);
        order.sort_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()).then(i.cmp(&j)));

        let quota = (rho * alpha as f64).ceil() as usize;
        let mut used = vec![false; alpha];
        let mut merge_at = vec![false; alpha];
        let mut k = 0;
        for &i in &order {
            if k == quota {
                break;
            }
            if used[i] || used[i + 1] {
                continue;
            }
            used[i] = true;
            used[i + 1] = true;
            merge_at[i] = true;
            k += 1;
            details.push(TguhDetail {
                p: regions[i].start,
                q: regions[i].end,
                r: regions[i + 1].end,
                stage,
                index: k,
                value: diffs[i],
            });
        }

        let mut next = Vec::with_capacity(alpha - k);
        let mut i = 0;
        while i < alpha {
            if merge_at[i] {
                let (l, r) = (regions[i], regions[i + 1]);
                let (_, _, c, d) = weights(l.len(), r.len());
                next.push(Region {
                    start: l.start,
                    end: r.end,
                    smooth: c * l.smooth + d * r.smooth,
                });
                i += 2;
            } else {
                next.push(regions[i]);
                i += 1;
            }
        }
        regions = next;
    }
    Ok(TguhDecomposition {
        n,
        rho,
        details,
        smooth: regions[0].smooth,
        stages: stage,
    })
}

/// Exact inverse of [`tguh_transform`].
pub fn tguh_inverse(decomp: &TguhDecomposition) -> Result<Vec<f64>> {
    invert(decomp, |d| d.value)
}

/// Inverse with every detail of magnitude below `threshold` set to zero.
pub fn tguh_inverse_thresholded(decomp: &TguhDecomposition, threshold: f64) -> Result<Vec<f64>> {
    invert(decomp, |d| if d.value.abs() < threshold { 0.0 } else { d.value })
}

fn invert(decomp: &TguhDecomposition, detail: impl Fn(&TguhDetail) -> f64) -> Result<Vec<f64>> {
    let n = decomp.n;
    if n == 0 || decomp.details.len() + 1 != n {
        return Err(Error::Parameter(format!(
            "decomposition has {} details for n = {n}",
            decomp.details.len()
        )));
    }
    // region start -> (end, smooth)
    let mut at: Vec<Option<(usize, f64)>> = vec![None; n + 2];
    at[1] = Some((n, decomp.smooth));
    for d in decomp.details.iter().rev() {
        let malformed = || Error::Parameter(format!("merge ({}, {}, {}) not invertible", d.p, d.q, d.r));
        if !(1 <= d.p && d.p <= d.q && d.q < d.r && d.r <= n) {
            return Err(malformed());
        }
        let (end, s) = at[d.p].take().ok_or_else(malformed)?;
        if end != d.r {
            return Err(malformed());
        }
        let (a, b, c, e) = weights((d.q - d.p + 1) as f64, (d.r - d.q) as f64);
        let v = detail(d);
        // transpose of the forward rotation
        at[d.p] = Some((d.q, a * v + c * s));
        at[d.q + 1] = Some((d.r, b * v + e * s));
    }
    (1..=n)
        .map(|i| match at[i] {
            Some((end, v)) if end == i => Ok(v),
            _ => Err(Error::Parameter("merge tree does not reach singletons".into())),
        })
        .collect()
}

/// Details as a solution path, strongest first.
pub fn tguh_path(decomp: &TguhDecomposition) -> SolutionPath {
    let entries = decomp
        .details
        .iter()
        .map(|d| PathEntry {
            b: d.q,
            s: d.p,
            e: d.r,
            cusum: d.value.abs(),
        })
        .collect();
    SolutionPath::sorted(decomp.n, entries)
}

/// `σ̂_MAD · sqrt(2 log n)`.
pub fn default_tguh_threshold(ts: &TimeSeries) -> Result<f64> {
    let sigma = sigma_mad(ts.values())?.sigma;
    Ok(sigma * (2.0 * (ts.len() as f64).ln()).sqrt())
}

/// Change-points at the merge boundaries of details with `|d| ≥ threshold`.
pub fn tguh_detect(ts: &TimeSeries, rho: f64, threshold: f64) -> Result<Segmentation> {
    if !(threshold >= 0.0) {
        return param(format!("threshold must be non-negative, got {threshold}"));
    }
    let decomp = tguh_transform(ts, rho)?;
    let pts = decomp
        .details
        .iter()
        .filter(|d| d.value.abs() >= threshold)
        .map(|d| d.q)
        .collect();
    Segmentation::from_unsorted(pts, ts.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_with_pair_weights() {
        let (a, b, _, _) = weights(1.0, 2.0);
        assert!((a - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((b + 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }
}
