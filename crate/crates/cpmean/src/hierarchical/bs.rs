// SPDX-License-Identifier: MIT OR Apache-2.0

use super::{PathEntry, SolutionPath};
use crate::error::{param, Result};
use crate::series::TimeSeries;

/// Binary segmentation.
///
/// Candidates with CUSUM below `zeta` stop the recursion on their interval.
/// With `zeta = 0` every admissible split is visited, which gives the full
/// path of `n - 1` candidates when `min_seg_len = 1`.
pub fn binary_segmentation(ts: &TimeSeries, zeta: f64, min_seg_len: usize) -> Result<SolutionPath> {
    if !(zeta >= 0.0) {
        return param(format!("threshold must be non-negative, got {zeta}"));
    }
    if min_seg_len < 1 {
        return param("min_seg_len must be at least 1");
    }
    let n = ts.len();
    let msl = min_seg_len;
    let mut entries = Vec::new();
    let mut stack = vec![(1usize, n)];
    while let Some((s, e)) = stack.pop() {
        if e < s + 2 * msl - 1 {
            continue;
        }
        let mut best_b = s + msl - 1;
        let mut best = -1.0;
        for b in s + msl - 1..=e - msl {
            let c = ts.cusum_signed(s, b, e).abs();
            if c > best {
                best = c;
                best_b = b;
            }
        }
        if best < zeta {
            continue;
        }
        entries.push(PathEntry {
            b: best_b,
            s,
            e,
            cusum: best,
        });
        stack.push((best_b + 1, e));
        stack.push((s, best_b));
    }
    Ok(SolutionPath::sorted(n, entries))
}
