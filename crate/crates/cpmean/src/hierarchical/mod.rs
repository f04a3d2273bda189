// SPDX-License-Identifier: MIT OR Apache-2.0

//! Greedy top-down and bottom-up detectors.

mod bs;
mod grid;
mod tguh;
mod wbs;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::series::{PiecewiseFit, Segmentation, TimeSeries};

pub use bs::binary_segmentation;
pub use grid::{make_grid, GridKind, IntervalGrid, DEFAULT_INTERVALS};
pub use tguh::{
    default_tguh_threshold, tguh_detect, tguh_inverse, tguh_inverse_thresholded, tguh_path,
    tguh_transform, TguhDecomposition, TguhDetail, DEFAULT_RHO,
};
pub use wbs::{wbs, wbs2, DEFAULT_WBS2_INTERVALS};

/// Default multiplier in the `C σ̂ sqrt(2 log n)` threshold for BS and WBS.
pub const DEFAULT_THRESHOLD_CONST: f64 = 1.15;

/// One candidate on a solution path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathEntry {
    pub b: usize,
    pub s: usize,
    pub e: usize,
    pub cusum: f64,
}

/// Candidates ordered by detection strength; every prefix is a nested model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionPath {
    pub n: usize,
    pub entries: Vec<PathEntry>,
}

impl SolutionPath {
    /// Sorts by decreasing CUSUM, ties by location.
    pub(crate) fn sorted(n: usize, mut entries: Vec<PathEntry>) -> Self {
        entries.sort_by(|x, y| y.cusum.total_cmp(&x.cusum).then(x.b.cmp(&y.b)));
        Self { n, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn cusums(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.cusum).collect()
    }

    /// Model made of the first `k` candidates (clamped to the path length).
    pub fn prefix(&self, k: usize) -> Segmentation {
        let pts = self.entries[..k.min(self.len())]
            .iter()
            .map(|e| e.b)
            .collect();
        Segmentation::from_unsorted(pts, self.n).expect("path entries lie inside the series")
    }

    /// Nested fits `M_0, ..., M_k` with `k = min(n_max, len)`.
    pub fn nested_fits(&self, ts: &TimeSeries, n_max: usize) -> Result<Vec<PiecewiseFit>> {
        (0..=n_max.min(self.len()))
            .map(|k| PiecewiseFit::new(ts, self.prefix(k)))
            .collect()
    }
}

/// Candidate ordering for argmax reductions: larger CUSUM wins, then the
/// lexicographically smallest `(s, e, b)`. Deterministic regardless of the
/// order in which candidates were evaluated.
#[inline]
pub(crate) fn beats(a: &PathEntry, b: &PathEntry) -> bool {
    if a.cusum != b.cusum {
        return a.cusum > b.cusum;
    }
    (a.s, a.e, a.b) < (b.s, b.e, b.b)
}
