// SPDX-License-Identifier: MIT OR Apache-2.0

use super::grid::deterministic_intervals;
use super::{beats, IntervalGrid, PathEntry, SolutionPath};
use crate::error::{param, Result};
use crate::par;
use crate::series::TimeSeries;

/// Default per-stage grid size for WBS2.
pub const DEFAULT_WBS2_INTERVALS: usize = 1000;

fn evaluate(ts: &TimeSeries, intervals: &[(usize, usize)]) -> Vec<PathEntry> {
    let work: usize = intervals.iter().map(|&(s, e)| e - s).sum();
    par::map_slice_sized(intervals, work, |&(s, e)| {
        let (b, cusum) = ts.best_split(s, e);
        PathEntry { b, s, e, cusum }
    })
}

fn argmax(entries: &[PathEntry]) -> Option<PathEntry> {
    let mut it = entries.iter();
    let mut best = *it.next()?;
    for c in it {
        if beats(c, &best) {
            best = *c;
        }
    }
    Some(best)
}

/// Wild binary segmentation, non-recursive form.
///
/// Repeatedly takes the strongest (interval, split) among the surviving
/// intervals and discards every interval that has the chosen split in its
/// interior. Stops once the best CUSUM drops below `zeta`; `zeta = 0` runs
/// until no interval survives.
pub fn wbs(ts: &TimeSeries, grid: &IntervalGrid, zeta: f64) -> Result<SolutionPath> {
    if !(zeta >= 0.0) {
        return param(format!("threshold must be non-negative, got {zeta}"));
    }
    if grid.n != ts.len() {
        return param(format!(
            "grid built for n = {}, series has n = {}",
            grid.n,
            ts.len()
        ));
    }
    let mut alive = evaluate(ts, &grid.intervals);
    let mut entries = Vec::new();
    while let Some(best) = argmax(&alive) {
        if best.cusum < zeta {
            break;
        }
        entries.push(best);
        alive.retain(|c| !(c.s <= best.b && best.b < c.e));
    }
    Ok(SolutionPath::sorted(ts.len(), entries))
}

/// WBS2: a fresh deterministic grid of up to `m_per_stage` intervals is laid
/// on every interval visited by the recursion. Always returns the complete
/// path of `n - 1` candidates.
pub fn wbs2(ts: &TimeSeries, m_per_stage: usize) -> Result<SolutionPath> {
    if m_per_stage < 1 {
        return param("m_per_stage must be at least 1");
    }
    let n = ts.len();
    let mut entries = Vec::with_capacity(n.saturating_sub(1));
    let mut stack = vec![(1usize, n)];
    while let Some((s, e)) = stack.pop() {
        if e <= s {
            continue;
        }
        let cands = evaluate(ts, &deterministic_intervals(s, e, m_per_stage));
        let best = argmax(&cands).expect("interval of length >= 2 has a split");
        entries.push(best);
        stack.push((best.b + 1, e));
        stack.push((s, best.b));
    }
    Ok(SolutionPath::sorted(n, entries))
}
