// SPDX-License-Identifier: MIT OR Apache-2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Default number of intervals for WBS.
pub const DEFAULT_INTERVALS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Random { seed: u64, m: usize },
    Deterministic { m: usize },
}

/// Intervals `(s, e)` with `1 ≤ s < e ≤ n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalGrid {
    pub n: usize,
    pub kind: GridKind,
    pub intervals: Vec<(usize, usize)>,
}

fn all_intervals(lo: usize, hi: usize) -> Vec<(usize, usize)> {
    (lo..hi)
        .flat_map(|s| (s + 1..=hi).map(move |e| (s, e)))
        .collect()
}

/// Round half to even, matching R's `round`.
fn round_half_even(x: f64) -> f64 {
    let r = x.round();
    if (x - x.trunc()).abs() == 0.5 {
        2.0 * (x / 2.0).round()
    } else {
        r
    }
}

/// Equispaced-grid intervals on `[lo, hi]`: the smallest `K` with
/// `K(K-1)/2 ≥ m` nodes, every pair of distinct nodes.
pub(crate) fn deterministic_intervals(lo: usize, hi: usize, m: usize) -> Vec<(usize, usize)> {
    let len = hi - lo + 1;
    let total = len * (len - 1) / 2;
    if m >= total {
        return all_intervals(lo, hi);
    }
    let mut k = 2usize;
    while k * (k - 1) / 2 < m {
        k += 1;
    }
    let span = (len - 1) as f64;
    let mut nodes: Vec<usize> = (0..k)
        .map(|i| round_half_even(span * i as f64 / (k - 1) as f64) as usize + lo)
        .collect();
    nodes.dedup();
    let mut out = Vec::with_capacity(nodes.len() * (nodes.len() - 1) / 2);
    for (i, &s) in nodes.iter().enumerate() {
        for &e in &nodes[i + 1..] {
            out.push((s, e));
        }
    }
    out
}

/// Builds a WBS interval grid on `[1, n]`.
///
/// If `m` reaches the number of distinct intervals, every interval is used.
/// Random grids redraw degenerate `s = e` pairs so exactly `m` intervals come
/// back; the generator is ChaCha8 seeded from `seed`.
pub fn make_grid(n: usize, kind: GridKind) -> Result<IntervalGrid> {
    if n < 2 {
        return param("interval grids need n >= 2");
    }
    let total = n * (n - 1) / 2;
    let intervals = match kind {
        GridKind::Deterministic { m } => {
            if m < 1 {
                return param("grid size must be at least 1");
            }
            deterministic_intervals(1, n, m)
        }
        GridKind::Random { seed, m } => {
            if m < 1 {
                return param("grid size must be at least 1");
            }
            if m >= total {
                all_intervals(1, n)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..m)
                    .map(|_| loop {
                        let a = rng.random_range(1..=n);
                        let b = rng.random_range(1..=n);
                        if a != b {
                            break (a.min(b), a.max(b));
                        }
                    })
                    .collect()
            }
        }
    };
    Ok(IntervalGrid { n, kind, intervals })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_even_rounding() {
        assert_eq!(round_half_even(2.5), 2.0);
        assert_eq!(round_half_even(3.5), 4.0);
        assert_eq!(round_half_even(3.4), 3.0);
    }

    #[test]
    fn single_interval_grid() {
        let g = make_grid(50, GridKind::Deterministic { m: 1 }).unwrap();
        assert_eq!(g.intervals, vec![(1, 50)]);
    }
}
