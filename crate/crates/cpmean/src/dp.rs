// SPDX-License-Identifier: MIT OR Apache-2.0

//! Exact least-squares segmentation by dynamic programming.
//!
//! Costs are plain RSS. Penalties are passed in the same units, so a
//! "2σ² log n" penalty is supplied already multiplied out.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::series::{PiecewiseFit, TimeSeries};

/// Cost table `Q[m][t]` for the Segment Neighbourhood recursion.
#[derive(Debug, Clone)]
pub struct SegNeighTable {
    /// `q[m][t]`: best RSS of `X_{1..t}` with exactly `m` changes (∞ if impossible).
    pub q: Vec<Vec<f64>>,
    /// `back[m][t]`: position of the last change for the entry above.
    pub back: Vec<Vec<usize>>,
    pub min_seg_len: usize,
}

impl SegNeighTable {
    pub fn n_max(&self) -> usize {
        self.q.len() - 1
    }

    /// Backtracks the optimal `m`-change segmentation of the full series.
    pub fn change_points(&self, m: usize) -> Vec<usize> {
        let n = self.q[0].len() - 1;
        let mut out = vec![0; m];
        let mut t = n;
        for j in (1..=m).rev() {
            t = self.back[j][t];
            out[j - 1] = t;
        }
        out
    }
}

fn check_min_seg(n: usize, min_seg_len: usize) -> Result<()> {
    if min_seg_len < 1 {
        return param("min_seg_len must be at least 1");
    }
    if min_seg_len > n {
        return Err(Error::Infeasible(format!(
            "min_seg_len {min_seg_len} exceeds series length {n}"
        )));
    }
    Ok(())
}

/// Fills the Segment Neighbourhood table up to `n_max` changes.
pub fn segneigh_table(ts: &TimeSeries, n_max: usize, min_seg_len: usize) -> Result<SegNeighTable> {
    let n = ts.len();
    check_min_seg(n, min_seg_len)?;
    if n_max + 1 > n || (n_max + 1) * min_seg_len > n {
        return Err(Error::Infeasible(format!(
            "{n_max} changes with minimum segment length {min_seg_len} do not fit in n = {n}"
        )));
    }
    let msl = min_seg_len;
    let mut q = vec![vec![f64::INFINITY; n + 1]; n_max + 1];
    let mut back = vec![vec![0usize; n + 1]; n_max + 1];
    for (t, q0) in q[0].iter_mut().enumerate().skip(msl) {
        *q0 = ts.cost(0, t);
    }
    for m in 1..=n_max {
        let (prev_rows, rest) = q.split_at_mut(m);
        let prev = &prev_rows[m - 1];
        let cur = &mut rest[0];
        for t in (m + 1) * msl..=n {
            let mut best = f64::INFINITY;
            let mut arg = 0;
            for (k, pk) in prev.iter().enumerate().take(t - msl + 1).skip(m * msl) {
                let c = pk + ts.cost(k, t);
                if c < best {
                    best = c;
                    arg = k;
                }
            }
            cur[t] = best;
            back[m][t] = arg;
        }
    }
    Ok(SegNeighTable {
        q,
        back,
        min_seg_len,
    })
}

/// Best fits with exactly `m = 0..=n_max` changes.
///
/// Ties go to the earliest last change, applied recursively during backtracking.
pub fn segment_neighbourhood(
    ts: &TimeSeries,
    n_max: usize,
    min_seg_len: usize,
) -> Result<Vec<PiecewiseFit>> {
    let table = segneigh_table(ts, n_max, min_seg_len)?;
    Ok((0..=n_max)
        .map(|m| PiecewiseFit::from_points(ts, table.change_points(m)))
        .collect())
}

/// Full output of a penalised solve.
#[derive(Debug, Clone)]
pub struct PenalizedTable {
    /// `q[t]` with `q[0] = -λ`; `q[n]` is the optimal penalised cost.
    pub q: Vec<f64>,
    pub back: Vec<usize>,
    /// Number of candidates scanned at each `t` (PELT diagnostics).
    pub candidates: Vec<usize>,
    pub lambda: f64,
}

impl PenalizedTable {
    pub fn change_points(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut t = self.q.len() - 1;
        while t > 0 {
            let k = self.back[t];
            if k > 0 {
                out.push(k);
            }
            t = k;
        }
        out.reverse();
        out
    }

    pub fn penalized_cost(&self) -> f64 {
        self.q[self.q.len() - 1]
    }

    pub fn mean_candidates(&self) -> f64 {
        if self.candidates.is_empty() {
            return 0.0;
        }
        self.candidates.iter().sum::<usize>() as f64 / self.candidates.len() as f64
    }
}

/// Optimal Partitioning, with PELT pruning when `prune` is set.
///
/// Pruning drops `k` once `Q_k + C(k,t) > Q_t` (the pruning inequality with
/// a tiny relative slack for round-off), so pruned candidates are strictly
/// dominated and the result matches the unpruned recursion. With
/// `min_seg_len = L > 1` the domination argument only holds for `T ≥ t + L`,
/// so a pruning decision taken at `t` is applied from `t + L` on.
pub fn op_solve(
    ts: &TimeSeries,
    lambda: f64,
    min_seg_len: usize,
    prune: bool,
) -> Result<PenalizedTable> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return param(format!("penalty must be finite and non-negative, got {lambda}"));
    }
    let n = ts.len();
    check_min_seg(n, min_seg_len)?;
    let msl = min_seg_len;
    let mut q = vec![f64::INFINITY; n + 1];
    let mut back = vec![0usize; n + 1];
    let mut counts = Vec::with_capacity(n);
    q[0] = -lambda;

    // (candidate, time at which it was marked for pruning)
    let mut cands: Vec<(usize, Option<usize>)> = vec![(0, None)];
    for t in msl..=n {
        if t >= 2 * msl {
            let k = t - msl;
            if q[k].is_finite() {
                cands.push((k, None));
            }
        }
        let mut best = f64::INFINITY;
        let mut arg = 0;
        let mut scanned = 0;
        for &(k, _) in &cands {
            if k + msl > t {
                continue;
            }
            scanned += 1;
            let c = q[k] + ts.cost(k, t);
            if c < best {
                best = c;
                arg = k;
            }
        }
        counts.push(scanned);
        q[t] = best + lambda;
        back[t] = arg;

        if prune && q[t].is_finite() {
            let slack = 1e-10 * (q[t].abs() + lambda + 1.0);
            for (k, mark) in cands.iter_mut() {
                if mark.is_none() && *k + msl <= t && q[*k] + ts.cost(*k, t) > q[t] + slack {
                    *mark = Some(t);
                }
            }
            cands.retain(|&(_, mark)| match mark {
                Some(at) => at + msl > t + 1,
                None => true,
            });
        }
    }
    Ok(PenalizedTable {
        q,
        back,
        candidates: counts,
        lambda,
    })
}

/// Minimiser of RSS + λ·(number of changes).
pub fn optimal_partitioning(
    ts: &TimeSeries,
    lambda: f64,
    min_seg_len: usize,
    prune: bool,
) -> Result<PiecewiseFit> {
    let table = op_solve(ts, lambda, min_seg_len, prune)?;
    Ok(PiecewiseFit::from_points(ts, table.change_points()))
}

/// PELT: [`optimal_partitioning`] with pruning on.
pub fn pelt(ts: &TimeSeries, lambda: f64, min_seg_len: usize) -> Result<PiecewiseFit> {
    optimal_partitioning(ts, lambda, min_seg_len, true)
}

/// One CROPS row: the segmentation optimal on `[lambda_lo, lambda_hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CropsEntry {
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub fit: PiecewiseFit,
}

impl CropsEntry {
    pub fn unpenalized_cost(&self) -> f64 {
        self.fit.rss
    }
}

/// All optimal segmentations over a penalty range, most changes first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CropsResult {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub entries: Vec<CropsEntry>,
}

impl CropsResult {
    /// Entry whose interval contains `lambda`.
    pub fn entry_for(&self, lambda: f64) -> Option<&CropsEntry> {
        self.entries
            .iter()
            .find(|e| lambda >= e.lambda_lo && lambda <= e.lambda_hi)
    }

    pub fn fits(&self) -> Vec<PiecewiseFit> {
        self.entries.iter().map(|e| e.fit.clone()).collect()
    }
}

/// Changepoints for a Range Of PenaltieS.
///
/// Bisects on penalties: with solutions at `λ_a < λ_b` having `m_a > m_b + 1`
/// changes, the only penalty at which a new optimum can appear is where the
/// two lines `c + mλ` cross. Solving there either finds a new segmentation
/// (recurse on both sides) or reproduces one of the ends (done).
pub fn crops(
    ts: &TimeSeries,
    lambda_min: f64,
    lambda_max: f64,
    min_seg_len: usize,
) -> Result<CropsResult> {
    if !(0.0 <= lambda_min && lambda_min <= lambda_max && lambda_max.is_finite()) {
        return param(format!(
            "penalty range [{lambda_min}, {lambda_max}] is not a valid interval"
        ));
    }
    let solve = |lam: f64| optimal_partitioning(ts, lam, min_seg_len, true);
    let lo = solve(lambda_min)?;
    let mut found = vec![lo.clone()];
    if lambda_max > lambda_min {
        let hi = solve(lambda_max)?;
        found.push(hi.clone());
        let mut stack = vec![(lo, hi)];
        while let Some((a, b)) = stack.pop() {
            let (ma, mb) = (a.n_changes(), b.n_changes());
            if ma <= mb + 1 {
                continue;
            }
            let lam = (b.rss - a.rss) / (ma - mb) as f64;
            let mid = solve(lam.clamp(lambda_min, lambda_max))?;
            let mm = mid.n_changes();
            if mm != ma && mm != mb {
                found.push(mid.clone());
                stack.push((a, mid.clone()));
                stack.push((mid, b));
            }
        }
    }
    found.sort_by_key(|x| std::cmp::Reverse(x.n_changes()));
    found.dedup_by(|x, y| x.n_changes() == y.n_changes());

    let mut entries: Vec<CropsEntry> = Vec::with_capacity(found.len());
    let mut lo_edge = lambda_min;
    for (i, fit) in found.iter().enumerate() {
        let hi_edge = match found.get(i + 1) {
            Some(next) => {
                let m_drop = (fit.n_changes() - next.n_changes()) as f64;
                ((next.rss - fit.rss) / m_drop).clamp(lo_edge, lambda_max)
            }
            None => lambda_max,
        };
        entries.push(CropsEntry {
            lambda_lo: lo_edge,
            lambda_hi: hi_edge,
            fit: fit.clone(),
        });
        lo_edge = hi_edge;
    }
    Ok(CropsResult {
        lambda_min,
        lambda_max,
        entries,
    })
}

/// `(N, RSS)` rows sorted by `N`, for elbow plots.
pub fn rss_vs_n_table(fits: &[PiecewiseFit]) -> Result<Vec<(usize, f64)>> {
    if fits.is_empty() {
        return param("rss_vs_n_table needs at least one fit");
    }
    let mut rows: Vec<(usize, f64)> = fits.iter().map(|f| (f.n_changes(), f.rss)).collect();
    rows.sort_by_key(|r| r.0);
    rows.dedup_by_key(|r| r.0);
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step() -> TimeSeries {
        TimeSeries::new(vec![0., 0., 0., 5., 5., 5.], false).unwrap()
    }

    #[test]
    fn segneigh_noiseless_step() {
        let fits = segment_neighbourhood(&step(), 2, 1).unwrap();
        assert_eq!(fits[0].rss, 37.5);
        assert_eq!(fits[1].change_points(), &[3]);
        assert_eq!(fits[1].rss, 0.0);
    }

    #[test]
    fn op_penalised_cost_of_step() {
        let t = op_solve(&step(), 1.0, 1, false).unwrap();
        assert_eq!(t.change_points(), vec![3]);
        assert_eq!(t.penalized_cost(), 1.0);
    }

    #[test]
    fn infeasible_min_seg_len() {
        assert!(matches!(
            segneigh_table(&step(), 2, 3),
            Err(Error::Infeasible(_))
        ));
    }
}
