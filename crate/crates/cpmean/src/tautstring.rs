// SPDX-License-Identifier: MIT OR Apache-2.0

//! Total-variation penalised least squares via the taut string.
//!
//! Minimises `Σ (X_i - f_i)² + γ Σ |f_{i+1} - f_i|`. The fit is the
//! derivative of the shortest path from `(0, 0)` to `(n, ΣX)` that stays
//! within `γ/2` of the cumulative sums.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TvFit {
    pub fit: Vec<f64>,
    pub gamma: f64,
    /// Change-points of the fit: `i` such that `f_i ≠ f_{i+1}` (1-based).
    pub knots: Vec<usize>,
}

impl TvFit {
    pub fn total_variation(&self) -> f64 {
        self.fit.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        let rss: f64 = x.iter().zip(&self.fit).map(|(a, b)| (a - b) * (a - b)).sum();
        rss + self.gamma * self.total_variation()
    }
}

fn knots_of(fit: &[f64]) -> Vec<usize> {
    fit.windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] != w[1])
        .map(|(i, _)| i + 1)
        .collect()
}

/// Solves the TV problem for penalty `gamma`.
///
/// Greedy funnel construction: from the current anchor the feasible slopes
/// form a cone bounded by the tightest lower and upper tube points seen so
/// far. When the cone empties, the string bends at the point that last
/// tightened the violated side; that point becomes the new anchor and the
/// scan resumes from there. Each resume rescans at most one segment, so the
/// cost is linear in practice.
pub fn taut_string(x: &[f64], gamma: f64) -> Result<TvFit> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return param(format!("gamma must be finite and non-negative, got {gamma}"));
    }
    let n = x.len();
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index: i + 1 });
    }
    if gamma == 0.0 {
        return Ok(TvFit {
            fit: x.to_vec(),
            gamma,
            knots: knots_of(x),
        });
    }
    let radius = gamma / 2.0;
    let mut cum = Vec::with_capacity(n + 1);
    cum.push(0.0);
    for v in x {
        cum.push(cum.last().unwrap() + v);
    }
    let lower = |k: usize| if k == 0 || k == n { cum[k] } else { cum[k] - radius };
    let upper = |k: usize| if k == 0 || k == n { cum[k] } else { cum[k] + radius };

    let mut fit = vec![0.0; n];
    let (mut a, mut ya) = (0usize, 0.0f64);
    while a < n {
        let mut lo_slope = f64::NEG_INFINITY;
        let mut hi_slope = f64::INFINITY;
        let (mut lo_at, mut hi_at) = (a, a);
        let mut k = a + 1;
        // (bend point, slope, anchor height at the bend)
        let (bend, slope, y_bend) = loop {
            let dx = (k - a) as f64;
            let sl = (lower(k) - ya) / dx;
            let su = (upper(k) - ya) / dx;
            if su < lo_slope {
                // upper tube dips below the cone: bend over the lower point
                break (lo_at, lo_slope, lower(lo_at));
            }
            if sl > hi_slope {
                break (hi_at, hi_slope, upper(hi_at));
            }
            if sl >= lo_slope {
                lo_slope = sl;
                lo_at = k;
            }
            if su <= hi_slope {
                hi_slope = su;
                hi_at = k;
            }
            if k == n {
                // both bounds meet at the endpoint
                break (n, (cum[n] - ya) / dx, cum[n]);
            }
            k += 1;
        };
        fit[a..bend].iter_mut().for_each(|f| *f = slope);
        ya = y_bend;
        a = bend;
    }
    let knots = knots_of(&fit);
    Ok(TvFit { fit, gamma, knots })
}

/// Outcome of the first-order optimality check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalityReport {
    pub ok: bool,
    pub max_violation: f64,
}

/// Checks the subgradient conditions of the TV problem.
///
/// With `R_k = Σ_{i≤k} (X_i - f_i)`, optimality is equivalent to
/// `|R_k| ≤ γ/2` for `k < n`, `R_n = 0`, and `R_k = -(γ/2)·sign(f_{k+1} - f_k)`
/// wherever the fit jumps.
pub fn tv_optimality_check(x: &[f64], fit: &TvFit, tol: f64) -> OptimalityReport {
    let n = x.len();
    if fit.fit.len() != n || n == 0 {
        return OptimalityReport {
            ok: false,
            max_violation: f64::INFINITY,
        };
    }
    let half = fit.gamma / 2.0;
    let mut r = 0.0;
    let mut worst: f64 = 0.0;
    for (k, (xk, fk)) in x.iter().zip(&fit.fit).enumerate() {
        r += xk - fk;
        if k + 1 == n {
            worst = worst.max(r.abs());
            break;
        }
        worst = worst.max(r.abs() - half);
        let jump = fit.fit[k + 1] - fit.fit[k];
        if jump != 0.0 {
            worst = worst.max((r + half * jump.signum()).abs());
        }
    }
    OptimalityReport {
        ok: worst <= tol,
        max_violation: worst.max(0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaircaseRow {
    pub gamma: f64,
    pub knots: usize,
}

/// Knot counts of the TV fit over a range of penalties.
pub fn staircase_demo(x: &[f64], gammas: &[f64]) -> Result<Vec<StaircaseRow>> {
    gammas
        .iter()
        .map(|&gamma| {
            Ok(StaircaseRow {
                gamma,
                knots: taut_string(x, gamma)?.knots.len(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_level_closed_form() {
        let fit = taut_string(&[0.0, 0.0, 2.0, 2.0], 1.0).unwrap();
        assert_eq!(fit.fit, vec![0.25, 0.25, 1.75, 1.75]);
        assert_eq!(fit.knots, vec![2]);
    }
}
