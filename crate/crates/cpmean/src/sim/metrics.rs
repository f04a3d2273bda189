// SPDX-License-Identifier: MIT OR Apache-2.0

use crate::error::{Error, Result};

fn directed(from: &[usize], to: &[usize]) -> usize {
    from.iter()
        .map(|&a| to.iter().map(|&b| a.abs_diff(b)).min().unwrap())
        .max()
        .unwrap_or(0)
}

/// Hausdorff distance between two change-point sets.
///
/// Both empty gives 0; exactly one empty gives the sentinel `n`.
pub fn hausdorff(truth: &[usize], est: &[usize], n: usize) -> f64 {
    match (truth.is_empty(), est.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => n as f64,
        _ => directed(truth, est).max(directed(est, truth)) as f64,
    }
}

/// `max_j |τ̂_j - τ_j|` pairing both sorted sets in order.
pub fn max_location_error(truth: &[usize], est: &[usize]) -> Result<f64> {
    if truth.len() != est.len() {
        return Err(Error::Cardinality {
            left: truth.len(),
            right: est.len(),
        });
    }
    Ok(truth
        .iter()
        .zip(est)
        .map(|(a, b)| a.abs_diff(*b))
        .max()
        .unwrap_or(0) as f64)
}

/// `max_{0≤i<j≤n} (ε_{i+1} + ... + ε_j)² / (j - i)`, by brute force.
pub fn max_norm_partial_sum(eps: &[f64]) -> f64 {
    let n = eps.len();
    let mut cum = vec![0.0; n + 1];
    for i in 0..n {
        cum[i + 1] = cum[i] + eps[i];
    }
    let mut best: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..=n {
            let s = cum[j] - cum[i];
            best = best.max(s * s / (j - i) as f64);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(hausdorff(&[50], &[60], 100), 10.0);
        assert_eq!(hausdorff(&[50, 100], &[50], 200), 50.0);
        assert_eq!(hausdorff(&[], &[3], 9), 9.0);
        assert_eq!(max_location_error(&[10, 20], &[12, 19]).unwrap(), 2.0);
        assert!(max_location_error(&[1], &[]).is_err());
        assert_eq!(max_norm_partial_sum(&[1.0, 1.0]), 2.0);
    }
}
