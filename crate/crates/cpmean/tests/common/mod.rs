// SPDX-License-Identifier: MIT OR Apache-2.0

//! Brute-force reference implementations. Deliberately naive: no prefix
//! sums, no pruning, nothing shared with the library.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two-pass residual sum of squares for 1-based change-points.
pub fn naive_rss(x: &[f64], cps: &[usize]) -> f64 {
    let mut bounds = vec![0];
    bounds.extend_from_slice(cps);
    bounds.push(x.len());
    bounds
        .windows(2)
        .map(|w| {
            let seg = &x[w[0]..w[1]];
            let m = seg.iter().sum::<f64>() / seg.len() as f64;
            seg.iter().map(|v| (v - m) * (v - m)).sum::<f64>()
        })
        .sum()
}

fn valid(cps: &[usize], n: usize, msl: usize) -> bool {
    let mut prev = 0;
    for &c in cps.iter().chain(std::iter::once(&n)) {
        if c < prev + msl {
            return false;
        }
        prev = c;
    }
    true
}

/// Every subset of `{1, ..., n-1}` whose segments are at least `msl` long.
pub fn all_segmentations(n: usize, msl: usize) -> Vec<Vec<usize>> {
    assert!(n <= 20, "exhaustive enumeration is for tiny n");
    let slots = n - 1;
    (0u32..1 << slots)
        .map(|mask| (1..n).filter(|&i| mask >> (i - 1) & 1 == 1).collect::<Vec<_>>())
        .filter(|c| valid(c, n, msl))
        .collect()
}

/// Best and second-best RSS over segmentations with exactly `m` changes.
pub fn brute_segneigh(x: &[f64], m: usize, msl: usize) -> Option<(f64, Vec<usize>, f64)> {
    best_two(
        all_segmentations(x.len(), msl)
            .into_iter()
            .filter(|c| c.len() == m)
            .map(|c| (naive_rss(x, &c), c)),
    )
}

/// Best and second-best penalised cost `RSS + λ·m`.
pub fn brute_penalized(x: &[f64], lambda: f64, msl: usize) -> Option<(f64, Vec<usize>, f64)> {
    best_two(
        all_segmentations(x.len(), msl)
            .into_iter()
            .map(|c| (naive_rss(x, &c) + lambda * c.len() as f64, c)),
    )
}

fn best_two(it: impl Iterator<Item = (f64, Vec<usize>)>) -> Option<(f64, Vec<usize>, f64)> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut second = f64::INFINITY;
    for (v, c) in it {
        match &best {
            Some((b, _)) if v >= *b => second = second.min(v),
            _ => {
                if let Some((b, _)) = &best {
                    second = second.min(*b);
                }
                best = Some((v, c));
            }
        }
    }
    best.map(|(v, c)| (v, c, second))
}

/// CUSUM straight from its definition.
pub fn naive_cusum(x: &[f64], s: usize, b: usize, e: usize) -> f64 {
    let left = &x[s - 1..b];
    let right = &x[b..e];
    let nl = left.len() as f64;
    let nr = right.len() as f64;
    let ml = left.iter().sum::<f64>() / nl;
    let mr = right.iter().sum::<f64>() / nr;
    (nl * nr / (nl + nr)).sqrt() * (ml - mr)
}

/// TV-penalised least squares by projected coordinate descent on the dual:
/// `f = X - Dᵀu`, `|u_k| ≤ γ/2`.
pub fn tv_dual_descent(x: &[f64], gamma: f64, sweeps: usize) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return x.to_vec();
    }
    let half = gamma / 2.0;
    let mut u = vec![0.0; n - 1];
    for _ in 0..sweeps {
        let mut moved: f64 = 0.0;
        for k in 0..n - 1 {
            let left = if k > 0 { u[k - 1] } else { 0.0 };
            let right = if k + 2 < n { u[k + 1] } else { 0.0 };
            let new = ((x[k + 1] - x[k] + left + right) / 2.0).clamp(-half, half);
            moved = moved.max((new - u[k]).abs());
            u[k] = new;
        }
        if moved < 1e-15 {
            break;
        }
    }
    // (Dᵀu)_i = u_{i-1} - u_i with D f = (f_{i+1} - f_i)
    (0..n)
        .map(|i| {
            let prev = if i > 0 { u[i - 1] } else { 0.0 };
            let cur = if i + 1 < n { u[i] } else { 0.0 };
            x[i] - (prev - cur)
        })
        .collect()
}

pub fn tv_objective(x: &[f64], f: &[f64], gamma: f64) -> f64 {
    let rss: f64 = x.iter().zip(f).map(|(a, b)| (a - b) * (a - b)).sum();
    rss + gamma * f.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>()
}

/// Piecewise-constant signal with random levels plus Gaussian-ish noise,
/// drawn without the library's generators.
pub fn random_piecewise(rng: &mut ChaCha8Rng, n: usize, max_changes: usize, noise: f64) -> Vec<f64> {
    let k = rng.random_range(0..=max_changes.min(n - 1));
    let mut cps: Vec<usize> = (0..k).map(|_| rng.random_range(1..n)).collect();
    cps.sort_unstable();
    cps.dedup();
    let mut level = rng.random_range(-3.0..3.0);
    let mut out = Vec::with_capacity(n);
    let mut next = cps.iter().peekable();
    for i in 0..n {
        if next.peek().is_some_and(|&&c| c == i) {
            next.next();
            level = rng.random_range(-3.0..3.0);
        }
        // sum of uniforms: cheap, independent of the library's normal sampler
        let z: f64 = (0..12).map(|_| rng.random::<f64>()).sum::<f64>() - 6.0;
        out.push(level + noise * z);
    }
    out
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
