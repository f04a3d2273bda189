// SPDX-License-Identifier: MIT OR Apache-2.0

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::series::Segmentation;

use super::rng_for;

/// Donoho–Johnstone blocks: jump positions on `(0, 1)` and jump heights.
const BLOCKS_T: [f64; 11] = [
    0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81,
];
const BLOCKS_H: [f64; 11] = [4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2];
/// Sample standard deviation the blocks signal is scaled to.
const BLOCKS_SD: f64 = 7.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Signal {
    Blocks { n: usize },
    Teeth { per_tooth: usize, teeth: usize, low: f64, high: f64 },
    /// `0 × 150, 5 × 30, 4 × 120`.
    Mscale,
    Constant { n: usize, level: f64 },
    Custom { levels: Vec<f64>, lengths: Vec<usize> },
}

impl Signal {
    pub fn teeth_default() -> Self {
        Signal::Teeth { per_tooth: 10, teeth: 20, low: 0.0, high: 1.0 }
    }
}

fn piecewise(levels: &[f64], lengths: &[usize]) -> (Vec<f64>, Vec<usize>) {
    let mut x = Vec::with_capacity(lengths.iter().sum());
    let mut cps = Vec::new();
    for (i, (&v, &l)) in levels.iter().zip(lengths).enumerate() {
        x.extend(std::iter::repeat(v).take(l));
        if i + 1 < levels.len() && levels[i + 1] != v {
            cps.push(x.len());
        }
    }
    (x, cps)
}

fn blocks(n: usize) -> Result<(Vec<f64>, Vec<usize>)> {
    let taus: Vec<usize> = BLOCKS_T
        .iter()
        .map(|t| (t * n as f64 + 1e-9).floor() as usize)
        .collect();
    if taus[0] == 0 || taus.windows(2).any(|w| w[0] >= w[1]) {
        return param(format!("n = {n} is too short for the blocks signal"));
    }
    let mut x: Vec<f64> = (1..=n)
        .map(|i| {
            taus.iter()
                .zip(BLOCKS_H)
                .filter(|(&tau, _)| i > tau)
                .map(|(_, h)| h)
                .sum()
        })
        .collect();
    let mean = x.iter().sum::<f64>() / n as f64;
    let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    x.iter_mut().for_each(|v| *v *= BLOCKS_SD / sd);
    Ok((x, taus))
}

/// Noise-free signal and its true change-points.
pub fn gen_signal(spec: &Signal) -> Result<(Vec<f64>, Segmentation)> {
    let (x, cps) = match spec {
        Signal::Blocks { n } => blocks(*n)?,
        Signal::Teeth { per_tooth, teeth, low, high } => {
            if *per_tooth == 0 || *teeth == 0 {
                return param("teeth need positive width and count");
            }
            let levels: Vec<f64> = (0..*teeth)
                .map(|i| if i % 2 == 0 { *low } else { *high })
                .collect();
            piecewise(&levels, &vec![*per_tooth; *teeth])
        }
        Signal::Mscale => piecewise(&[0.0, 5.0, 4.0], &[150, 30, 120]),
        Signal::Constant { n, level } => {
            if *n == 0 {
                return param("constant signal needs n >= 1");
            }
            (vec![*level; *n], Vec::new())
        }
        Signal::Custom { levels, lengths } => {
            if levels.is_empty() || levels.len() != lengths.len() || lengths.contains(&0) {
                return param("custom signal needs matching, positive segment lengths");
            }
            piecewise(levels, lengths)
        }
    };
    let n = x.len();
    Ok((x, Segmentation::new(cps, n)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Noise {
    Gaussian { sd: f64 },
    /// Parametrised by standard deviation; scale is `sd / √2`.
    Laplace { sd: f64 },
    /// Stationary AR(1) with marginal standard deviation `sd`.
    Ar1 { phi: f64, sd: f64 },
}

impl Noise {
    fn validate(&self) -> Result<()> {
        let sd = match *self {
            Noise::Gaussian { sd } | Noise::Laplace { sd } => sd,
            Noise::Ar1 { phi, sd } => {
                if !(phi.abs() < 1.0) {
                    return param(format!("AR(1) coefficient must satisfy |phi| < 1, got {phi}"));
                }
                sd
            }
        };
        if !(sd >= 0.0) || !sd.is_finite() {
            return param(format!("noise sd must be finite and non-negative, got {sd}"));
        }
        Ok(())
    }

    /// Adds noise in place, drawing from `rng`.
    pub fn add_to(&self, x: &mut [f64], rng: &mut ChaCha8Rng) -> Result<()> {
        self.validate()?;
        match *self {
            Noise::Gaussian { sd } => {
                for v in x.iter_mut() {
                    let z: f64 = StandardNormal.sample(rng);
                    *v += sd * z;
                }
            }
            Noise::Laplace { sd } => {
                let scale = sd / std::f64::consts::SQRT_2;
                for v in x.iter_mut() {
                    // inverse CDF on (-1/2, 1/2); the open interval keeps ln finite
                    let u: f64 = rng.random::<f64>() - 0.5;
                    let u = if u == -0.5 { 0.0 } else { u };
                    *v -= scale * u.signum() * (1.0 - 2.0 * u.abs()).ln();
                }
            }
            Noise::Ar1 { phi, sd } => {
                let innov = sd * (1.0 - phi * phi).sqrt();
                let mut e = 0.0;
                for (i, v) in x.iter_mut().enumerate() {
                    let z: f64 = StandardNormal.sample(rng);
                    e = if i == 0 { sd * z } else { phi * e + innov * z };
                    *v += e;
                }
            }
        }
        Ok(())
    }
}

/// `signal + noise`, deterministic in `seed`.
pub fn add_noise(signal: &[f64], noise: &Noise, seed: u64) -> Result<Vec<f64>> {
    let mut x = signal.to_vec();
    noise.add_to(&mut x, &mut rng_for(seed, 0))?;
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_has_eleven_changes() {
        for n in [200, 500, 1000, 2000, 4096] {
            let (x, seg) = gen_signal(&Signal::Blocks { n }).unwrap();
            assert_eq!(x.len(), n);
            assert_eq!(seg.len(), 11);
            let observed = x.windows(2).filter(|w| w[0] != w[1]).count();
            assert_eq!(observed, 11);
        }
    }

    #[test]
    fn mscale_and_teeth_layout() {
        let (x, seg) = gen_signal(&Signal::Mscale).unwrap();
        assert_eq!(x.len(), 300);
        assert_eq!(seg.change_points(), &[150, 180]);
        let (x, seg) = gen_signal(&Signal::teeth_default()).unwrap();
        assert_eq!(x.len(), 200);
        assert_eq!(seg.change_points(), &(1..20).map(|k| 10 * k).collect::<Vec<_>>()[..]);
    }
}
