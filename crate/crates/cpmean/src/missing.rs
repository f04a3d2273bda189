// SPDX-License-Identifier: MIT OR Apache-2.0

//! Dropping missing values and mapping change-points back.
//!
//! With observed positions `j_1 < ... < j_m` (1-based), a change after
//! compact index `τ*` maps to original index `j_{τ*}`: the gap of missing
//! values that follows belongs to the right-hand segment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissingMap {
    pub compact: Vec<f64>,
    /// `index[i]` is the 1-based original position of `compact[i]`.
    pub index: Vec<usize>,
    pub n_original: usize,
}

pub fn remap_missing(values: &[Option<f64>]) -> Result<MissingMap> {
    let (index, compact): (Vec<usize>, Vec<f64>) = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|x| (i + 1, x)))
        .unzip();
    if compact.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(MissingMap {
        compact,
        index,
        n_original: values.len(),
    })
}

impl MissingMap {
    pub fn has_missing(&self) -> bool {
        self.compact.len() != self.n_original
    }

    /// `τ = j_{τ*}` for each compact change-point.
    pub fn to_original(&self, compact_cps: &[usize]) -> Result<Vec<usize>> {
        let m = self.compact.len();
        compact_cps
            .iter()
            .map(|&t| {
                if t == 0 || t >= m {
                    Err(Error::Index(format!("compact change-point {t} outside [1, {}]", m - 1)))
                } else {
                    Ok(self.index[t - 1])
                }
            })
            .collect()
    }

    /// Inverse of [`to_original`](Self::to_original) on its image.
    pub fn to_compact(&self, original_cp: usize) -> Option<usize> {
        self.index
            .binary_search(&original_cp)
            .ok()
            .map(|i| i + 1)
            .filter(|&t| t < self.compact.len())
    }
}
