// SPDX-License-Identifier: MIT OR Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::series::{Segmentation, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdVersion {
    /// Restart just after the detected change-point.
    RestartAfterCp,
    /// Restart from the end of the window in which the detection happened.
    RestartAfterInterval,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdConfig {
    pub zeta: f64,
    pub step: usize,
    pub version: IdVersion,
}

impl IdConfig {
    pub fn new(zeta: f64) -> Self {
        Self {
            zeta,
            step: 3,
            version: IdVersion::RestartAfterCp,
        }
    }
}

/// Every window scanned, plus the detections with the window that produced them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IdTrace {
    pub windows: Vec<(usize, usize)>,
    pub detections: Vec<(usize, (usize, usize))>,
}

/// Isolate-Detect, one-sided expansion.
///
/// From the current start `s`, windows `[s, s - 1 + kλ]` (capped at `n`) are
/// scanned for `k = 1, 2, ...` until the largest CUSUM on a window reaches
/// `zeta`. The argmax is recorded and the scan restarts according to the
/// configured version.
pub fn isolate_detect(ts: &TimeSeries, cfg: &IdConfig) -> Result<Segmentation> {
    Ok(isolate_detect_traced(ts, cfg)?.0)
}

pub fn isolate_detect_traced(ts: &TimeSeries, cfg: &IdConfig) -> Result<(Segmentation, IdTrace)> {
    if !(cfg.zeta > 0.0) {
        return param(format!(
            "zeta must be positive (zeta = 0 flags every window), got {}",
            cfg.zeta
        ));
    }
    if cfg.step < 1 {
        return param("step must be at least 1");
    }
    let n = ts.len();
    let mut trace = IdTrace::default();
    let mut found = Vec::new();
    let mut s = 1;
    'outer: while s < n {
        let mut k = 1;
        loop {
            let e = (s - 1 + k * cfg.step).min(n);
            if e > s {
                trace.windows.push((s, e));
                let (b, c) = ts.best_split(s, e);
                if c >= cfg.zeta {
                    found.push(b);
                    trace.detections.push((b, (s, e)));
                    s = match cfg.version {
                        IdVersion::RestartAfterCp => b + 1,
                        IdVersion::RestartAfterInterval => e,
                    };
                    continue 'outer;
                }
            }
            if e == n {
                break 'outer;
            }
            k += 1;
        }
    }
    Ok((Segmentation::from_unsorted(found, n)?, trace))
}
