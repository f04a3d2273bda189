// SPDX-License-Identifier: MIT OR Apache-2.0

//! Serialised result documents.

use std::io::Write;
use std::path::Path;

use cpmean::detect::Params;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DETECT_SCHEMA: &str = "cpmean.detect/1";
pub const PATH_SCHEMA: &str = "cpmean.path/1";
pub const CROPS_SCHEMA: &str = "cpmean.crops/1";
pub const WELLLOG_SCHEMA: &str = "cpmean.welllog/1";
pub const REPLICA_SCHEMA: &str = "cpmean.replica/1";

/// Segment on the original index scale, `start..=end`, 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentRow {
    pub start: usize,
    pub end: usize,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectDoc {
    pub schema: String,
    pub method: String,
    pub selection: Option<String>,
    /// Length including missing entries.
    pub n: usize,
    pub n_observed: usize,
    pub n_changes: usize,
    pub change_points: Vec<usize>,
    pub segments: Vec<SegmentRow>,
    pub sigma: f64,
    pub seed: u64,
    pub params: Params,
    pub runtime_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRow {
    pub rank: usize,
    pub b: usize,
    pub s: usize,
    pub e: usize,
    pub cusum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDoc {
    pub schema: String,
    pub method: String,
    pub n: usize,
    pub entries: Vec<PathRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CropsRowOut {
    pub n_changes: usize,
    /// RSS in units of `σ̂²`.
    pub rss_scaled: f64,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub change_points: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CropsDoc {
    pub schema: String,
    pub n: usize,
    pub sigma: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub rows: Vec<CropsRowOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaRow {
    pub noise: String,
    pub reps: usize,
    pub n_true: usize,
    pub n_correct: usize,
    pub mean_n_hat: f64,
    pub mean_sigma2: f64,
}

pub fn to_json<T: Serialize>(doc: &T) -> Result<Vec<u8>, CliError> {
    let mut v = serde_json::to_vec_pretty(doc).map_err(|e| CliError::Data(e.to_string()))?;
    v.push(b'\n');
    Ok(v)
}

/// CSV with a header row taken from the field names of `T`.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Data(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Data(e.to_string()))
}

pub fn write_out(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Data(format!("cannot write to stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detect_doc_round_trips_exactly() {
        let doc = DetectDoc {
            schema: DETECT_SCHEMA.into(),
            method: "pelt".into(),
            selection: Some("sic".into()),
            n: 7,
            n_observed: 6,
            n_changes: 1,
            change_points: vec![3],
            segments: vec![
                SegmentRow { start: 1, end: 3, mean: 0.1 + 0.2 },
                SegmentRow { start: 4, end: 7, mean: -1.0 / 3.0 },
            ],
            sigma: std::f64::consts::PI,
            seed: 5,
            params: Params::default(),
            runtime_secs: 0.0,
        };
        let back: DetectDoc = serde_json::from_slice(&to_json(&doc).unwrap()).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn csv_has_header() {
        let rows = [SegmentRow { start: 1, end: 2, mean: 0.5 }];
        let s = String::from_utf8(to_csv(&rows).unwrap()).unwrap();
        assert_eq!(s, "start,end,mean\n1,2,0.5\n");
    }
}
