// SPDX-License-Identifier: MIT OR Apache-2.0

//! Moving-window detectors.

mod idetect;
mod mosum;

pub use idetect::{isolate_detect, isolate_detect_traced, IdConfig, IdTrace, IdVersion};
pub use mosum::{
    mosum_detect, mosum_multiscale, mosum_profile, mosum_threshold, nonasymptotic_threshold,
    MosumConfig, MosumOutcome, MosumThreshold, VarianceMode, DEFAULT_ETA,
};
