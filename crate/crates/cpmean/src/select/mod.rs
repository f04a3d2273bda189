// SPDX-License-Identifier: MIT OR Apache-2.0

//! Choosing the number of change-points.

mod calibrate;
mod ic;
mod sdll;

pub use calibrate::{calibrate_sdll_c1, CalibrationRow, CalibrationTable, TABLE_FORMAT_VERSION};
pub use ic::{
    ic_penalty, ic_profile, ic_value, select_by_ic, select_by_threshold, Candidates, PenaltyFn,
    PenaltyKind, PenaltySpec, DEFAULT_N_MAX,
};
pub use sdll::{sdll_count, select_by_sdll, C1Spec, SdllConfig};
