// SPDX-License-Identifier: MIT OR Apache-2.0

//! Change-point detection in the mean of a univariate series.
//!
//! Exact dynamic programmes ([`dp`]), greedy top-down and bottom-up searches
//! ([`hierarchical`]), moving-window detectors ([`windowed`]), the taut
//! string ([`tautstring`]), model selection ([`select`]) and a Monte Carlo
//! harness ([`sim`]). All locations are 1-based; a change-point `τ` means
//! `f_τ ≠ f_{τ+1}`.
//!
//! With the `parallel` feature (on by default) grid CUSUMs, MOSUM profiles
//! and Monte Carlo replications run on rayon's pool. Results are identical
//! either way.

#![forbid(unsafe_code)]
// `!(x > 0.0)` is deliberate: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detect;
pub mod dp;
pub mod error;
pub mod hierarchical;
pub mod missing;
pub mod par;
pub mod select;
pub mod series;
pub mod sim;
pub mod tautstring;
pub mod variance;
pub mod welllog;
pub mod windowed;

pub use detect::{detect, DetectSpec, Detection, Method, Params, Selection, SigmaMode};
pub use error::{Error, Result};
pub use series::{load_series, CusumValue, PiecewiseFit, Segmentation, TimeSeries};
