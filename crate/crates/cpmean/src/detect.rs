// SPDX-License-Identifier: MIT OR Apache-2.0

//! One entry point over every detector, shared by the CLI and the
//! simulation harness.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dp::{pelt, segment_neighbourhood};
use crate::error::{param, Error, Result};
use crate::hierarchical::{
    binary_segmentation, make_grid, tguh_path, tguh_transform, wbs, wbs2, GridKind, SolutionPath,
    DEFAULT_INTERVALS, DEFAULT_RHO, DEFAULT_THRESHOLD_CONST, DEFAULT_WBS2_INTERVALS,
};
use crate::select::{
    select_by_ic, select_by_sdll, select_by_threshold, Candidates, PenaltyKind, PenaltySpec,
    SdllConfig, DEFAULT_N_MAX,
};
use crate::series::{PiecewiseFit, Segmentation, TimeSeries};
use crate::tautstring::taut_string;
use crate::variance::{sigma_from_residuals, sigma_iqr, sigma_mad};
use crate::windowed::{
    isolate_detect, mosum_detect, mosum_multiscale, IdConfig, MosumConfig, MosumThreshold,
    VarianceMode, DEFAULT_ETA,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Pelt,
    Segneigh,
    Bs,
    Wbs,
    Wbs2,
    Tguh,
    Mosum,
    MosumMulti,
    Idetect,
    Tautstring,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::Pelt,
        Method::Segneigh,
        Method::Bs,
        Method::Wbs,
        Method::Wbs2,
        Method::Tguh,
        Method::Mosum,
        Method::MosumMulti,
        Method::Idetect,
        Method::Tautstring,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Pelt => "pelt",
            Method::Segneigh => "segneigh",
            Method::Bs => "bs",
            Method::Wbs => "wbs",
            Method::Wbs2 => "wbs2",
            Method::Tguh => "tguh",
            Method::Mosum => "mosum",
            Method::MosumMulti => "mosum-multi",
            Method::Idetect => "idetect",
            Method::Tautstring => "tautstring",
        }
    }

    /// Methods that produce a solution path.
    pub fn has_path(self) -> bool {
        matches!(self, Method::Bs | Method::Wbs | Method::Wbs2 | Method::Tguh)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    Sic,
    Aic,
    Mbic,
    Mdl,
    Lebarbier,
    Potts,
    Thresh,
    Sdll,
    Manual(f64),
    FixedN(usize),
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selection::Sic => f.write_str("sic"),
            Selection::Aic => f.write_str("aic"),
            Selection::Mbic => f.write_str("mbic"),
            Selection::Mdl => f.write_str("mdl"),
            Selection::Lebarbier => f.write_str("lebarbier"),
            Selection::Potts => f.write_str("potts"),
            Selection::Thresh => f.write_str("thresh"),
            Selection::Sdll => f.write_str("sdll"),
            Selection::Manual(l) => write!(f, "manual:{l}"),
            Selection::FixedN(m) => write!(f, "fixed:{m}"),
        }
    }
}

impl FromStr for Selection {
    type Err = Error;

    /// Accepts the plain names plus `manual:<λ>` and `fixed:<m>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parameter(format!("unknown selection '{s}'"));
        if let Some(v) = s.strip_prefix("manual:") {
            return v.parse().map(Selection::Manual).map_err(|_| bad());
        }
        if let Some(v) = s.strip_prefix("fixed:") {
            return v.parse().map(Selection::FixedN).map_err(|_| bad());
        }
        Ok(match s {
            "sic" => Selection::Sic,
            "aic" => Selection::Aic,
            "mbic" => Selection::Mbic,
            "mdl" => Selection::Mdl,
            "lebarbier" => Selection::Lebarbier,
            "potts" => Selection::Potts,
            "thresh" => Selection::Thresh,
            "sdll" => Selection::Sdll,
            _ => return Err(bad()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMode {
    Mad,
    Iqr,
    Residual(usize),
    Explicit(f64),
}

impl FromStr for SigmaMode {
    type Err = Error;

    /// `mad`, `iqr`, `residual[:h]` or a number.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parameter(format!("unknown sigma mode '{s}'"));
        match s {
            "mad" => Ok(SigmaMode::Mad),
            "iqr" => Ok(SigmaMode::Iqr),
            "residual" => Ok(SigmaMode::Residual(crate::variance::DEFAULT_MEDIAN_HALF_WIDTH)),
            _ => {
                if let Some(h) = s.strip_prefix("residual:") {
                    return h.parse().map(SigmaMode::Residual).map_err(|_| bad());
                }
                let v: f64 = s.parse().map_err(|_| bad())?;
                if !(v > 0.0) || !v.is_finite() {
                    return param(format!("explicit sigma must be positive, got {v}"));
                }
                Ok(SigmaMode::Explicit(v))
            }
        }
    }
}

impl SigmaMode {
    pub fn estimate(self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            SigmaMode::Mad => sigma_mad(x)?.sigma,
            SigmaMode::Iqr => sigma_iqr(x)?.sigma,
            SigmaMode::Residual(h) => sigma_from_residuals(x, h)?.sigma,
            SigmaMode::Explicit(v) => v,
        })
    }
}

/// Method parameters; `None` means the method's default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// MOSUM bandwidth; multi-bandwidth MOSUM uses `bandwidths`.
    pub bandwidth: Option<usize>,
    pub bandwidths: Vec<usize>,
    pub eta: f64,
    pub mosum_alpha: f64,
    /// Intervals `M` for WBS, or per stage for WBS2.
    pub intervals: Option<usize>,
    pub rho: f64,
    pub gamma: Option<f64>,
    pub zeta: Option<f64>,
    pub min_seg_len: usize,
    pub seed: u64,
    /// Multiplier applied to the PELT penalty.
    pub penalty_scale: f64,
    pub threshold_const: f64,
    pub sdll_alpha: f64,
    pub n_max: usize,
    pub center: bool,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            bandwidth: None,
            bandwidths: Vec::new(),
            eta: DEFAULT_ETA,
            mosum_alpha: 0.05,
            intervals: None,
            rho: DEFAULT_RHO,
            gamma: None,
            zeta: None,
            min_seg_len: 1,
            seed: 0,
            penalty_scale: 1.0,
            threshold_const: DEFAULT_THRESHOLD_CONST,
            sdll_alpha: 0.1,
            n_max: DEFAULT_N_MAX,
            center: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectSpec {
    pub method: Method,
    pub selection: Option<Selection>,
    pub sigma: SigmaMode,
    pub params: Params,
}

impl DetectSpec {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            selection: None,
            sigma: SigmaMode::Mad,
            params: Params::default(),
        }
    }

    pub fn with_selection(mut self, s: Selection) -> Self {
        self.selection = Some(s);
        self
    }

    pub fn with_sigma(mut self, s: SigmaMode) -> Self {
        self.sigma = s;
        self
    }

    pub fn with_params(mut self, p: Params) -> Self {
        self.params = p;
        self
    }

    /// Selection actually used, after defaults.
    pub fn effective_selection(&self) -> Option<Selection> {
        match self.method {
            Method::Mosum | Method::MosumMulti | Method::Idetect | Method::Tautstring => None,
            Method::Pelt | Method::Segneigh => Some(self.selection.unwrap_or(Selection::Sic)),
            Method::Wbs2 => Some(self.selection.unwrap_or(Selection::Sdll)),
            Method::Bs | Method::Wbs | Method::Tguh => {
                Some(self.selection.unwrap_or(Selection::Thresh))
            }
        }
    }

    /// Checks method/selection compatibility and parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        if p.min_seg_len < 1 {
            return param("min_seg_len must be at least 1");
        }
        if !(p.penalty_scale > 0.0) {
            return param("penalty scale must be positive");
        }
        match (self.method, self.selection) {
            (Method::Mosum | Method::MosumMulti | Method::Idetect, Some(s)) => {
                log::warn!("{} ignores the selection rule '{s}'", self.method);
            }
            (Method::Tautstring, Some(s)) => {
                return param(format!("tautstring takes gamma only, not selection '{s}'"));
            }
            (Method::Pelt, Some(s)) => {
                if !matches!(
                    s,
                    Selection::Sic | Selection::Aic | Selection::Potts | Selection::Manual(_)
                ) {
                    return param(format!(
                        "pelt needs a per-change penalty (sic, aic, potts, manual), not '{s}'"
                    ));
                }
            }
            (Method::Segneigh, Some(Selection::Thresh | Selection::Sdll)) => {
                return param("segneigh has no solution path; use an information criterion or fixed:<m>");
            }
            _ => {}
        }
        if let Some(Selection::Manual(l)) = self.selection {
            if !(l >= 0.0) || !l.is_finite() {
                return param(format!("manual penalty must be finite and non-negative, got {l}"));
            }
        }
        if self.method == Method::Tautstring && p.gamma.is_none() {
            return param("tautstring requires gamma");
        }
        if self.method == Method::Mosum && p.bandwidth.is_none() {
            return param("mosum requires a bandwidth");
        }
        if self.method == Method::MosumMulti && p.bandwidths.is_empty() && p.bandwidth.is_none() {
            return param("mosum-multi requires bandwidths");
        }
        let uses_msl = matches!(self.method, Method::Pelt | Method::Segneigh | Method::Bs);
        if !uses_msl && p.min_seg_len > 1 {
            log::warn!("{} ignores min_seg_len", self.method);
        }
        Ok(())
    }
}

/// Result of [`detect`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub method: Method,
    pub selection: Option<Selection>,
    pub segmentation: Segmentation,
    /// Segment levels on the original data scale.
    pub levels: Vec<f64>,
    /// Fitted signal on the original data scale.
    pub fitted: Vec<f64>,
    pub sigma: f64,
    pub center_offset: f64,
}

impl Detection {
    pub fn n_changes(&self) -> usize {
        self.segmentation.len()
    }
}

fn penalty_kind(sel: Selection) -> Option<PenaltyKind> {
    Some(match sel {
        Selection::Sic => PenaltyKind::Sic,
        Selection::Aic => PenaltyKind::Aic,
        Selection::Mbic => PenaltyKind::Mbic,
        Selection::Mdl => PenaltyKind::Mdl,
        Selection::Lebarbier => PenaltyKind::lebarbier(),
        Selection::Potts => PenaltyKind::Potts { gamma: None },
        Selection::Manual(l) => PenaltyKind::Manual(l),
        Selection::Thresh | Selection::Sdll | Selection::FixedN(_) => return None,
    })
}

/// PELT penalty per change for the log-likelihood criteria at noise level `sigma`.
pub fn pelt_penalty(sel: Selection, sigma: f64, n: usize) -> Result<f64> {
    let ln = (n as f64).ln();
    let s2 = sigma * sigma;
    Ok(match sel {
        Selection::Sic => 2.0 * s2 * ln,
        Selection::Aic => 4.0 * s2,
        Selection::Potts => 2.5 * s2 * ln,
        Selection::Manual(l) => l,
        other => return param(format!("no per-change penalty for '{other}'")),
    })
}

/// Solution path for the path-producing methods.
pub fn solution_path(ts: &TimeSeries, spec: &DetectSpec) -> Result<SolutionPath> {
    let p = &spec.params;
    match spec.method {
        Method::Bs => binary_segmentation(ts, 0.0, p.min_seg_len),
        Method::Wbs => {
            let m = p.intervals.unwrap_or(DEFAULT_INTERVALS);
            let grid = make_grid(ts.len(), GridKind::Random { seed: p.seed, m })?;
            wbs(ts, &grid, 0.0)
        }
        Method::Wbs2 => wbs2(ts, p.intervals.unwrap_or(DEFAULT_WBS2_INTERVALS)),
        Method::Tguh => Ok(tguh_path(&tguh_transform(ts, p.rho)?)),
        m => param(format!("{m} does not produce a solution path")),
    }
}

fn select_on_path(
    ts: &TimeSeries,
    path: &SolutionPath,
    sel: Selection,
    sigma: f64,
    p: &Params,
) -> Result<Segmentation> {
    match sel {
        Selection::Thresh => select_by_threshold(path, sigma, p.threshold_const),
        Selection::Sdll => select_by_sdll(path, &SdllConfig::new(p.sdll_alpha, sigma)),
        Selection::FixedN(m) => {
            if m > path.len() {
                return param(format!("path has only {} candidates, asked for {m}", path.len()));
            }
            Ok(path.prefix(m))
        }
        other => {
            let kind = penalty_kind(other).expect("IC selection");
            let spec = PenaltySpec::new(kind).with_sigma(sigma);
            select_by_ic(Candidates::Path(path), &spec, ts, p.n_max)
        }
    }
}

/// Runs the configured detector on raw data.
pub fn detect(x: &[f64], spec: &DetectSpec) -> Result<Detection> {
    spec.validate()?;
    let p = &spec.params;
    let ts = TimeSeries::new(x.to_vec(), p.center)?;
    let n = ts.len();
    let sigma = if n >= 2 { spec.sigma.estimate(x)? } else { 0.0 };
    let sel = spec.effective_selection();

    let seg = match spec.method {
        Method::Pelt => {
            let lambda = pelt_penalty(sel.unwrap(), sigma, n)? * p.penalty_scale;
            pelt(&ts, lambda, p.min_seg_len)?.segmentation
        }
        Method::Segneigh => {
            let cap = (n / p.min_seg_len).saturating_sub(1);
            match sel.unwrap() {
                Selection::FixedN(m) => {
                    if m > cap {
                        return Err(Error::Infeasible(format!(
                            "{m} changes need segments of at least {} on n = {n}",
                            p.min_seg_len
                        )));
                    }
                    segment_neighbourhood(&ts, m, p.min_seg_len)?
                        .pop()
                        .expect("table has m + 1 rows")
                        .segmentation
                }
                other => {
                    let fits = segment_neighbourhood(&ts, p.n_max.min(cap), p.min_seg_len)?;
                    let kind = penalty_kind(other).expect("validated IC selection");
                    let spec = PenaltySpec::new(kind).with_sigma(sigma);
                    select_by_ic(Candidates::Fits(&fits), &spec, &ts, p.n_max)?
                }
            }
        }
        Method::Bs | Method::Wbs | Method::Wbs2 | Method::Tguh => {
            if n < 2 {
                Segmentation::empty(n)
            } else {
                let path = solution_path(&ts, spec)?;
                select_on_path(&ts, &path, sel.unwrap(), sigma, p)?
            }
        }
        Method::Mosum => {
            let cfg = mosum_config(p.bandwidth.unwrap(), p, sigma, spec.sigma);
            mosum_detect(&ts, &cfg)?.segmentation
        }
        Method::MosumMulti => {
            let mut bws = p.bandwidths.clone();
            bws.extend(p.bandwidth);
            let cfg = mosum_config(bws[0], p, sigma, spec.sigma);
            mosum_multiscale(&ts, &bws, &cfg)?
        }
        Method::Idetect => {
            let zeta = p.zeta.unwrap_or_else(|| {
                p.threshold_const * sigma * (2.0 * (n as f64).ln()).sqrt()
            });
            isolate_detect(&ts, &IdConfig::new(zeta))?
        }
        Method::Tautstring => {
            let tv = taut_string(x, p.gamma.unwrap())?;
            let seg = Segmentation::new(tv.knots.clone(), n)?;
            let levels = seg.segments().map(|(k, _)| tv.fit[k]).collect();
            return Ok(Detection {
                method: spec.method,
                selection: None,
                segmentation: seg,
                levels,
                fitted: tv.fit,
                sigma,
                center_offset: ts.center_offset(),
            });
        }
    };
    let fit = PiecewiseFit::new(&ts, seg)?;
    let off = ts.center_offset();
    Ok(Detection {
        method: spec.method,
        selection: sel,
        levels: fit.levels_with_offset(off),
        fitted: fit.fitted().into_iter().map(|v| v + off).collect(),
        segmentation: fit.segmentation,
        sigma,
        center_offset: off,
    })
}

fn mosum_config(b: usize, p: &Params, sigma: f64, mode: SigmaMode) -> MosumConfig {
    MosumConfig {
        bandwidth: b,
        eta: p.eta,
        threshold: MosumThreshold::Asymptotic {
            alpha: p.mosum_alpha,
        },
        variance: match mode {
            SigmaMode::Mad => VarianceMode::GlobalMad,
            _ => VarianceMode::Fixed(sigma),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        for s in ["sic", "sdll", "manual:2.5", "fixed:3"] {
            assert_eq!(s.parse::<Selection>().unwrap().to_string(), s);
        }
        assert!("nope".parse::<Method>().is_err());
    }

    #[test]
    fn incompatible_pairs_are_rejected() {
        let spec = DetectSpec::new(Method::Pelt).with_selection(Selection::Sdll);
        assert!(spec.validate().is_err());
        let spec = DetectSpec::new(Method::Tautstring);
        assert!(spec.validate().is_err());
    }
}
