// SPDX-License-Identifier: MIT OR Apache-2.0

use std::fmt;
use std::sync::Arc;

use crate::error::{param, Error, Result};
use crate::hierarchical::SolutionPath;
use crate::series::{PiecewiseFit, Segmentation, TimeSeries};

/// Default cap on the model size scanned by [`select_by_ic`].
pub const DEFAULT_N_MAX: usize = 25;

/// User-supplied `p(n)` for the generalised criterion.
#[derive(Clone)]
pub struct PenaltyFn(pub Arc<dyn Fn(usize) -> f64 + Send + Sync>);

impl PenaltyFn {
    pub fn new(f: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn eval(&self, n: usize) -> f64 {
        (self.0)(n)
    }
}

impl fmt::Debug for PenaltyFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PenaltyFn(..)")
    }
}

#[derive(Debug, Clone)]
pub enum PenaltyKind {
    Sic,
    Aic,
    IcP(PenaltyFn),
    Mbic,
    Mdl,
    Lebarbier { c1: f64, c2: f64 },
    /// `gamma = None` uses `2.5 σ² log n / n`.
    Potts { gamma: Option<f64> },
    /// `rss + λ·N`.
    Manual(f64),
}

impl PenaltyKind {
    pub fn lebarbier() -> Self {
        PenaltyKind::Lebarbier { c1: 2.0, c2: 5.0 }
    }

    fn needs_sigma(&self) -> bool {
        matches!(
            self,
            PenaltyKind::Lebarbier { .. } | PenaltyKind::Potts { gamma: None }
        )
    }
}

#[derive(Debug, Clone)]
pub struct PenaltySpec {
    pub kind: PenaltyKind,
    pub sigma: Option<f64>,
}

impl PenaltySpec {
    pub fn new(kind: PenaltyKind) -> Self {
        Self { kind, sigma: None }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = Some(sigma);
        self
    }
}

fn segment_lengths(seg: &Segmentation) -> impl Iterator<Item = usize> + '_ {
    seg.segments().map(|(k, l)| l - k)
}

/// Penalty part of a criterion, on the same scale as [`ic_value`].
///
/// For the log-likelihood criteria this is what gets added to
/// `(n/2) log(rss/n)`; for Lebarbier, Potts and manual it is what gets added
/// to their respective goodness-of-fit terms.
pub fn ic_penalty(seg: &Segmentation, spec: &PenaltySpec) -> Result<f64> {
    let n = seg.n();
    let nf = n as f64;
    let ln = nf.ln();
    let m = seg.len() as f64;
    if spec.kind.needs_sigma() && spec.sigma.is_none() {
        return param("this criterion needs a noise level sigma");
    }
    let sigma = spec.sigma.unwrap_or(f64::NAN);
    Ok(match &spec.kind {
        PenaltyKind::Sic => m * ln,
        PenaltyKind::Aic => 2.0 * m,
        PenaltyKind::IcP(p) => {
            let pn = p.eval(n);
            if !(pn >= ln) {
                return param(format!("p(n) = {pn} is below log n = {ln}"));
            }
            let far = 1usize << 40;
            if p.eval(far) / far as f64 > 1e-3 {
                log::warn!("p(n)/n does not appear to vanish; the criterion may not be consistent");
            }
            m * pn
        }
        PenaltyKind::Mbic => {
            let loc: f64 = segment_lengths(seg).map(|l| (l as f64 / nf).ln()).sum();
            0.5 * (3.0 * m * ln + loc)
        }
        PenaltyKind::Mdl => {
            let seg_sum: f64 = segment_lengths(seg).map(|l| (l as f64).ln()).sum();
            (m + 1.0).ln() + m * ln + 0.5 * seg_sum
        }
        PenaltyKind::Lebarbier { c1, c2 } => {
            let k = m + 1.0;
            (k / nf) * sigma * sigma * (c1 * (nf / k).ln() + c2)
        }
        PenaltyKind::Potts { gamma } => {
            let g = gamma.unwrap_or(2.5 * sigma * sigma * ln / nf);
            g * m
        }
        PenaltyKind::Manual(lambda) => lambda * m,
    })
}

/// Criterion value of a fit; smaller is better.
///
/// A zero RSS is floored at `1e-12 Σ X²` (or the smallest positive double
/// when the data are all zero) so the log stays finite.
pub fn ic_value(fit: &PiecewiseFit, spec: &PenaltySpec, ts: &TimeSeries) -> Result<f64> {
    let n = fit.segmentation.n();
    if n != ts.len() {
        return param("fit and series lengths differ");
    }
    let nf = n as f64;
    let floor = (1e-12 * ts.prefix_sq()[n]).max(f64::MIN_POSITIVE);
    let rss = fit.rss.max(floor);
    let pen = ic_penalty(&fit.segmentation, spec)?;
    Ok(match spec.kind {
        PenaltyKind::Sic
        | PenaltyKind::Aic
        | PenaltyKind::IcP(_)
        | PenaltyKind::Mbic
        | PenaltyKind::Mdl => 0.5 * nf * (rss / nf).ln() + pen,
        PenaltyKind::Lebarbier { .. } | PenaltyKind::Potts { .. } => rss / nf + pen,
        PenaltyKind::Manual(_) => fit.rss + pen,
    })
}

/// What [`select_by_ic`] chooses from.
#[derive(Debug, Clone, Copy)]
pub enum Candidates<'a> {
    Path(&'a SolutionPath),
    Fits(&'a [PiecewiseFit]),
}

/// Criterion values for each candidate model, smallest model first.
pub fn ic_profile(
    cands: Candidates<'_>,
    spec: &PenaltySpec,
    ts: &TimeSeries,
    n_max: usize,
) -> Result<Vec<(PiecewiseFit, f64)>> {
    let fits = match cands {
        Candidates::Path(p) => p.nested_fits(ts, n_max)?,
        Candidates::Fits(f) => f
            .iter()
            .filter(|f| f.n_changes() <= n_max)
            .cloned()
            .collect(),
    };
    if fits.is_empty() {
        return Err(Error::Parameter("no candidate models".into()));
    }
    let mut out = fits
        .into_iter()
        .map(|f| {
            let v = ic_value(&f, spec, ts)?;
            Ok((f, v))
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by_key(|(f, _)| f.n_changes());
    Ok(out)
}

/// Minimiser of the criterion; ties go to fewer changes.
pub fn select_by_ic(
    cands: Candidates<'_>,
    spec: &PenaltySpec,
    ts: &TimeSeries,
    n_max: usize,
) -> Result<Segmentation> {
    let prof = ic_profile(cands, spec, ts, n_max)?;
    let mut best = 0;
    for (i, (_, v)) in prof.iter().enumerate() {
        if *v < prof[best].1 {
            best = i;
        }
    }
    Ok(prof[best].0.segmentation.clone())
}

/// Longest prefix of the path whose CUSUMs reach `constant · σ · sqrt(2 log n)`.
pub fn select_by_threshold(path: &SolutionPath, sigma: f64, constant: f64) -> Result<Segmentation> {
    if !(sigma >= 0.0) || !(constant >= 0.0) {
        return param("threshold sigma and constant must be non-negative");
    }
    let thr = constant * sigma * (2.0 * (path.n as f64).ln()).sqrt();
    let k = path.entries.iter().take_while(|e| e.cusum >= thr).count();
    Ok(path.prefix(k))
}
