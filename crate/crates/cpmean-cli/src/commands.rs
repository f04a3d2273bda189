// SPDX-License-Identifier: MIT OR Apache-2.0

use std::time::Instant;

use cpmean::detect::{solution_path, Params, Selection};
use cpmean::dp::crops;
use cpmean::missing::{remap_missing, MissingMap};
use cpmean::sim::{run_scenario, AccuracyReport, Noise, RepRecord, Signal, SimScenario};
use cpmean::welllog::{run_welllog, BatteryConfig, CleaningSpec};
use cpmean::{detect, DetectSpec, TimeSeries};
use serde::Serialize;

use crate::input::read_series;
use crate::output::{
    to_csv, to_json, write_out, CropsDoc, CropsRowOut, DetectDoc, PathDoc, PathRow, ReplicaRow,
    SegmentRow, CROPS_SCHEMA, DETECT_SCHEMA, PATH_SCHEMA, REPLICA_SCHEMA, WELLLOG_SCHEMA,
};
use crate::{Cli, CliError, Command, Format, MethodArgs};

type CliResult<T> = Result<T, CliError>;

fn param<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Param(msg.into()))
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let bytes = match &cli.command {
        Command::Detect(a) => run_detect(cli, &a.input, &a.method)?,
        Command::Path(a) => run_path(cli, a)?,
        Command::Crops(a) => run_crops(cli, a)?,
        Command::Welllog(a) => run_welllog_cmd(cli, a)?,
        Command::Simulate(a) => run_simulate(cli, a)?,
    };
    write_out(cli.output.as_deref(), &bytes)
}

fn emit<D: Serialize, R: Serialize>(cli: &Cli, doc: &D, rows: &[R]) -> CliResult<Vec<u8>> {
    match cli.format {
        Format::Json => to_json(doc),
        Format::Csv => to_csv(rows),
    }
}

pub fn build_spec(m: &MethodArgs, seed: u64) -> CliResult<DetectSpec> {
    let selection = match (m.selection, m.penalty) {
        (Some(_), Some(_)) => return param("--penalty and --select are mutually exclusive"),
        (_, Some(l)) => Some(Selection::Manual(l)),
        (s, None) => s,
    };
    let params = Params {
        bandwidth: m.bandwidth,
        bandwidths: m.bandwidths.clone(),
        eta: m.eta,
        mosum_alpha: m.alpha,
        intervals: m.intervals,
        rho: m.rho,
        gamma: m.gamma,
        zeta: m.zeta,
        min_seg_len: m.min_seg_len,
        seed,
        penalty_scale: m.penalty_scale,
        threshold_const: m.threshold_const,
        sdll_alpha: m.sdll_alpha,
        n_max: m.n_max,
        center: !m.no_center,
    };
    let spec = DetectSpec {
        method: m.method,
        selection,
        sigma: m.sigma,
        params,
    };
    spec.validate()?;
    Ok(spec)
}

fn load(path: &std::path::Path) -> CliResult<MissingMap> {
    let raw = read_series(path)?;
    Ok(remap_missing(&raw.values)?)
}

/// Segments on the original index scale from original-scale change-points.
fn segments(cps: &[usize], levels: &[f64], n: usize) -> Vec<SegmentRow> {
    let mut start = 1;
    cps.iter()
        .chain(std::iter::once(&n))
        .zip(levels)
        .map(|(&end, &mean)| {
            let row = SegmentRow { start, end, mean };
            start = end + 1;
            row
        })
        .collect()
}

fn run_detect(cli: &Cli, input: &std::path::Path, m: &MethodArgs) -> CliResult<Vec<u8>> {
    let spec = build_spec(m, cli.seed)?;
    let map = load(input)?;
    let t0 = Instant::now();
    let det = detect(&map.compact, &spec)?;
    let runtime = t0.elapsed().as_secs_f64();
    let cps = map.to_original(det.segmentation.change_points())?;
    let segs = segments(&cps, &det.levels, map.n_original);
    let doc = DetectDoc {
        schema: DETECT_SCHEMA.into(),
        method: det.method.to_string(),
        selection: det.selection.map(|s| s.to_string()),
        n: map.n_original,
        n_observed: map.compact.len(),
        n_changes: cps.len(),
        change_points: cps,
        segments: segs.clone(),
        sigma: det.sigma,
        seed: cli.seed,
        params: spec.params,
        runtime_secs: runtime,
    };
    emit(cli, &doc, &segs)
}

fn run_path(cli: &Cli, a: &crate::PathArgs) -> CliResult<Vec<u8>> {
    let spec = build_spec(&a.method, cli.seed)?;
    if !spec.method.has_path() {
        return param(format!("{} does not produce a solution path", spec.method));
    }
    let map = load(&a.input)?;
    let ts = TimeSeries::new(map.compact.clone(), spec.params.center)?;
    let path = solution_path(&ts, &spec)?;
    let orig = |i: usize| map.index[i - 1];
    let mut entries: Vec<PathRow> = path
        .entries
        .iter()
        .take(a.top_k.unwrap_or(usize::MAX))
        .enumerate()
        .map(|(r, e)| PathRow {
            rank: r + 1,
            b: orig(e.b),
            s: orig(e.s),
            e: orig(e.e),
            cusum: e.cusum,
        })
        .collect();
    if a.sort_by_location {
        entries.sort_by_key(|e| e.b);
    }
    let doc = PathDoc {
        schema: PATH_SCHEMA.into(),
        method: spec.method.to_string(),
        n: map.n_original,
        entries: entries.clone(),
    };
    emit(cli, &doc, &entries)
}

#[derive(Serialize)]
struct ElbowRow {
    n_changes: usize,
    rss_scaled: f64,
}

fn run_crops(cli: &Cli, a: &crate::CropsArgs) -> CliResult<Vec<u8>> {
    let map = load(&a.input)?;
    let x = &map.compact;
    let n = x.len();
    let sigma = a.sigma.estimate(x)?;
    let s2 = sigma * sigma;
    if !(s2 > 0.0) {
        return Err(CliError::Data("estimated noise level is zero".into()));
    }
    let base = 2.0 * s2 * (n as f64).ln();
    let lo = a.lambda_min.unwrap_or(base);
    let hi = a.lambda_max.unwrap_or(20.0 * base);
    let ts = TimeSeries::new(x.clone(), true)?;
    let res = crops(&ts, lo, hi, a.min_seg_len)?;
    let rows = res
        .entries
        .iter()
        .map(|e| {
            Ok(CropsRowOut {
                n_changes: e.fit.n_changes(),
                rss_scaled: e.fit.rss / s2,
                lambda_lo: e.lambda_lo,
                lambda_hi: e.lambda_hi,
                change_points: map.to_original(e.fit.change_points())?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut elbow: Vec<ElbowRow> = rows
        .iter()
        .map(|r| ElbowRow {
            n_changes: r.n_changes,
            rss_scaled: r.rss_scaled,
        })
        .collect();
    elbow.sort_by_key(|r| r.n_changes);
    let doc = CropsDoc {
        schema: CROPS_SCHEMA.into(),
        n: map.n_original,
        sigma,
        lambda_min: lo,
        lambda_max: hi,
        rows,
    };
    emit(cli, &doc, &elbow)
}

fn run_welllog_cmd(cli: &Cli, a: &crate::WelllogArgs) -> CliResult<Vec<u8>> {
    let raw = read_series(&a.input)?;
    let x: Vec<f64> = raw
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| CliError::Data(format!("missing value at position {}", i + 1))))
        .collect::<CliResult<_>>()?;
    let cleaning = CleaningSpec {
        h: a.clean_h,
        cutoff: a.clean_cutoff,
    };
    let cfg = BatteryConfig {
        mosum_bandwidths: a.bandwidths.clone(),
        top_k: a.top_k,
        wbs_intervals: a.intervals,
        seed: cli.seed,
        ..BatteryConfig::default()
    };
    let report = run_welllog(&x, &cleaning, &cfg)?;
    #[derive(Serialize)]
    struct Doc<'a> {
        schema: &'a str,
        #[serde(flatten)]
        report: &'a cpmean::welllog::WellLogReport,
    }
    let elbow: Vec<ElbowRow> = report
        .crops
        .iter()
        .map(|r| ElbowRow {
            n_changes: r.n_changes,
            rss_scaled: r.rss_scaled,
        })
        .collect();
    emit(
        cli,
        &Doc {
            schema: WELLLOG_SCHEMA,
            report: &report,
        },
        &elbow,
    )
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> CliResult<T> {
    s.parse()
        .map_err(|_| CliError::Param(format!("bad {what} '{s}'")))
}

pub fn parse_signal(s: &str) -> CliResult<Signal> {
    let parts: Vec<&str> = s.split(':').collect();
    Ok(match parts.as_slice() {
        ["blocks", n] => Signal::Blocks { n: num(n, "length")? },
        ["teeth"] => Signal::teeth_default(),
        ["teeth", w, k] => Signal::Teeth {
            per_tooth: num(w, "tooth width")?,
            teeth: num(k, "tooth count")?,
            low: 0.0,
            high: 1.0,
        },
        ["mscale"] => Signal::Mscale,
        ["constant", n] => Signal::Constant {
            n: num(n, "length")?,
            level: 0.0,
        },
        _ => return param(format!("unknown signal '{s}'")),
    })
}

pub fn parse_noise(s: &str) -> CliResult<Noise> {
    let parts: Vec<&str> = s.split(':').collect();
    Ok(match parts.as_slice() {
        ["gaussian", sd] => Noise::Gaussian { sd: num(sd, "sd")? },
        ["laplace", sd] => Noise::Laplace { sd: num(sd, "sd")? },
        ["ar1", phi, sd] => Noise::Ar1 {
            phi: num(phi, "phi")?,
            sd: num(sd, "sd")?,
        },
        _ => return param(format!("unknown noise '{s}'")),
    })
}

#[derive(Serialize)]
struct RecordRow {
    rep: usize,
    n_hat: usize,
    n_error: i64,
    hausdorff: f64,
    max_location_error: Option<f64>,
    fit_mse: f64,
    sigma: f64,
    change_points: String,
}

fn record_rows(records: &[RepRecord]) -> Vec<RecordRow> {
    records
        .iter()
        .map(|r| RecordRow {
            rep: r.rep,
            n_hat: r.n_hat,
            n_error: r.n_error,
            hausdorff: r.hausdorff,
            max_location_error: r.max_location_error,
            fit_mse: r.fit_mse,
            sigma: r.sigma,
            change_points: r
                .change_points
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(" "),
        })
        .collect()
}

fn run_simulate(cli: &Cli, a: &crate::SimulateArgs) -> CliResult<Vec<u8>> {
    let spec = build_spec(&a.method, cli.seed)?;
    if a.noise_variance_replica {
        return noise_variance_replica(cli, a, &spec);
    }
    let scenario = match &a.scenario {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Data(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Param(format!("invalid scenario file: {e}")))?
        }
        None => SimScenario {
            signal: parse_signal(&a.signal)?,
            noise: parse_noise(&a.noise)?,
            seed: cli.seed,
            reps: a.reps,
        },
    };
    let report = run_scenario(&scenario, &spec)?;
    let rows = record_rows(&report.records);
    if let Some(p) = &a.csv {
        write_out(Some(p), &to_csv(&rows)?)?;
    }
    emit(cli, &report, &rows)
}

/// Same three-segment signal under Gaussian and Laplace noise of unit
/// variance: the MAD estimate is biased low under heavy tails and the
/// penalty follows it.
fn noise_variance_replica(cli: &Cli, a: &crate::SimulateArgs, spec: &DetectSpec) -> CliResult<Vec<u8>> {
    let signal = Signal::Custom {
        levels: vec![0.0, 2.0, 0.0],
        lengths: vec![100, 100, 100],
    };
    let mut rows = Vec::new();
    for (k, (label, noise)) in [
        ("gaussian", Noise::Gaussian { sd: 1.0 }),
        ("laplace", Noise::Laplace { sd: 1.0 }),
    ]
    .into_iter()
    .enumerate()
    {
        let sc = SimScenario {
            signal: signal.clone(),
            noise,
            seed: cli.seed.wrapping_add(k as u64),
            reps: a.reps,
        };
        let r: AccuracyReport = run_scenario(&sc, spec)?;
        let reps = r.records.len();
        rows.push(ReplicaRow {
            noise: label.into(),
            reps,
            n_true: r.n_true,
            n_correct: r.records.iter().filter(|x| x.n_error == 0).count(),
            mean_n_hat: r.mean_n_hat,
            mean_sigma2: r.records.iter().map(|x| x.sigma * x.sigma).sum::<f64>() / reps as f64,
        });
    }
    #[derive(Serialize)]
    struct Doc<'a> {
        schema: &'a str,
        method: &'a DetectSpec,
        rows: &'a [ReplicaRow],
    }
    emit(
        cli,
        &Doc {
            schema: REPLICA_SCHEMA,
            method: spec,
            rows: &rows,
        },
        &rows,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segments_cover_the_original_range() {
        let s = segments(&[3, 7], &[1.0, 2.0, 3.0], 10);
        assert_eq!(
            s.iter().map(|r| (r.start, r.end)).collect::<Vec<_>>(),
            vec![(1, 3), (4, 7), (8, 10)]
        );
    }

    #[test]
    fn signal_and_noise_strings() {
        assert_eq!(parse_signal("blocks:2048").unwrap(), Signal::Blocks { n: 2048 });
        assert_eq!(parse_signal("teeth").unwrap(), Signal::teeth_default());
        assert!(parse_signal("sine:3").is_err());
        assert_eq!(parse_noise("ar1:0.3:1").unwrap(), Noise::Ar1 { phi: 0.3, sd: 1.0 });
        assert!(matches!(parse_noise("cauchy:1"), Err(CliError::Param(_))));
    }
}
