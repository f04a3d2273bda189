// SPDX-License-Identifier: MIT OR Apache-2.0

//! Model selection: information criteria, thresholding and SDLL.

mod common;

use common::*;
use cpmean::dp::segment_neighbourhood;
use cpmean::hierarchical::{binary_segmentation, wbs2, PathEntry, SolutionPath};
use cpmean::select::{
    calibrate_sdll_c1, ic_penalty, ic_value, sdll_count, select_by_ic, select_by_sdll,
    select_by_threshold, CalibrationTable, Candidates, PenaltyFn, PenaltyKind, PenaltySpec,
    SdllConfig,
};
use cpmean::sim::{add_noise, gen_signal, Noise, Signal};
use cpmean::variance::sigma_mad;
use cpmean::{PiecewiseFit, Segmentation, TimeSeries};
use proptest::prelude::*;
use rand::Rng;

fn ts(x: &[f64]) -> TimeSeries {
    TimeSeries::new(x.to_vec(), false).unwrap()
}

fn pen(kind: PenaltyKind, seg: &Segmentation) -> f64 {
    ic_penalty(seg, &PenaltySpec::new(kind)).unwrap()
}

fn random_seg(r: &mut impl Rng, n: usize, m: usize) -> Segmentation {
    let mut pts: Vec<usize> = Vec::new();
    while pts.len() < m {
        let c = r.random_range(1..n);
        if !pts.contains(&c) {
            pts.push(c);
        }
    }
    Segmentation::from_unsorted(pts, n).unwrap()
}

#[test]
fn mbic_location_term() {
    for k in 1..8usize {
        let parts = k + 1;
        let n = 40 * parts;
        let seg = Segmentation::new((1..parts).map(|j| j * 40).collect(), n).unwrap();
        let loc = 2.0 * pen(PenaltyKind::Mbic, &seg) - 3.0 * k as f64 * (n as f64).ln();
        assert!((loc + parts as f64 * (parts as f64).ln()).abs() < 1e-10);
    }
    // changes at 1..N': the location term is about -N' log n
    let n = 100_000usize;
    for k in [1usize, 3, 5] {
        let seg = Segmentation::new((1..=k).collect(), n).unwrap();
        let loc = 2.0 * pen(PenaltyKind::Mbic, &seg) - 3.0 * k as f64 * (n as f64).ln();
        let approx = -(k as f64) * (n as f64).ln();
        assert!((loc - approx).abs() < 0.01 * approx.abs(), "{loc} vs {approx}");
    }
}

#[test]
fn custom_penalty_guard() {
    let seg = Segmentation::new(vec![10], 100).unwrap();
    let low = PenaltyFn::new(|n| 0.5 * (n as f64).ln());
    assert!(ic_penalty(&seg, &PenaltySpec::new(PenaltyKind::IcP(low))).is_err());
    let ok = PenaltyFn::new(|n| (n as f64).ln().powf(1.1));
    let p = ic_penalty(&seg, &PenaltySpec::new(PenaltyKind::IcP(ok))).unwrap();
    assert!((p - 100f64.ln().powf(1.1)).abs() < 1e-12);
    assert!(ic_penalty(&seg, &PenaltySpec::new(PenaltyKind::lebarbier())).is_err());
}

#[test]
fn ic_examples() {
    // perfect constant fit: the smallest model wins under the RSS floor
    let t = ts(&[2.0; 40]);
    let fits = segment_neighbourhood(&t, 3, 1).unwrap();
    let s = select_by_ic(Candidates::Fits(&fits), &PenaltySpec::new(PenaltyKind::Sic), &t, 3).unwrap();
    assert!(s.is_empty());

    let mut r = rng(5);
    let x: Vec<f64> = (0..60)
        .map(|i| if i < 25 { 0.0 } else { 3.0 } + 1e-3 * r.random_range(-1.0..1.0))
        .collect();
    let t = ts(&x);
    let fits = segment_neighbourhood(&t, 5, 1).unwrap();
    let s = select_by_ic(Candidates::Fits(&fits), &PenaltySpec::new(PenaltyKind::Sic), &t, 5).unwrap();
    assert_eq!(s.change_points(), &[25]);
}

#[test]
fn sic_underestimates_frequent_changes() {
    let (signal, _) = gen_signal(&Signal::teeth_default()).unwrap();
    let mut under = 0;
    for seed in 0..100 {
        let x = add_noise(&signal, &Noise::Gaussian { sd: 0.5 }, seed).unwrap();
        let t = ts(&x);
        let path = wbs2(&t, 100).unwrap();
        let s = select_by_ic(Candidates::Path(&path), &PenaltySpec::new(PenaltyKind::Sic), &t, 25).unwrap();
        if s.len() < 19 {
            under += 1;
        }
    }
    assert!(under >= 50, "{under}/100");
}

#[test]
fn threshold_examples() {
    let mut r = rng(6);
    let x: Vec<f64> = (0..200).map(|_| r.random_range(-1.0..1.0)).collect();
    let path = binary_segmentation(&ts(&x), 0.0, 1).unwrap();
    assert!(select_by_threshold(&path, 1.0, 1e6).unwrap().is_empty());
    assert_eq!(select_by_threshold(&path, 1.0, 0.0).unwrap().len(), 199);

    let y: Vec<f64> = (0..200)
        .map(|i| if i < 120 { 0.0 } else { 50.0 } + 0.01 * r.random_range(-1.0..1.0))
        .collect();
    let t = ts(&y);
    let sigma = sigma_mad(&y).unwrap().sigma;
    let path = binary_segmentation(&t, 0.0, 1).unwrap();
    assert_eq!(select_by_threshold(&path, sigma, 1.15).unwrap().change_points(), &[120]);
}

fn synthetic_path(n: usize, cusums: &[f64]) -> SolutionPath {
    SolutionPath {
        n,
        entries: cusums
            .iter()
            .enumerate()
            .map(|(i, &c)| PathEntry { b: 10 * (i + 1), s: 1, e: n, cusum: c })
            .collect(),
    }
}

#[test]
fn sdll_examples() {
    let n = 300;
    let ln = (n as f64).ln().sqrt();
    let (c1, c2) = (1.5, 0.3);
    // stage-one gate
    assert_eq!(sdll_count(&[0.9 * c1 * ln, 0.5, 0.2], c1, c2, n), 0);
    // the steepest drop 1 -> 2 is ineligible because C_2 is still above the
    // gate; the next drop 2 -> 3 lands at a low level and is accepted
    assert_eq!(sdll_count(&[10_000.0, 20.0, 3.0, 0.8], c1, c2, n), 2);
    // with C_3 high as well, the scan moves on to the drop 3 -> 4
    assert_eq!(sdll_count(&[10_000.0, 20.0, 8.0, 0.8], c1, c2, n), 3);
    let big = 20.0 * (n as f64).sqrt();
    let mid = 10.0 * (n as f64).sqrt();
    // mscale-like: two big CUSUMs then noise
    let cs = [big, mid, 0.9 * c1 * ln, 0.7 * c1 * ln, 0.6 * c1 * ln];
    let p = synthetic_path(n, &cs);
    let cfg = SdllConfig { c1: cpmean::select::C1Spec::Value(c1), c2: Some(c2), sigma: 1.0 };
    assert_eq!(select_by_sdll(&p, &cfg).unwrap().len(), 2);
}

#[test]
fn calibration_table_behaviour() {
    let a = calibrate_sdll_c1(&[60, 120], &[0.05, 0.1], 100, 17).unwrap();
    let b = calibrate_sdll_c1(&[60, 120], &[0.05, 0.1], 100, 17).unwrap();
    assert_eq!(a, b);
    for n in [60, 120] {
        assert!(a.lookup(n, 0.1).unwrap() <= a.lookup(n, 0.05).unwrap());
    }
    let back = CalibrationTable::parse(&a.to_text()).unwrap();
    for (x, y) in back.rows.iter().zip(&a.rows) {
        assert_eq!((x.n, x.alpha), (y.n, y.alpha));
        assert!((x.c1 - y.c1).abs() < 1e-6);
    }
    assert!(calibrate_sdll_c1(&[60], &[0.1], 10, 1).is_err());
    assert!(CalibrationTable::parse("1000 0.1 1.0\n").is_err());
    let builtin = CalibrationTable::builtin();
    assert!(builtin.lookup(1000, 0.3).is_err());
    // clamped outside the grid, monotone in alpha inside it
    assert_eq!(builtin.lookup(10, 0.1).unwrap(), builtin.lookup(50, 0.1).unwrap());
    for n in [50, 75, 300, 1234, 5000] {
        assert!(builtin.lookup(n, 0.1).unwrap() < builtin.lookup(n, 0.05).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ic_choice_invariant_to_shift_and_scale(seed in any::<u64>(), n in 10usize..60, shift in -1e3f64..1e3, a in 0.1f64..20.0) {
        let mut r = rng(seed);
        let x = random_piecewise(&mut r, n, 4, 0.5);
        let shifted: Vec<f64> = x.iter().map(|v| v + shift).collect();
        let scaled: Vec<f64> = x.iter().map(|v| v * a).collect();
        let pick = |y: &[f64], kind: PenaltyKind| {
            let t = ts(y);
            let fits = segment_neighbourhood(&t, 6, 1).unwrap();
            select_by_ic(Candidates::Fits(&fits), &PenaltySpec::new(kind), &t, 6).unwrap()
        };
        for kind in [PenaltyKind::Sic, PenaltyKind::Aic] {
            let base = pick(&x, kind.clone());
            prop_assert_eq!(&pick(&scaled, kind.clone()), &base);
            prop_assert_eq!(&pick(&shifted, kind), &base);
        }
    }

    #[test]
    fn penalty_orderings(seed in any::<u64>(), n in 20usize..5000, m in 1usize..10) {
        let mut r = rng(seed);
        prop_assume!(m < n / 2);
        let seg = random_seg(&mut r, n, m);
        let sic = pen(PenaltyKind::Sic, &seg);
        let mdl = pen(PenaltyKind::Mdl, &seg);
        let mbic = pen(PenaltyKind::Mbic, &seg);
        prop_assert!(mdl >= sic);
        // mBIC - MDL + log(N'+1) = -log(n)/2 whatever the model
        let k = (m as f64 + 1.0).ln();
        prop_assert!((mbic - mdl + k + 0.5 * (n as f64).ln()).abs() < 1e-9 * n as f64);
        // clustered beats equispaced at the same size
        let parts = m + 1;
        prop_assume!(n >= 4 * parts);
        let eq = Segmentation::new((1..parts).map(|j| j * n / parts).collect(), n).unwrap();
        let cl = Segmentation::new((1..parts).collect(), n).unwrap();
        prop_assert!(pen(PenaltyKind::Mbic, &cl) <= pen(PenaltyKind::Mbic, &eq));
        prop_assert!(pen(PenaltyKind::Mdl, &cl) <= pen(PenaltyKind::Mdl, &eq));
    }

    #[test]
    fn sdll_count_bounded_by_path(cs in prop::collection::vec(0.0f64..30.0, 0..40), c1 in 0.1f64..3.0, c2 in 0.05f64..1.0) {
        let mut sorted = cs.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let n = 500;
        let k = sdll_count(&sorted, c1, c2, n);
        prop_assert!(k <= sorted.len());
        let gate = c1 * (n as f64).ln().sqrt();
        if sorted.first().map_or(true, |&t| t < gate) {
            prop_assert_eq!(k, 0);
        }
    }

    #[test]
    fn ic_value_is_finite_on_perfect_fits(x in prop::collection::vec(-5.0f64..5.0, 2..12)) {
        let t = ts(&x);
        let n = x.len();
        let full = PiecewiseFit::new(&t, Segmentation::new((1..n).collect(), n).unwrap()).unwrap();
        for kind in [PenaltyKind::Sic, PenaltyKind::Aic, PenaltyKind::Mbic, PenaltyKind::Mdl] {
            prop_assert!(ic_value(&full, &PenaltySpec::new(kind), &t).unwrap().is_finite());
        }
    }
}
