// Copyright 2026 The libound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use libound::bounds::{e1_table_form, log_bound_constants, table1_bound, table_form, vacuity_threshold, BoundReport};
use libound::{BoundRow, BoundSpec, DensityBounds, Error, Statistic, Strategy};
use proptest::prelude::*;

fn bound(row: BoundRow, n: usize, k: usize, r: f64) -> f64 {
    table1_bound(&BoundSpec::new(row, n, k, r).unwrap()).unwrap()
}

fn uniform_density() -> DensityBounds {
    DensityBounds { lower: 1.0, upper: 1.0 }
}

#[test]
fn reference_values_at_a_hundred_thousand_keys() {
    let n = 100_000usize;
    let r = 1.0 / 64.0;
    let dkw = (std::f64::consts::PI / 200_000.0).sqrt();
    assert!((dkw - 0.0039633).abs() < 1e-7);

    let l1 = bound(BoundRow::L1, n, 16, r);
    assert!((l1 - 1166.2).abs() < 0.05, "{l1}");
    assert!((l1 - (1562.5 - 1e5 * dkw)).abs() < 1e-9);

    // n·R − 1/√6
    let l2 = bound(BoundRow::L2, n, 16, r);
    assert!((l2 - (1562.5 - 1.0 / 6f64.sqrt())).abs() < 1e-9);
    assert!((l2 - 1562.0918).abs() < 1e-4, "{l2}");

    let b2 = bound(BoundRow::B2, n, 16, r);
    assert!((b2 - l2.log2()).abs() < 1e-12);
    assert!((b2 - 10.6092).abs() < 1e-4, "{b2}");
    assert_eq!(bound(BoundRow::E2, n, 16, r), b2);
    assert!((bound(BoundRow::B1, n, 16, r) - l1.log2()).abs() < 1e-12);
}

#[test]
fn log_constants() {
    let (c1, c2) = log_bound_constants(1.0, 1.0).unwrap();
    assert!((c1 - 0.5f64.powi(7) / 54.0).abs() < 1e-18);
    assert!((c2 - 15.0).abs() < 1e-12);
    let (c1, c2) = log_bound_constants(1.0, 2.0).unwrap();
    assert!((c1 - 0.25f64.powi(7) / 54.0).abs() < 1e-18);
    assert!((c2 - 27.0).abs() < 1e-12);
    assert!(matches!(log_bound_constants(2.0, 1.0), Err(Error::Domain(_))));
    assert!(matches!(log_bound_constants(0.0, 1.0), Err(Error::Domain(_))));
}

#[test]
fn e1_needs_density_bounds() {
    let spec = BoundSpec::new(BoundRow::E1, 1000, 4, 0.1).unwrap();
    assert!(matches!(table1_bound(&spec), Err(Error::Domain(_))));
    assert!(matches!(e1_table_form(&spec), Err(Error::Domain(_))));
    let bad = DensityBounds { lower: 2.0, upper: 1.0 };
    assert!(matches!(spec.with_density(bad), Err(Error::Domain(_))));

    // γ = 1/2: C₂ = 15, so nR must exceed 2¹⁵ before the row says anything.
    let spec = spec.with_density(uniform_density()).unwrap();
    assert!(table1_bound(&spec).unwrap() < 0.0);
    let big = BoundSpec::new(BoundRow::E1, 1 << 20, 4, 0.25).unwrap().with_density(uniform_density()).unwrap();
    let (c1, _) = log_bound_constants(1.0, 1.0).unwrap();
    assert!((table1_bound(&big).unwrap() - c1 * 3.0).abs() < 1e-15);
    assert!((table_form(&big).unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn spec_validation() {
    assert!(matches!(BoundSpec::new(BoundRow::L1, 0, 1, 0.1), Err(Error::Domain(_))));
    assert!(matches!(BoundSpec::new(BoundRow::L1, 1, 0, 0.1), Err(Error::Domain(_))));
    assert!(matches!(BoundSpec::new(BoundRow::L1, 1, 1, 1.5), Err(Error::Domain(_))));
    assert!(matches!(BoundSpec::new(BoundRow::L1, 1, 1, f64::NAN), Err(Error::Domain(_))));
}

#[test]
fn rows_parse_and_route() {
    for row in BoundRow::ALL {
        assert_eq!(row.to_string().parse::<BoundRow>().unwrap(), row);
    }
    assert_eq!("B2".parse::<BoundRow>().unwrap(), BoundRow::B2);
    assert!("b3".parse::<BoundRow>().is_err());
    assert_eq!(BoundRow::L1.statistic(), Statistic::GrandMean);
    assert_eq!(BoundRow::B2.statistic(), Statistic::GlobalMax);
    assert_eq!(BoundRow::E1.strategy(), Strategy::Exponential);
    assert!(BoundRow::L2.needs_matched_measure() && !BoundRow::B1.needs_matched_measure());
    assert!(BoundRow::B1.is_logarithmic() && !BoundRow::L2.is_logarithmic());
}

#[test]
fn vacuity_thresholds() {
    let t = vacuity_threshold(BoundRow::L1, 100_000, None).unwrap();
    assert!((t - 0.0039633).abs() < 1e-7);
    for n in [1usize, 7, 1000] {
        let t = vacuity_threshold(BoundRow::L2, n, None).unwrap();
        assert!((t - 1.0 / (6f64.sqrt() * n as f64)).abs() < 1e-15);
    }
    assert!(matches!(vacuity_threshold(BoundRow::E1, 10, None), Err(Error::Domain(_))));
    assert!((vacuity_threshold(BoundRow::E1, 1 << 10, Some(15.0)).unwrap() - 32.0).abs() < 1e-12);
    assert!(vacuity_threshold(BoundRow::B1, 0, None).is_err());

    // The bound changes sign at the threshold.
    let n = 5000;
    for row in [BoundRow::L1, BoundRow::L2, BoundRow::B1, BoundRow::B2] {
        let t = vacuity_threshold(row, n, None).unwrap();
        assert!(bound(row, n, 1, t * 0.999) <= 0.0, "{row}");
        assert!(bound(row, n, 1, (t * 1.001).min(1.0)) > 0.0, "{row}");
    }
}

#[test]
fn report_flags() {
    let spec = BoundSpec::new(BoundRow::L1, 100, 1, 0.5).unwrap();
    let r = BoundReport::evaluate(spec, 1.0, 0.0).unwrap();
    assert!((r.bound_value - 100.0 * (0.5 - (std::f64::consts::PI / 200.0).sqrt())).abs() < 1e-12);
    assert!(!r.satisfied && !r.vacuous);
    let r = BoundReport::evaluate(spec, r.bound_value - 0.5, 0.5).unwrap();
    assert!(r.satisfied);
    let spec = BoundSpec::new(BoundRow::B1, 10, 10, 0.01).unwrap();
    let r = BoundReport::evaluate(spec, 0.0, 0.0).unwrap();
    assert!(r.vacuous && r.satisfied && r.bound_value == f64::NEG_INFINITY);
}

/// Least-squares slope of B2 against log₂ n for K = n^α and R = 1/(4K).
fn b2_slope(alpha: f64, exps: std::ops::RangeInclusive<u32>) -> f64 {
    let pts: Vec<(f64, f64)> = exps
        .map(|e| {
            let n = 1usize << e;
            let k = (n as f64).powf(alpha).round() as usize;
            (e as f64, bound(BoundRow::B2, n, k, 1.0 / (4.0 * k as f64)))
        })
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn b2_grows_like_log_n_over_k() {
    let s = b2_slope(0.5, 10..=20);
    assert!((s - 0.5).abs() <= 0.05 * 0.5, "{s}");
    // With K = n^0.9 the bracket n/(4K) − 1/√6 is tiny until n is huge.
    let s = b2_slope(0.9, 50..=60);
    assert!((s - 0.1).abs() <= 0.05 * 0.1, "{s}");
}

proptest! {
    #[test]
    fn rows_nondecreasing_in_r(n in 1usize..1_000_000, k in 1usize..1000, r1 in 0.0f64..1.0, r2 in 0.0f64..1.0) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        for row in BoundRow::ALL {
            let at = |r| {
                let s = BoundSpec::new(row, n, k, r).unwrap().with_density(DensityBounds { lower: 0.5, upper: 2.0 }).unwrap();
                table1_bound(&s).unwrap()
            };
            prop_assert!(at(lo) <= at(hi), "{row}");
        }
    }

    #[test]
    fn linear_rows_affine_in_n(n in 1usize..100_000, r in 0.0f64..1.0) {
        // L2 is exactly n·R − 1/√6.
        let l2 = bound(BoundRow::L2, n, 1, r);
        prop_assert!((l2 - (n as f64 * r - 1.0 / 6f64.sqrt())).abs() < 1e-9 * (1.0 + n as f64));
        prop_assert!(bound(BoundRow::L2, 2 * n, 1, r) >= l2);
    }

    #[test]
    fn matched_rows_dominate(n in 1usize..10_000_000, r in 0.0f64..1.0) {
        prop_assert!(bound(BoundRow::L2, n, 1, r) >= bound(BoundRow::L1, n, 1, r));
        let b2 = bound(BoundRow::B2, n, 1, r);
        prop_assert_eq!(b2, bound(BoundRow::E2, n, 1, r));
        prop_assert!(b2 >= bound(BoundRow::B1, n, 1, r));
    }

    #[test]
    fn constants_move_with_density_ratio(cf in 0.01f64..10.0, ratio in 1.0f64..50.0, bump in 1.0f64..4.0) {
        let (c1, c2) = log_bound_constants(cf, cf * ratio).unwrap();
        let (d1, d2) = log_bound_constants(cf, cf * ratio * bump).unwrap();
        prop_assert!(c1 > 0.0 && c2 >= 15.0 - 1e-9);
        prop_assert!(d1 <= c1 && d2 >= c2);
    }
}
