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

use libound::distributions::{sample_iid, CdfModel, MeasureSpec};
use libound::empirical::{
    cvm_ball_volume_probability, cvm_small_dev_probability, cvm_statistic, dkw_expected_bound, l1_deviation,
    l1_deviation_against, sup_deviation, KeySample,
};
use libound::Error;
use proptest::prelude::*;

fn unit() -> CdfModel {
    CdfModel::uniform(0.0, 1.0).unwrap()
}

#[test]
fn ecdf_examples() {
    let s = KeySample::from_keys(vec![3.0, 1.0, 2.0]).unwrap();
    assert_eq!(s.ecdf(2.5), 2.0 / 3.0);
    assert_eq!(s.ecdf(0.0), 0.0);
    assert_eq!(s.ecdf(3.0), 1.0);
    assert!(KeySample::from_keys(vec![]).is_err());
    assert!(KeySample::from_keys(vec![f64::NAN]).is_err());
}

#[test]
fn ecdf_fixed_points_and_ties() {
    let s = sample_iid(&unit(), 500, 3).unwrap();
    for (i, &k) in s.keys().iter().enumerate() {
        assert_eq!(s.ecdf(k), (i + 1) as f64 / 500.0);
    }
    let tied = KeySample::from_keys(vec![1.0, 2.0, 2.0, 3.0]).unwrap();
    assert_eq!(tied.count_le(2.0), 3);
    assert_eq!(tied.count_lt(2.0), 1);
}

#[test]
fn sup_deviation_examples() {
    let one = KeySample::from_keys(vec![0.5]).unwrap();
    assert_eq!(sup_deviation(&one, &unit()), 0.5);
    let grid = KeySample::from_keys((1..=9).map(|j| j as f64 / 10.0).collect()).unwrap();
    assert!((sup_deviation(&grid, &unit()) - 0.1).abs() < 1e-15);
    let s = sample_iid(&unit(), 40, 8).unwrap();
    assert_eq!(sup_deviation(&s, &s), 0.0);
}

/// `max_i max(|F(X_(i)) − i/n|, |F(X_(i)) − (i−1)/n|)` for continuous `F`.
fn sup_oracle(s: &KeySample, f: &CdfModel) -> f64 {
    let n = s.len() as f64;
    s.keys()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let v = f.cdf(x).unwrap();
            (v - (i + 1) as f64 / n).abs().max((v - i as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn l1_deviation_examples() {
    let one = KeySample::from_keys(vec![0.5]).unwrap();
    let v = l1_deviation(&one, &unit(), &MeasureSpec::Lebesgue, 100).unwrap();
    assert!((v - 0.25).abs() < 1e-14);
    assert!(matches!(l1_deviation(&one, &unit(), &MeasureSpec::Lebesgue, 99), Err(Error::Domain(_))));
    let s = sample_iid(&unit(), 30, 1).unwrap().with_support(0.0, 1.0).unwrap();
    assert_eq!(l1_deviation_against(&s, &s, &unit(), 100).unwrap(), 0.0);
}

#[test]
fn l1_below_sup_and_jensen_ordering() {
    let models = [unit(), CdfModel::truncated_logistic(0.5, 0.2, 0.0, 1.0).unwrap()];
    for seed in 0..100u64 {
        let m = &models[(seed % 2) as usize];
        let s = sample_iid(m, 1 + (seed as usize * 7) % 60, seed).unwrap();
        let sup = sup_deviation(&s, m);
        assert!((sup - sup_oracle(&s, m)).abs() < 1e-15);
        for mu in [MeasureSpec::Lebesgue, MeasureSpec::Matched] {
            assert!(l1_deviation(&s, m, &mu, 200).unwrap() <= sup + 1e-12);
        }
        let l1 = l1_deviation(&s, m, &MeasureSpec::Matched, 400).unwrap();
        let w2 = cvm_statistic(&s, m);
        assert!(w2 / s.len() as f64 >= l1 * l1 - 1e-12);
    }
}

#[test]
fn cvm_examples() {
    let one = KeySample::from_keys(vec![0.5]).unwrap();
    assert!((cvm_statistic(&one, &unit()) - 1.0 / 12.0).abs() < 1e-15);
    let two = KeySample::from_keys(vec![0.25, 0.75]).unwrap();
    assert!((cvm_statistic(&two, &unit()) - 1.0 / 24.0).abs() < 1e-15);
}

/// `n ∫ (F − F_n)² dF` by substituting `u = F(x)` and integrating exactly on
/// each step of the empirical CDF.
fn cvm_oracle(s: &KeySample, f: &CdfModel) -> f64 {
    let n = s.len();
    let mut us: Vec<f64> = s.keys().iter().map(|&x| f.cdf(x).unwrap()).collect();
    us.insert(0, 0.0);
    us.push(1.0);
    let mut total = 0.0;
    for j in 0..=n {
        let level = j as f64 / n as f64;
        let (a, b) = (us[j] - level, us[j + 1] - level);
        total += (b.powi(3) - a.powi(3)) / 3.0;
    }
    n as f64 * total
}

#[test]
fn cvm_closed_form_matches_integral() {
    let m = CdfModel::power_law(1.7).unwrap();
    for seed in 0..40u64 {
        let s = sample_iid(&m, 1 + seed as usize % 50, seed).unwrap();
        assert!((cvm_statistic(&s, &m) - cvm_oracle(&s, &m)).abs() < 1e-6);
    }
}

#[test]
fn cvm_probability_examples() {
    let p1 = cvm_small_dev_probability(1).unwrap();
    assert!(p1.is_exact());
    assert!((p1.value() - 2.0 / 12f64.sqrt()).abs() < 1e-12);
    let p5 = cvm_small_dev_probability(5).unwrap();
    assert!(p5.value() > 0.0 && p5.value() < 0.1);
    assert!(cvm_small_dev_probability(100).unwrap().value() < 1e-30);
    assert!(matches!(cvm_small_dev_probability(0), Err(Error::Domain(_))));
}

#[test]
fn cvm_probability_is_exact_up_to_six_and_then_the_ball_bound() {
    // n ≤ 3: the ball fits inside the simplex, so both agree.
    for n in 1..=3 {
        let exact = cvm_small_dev_probability(n).unwrap().value();
        assert!((exact - cvm_ball_volume_probability(n).unwrap()).abs() < 1e-12);
    }
    for n in 4..=6 {
        let p = cvm_small_dev_probability(n).unwrap();
        assert!(p.is_exact() && p.value() < cvm_ball_volume_probability(n).unwrap());
    }
    assert!(!cvm_small_dev_probability(7).unwrap().is_exact());
    let mut last = cvm_small_dev_probability(2).unwrap().value();
    for n in 3..=400 {
        let v = cvm_small_dev_probability(n).unwrap().value();
        assert!(v > 0.0 && v < last, "n = {n}");
        last = v;
    }
}

#[test]
fn cvm_probability_matches_monte_carlo_at_four() {
    let n = 4;
    let trials = 400_000;
    let draws = libound::distributions::draw_iid(&unit(), n * trials, 4242);
    let hits = draws
        .chunks(n)
        .filter(|c| {
            let s = KeySample::from_keys(c.to_vec()).unwrap();
            cvm_statistic(&s, &unit()) <= 1.0 / (6.0 * n as f64)
        })
        .count();
    let freq = hits as f64 / trials as f64;
    let p = cvm_small_dev_probability(n).unwrap().value();
    assert!((freq - p).abs() <= 3.3 * (p * (1.0 - p) / trials as f64).sqrt(), "{freq} vs {p}");
}

#[test]
fn dkw_examples() {
    assert!((dkw_expected_bound(1) - 1.2533141373155).abs() < 1e-12);
    assert!((dkw_expected_bound(100) - 0.12533141373155).abs() < 1e-12);
    assert!((dkw_expected_bound(100_000) - 0.0039633272976).abs() < 1e-12);
}

#[test]
fn dkw_statistical_check() {
    let n = 1000;
    let devs: Vec<f64> = (0..200u64).map(|t| sup_deviation(&sample_iid(&unit(), n, t).unwrap(), &unit())).collect();
    let mean = devs.iter().sum::<f64>() / 200.0;
    let sd = (devs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / 199.0).sqrt();
    assert!(mean <= dkw_expected_bound(n) + 3.0 * sd / 200f64.sqrt());
}

proptest! {
    #[test]
    fn deviation_norms_are_nonnegative(seed in 0u64..1000, n in 1usize..80) {
        let s = sample_iid(&unit(), n, seed).unwrap();
        let sup = sup_deviation(&s, &unit());
        let l1 = l1_deviation(&s, &unit(), &MeasureSpec::Lebesgue, 100).unwrap();
        prop_assert!(sup >= 0.0 && l1 >= 0.0 && l1 <= sup + 1e-12);
        prop_assert!(cvm_statistic(&s, &unit()) >= 1.0 / (12.0 * n as f64));
    }
}
