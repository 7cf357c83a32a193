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

//! Empirical CDF of a key sample and its deviation from the population CDF.

use statrs::function::gamma::ln_gamma;

use crate::distributions::{CdfModel, MeasureSpec};
use crate::error::{domain, Result};
use crate::quad;
use crate::target::{l1_distance, Target};

/// `n` keys sorted ascending. Ties are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct KeySample {
    keys: Vec<f64>,
    seed: Option<u64>,
    source: Option<CdfModel>,
    support: (f64, f64),
}

impl KeySample {
    /// Sorts `keys`. The support is `[min, max]` of the keys.
    pub fn from_keys(mut keys: Vec<f64>) -> Result<Self> {
        if keys.is_empty() {
            return domain("a key sample needs at least one key");
        }
        if keys.iter().any(|k| !k.is_finite()) {
            return domain("keys must be finite");
        }
        keys.sort_by(f64::total_cmp);
        let support = (keys[0], keys[keys.len() - 1]);
        Ok(Self { keys, seed: None, source: None, support })
    }

    /// Replaces the support with `[lo, hi]`, which must contain every key.
    pub fn with_support(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= self.keys[0] && hi >= self.keys[self.keys.len() - 1]) {
            return domain(format!("support [{lo}, {hi}] does not contain all keys"));
        }
        self.support = (lo, hi);
        Ok(self)
    }

    pub(crate) fn from_model_draw(keys: Vec<f64>, seed: u64, model: CdfModel) -> Self {
        let support = model.support();
        Self { keys, seed: Some(seed), source: Some(model), support }
    }

    pub fn keys(&self) -> &[f64] {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// The distribution the keys were drawn from, if known.
    pub fn source(&self) -> Option<&CdfModel> {
        self.source.as_ref()
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// `#{keys ≤ q}`.
    pub fn count_le(&self, q: f64) -> usize {
        self.keys.partition_point(|&k| k <= q)
    }

    /// `#{keys < q}`.
    pub fn count_lt(&self, q: f64) -> usize {
        self.keys.partition_point(|&k| k < q)
    }

    /// `F_n(x)`, right-continuous.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.count_le(x) as f64 / self.len() as f64
    }

    /// Distinct key values in ascending order.
    pub fn distinct_keys(&self) -> Vec<f64> {
        let mut v = self.keys.clone();
        v.dedup();
        v
    }
}

impl Target for KeySample {
    fn value(&self, x: f64) -> f64 {
        self.ecdf(x)
    }

    fn value_left(&self, x: f64) -> f64 {
        self.count_lt(x) as f64 / self.len() as f64
    }

    fn support(&self) -> (f64, f64) {
        self.support
    }

    fn kinks(&self) -> Vec<f64> {
        self.distinct_keys()
    }
}

/// `‖F − F_n‖_∞`.
///
/// Between consecutive critical points `F_n` is constant and `F` monotone, so
/// the supremum is attained as a value or left limit at a key, a kink of `F`,
/// or a support endpoint.
pub fn sup_deviation<T: Target>(sample: &KeySample, model: &T) -> f64 {
    let (lo, hi) = model.support();
    let mut pts = sample.distinct_keys();
    pts.extend(model.kinks());
    pts.push(lo);
    pts.push(hi);
    pts.iter()
        .map(|&x| {
            let right = (model.value(x) - sample.value(x)).abs();
            let left = (model.value_left(x) - sample.value_left(x)).abs();
            right.max(left)
        })
        .fold(0.0, f64::max)
}

pub const MIN_DEVIATION_GRID: usize = 100;

/// `‖F − F_n‖_μ`, the L¹(μ) distance over the model support.
pub fn l1_deviation(sample: &KeySample, model: &CdfModel, mu: &MeasureSpec, grid: usize) -> Result<f64> {
    let measure = mu.resolve(model)?;
    l1_deviation_against(sample, model, &measure, grid)
}

/// [`l1_deviation`] against an arbitrary target and a resolved query measure.
pub fn l1_deviation_against<T: Target>(sample: &KeySample, target: &T, measure: &CdfModel, grid: usize) -> Result<f64> {
    if grid < MIN_DEVIATION_GRID {
        return domain(format!("deviation grid must be at least {MIN_DEVIATION_GRID}, got {grid}"));
    }
    Ok(l1_distance(target, sample, measure, grid))
}

/// `ω_n² = n ∫ (F − F_n)² dF` in closed form. `F` must be continuous.
pub fn cvm_statistic<T: Target>(sample: &KeySample, model: &T) -> f64 {
    let n = sample.len() as f64;
    let sum: f64 = sample
        .keys()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let d = model.value(x) - (2 * i + 1) as f64 / (2.0 * n);
            d * d
        })
        .sum();
    1.0 / (12.0 * n) + sum
}

/// The threshold `1/(6n)` used by [`cvm_small_dev_probability`].
pub fn cvm_threshold(n: usize) -> f64 {
    1.0 / (6.0 * n as f64)
}

/// `P(ω_n² ≤ 1/(6n))`, exact where the geometry allows it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvmProbability {
    value: f64,
    exact: bool,
}

impl CvmProbability {
    pub fn value(&self) -> f64 {
        self.value
    }

    /// False when `value` is only the ball-volume upper bound.
    pub fn is_exact(&self) -> bool {
        self.exact
    }
}

/// `ln V_m(ρ)`, the log volume of an `m`-ball of radius `ρ`.
fn ln_ball_volume(m: usize, rho: f64) -> f64 {
    let m = m as f64;
    0.5 * m * std::f64::consts::PI.ln() - ln_gamma(0.5 * m + 1.0) + m * rho.ln()
}

/// `n! · V_n(√(1/(12n)))`: the ball volume scaled by the order-statistic density.
/// An upper bound on [`cvm_small_dev_probability`] for every `n`.
pub fn cvm_ball_volume_probability(n: usize) -> Result<f64> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    let r = (1.0 / (12.0 * n as f64)).sqrt();
    Ok((ln_gamma(n as f64 + 1.0) + ln_ball_volume(n, r)).exp())
}

/// Volume of the part of an `n`-ball of radius `r` beyond a hyperplane at distance `d`.
fn cap_volume(n: usize, r: f64, d: f64) -> f64 {
    if d >= r {
        return 0.0;
    }
    if n == 1 {
        return r - d;
    }
    // x = r cos θ removes the square-root endpoint singularity.
    let top = (d / r).acos();
    let panels = 400;
    let h = top / panels as f64;
    (0..panels)
        .map(|p| {
            quad::gauss3(h * p as f64, h * (p + 1) as f64, |t| {
                let rho = r * t.sin();
                (ln_ball_volume(n - 1, rho)).exp() * rho
            })
        })
        .sum()
}

/// `P(ω_n² ≤ 1/(6n))` for `n` i.i.d. keys from a continuous `F`.
///
/// The event is a ball of radius `√(1/(12n))` about `((2i−1)/(2n))_i` inside
/// the ordered simplex, weighted by `n!`. For `n ≤ 6` only the facets
/// `u_1 ≥ 0` and `u_n ≤ 1` cut the ball and the two caps are disjoint, so the
/// value is exact. For larger `n` further facets cut the ball and the returned
/// value is the ball volume, an upper bound.
pub fn cvm_small_dev_probability(n: usize) -> Result<CvmProbability> {
    let ball = cvm_ball_volume_probability(n)?;
    if n > 6 {
        return Ok(CvmProbability { value: ball, exact: false });
    }
    let nf = n as f64;
    let r = (1.0 / (12.0 * nf)).sqrt();
    let d = 1.0 / (2.0 * nf);
    let caps = 2.0 * cap_volume(n, r, d) * (ln_gamma(nf + 1.0)).exp();
    Ok(CvmProbability { value: ball - caps, exact: true })
}

/// `√(π/(2n))`.
pub fn dkw_expected_bound(n: usize) -> f64 {
    (std::f64::consts::PI / (2.0 * n as f64)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationReport {
    pub sup_norm: f64,
    pub l1_norm: f64,
    pub cvm: f64,
}

pub fn deviation_report(
    sample: &KeySample,
    model: &CdfModel,
    mu: &MeasureSpec,
    grid: usize,
) -> Result<DeviationReport> {
    Ok(DeviationReport {
        sup_norm: sup_deviation(sample, model),
        l1_norm: l1_deviation(sample, model, mu, grid)?,
        cvm: cvm_statistic(sample, model),
    })
}
