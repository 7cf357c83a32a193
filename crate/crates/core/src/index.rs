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

//! A learned index over a sorted key array: piecewise prediction followed by a
//! step-counted local search for the exact rank.

use std::fmt;
use std::str::FromStr;

use crate::approx::{
    interpolant, optimal_p0_matched, optimal_piecewise_dp_with_candidates, ModelClass, PiecewiseModel, Segment,
};
use crate::distributions::{CdfModel, MeasureSpec};
use crate::empirical::KeySample;
use crate::error::{domain, Error, Result};
use crate::target::{Scaled, Target};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Linear,
    Exponential,
    Binary,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Linear, Strategy::Exponential, Strategy::Binary];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Linear => "linear",
            Strategy::Exponential => "exp",
            Strategy::Binary => "binary",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "linear" => Ok(Strategy::Linear),
            "exp" | "exponential" => Ok(Strategy::Exponential),
            "binary" => Ok(Strategy::Binary),
            other => Err(Error::Parse(format!("unknown search strategy `{other}`"))),
        }
    }
}

/// How the predictor is fitted.
#[derive(Debug, Clone, PartialEq)]
pub enum Fit {
    /// Equal-mass constants built from the source CDF. Piecewise-constant only.
    OptimalMatched,
    /// Grid-restricted optimum against the sample's own rank function.
    Dp { grid: usize, measure: MeasureSpec },
    /// Equal-width segments through the rank function at the segment ends
    /// (affine), or at their mean (constant).
    EqualWidthInterp,
}

/// The name of a [`Fit`] without its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitKind {
    Opt,
    Dp,
    Interp,
}

impl FitKind {
    pub fn with(self, grid: usize, measure: MeasureSpec) -> Fit {
        match self {
            FitKind::Opt => Fit::OptimalMatched,
            FitKind::Dp => Fit::Dp { grid, measure },
            FitKind::Interp => Fit::EqualWidthInterp,
        }
    }
}

impl fmt::Display for FitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitKind::Opt => "opt",
            FitKind::Dp => "dp",
            FitKind::Interp => "interp",
        })
    }
}

impl FromStr for FitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "opt" => Ok(FitKind::Opt),
            "dp" => Ok(FitKind::Dp),
            "interp" => Ok(FitKind::Interp),
            other => Err(Error::Parse(format!("unknown fit `{other}`"))),
        }
    }
}

/// Per-query cost. Routing is reported separately from local search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    pub rank: usize,
    pub routing_steps: u32,
    pub search_steps: u32,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnedIndex {
    sample: KeySample,
    model: PiecewiseModel,
    class: ModelClass,
    strategy: Strategy,
    sup_epsilon: f64,
    window: Option<usize>,
}

/// Resolves a query measure against a sample. Lebesgue means uniform on the
/// sample's support; matched needs the sample's source distribution.
pub fn resolve_measure(sample: &KeySample, mu: &MeasureSpec) -> Result<CdfModel> {
    let (lo, hi) = sample.support();
    match (mu, sample.source()) {
        (MeasureSpec::Lebesgue, _) => CdfModel::uniform(lo, hi),
        (_, Some(src)) => mu.resolve(src),
        (MeasureSpec::Matched, None) => Err(Error::Unsupported("a matched measure needs the sample's source".into())),
        (MeasureSpec::Explicit(m), None) => MeasureSpec::Explicit(m.clone()).resolve(&CdfModel::uniform(lo, hi)?),
    }
}

impl LearnedIndex {
    pub fn build(sample: KeySample, k: usize, class: ModelClass, strategy: Strategy, fit: &Fit) -> Result<Self> {
        let n = sample.len();
        if k == 0 || k > n {
            return domain(format!("K must lie in [1, n] = [1, {n}], got {k}"));
        }
        let (lo, hi) = sample.support();
        if !(lo < hi) {
            return domain("the key support is a single point");
        }
        let nf = n as f64;
        let rank_fn = Scaled { inner: &sample, factor: nf };
        let model = match fit {
            Fit::OptimalMatched => {
                if class != ModelClass::P0 {
                    return Err(Error::Unsupported("the equal-mass fit is piecewise-constant only".into()));
                }
                let src = sample
                    .source()
                    .ok_or_else(|| Error::Unsupported("the equal-mass fit needs the sample's source CDF".into()))?;
                optimal_p0_matched(src, k)?.model.scaled(nf)
            }
            Fit::Dp { grid, measure } => {
                let measure = resolve_measure(&sample, measure)?;
                // Constant fits can break exactly at the keys, where the rank
                // jumps. The affine cost matrix is quadratic in the node count,
                // so affine fits stay on the uniform grid.
                let keys = match class {
                    ModelClass::P0 => sample.distinct_keys(),
                    ModelClass::P1 => Vec::new(),
                };
                optimal_piecewise_dp_with_candidates(&rank_fn, k, class, &measure, *grid, &keys)?.model
            }
            Fit::EqualWidthInterp => {
                let affine = interpolant(&rank_fn, lo, hi, k)?;
                match class {
                    ModelClass::P1 => affine,
                    ModelClass::P0 => {
                        let segments = affine
                            .breakpoints()
                            .windows(2)
                            .map(|w| Segment::Constant(0.5 * (rank_fn.value(w[0]) + rank_fn.value_left(w[1]))))
                            .collect();
                        PiecewiseModel::new(affine.breakpoints().to_vec(), segments)?
                    }
                }
            }
        };
        Self::from_parts(sample, model, class, strategy)
    }

    /// Wraps an explicit model in position units.
    pub fn from_parts(sample: KeySample, model: PiecewiseModel, class: ModelClass, strategy: Strategy) -> Result<Self> {
        let mut index = Self { sample, model, class, strategy, sup_epsilon: 0.0, window: None };
        index.sup_epsilon = index.critical_sup();
        if strategy == Strategy::Binary {
            index.window = Some(index.sup_epsilon.ceil() as usize);
        }
        Ok(index)
    }

    pub fn sample(&self) -> &KeySample {
        &self.sample
    }

    pub fn model(&self) -> &PiecewiseModel {
        &self.model
    }

    pub fn class(&self) -> ModelClass {
        self.class
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// Half-width of the binary-search window, present for binary search only.
    pub fn window(&self) -> Option<usize> {
        self.window
    }

    pub fn n(&self) -> usize {
        self.sample.len()
    }

    fn clamp_query(&self, q: f64) -> f64 {
        let (lo, hi) = self.sample.support();
        q.clamp(lo, hi)
    }

    /// `h(q)` clamped to `[0, n]`, before rounding. Queries outside the key
    /// support are clamped onto it first.
    pub fn predict(&self, q: f64) -> f64 {
        self.model.eval(self.clamp_query(q)).clamp(0.0, self.n() as f64)
    }

    fn predict_left(&self, x: f64) -> f64 {
        self.model.eval_left(x).clamp(0.0, self.n() as f64)
    }

    /// `|h(q) − rank(q)|`.
    pub fn epsilon(&self, q: f64) -> f64 {
        (self.predict(q) - self.sample.count_le(q) as f64).abs()
    }

    /// `sup_q ε(q)`.
    pub fn worst_case_epsilon(&self) -> f64 {
        self.sup_epsilon
    }

    /// Between consecutive keys and breakpoints the rank is constant and the
    /// prediction monotone, so `ε` peaks at a value or left limit there.
    fn critical_sup(&self) -> f64 {
        let (lo, hi) = self.sample.support();
        let mut pts = self.sample.distinct_keys();
        pts.extend_from_slice(self.model.breakpoints());
        pts.push(lo);
        pts.push(hi);
        pts.into_iter()
            .filter(|&x| x >= lo && x <= hi)
            .map(|x| {
                let right = (self.predict_left_or_value(x, false) - self.sample.count_le(x) as f64).abs();
                let left = (self.predict_left_or_value(x, true) - self.sample.count_lt(x) as f64).abs();
                right.max(left)
            })
            .fold(0.0, f64::max)
    }

    fn predict_left_or_value(&self, x: f64, left: bool) -> f64 {
        if left {
            self.predict_left(x)
        } else {
            self.predict(x)
        }
    }

    /// Segment lookup by binary search over the interior breakpoints.
    fn route(&self, x: f64) -> (usize, u32) {
        let bps = self.model.breakpoints();
        let interior = &bps[1..bps.len() - 1];
        let (mut lo, mut hi, mut steps) = (0, interior.len(), 0);
        while lo < hi {
            let mid = (lo + hi) / 2;
            steps += 1;
            if interior[mid] <= x {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        (lo, steps)
    }

    /// The exact rank `#{keys ≤ q}` with its cost.
    pub fn rank(&self, q: f64) -> Result<CostBreakdown> {
        let x = self.clamp_query(q);
        let (seg, routing_steps) = self.route(x);
        let n = self.n();
        let h = self.model.segments()[seg].eval(x).clamp(0.0, n as f64);
        // Round half up.
        let p = ((h + 0.5).floor() as usize).min(n);
        let keys = self.sample.keys();
        let (rank, search_steps) = match self.strategy {
            Strategy::Linear => linear_search(keys, q, p),
            Strategy::Exponential => exponential_search(keys, q, p),
            Strategy::Binary => {
                let w = self.window.unwrap_or(n);
                window_search(keys, q, p.saturating_sub(w), (p + w).min(n))?
            }
        };
        Ok(CostBreakdown { rank, routing_steps, search_steps, epsilon: (h - rank as f64).abs() })
    }
}

/// `rank ≥ j`, i.e. `keys[j − 1] ≤ q`.
fn at_least(keys: &[f64], q: f64, j: usize) -> bool {
    j == 0 || keys[j - 1] <= q
}

/// One step per position moved, at least one.
fn linear_search(keys: &[f64], q: f64, p: usize) -> (usize, u32) {
    let n = keys.len();
    let mut r = p;
    if r < n && keys[r] <= q {
        while r < n && keys[r] <= q {
            r += 1;
        }
    } else {
        while r > 0 && keys[r - 1] > q {
            r -= 1;
        }
    }
    (r, (r.abs_diff(p) as u32).max(1))
}

/// Binary search for the rank inside `[lo, hi]`, which must contain it.
fn bracket_search(keys: &[f64], q: f64, mut lo: usize, mut hi: usize, steps: &mut u32) -> usize {
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        *steps += 1;
        if at_least(keys, q, mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// Galloping search from `p`: one or two comparisons pick the direction,
/// offsets 2, 4, 8, ... are probed until one overshoots, and the last bracket
/// is finished by binary search. Every array comparison is one step.
fn exponential_search(keys: &[f64], q: f64, p: usize) -> (usize, u32) {
    let n = keys.len();
    let mut steps = 0;
    let right = if p < n {
        steps += 1;
        keys[p] <= q
    } else {
        false
    };
    if right {
        // rank ≥ p + 1.
        let mut good = 1;
        let mut bad = None;
        while p + 2 * good <= n {
            steps += 1;
            if at_least(keys, q, p + 2 * good) {
                good *= 2;
            } else {
                bad = Some(2 * good);
                break;
            }
        }
        let hi = bad.map_or(n, |b| p + b - 1);
        let r = bracket_search(keys, q, p + good, hi, &mut steps);
        return (r, steps);
    }
    // rank ≤ p.
    if p == 0 {
        return (0, steps.max(1));
    }
    steps += 1;
    if keys[p - 1] <= q {
        return (p, steps);
    }
    // rank ≤ p − 1.
    let mut good = 1;
    let mut bad = None;
    while 2 * good <= p {
        steps += 1;
        if keys[p - 2 * good] > q {
            good *= 2;
        } else {
            bad = Some(2 * good);
            break;
        }
    }
    let lo = bad.map_or(0, |b| p - b + 1);
    let r = bracket_search(keys, q, lo, p - good, &mut steps);
    (r, steps)
}

/// Binary search over positions `[lo, hi]`, at least one step. The bracket is
/// checked without counting; a miss means the window was built wrong.
fn window_search(keys: &[f64], q: f64, lo: usize, hi: usize) -> Result<(usize, u32)> {
    let inside = at_least(keys, q, lo) && (hi == keys.len() || !at_least(keys, q, hi + 1));
    if !inside {
        return Err(Error::Invariant(format!("rank of {q} lies outside the search window [{lo}, {hi}]")));
    }
    let mut steps = 0;
    let r = bracket_search(keys, q, lo, hi, &mut steps);
    Ok((r, steps.max(1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_example_from_a_twelve_key_array() {
        let keys: Vec<f64> = (1..=12).map(f64::from).collect();
        assert_eq!(linear_search(&keys, 9.5, 3), (9, 6));
        assert_eq!(linear_search(&keys, 0.5, 0), (0, 1));
        assert_eq!(linear_search(&keys, 2.5, 9), (2, 7));
    }

    #[test]
    fn exponential_agrees_with_count_from_every_start() {
        let keys = [1.0, 2.0, 2.0, 2.0, 3.0, 5.0, 8.0, 8.0, 9.0, 12.0, 13.0];
        for qi in 0..30 {
            let q = qi as f64 * 0.5;
            let truth = keys.partition_point(|&k| k <= q);
            for p in 0..=keys.len() {
                let (r, steps) = exponential_search(&keys, q, p);
                assert_eq!(r, truth, "q {q} p {p}");
                assert!(steps >= 1);
            }
        }
    }

    #[test]
    fn window_search_detects_a_bad_window() {
        let keys = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(window_search(&keys, 2.5, 1, 3).unwrap().0, 2);
        assert!(matches!(window_search(&keys, 3.5, 0, 1), Err(Error::Invariant(_))));
        assert_eq!(window_search(&keys, 3.5, 3, 3).unwrap(), (3, 1));
    }
}
