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

//! Piecewise approximation of CDFs in the L¹(μ) norm.
//!
//! Errors are in rank-fraction units. Multiplying by `n` to get positions is
//! left to the index and bound layers.

mod affine;
mod dp;

use std::fmt;
use std::str::FromStr;

use crate::distributions::{CdfModel, MeasureSpec};
use crate::error::{domain, Error, Result};
use crate::target::{l1_distance, Target};

pub use affine::best_affine_l1;
pub use dp::{
    optimal_p0_general, optimal_piecewise_dp, optimal_piecewise_dp_against, optimal_piecewise_dp_with_candidates,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Constant(f64),
    Affine { slope: f64, intercept: f64 },
}

impl Segment {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Segment::Constant(c) => c,
            Segment::Affine { slope, intercept } => slope * x + intercept,
        }
    }

    pub fn scaled(&self, factor: f64) -> Segment {
        match *self {
            Segment::Constant(c) => Segment::Constant(factor * c),
            Segment::Affine { slope, intercept } => {
                Segment::Affine { slope: factor * slope, intercept: factor * intercept }
            }
        }
    }
}

/// Per-segment model class: constants or affine functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelClass {
    P0,
    P1,
}

impl fmt::Display for ModelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelClass::P0 => "p0",
            ModelClass::P1 => "p1",
        })
    }
}

impl FromStr for ModelClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "p0" => Ok(ModelClass::P0),
            "p1" => Ok(ModelClass::P1),
            other => Err(Error::Parse(format!("unknown model class `{other}`"))),
        }
    }
}

/// `K` segments over `K + 1` strictly increasing breakpoints. Segment `k`
/// covers `[b_k, b_{k+1})`, the last one is closed, and points outside the
/// breakpoints use the nearest end segment.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseModel {
    breakpoints: Vec<f64>,
    segments: Vec<Segment>,
}

impl PiecewiseModel {
    pub fn new(breakpoints: Vec<f64>, segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() || breakpoints.len() != segments.len() + 1 {
            return domain(format!("{} breakpoints cannot bound {} segments", breakpoints.len(), segments.len()));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return domain("breakpoints must be finite and strictly increasing");
        }
        Ok(Self { breakpoints, segments })
    }

    /// A single segment over `[lo, hi]`.
    pub fn single(lo: f64, hi: f64, segment: Segment) -> Result<Self> {
        Self::new(vec![lo, hi], vec![segment])
    }

    pub fn k(&self) -> usize {
        self.segments.len()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn span(&self) -> (f64, f64) {
        (self.breakpoints[0], self.breakpoints[self.k()])
    }

    /// Index of the segment containing `x`, found without counting comparisons.
    pub fn segment_index(&self, x: f64) -> usize {
        let interior = &self.breakpoints[1..self.k()];
        interior.partition_point(|&b| b <= x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.segments[self.segment_index(x)].eval(x)
    }

    /// Left limit at `x`.
    pub fn eval_left(&self, x: f64) -> f64 {
        let interior = &self.breakpoints[1..self.k()];
        self.segments[interior.partition_point(|&b| b < x)].eval(x)
    }

    pub fn scaled(&self, factor: f64) -> PiecewiseModel {
        PiecewiseModel {
            breakpoints: self.breakpoints.clone(),
            segments: self.segments.iter().map(|s| s.scaled(factor)).collect(),
        }
    }
}

impl Target for PiecewiseModel {
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }

    fn value_left(&self, x: f64) -> f64 {
        self.eval_left(x)
    }

    fn support(&self) -> (f64, f64) {
        self.span()
    }

    fn kinks(&self) -> Vec<f64> {
        self.breakpoints[1..self.k()].to_vec()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxMethod {
    ClosedForm,
    DpOracle,
    /// Optimal scalar quantizer of the pushforward density.
    Quantizer,
    Interpolation,
    /// Direct numerical minimisation over a single affine segment.
    DirectSearch,
}

impl fmt::Display for ApproxMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ApproxMethod::ClosedForm => "closed",
            ApproxMethod::DpOracle => "dp",
            ApproxMethod::Quantizer => "lloyd",
            ApproxMethod::Interpolation => "interp",
            ApproxMethod::DirectSearch => "direct",
        })
    }
}

impl FromStr for ApproxMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "closed" => Ok(ApproxMethod::ClosedForm),
            "dp" => Ok(ApproxMethod::DpOracle),
            "lloyd" => Ok(ApproxMethod::Quantizer),
            "interp" => Ok(ApproxMethod::Interpolation),
            "direct" => Ok(ApproxMethod::DirectSearch),
            other => Err(Error::Parse(format!("unknown approximation method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxResult {
    pub model: PiecewiseModel,
    /// Continuous L¹(μ) distance between the model and the target.
    pub error: f64,
    pub method: ApproxMethod,
    /// The discretised objective the optimiser minimised, when there is one.
    pub grid_objective: Option<f64>,
}

pub const MIN_ERROR_GRID: usize = 1000;

fn check_span(model: &PiecewiseModel, measure: &CdfModel) -> Result<()> {
    let (lo, hi) = measure.support();
    let (a, b) = model.span();
    let tol = 1e-9 * (hi - lo);
    if a > lo + tol || b < hi - tol {
        return domain(format!("model spans [{a}, {b}] but the measure lives on [{lo}, {hi}]"));
    }
    Ok(())
}

/// `‖F − h‖_μ` with `grid` panels over the support, split at every breakpoint,
/// kink and crossing.
pub fn l1_error(model: &PiecewiseModel, target: &CdfModel, mu: &MeasureSpec, grid: usize) -> Result<f64> {
    let measure = mu.resolve(target)?;
    l1_error_against(model, target, &measure, grid)
}

/// [`l1_error`] for an arbitrary target and a resolved query measure.
pub fn l1_error_against<T: Target>(model: &PiecewiseModel, target: &T, measure: &CdfModel, grid: usize) -> Result<f64> {
    if grid < MIN_ERROR_GRID {
        return domain(format!("error grid must be at least {MIN_ERROR_GRID}, got {grid}"));
    }
    check_span(model, measure)?;
    Ok(l1_distance(target, model, measure, grid))
}

pub(crate) fn l1_error_unchecked<T: Target>(
    model: &PiecewiseModel,
    target: &T,
    measure: &CdfModel,
    grid: usize,
) -> f64 {
    l1_distance(target, model, measure, grid.max(MIN_ERROR_GRID))
}

/// Breakpoints at the `K`-quantiles and levels `(2k − 1)/(2K)`. Under the
/// matched measure the error is `1/(4K)` for every continuous `F`.
pub fn optimal_p0_matched(target: &CdfModel, k: usize) -> Result<ApproxResult> {
    if k == 0 {
        return domain("K must be at least 1");
    }
    let kf = k as f64;
    let mut breakpoints: Vec<f64> = (0..=k).map(|j| target.inverse_raw(j as f64 / kf)).collect();
    let (lo, hi) = target.support();
    breakpoints[0] = lo;
    breakpoints[k] = hi;
    if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Unsupported(format!("{target} has flat quantiles at K = {k}")));
    }
    let segments = (1..=k).map(|j| Segment::Constant((2 * j - 1) as f64 / (2.0 * kf))).collect();
    Ok(ApproxResult {
        model: PiecewiseModel::new(breakpoints, segments)?,
        error: 1.0 / (4.0 * kf),
        method: ApproxMethod::ClosedForm,
        grid_objective: None,
    })
}

/// `g(F⁻¹(y)) / f(F⁻¹(y))`, the density of `F(Q)` when `Q` has density `g`.
pub fn pushforward_density(data: &CdfModel, query: &CdfModel, y: f64) -> Result<f64> {
    if !(y > 0.0 && y < 1.0) {
        return domain(format!("pushforward density needs y in (0, 1), got {y}"));
    }
    let x = data.inverse_raw(y);
    let f = data.density_raw(x);
    if f <= 0.0 {
        return Err(Error::Singular(format!("data density vanishes at {x}")));
    }
    Ok(query.density_raw(x) / f)
}

/// Smoothness assumption behind an interpolation error ceiling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothness {
    /// `|F'| ≤ M`.
    Lipschitz(f64),
    /// `|F''| ≤ M`.
    C2(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationBound {
    pub result: ApproxResult,
    pub ceiling: f64,
}

const INTERPOLATION_GRID: usize = 4000;

/// The equal-width piecewise-linear interpolant of `target` through its values
/// at the `K + 1` partition points, measured under the uniform probability
/// measure on the support.
pub fn interpolation_upper_bound(target: &CdfModel, k: usize, smoothness: Smoothness) -> Result<InterpolationBound> {
    if k == 0 {
        return domain("K must be at least 1");
    }
    let (lo, hi) = target.support();
    let model = interpolant(target, lo, hi, k)?;
    let measure = CdfModel::uniform(lo, hi)?;
    let error = l1_error_against(&model, target, &measure, INTERPOLATION_GRID)?;
    let len = hi - lo;
    let kf = k as f64;
    let ceiling = match smoothness {
        Smoothness::Lipschitz(m) => m * len / kf,
        Smoothness::C2(m) => m * len * len / (6.0 * kf * kf),
    };
    if error > ceiling * (1.0 + 1e-9) + 1e-12 {
        return Err(Error::Invariant(format!(
            "interpolation error {error} exceeds the ceiling {ceiling}; the smoothness constant is wrong"
        )));
    }
    Ok(InterpolationBound {
        result: ApproxResult { model, error, method: ApproxMethod::Interpolation, grid_objective: None },
        ceiling,
    })
}

/// Endpoint interpolant of `target` on `K` equal-width cells of `[lo, hi]`.
pub fn interpolant<T: Target>(target: &T, lo: f64, hi: f64, k: usize) -> Result<PiecewiseModel> {
    let breakpoints: Vec<f64> =
        (0..=k).map(|j| if j == k { hi } else { lo + (hi - lo) * j as f64 / k as f64 }).collect();
    let segments = breakpoints
        .windows(2)
        .map(|w| {
            let (y0, y1) = (target.value(w[0]), target.value_left(w[1]));
            let slope = (y1 - y0) / (w[1] - w[0]);
            Segment::Affine { slope, intercept: y0 - slope * w[0] }
        })
        .collect();
    PiecewiseModel::new(breakpoints, segments)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzTransform {
    pub model: CdfModel,
    /// `F(1) + 2 − F(0)`, always in `[1, 3]`.
    pub normalizer: f64,
}

/// Turns a 1-Lipschitz function tabulated on a uniform grid over `[0, 1]` into
/// the CDF `(F(x) + 2x − F(0)) / (F(1) + 2 − F(0))`. The map is affine in `F`
/// up to an added linear term, so affine-fit errors shrink by exactly the
/// normalizer.
pub fn cdf_from_lipschitz(values: &[f64]) -> Result<LipschitzTransform> {
    if values.len() < 2 || values.iter().any(|v| !v.is_finite()) {
        return domain("need at least two finite values");
    }
    let cells = values.len() - 1;
    let dx = 1.0 / cells as f64;
    if let Some(j) = values.windows(2).position(|w| (w[1] - w[0]).abs() > dx + 1e-12) {
        return domain(format!("input is not 1-Lipschitz on cell {j}"));
    }
    let f0 = values[0];
    let normalizer = values[cells] + 2.0 - f0;
    let transformed = values
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let x = if j == cells { 1.0 } else { j as f64 * dx };
            (v + 2.0 * x - f0) / normalizer
        })
        .collect();
    Ok(LipschitzTransform { model: CdfModel::tabulated(transformed)?, normalizer })
}

/// `M = 2(K − 1)` and the staircase lower bound `1/(64(K − 1))` on the
/// piecewise-affine error with `K` segments.
pub fn adversarial_lower_bound(k: usize) -> Result<(usize, f64)> {
    if k < 2 {
        return domain("the adversarial construction needs K >= 2");
    }
    Ok((2 * (k - 1), 1.0 / (64.0 * (k - 1) as f64)))
}

/// `(M − K + 1)/(16 M²)`: the staircase bound for an arbitrary step count.
pub fn staircase_lower_bound(m: usize, k: usize) -> f64 {
    let (mf, kf) = (m as f64, k as f64);
    ((mf - kf + 1.0) / (16.0 * mf * mf)).max(0.0)
}
