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

//! Best single affine fit in L¹(μ) by seeded direct search.

use super::{ApproxMethod, ApproxResult, PiecewiseModel, Segment, MIN_ERROR_GRID};
use crate::distributions::CdfModel;
use crate::error::{domain, Result};
use crate::quad;
use crate::target::Target;

const SEED_SIDE: usize = 33;
const SEED_SLOPE_HALF_WIDTH: f64 = 4.0;
const RANGE_SAMPLES: usize = 65;
const SIMPLEX_TOL: f64 = 1e-10;
const MAX_SIMPLEX_STEPS: usize = 4000;

/// `∫_a^b |F(x) − v − s(x − m)| dμ(x)` with `m` the interval midpoint.
struct Objective<'a, T> {
    target: &'a T,
    measure: &'a CdfModel,
    pts: Vec<f64>,
    grid: usize,
    mid: f64,
}

impl<T: Target> Objective<'_, T> {
    fn eval(&self, v: f64, s: f64) -> f64 {
        let total = self.pts[self.pts.len() - 1] - self.pts[0];
        let line = |x: f64| v + s * (x - self.mid);
        self.pts
            .windows(2)
            .map(|p| {
                let d_hi = self.target.value_left(p[1]) - line(p[1]);
                quad::abs_integral(
                    p[0],
                    p[1],
                    quad::panels_for(p[1] - p[0], total, self.grid),
                    |x| self.target.value(x) - line(x),
                    d_hi,
                    |x| self.measure.density_raw(x),
                )
            })
            .sum()
    }
}

/// Nelder-Mead on a 2-D objective from an initial simplex.
fn nelder_mead(f: &impl Fn([f64; 2]) -> f64, start: [[f64; 2]; 3]) -> ([f64; 2], f64) {
    let mut simplex: Vec<([f64; 2], f64)> = start.iter().map(|&p| (p, f(p))).collect();
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    for _ in 0..MAX_SIMPLEX_STEPS {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(p, _)| (p[0] - simplex[0].0[0]).abs().max((p[1] - simplex[0].0[1]).abs()))
            .fold(0.0, f64::max);
        if diameter < SIMPLEX_TOL {
            break;
        }
        let centroid = lerp(simplex[0].0, simplex[1].0, 0.5);
        let worst = simplex[2];
        let reflected = lerp(worst.0, centroid, 2.0);
        let fr = f(reflected);
        if fr < simplex[0].1 {
            let expanded = lerp(worst.0, centroid, 3.0);
            let fe = f(expanded);
            simplex[2] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[1].1 {
            simplex[2] = (reflected, fr);
        } else {
            let (toward, base) = if fr < worst.1 { (reflected, fr) } else { (worst.0, worst.1) };
            let contracted = lerp(centroid, toward, 0.5);
            let fc = f(contracted);
            if fc < base {
                simplex[2] = (contracted, fc);
            } else {
                let best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    v.0 = lerp(best, v.0, 0.5);
                    v.1 = f(v.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0]
}

/// The L¹(μ)-optimal affine function on `[a, b]`.
///
/// Coordinates are normalised by the target's range on the interval, so the
/// search path, and hence the result, is equivariant under scaling the target.
pub fn best_affine_l1<T: Target>(target: &T, a: f64, b: f64, measure: &CdfModel, grid: usize) -> Result<ApproxResult> {
    if grid < MIN_ERROR_GRID {
        return domain(format!("affine fit grid must be at least {MIN_ERROR_GRID}, got {grid}"));
    }
    if !(a < b) {
        return domain(format!("empty interval [{a}, {b}]"));
    }
    let cuts = target.kinks().into_iter().chain(Target::kinks(measure));
    let mid = 0.5 * (a + b);
    let obj = Objective { target, measure, pts: quad::pieces(a, b, cuts), grid, mid };
    let len = b - a;

    let (ya, yb) = (target.value(a), target.value_left(b));
    let secant = (yb - ya) / len;
    let v0 = 0.5 * (ya + yb);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..RANGE_SAMPLES {
        let x = a + len * j as f64 / (RANGE_SAMPLES - 1) as f64;
        let y = target.value(x);
        lo = lo.min(y);
        hi = hi.max(y);
    }
    let range = hi - lo;
    let finish = |v: f64, s: f64, error: f64| -> Result<ApproxResult> {
        Ok(ApproxResult {
            model: PiecewiseModel::single(a, b, Segment::Affine { slope: s, intercept: v - s * mid })?,
            error,
            method: ApproxMethod::DirectSearch,
            grid_objective: None,
        })
    };
    if range == 0.0 {
        return finish(v0, 0.0, obj.eval(v0, 0.0));
    }

    let to_line = |p: [f64; 2]| (v0 + p[0] * range, secant + p[1] * range / len);
    let f = |p: [f64; 2]| {
        let (v, s) = to_line(p);
        obj.eval(v, s)
    };

    let mut seeds: Vec<[f64; 2]> = Vec::with_capacity(SEED_SIDE * SEED_SIDE + 1);
    let step = |j: usize| 2.0 * j as f64 / (SEED_SIDE - 1) as f64 - 1.0;
    for i in 0..SEED_SIDE {
        for j in 0..SEED_SIDE {
            seeds.push([step(i), SEED_SLOPE_HALF_WIDTH * step(j)]);
        }
    }
    // Line through the quartile points.
    let (q1, q3) = (target.value(a + 0.25 * len), target.value(a + 0.75 * len));
    seeds.push([(0.5 * (q1 + q3) - v0) / range, ((q3 - q1) / (0.5 * len) - secant) * len / range]);
    let (mut best, mut best_f) = (seeds[0], f64::INFINITY);
    for &p in &seeds {
        let v = f(p);
        if v < best_f {
            best = p;
            best_f = v;
        }
    }

    let du = 2.0 / (SEED_SIDE - 1) as f64;
    let dt = SEED_SLOPE_HALF_WIDTH * du;
    let mut point = best;
    let mut value = best_f;
    // A restart from the converged point guards against a collapsed simplex.
    for scale in [1.0, 0.1] {
        let start = [point, [point[0] + scale * du, point[1]], [point[0], point[1] + scale * dt]];
        let (p, v) = nelder_mead(&f, start);
        if v <= value {
            point = p;
            value = v;
        }
    }
    let (v, s) = to_line(point);
    finish(v, s, value)
}
