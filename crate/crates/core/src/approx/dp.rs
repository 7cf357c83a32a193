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

//! Optimal `K`-segment fits with breakpoints restricted to a uniform grid.
//!
//! The support is cut into `G` equal panels and each panel carries three
//! Gauss-Legendre points weighted by the query density. A cell `(i, j)` is the
//! run of panels between grid nodes `i < j`; its cost is the exact discrete L¹
//! error of the best single constant or affine fit to the points it holds.

use rayon::prelude::*;

use super::{l1_error_unchecked, ApproxMethod, ApproxResult, ModelClass, PiecewiseModel, Segment, MIN_ERROR_GRID};
use crate::distributions::{CdfModel, MeasureSpec};
use crate::error::{domain, Error, Result};
use crate::quad;
use crate::target::Target;

/// Panels per segment the grid must provide.
pub const MIN_PANELS_PER_SEGMENT: usize = 20;

pub(crate) struct Discretized {
    nodes: Vec<f64>,
    xs: Vec<f64>,
    ws: Vec<f64>,
    ys: Vec<f64>,
}

impl Discretized {
    pub(crate) fn new<T: Target>(target: &T, lo: f64, hi: f64, grid: usize, density: impl FnMut(f64) -> f64) -> Self {
        Self::with_nodes(target, uniform_nodes(lo, hi, grid), density)
    }

    /// `nodes` must be strictly increasing.
    pub(crate) fn with_nodes<T: Target>(target: &T, nodes: Vec<f64>, mut density: impl FnMut(f64) -> f64) -> Self {
        let grid = nodes.len() - 1;
        let mut xs = Vec::with_capacity(3 * grid);
        let mut ws = Vec::with_capacity(3 * grid);
        for p in nodes.windows(2) {
            for (x, w) in quad::gauss3_nodes(p[0], p[1]) {
                xs.push(x);
                ws.push(w * density(x));
            }
        }
        let ys = xs.iter().map(|&x| target.value(x)).collect();
        Self { nodes, xs, ws, ys }
    }

    fn panels(&self) -> usize {
        self.nodes.len() - 1
    }
}

fn uniform_nodes(lo: f64, hi: f64, grid: usize) -> Vec<f64> {
    (0..=grid).map(|j| if j == grid { hi } else { lo + (hi - lo) * j as f64 / grid as f64 }).collect()
}

const INF: f64 = f64::INFINITY;

/// Prefix sums for O(log N) weighted-median cell costs of a nondecreasing target.
struct MedianCosts<'a> {
    ys: &'a [f64],
    w: Vec<f64>,
    wy: Vec<f64>,
}

impl<'a> MedianCosts<'a> {
    fn new(d: &'a Discretized) -> Result<Self> {
        if d.ys.windows(2).any(|p| p[1] < p[0]) {
            return Err(Error::Unsupported("piecewise-constant fits need a nondecreasing target".into()));
        }
        let mut w = vec![0.0; d.ys.len() + 1];
        let mut wy = vec![0.0; d.ys.len() + 1];
        for t in 0..d.ys.len() {
            w[t + 1] = w[t] + d.ws[t];
            wy[t + 1] = wy[t] + d.ws[t] * d.ys[t];
        }
        Ok(Self { ys: &d.ys, w, wy })
    }

    /// Cost and optimal level over panels `i..j`.
    fn cell(&self, i: usize, j: usize) -> (f64, f64) {
        let (s, e) = (3 * i, 3 * j);
        let total = self.w[e] - self.w[s];
        if total <= 0.0 {
            return (0.0, self.ys[(s + e) / 2]);
        }
        let half = self.w[s] + 0.5 * total;
        // First point whose cumulative weight reaches half the cell mass.
        let m = (s + self.w[s + 1..=e].partition_point(|&c| c < half)).min(e - 1);
        let c = self.ys[m];
        let below = c * (self.w[m] - self.w[s]) - (self.wy[m] - self.wy[s]);
        let above = (self.wy[e] - self.wy[m]) - c * (self.w[e] - self.w[m]);
        ((below + above).max(0.0), c)
    }
}

/// One DP layer by divide and conquer. Valid because interval k-median costs
/// satisfy the quadrangle inequality, so the leftmost argmin is monotone in `j`.
fn layer_monotone(prev: &[f64], k: usize, cost: &impl Fn(usize, usize) -> f64, cur: &mut [f64], arg: &mut [usize]) {
    #[allow(clippy::too_many_arguments)]
    fn solve(
        prev: &[f64],
        cost: &impl Fn(usize, usize) -> f64,
        cur: &mut [f64],
        arg: &mut [usize],
        jlo: usize,
        jhi: usize,
        ilo: usize,
        ihi: usize,
    ) {
        if jlo > jhi {
            return;
        }
        let mid = (jlo + jhi) / 2;
        let (mut best, mut bi) = (INF, ilo);
        for (i, &p) in prev.iter().enumerate().take(ihi.min(mid - 1) + 1).skip(ilo) {
            if p == INF {
                continue;
            }
            let v = p + cost(i, mid);
            if v < best {
                best = v;
                bi = i;
            }
        }
        cur[mid] = best;
        arg[mid] = bi;
        if mid > jlo {
            solve(prev, cost, cur, arg, jlo, mid - 1, ilo, bi);
        }
        solve(prev, cost, cur, arg, mid + 1, jhi, bi, ihi);
    }
    let g = prev.len() - 1;
    solve(prev, cost, cur, arg, k, g, k - 1, g - 1);
}

/// One DP layer by exhaustive search over the previous cut.
fn layer_plain(prev: &[f64], k: usize, cost: &impl Fn(usize, usize) -> f64, cur: &mut [f64], arg: &mut [usize]) {
    let g = prev.len() - 1;
    for j in k..=g {
        let (mut best, mut bi) = (INF, k - 1);
        for (i, &p) in prev.iter().enumerate().take(j).skip(k - 1) {
            if p == INF {
                continue;
            }
            let v = p + cost(i, j);
            if v < best {
                best = v;
                bi = i;
            }
        }
        cur[j] = best;
        arg[j] = bi;
    }
}

type Layer = fn(&[f64], usize, &dyn Fn(usize, usize) -> f64, &mut [f64], &mut [usize]);

/// Minimises the sum of cell costs over `K`-cell partitions of `0..=G`.
/// Returns the cut nodes (length `K + 1`) and the optimal objective.
fn partition(g: usize, k: usize, cost: &impl Fn(usize, usize) -> f64, layer: Layer) -> (Vec<usize>, f64) {
    let mut prev = vec![INF; g + 1];
    prev[0] = 0.0;
    let mut args = Vec::with_capacity(k);
    for layer_k in 1..=k {
        let mut cur = vec![INF; g + 1];
        let mut arg = vec![0; g + 1];
        layer(&prev, layer_k, cost, &mut cur, &mut arg);
        args.push(arg);
        prev = cur;
    }
    let mut cuts = vec![g];
    let mut j = g;
    for arg in args.iter().rev() {
        j = arg[j];
        cuts.push(j);
    }
    cuts.reverse();
    (cuts, prev[g])
}

fn monotone_layer(prev: &[f64], k: usize, cost: &dyn Fn(usize, usize) -> f64, cur: &mut [f64], arg: &mut [usize]) {
    layer_monotone(prev, k, &cost, cur, arg)
}

fn plain_layer(prev: &[f64], k: usize, cost: &dyn Fn(usize, usize) -> f64, cur: &mut [f64], arg: &mut [usize]) {
    layer_plain(prev, k, &cost, cur, arg)
}

/// Piecewise-constant optimum: cut nodes, levels, objective.
fn solve_p0(d: &Discretized, k: usize, exhaustive: bool) -> Result<(Vec<usize>, Vec<Segment>, f64)> {
    let costs = MedianCosts::new(d)?;
    let cost = |i: usize, j: usize| costs.cell(i, j).0;
    let layer = if exhaustive { plain_layer } else { monotone_layer };
    let (cuts, objective) = partition(d.panels(), k, &cost, layer);
    let segments = cuts.windows(2).map(|c| Segment::Constant(costs.cell(c[0], c[1]).1)).collect();
    Ok((cuts, segments, objective))
}

const GOLDEN_STEPS: usize = 60;

/// Exact weighted least-absolute-deviation line through the given points.
///
/// For a fixed slope the best intercept is a weighted median of the
/// residuals; the resulting cost is convex in the slope and the optimal slope
/// lies between the smallest and largest slope of adjacent points.
fn lad_fit(xs: &[f64], ys: &[f64], ws: &[f64], scratch: &mut Vec<(f64, f64)>) -> (f64, f64, f64) {
    let mut eval = |s: f64| -> (f64, f64) {
        scratch.clear();
        scratch.extend(xs.iter().zip(ys).zip(ws).map(|((&x, &y), &w)| (y - s * x, w)));
        scratch.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = scratch.iter().map(|p| p.1).sum();
        let mut acc = 0.0;
        let mut b = scratch[scratch.len() - 1].0;
        for &(r, w) in scratch.iter() {
            acc += w;
            if acc >= 0.5 * total {
                b = r;
                break;
            }
        }
        let cost = scratch.iter().map(|&(r, w)| w * (r - b).abs()).sum();
        (cost, b)
    };
    let (mut lo, mut hi) = (INF, -INF);
    for t in 1..xs.len() {
        let s = (ys[t] - ys[t - 1]) / (xs[t] - xs[t - 1]);
        lo = lo.min(s);
        hi = hi.max(s);
    }
    let mut best = {
        let (c, b) = eval(lo);
        (c, lo, b)
    };
    let consider = |s: f64, best: &mut (f64, f64, f64), eval: &mut dyn FnMut(f64) -> (f64, f64)| -> f64 {
        let (c, b) = eval(s);
        if c < best.0 {
            *best = (c, s, b);
        }
        c
    };
    if hi > lo {
        consider(hi, &mut best, &mut eval);
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut z) = (lo, hi);
        let mut p = z - phi * (z - a);
        let mut q = a + phi * (z - a);
        let mut fp = consider(p, &mut best, &mut eval);
        let mut fq = consider(q, &mut best, &mut eval);
        for _ in 0..GOLDEN_STEPS {
            if fp <= fq {
                z = q;
                q = p;
                fq = fp;
                p = z - phi * (z - a);
                fp = consider(p, &mut best, &mut eval);
            } else {
                a = p;
                p = q;
                fp = fq;
                q = a + phi * (z - a);
                fq = consider(q, &mut best, &mut eval);
            }
        }
    }
    best
}

/// Piecewise-affine optimum: cut nodes, segments, objective.
fn solve_p1(d: &Discretized, k: usize) -> (Vec<usize>, Vec<Segment>, f64) {
    let g = d.panels();
    // Row i holds the fits for cells (i, i+1..=g). Rows are independent, and
    // collecting them in order keeps the result identical to a serial fill.
    let rows: Vec<Vec<(f64, f64, f64)>> = (0..g)
        .into_par_iter()
        .map(|i| {
            let mut scratch = Vec::new();
            (i + 1..=g)
                .map(|j| {
                    let r = 3 * i..3 * j;
                    lad_fit(&d.xs[r.clone()], &d.ys[r.clone()], &d.ws[r], &mut scratch)
                })
                .collect()
        })
        .collect();
    let cost = |i: usize, j: usize| rows[i][j - i - 1].0;
    let (cuts, objective) = partition(g, k, &cost, plain_layer);
    let segments = cuts
        .windows(2)
        .map(|c| {
            let (_, slope, intercept) = rows[c[0]][c[1] - c[0] - 1];
            Segment::Affine { slope, intercept }
        })
        .collect();
    (cuts, segments, objective)
}

fn check_grid(k: usize, grid: usize) -> Result<()> {
    if k == 0 {
        return domain("K must be at least 1");
    }
    if grid < MIN_PANELS_PER_SEGMENT * k {
        return domain(format!(
            "grid {grid} is too coarse for K = {k}; need at least {} panels",
            MIN_PANELS_PER_SEGMENT * k
        ));
    }
    Ok(())
}

/// Grid-restricted optimum of the `K`-segment L¹(μ) fit of a CDF model.
pub fn optimal_piecewise_dp(
    target: &CdfModel,
    k: usize,
    class: ModelClass,
    mu: &MeasureSpec,
    grid: usize,
) -> Result<ApproxResult> {
    let measure = mu.resolve(target)?;
    optimal_piecewise_dp_against(target, k, class, &measure, grid)
}

/// [`optimal_piecewise_dp`] for an arbitrary target under a resolved measure.
/// Piecewise-constant fits require a nondecreasing target.
pub fn optimal_piecewise_dp_against<T: Target>(
    target: &T,
    k: usize,
    class: ModelClass,
    measure: &CdfModel,
    grid: usize,
) -> Result<ApproxResult> {
    optimal_piecewise_dp_with_candidates(target, k, class, measure, grid, &[])
}

/// [`optimal_piecewise_dp_against`] with extra candidate breakpoints merged
/// into the uniform grid, for example the jump points of an empirical CDF.
pub fn optimal_piecewise_dp_with_candidates<T: Target>(
    target: &T,
    k: usize,
    class: ModelClass,
    measure: &CdfModel,
    grid: usize,
    candidates: &[f64],
) -> Result<ApproxResult> {
    check_grid(k, grid)?;
    let (lo, hi) = measure.support();
    let mut nodes = uniform_nodes(lo, hi, grid);
    nodes.extend(candidates.iter().copied().filter(|&c| c > lo && c < hi));
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let d = Discretized::with_nodes(target, nodes, |x| measure.density_raw(x));
    let (cuts, segments, objective) = match class {
        ModelClass::P0 => solve_p0(&d, k, false)?,
        ModelClass::P1 => solve_p1(&d, k),
    };
    let breakpoints = cuts.iter().map(|&c| d.nodes[c]).collect();
    let model = PiecewiseModel::new(breakpoints, segments)?;
    let error = l1_error_unchecked(&model, target, measure, grid);
    Ok(ApproxResult { model, error, method: ApproxMethod::DpOracle, grid_objective: Some(objective) })
}

/// Optimal `K`-level fit of `F` under query density `g`, computed as an L¹
/// quantizer of the pushforward density `g(F⁻¹(y))/f(F⁻¹(y))` on `[0, 1]`
/// and mapped back through `F⁻¹`.
pub fn optimal_p0_general(data: &CdfModel, query: &CdfModel, k: usize, grid: usize) -> Result<ApproxResult> {
    check_grid(k, grid)?;
    if grid < MIN_ERROR_GRID {
        return domain(format!("quantizer grid must be at least {MIN_ERROR_GRID}, got {grid}"));
    }
    let measure = MeasureSpec::Explicit(query.clone()).resolve(data)?;
    let unit = CdfModel::uniform(0.0, 1.0)?;
    let mut singular = None;
    let d = Discretized::new(&unit, 0.0, 1.0, grid, |y| {
        let x = data.inverse_raw(y);
        let f = data.density_raw(x);
        if f <= 0.0 {
            singular.get_or_insert(x);
            return 0.0;
        }
        measure.density_raw(x) / f
    });
    if let Some(x) = singular {
        return Err(Error::Singular(format!("data density vanishes at {x}")));
    }
    let mass: f64 = d.ws.iter().sum();
    if (mass - 1.0).abs() > 1e-2 {
        return Err(Error::Resolution(format!("pushforward density integrates to {mass} on this grid; refine it")));
    }
    let charged = d.ws.chunks(3).filter(|c| c.iter().sum::<f64>() > 0.0).count();
    if charged < k {
        return Err(Error::Resolution(format!("only {charged} panels carry mass, fewer than K = {k}")));
    }
    let (cuts, segments, objective) = solve_p0(&d, k, false)?;
    let (lo, hi) = data.support();
    let breakpoints: Vec<f64> = cuts
        .iter()
        .map(|&c| match c {
            0 => lo,
            c if c == grid => hi,
            c => data.inverse_raw(d.nodes[c]),
        })
        .collect();
    let model = PiecewiseModel::new(breakpoints, segments)?;
    let error = l1_error_unchecked(&model, data, &measure, grid);
    Ok(ApproxResult { model, error, method: ApproxMethod::Quantizer, grid_objective: Some(objective) })
}
