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

//! Numerical integration of `|d(x)| w(x)` over piecewise-smooth integrands.
//!
//! Every panel is integrated with three-point Gauss-Legendre, which never
//! evaluates the panel endpoints. Callers split the domain at every point where
//! `d` or `w` jumps, so the rule only ever sees smooth pieces. Sign changes of
//! `d` inside a panel are located by bisection and the panel is split there.

const GL_X: f64 = 0.774_596_669_241_483_4; // sqrt(3/5)
const GL_W_OUTER: f64 = 5.0 / 9.0;
const GL_W_INNER: f64 = 8.0 / 9.0;

/// Three-point Gauss-Legendre nodes and weights on `[lo, hi]`.
pub(crate) fn gauss3_nodes(lo: f64, hi: f64) -> [(f64, f64); 3] {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    [(mid - half * GL_X, half * GL_W_OUTER), (mid, half * GL_W_INNER), (mid + half * GL_X, half * GL_W_OUTER)]
}

pub(crate) fn gauss3<F: Fn(f64) -> f64>(lo: f64, hi: f64, f: F) -> f64 {
    gauss3_nodes(lo, hi).iter().map(|&(x, w)| w * f(x)).sum()
}

const BISECTION_STEPS: usize = 64;

fn root_in(mut lo: f64, mut hi: f64, mut d_lo: f64, d: &impl Fn(f64) -> f64) -> f64 {
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let d_mid = d(mid);
        if d_mid == 0.0 {
            return mid;
        }
        if (d_mid > 0.0) == (d_lo > 0.0) {
            lo = mid;
            d_lo = d_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `∫_lo^hi |d(x)| w(x) dx` using `panels` equal panels.
///
/// `d` must be continuous on the open interval; `d_hi` is its left limit at
/// `hi` (which may differ from `d(hi)` when the caller's piece ends at a jump).
pub(crate) fn abs_integral<D, W>(lo: f64, hi: f64, panels: usize, d: D, d_hi: f64, w: W) -> f64
where
    D: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
{
    if hi <= lo {
        return 0.0;
    }
    let panels = panels.max(1);
    let width = (hi - lo) / panels as f64;
    let integrand = |x: f64| d(x).abs() * w(x);
    let mut total = 0.0;
    let mut x0 = lo;
    let mut d0 = d(lo);
    for p in 0..panels {
        let x1 = if p + 1 == panels { hi } else { lo + width * (p + 1) as f64 };
        let d1 = if p + 1 == panels { d_hi } else { d(x1) };
        if d0 != 0.0 && d1 != 0.0 && (d0 > 0.0) != (d1 > 0.0) {
            let r = root_in(x0, x1, d0, &d);
            total += gauss3(x0, r, integrand) + gauss3(r, x1, integrand);
        } else {
            total += gauss3(x0, x1, integrand);
        }
        x0 = x1;
        d0 = d1;
    }
    total
}

/// Splits `[lo, hi]` at the given cut points, returning the sorted piece
/// boundaries (duplicates and points outside the open interval dropped).
pub(crate) fn pieces(lo: f64, hi: f64, cuts: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut pts: Vec<f64> = cuts.into_iter().filter(|&c| c > lo && c < hi).collect();
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Number of panels a piece of length `len` receives when the whole support of
/// length `total` is covered by `grid` panels.
pub(crate) fn panels_for(len: f64, total: f64, grid: usize) -> usize {
    ((grid as f64) * len / total).ceil().max(1.0) as usize
}
